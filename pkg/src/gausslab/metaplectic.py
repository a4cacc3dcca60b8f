"""
SL(2,R), its universal cover, the theta group Delta_1(4), the explicit lifts
of rational horocycle points, and SL(2,Z) reduction.

Cover elements are pairs [g, beta_g] with beta_g a continuous argument of
cz + d on H.  Because cz + d stays in one open half-plane (c != 0) or is a
nonzero real constant (c = 0), the principal argument of cz + d is itself
continuous on H and beta_g differs from it by a constant multiple of 2 pi.
An element therefore only stores beta_g(i); beta_g(z) is recovered as

    beta_g(z) = Arg(cz + d) + (beta_g(i) - Arg(ci + d)).

Points (z, phi) of H x R correspond to [n(x) a(y) k(-phi), phi]; the group
acts by [g, beta] (z, phi) = (gz, phi + beta(z)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from .numtheory import SignFactor, epsilon, jacobi_symbol, mod_inverse
from .theta import HalfPlanePoint

__all__ = [
    "RealMatrix2",
    "MetaplecticPoint",
    "MetaplecticElement",
    "moebius",
    "iwasawa_decompose",
    "iwasawa_compose",
    "meta_identity",
    "meta_multiply",
    "meta_inverse",
    "meta_act",
    "gamma0_tilde",
    "n_minus",
    "n_plus",
    "delta14_element",
    "in_delta14",
    "LiftResult",
    "lift_rational",
    "verify_lift",
    "phi_from_sign",
    "sign_class",
    "reduce_to_fundamental_domain",
    "reduce_points",
    "ReductionError",
]

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class ReductionError(RuntimeError):
    pass


@dataclass(frozen=True)
class RealMatrix2:
    """[[a, b], [c, d]] with determinant 1.  Entries may be int or Fraction."""

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det - 1) > 1e-12:
            raise ValueError(f"determinant {det} != 1")

    @classmethod
    def of(cls, rows) -> "RealMatrix2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def __matmul__(self, o: "RealMatrix2") -> "RealMatrix2":
        return RealMatrix2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                           self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> "RealMatrix2":
        return RealMatrix2(self.d, -self.b, -self.c, self.a)

    def det(self):
        return self.a * self.d - self.b * self.c

    def is_integral(self) -> bool:
        return all(float(v) == int(v) for v in (self.a, self.b, self.c, self.d))

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def array(self) -> np.ndarray:
        return np.array([[float(self.a), float(self.b)], [float(self.c), float(self.d)]])


IDENTITY = RealMatrix2(1, 0, 0, 1)


def _z(z) -> complex:
    return complex(z.z) if isinstance(z, HalfPlanePoint) else complex(z)


def _bottom(g: RealMatrix2, z: complex) -> complex:
    return float(g.c) * z + float(g.d)


def _arg_bottom(g: RealMatrix2, z: complex) -> float:
    """Principal Arg(cz + d); exact 0 or pi when c = 0 (no -0.0 surprises)."""
    if g.c == 0:
        return 0.0 if g.d > 0 else math.pi
    return cmath.phase(_bottom(g, z))


def moebius(g: RealMatrix2, z) -> HalfPlanePoint:
    """gz = (az + b)/(cz + d); Im(gz) = y/|cz + d|^2."""
    if abs(g.det() - 1) > 1e-12:
        raise ValueError("moebius needs det g = 1")
    w = _z(z)
    den = _bottom(g, w)
    x = (float(g.a) * w + float(g.b)) / den
    y = w.imag / abs(den) ** 2
    return HalfPlanePoint(x.real, y)


def iwasawa_compose(x: float, y: float, phi: float) -> RealMatrix2:
    """n(x) a(y) k(phi), k(phi) = [[cos, sin], [-sin, cos]]."""
    if y <= 0:
        raise ValueError("y must be positive")
    r = math.sqrt(y)
    c, s = math.cos(phi), math.sin(phi)
    # n(x) a(y) = [[r, x/r], [0, 1/r]]
    return RealMatrix2(r * c - x / r * s, r * s + x / r * c, -s / r, c / r)


def iwasawa_decompose(g: RealMatrix2) -> Tuple[float, float, float]:
    """(x, y, phi) with g = n(x) a(y) k(phi), phi in [0, 2 pi)."""
    w = moebius(g, 1j)
    phi = (-_arg_bottom(g, 1j)) % TWO_PI
    return float(w.x), float(w.y), phi


@dataclass(frozen=True)
class MetaplecticPoint:
    z: HalfPlanePoint
    phi: float

    @classmethod
    def of(cls, z, phi: float) -> "MetaplecticPoint":
        return cls(z if isinstance(z, HalfPlanePoint) else HalfPlanePoint.from_complex(complex(z)), float(phi))

    def phi_class(self) -> float:
        """phi reduced to (-2 pi, 2 pi]."""
        return _canonical_phi(self.phi)

    def close_to(self, other: "MetaplecticPoint", tol: float = 1e-10) -> bool:
        d = (self.phi - other.phi) / FOUR_PI
        return abs(self.z.z - other.z.z) < tol and abs(d - round(d)) * FOUR_PI < tol


def _canonical_phi(phi: float) -> float:
    r = math.remainder(phi, FOUR_PI)
    return r + FOUR_PI if r <= -TWO_PI else r


@dataclass(frozen=True)
class MetaplecticElement:
    """[g, beta_g] stored through g and beta_g(i)."""

    g: RealMatrix2
    beta_at_i: float

    def __post_init__(self):
        w = _bottom(self.g, 1j)
        if abs(cmath.exp(1j * self.beta_at_i) - w / abs(w)) > 1e-10:
            raise ValueError("beta_at_i is not an argument of ci + d")

    @property
    def winding(self) -> int:
        """(beta_g(i) - Arg(ci + d)) / (2 pi), an integer."""
        return round((self.beta_at_i - _arg_bottom(self.g, 1j)) / TWO_PI)

    def beta(self, z) -> float:
        return _arg_bottom(self.g, _z(z)) + TWO_PI * self.winding

    def __matmul__(self, other: "MetaplecticElement") -> "MetaplecticElement":
        return meta_multiply(self, other)

    def __call__(self, point: MetaplecticPoint) -> MetaplecticPoint:
        return meta_act(self, point)


def meta_identity() -> MetaplecticElement:
    return MetaplecticElement(IDENTITY, 0.0)


def _lift(g: RealMatrix2, winding: int = 0) -> MetaplecticElement:
    return MetaplecticElement(g, _arg_bottom(g, 1j) + TWO_PI * winding)


def meta_multiply(u: MetaplecticElement, v: MetaplecticElement) -> MetaplecticElement:
    """[g, b][g', b'] = [g g', b(g' .) + b']; stored value b(g' i) + b'(i)."""
    g = u.g @ v.g
    beta = u.beta(moebius(v.g, 1j)) + v.beta_at_i
    # re-anchor on the exact principal value so rounding cannot accumulate
    k = round((beta - _arg_bottom(g, 1j)) / TWO_PI)
    return MetaplecticElement(g, _arg_bottom(g, 1j) + TWO_PI * k)


def meta_inverse(u: MetaplecticElement) -> MetaplecticElement:
    """[g, b]^-1 = [g^-1, -b(g^-1 .)]."""
    gi = u.g.inverse()
    beta = -u.beta(moebius(gi, 1j))
    k = round((beta - _arg_bottom(gi, 1j)) / TWO_PI)
    return MetaplecticElement(gi, _arg_bottom(gi, 1j) + TWO_PI * k)


def meta_act(u: MetaplecticElement, point: MetaplecticPoint) -> MetaplecticPoint:
    return MetaplecticPoint(moebius(u.g, point.z), point.phi + u.beta(point.z))


def point_element(point: MetaplecticPoint) -> MetaplecticElement:
    """The element [n(x) a(y) k(-phi), phi] carrying (i, 0) to ``point``."""
    g = iwasawa_compose(float(point.z.x), float(point.z.y), -point.phi)
    return MetaplecticElement(g, point.phi)


def gamma0_tilde() -> MetaplecticElement:
    """[[0, -1/2], [2, 0]] with beta(z) = Arg z; beta(i) = pi/2."""
    return MetaplecticElement(RealMatrix2(0, Fraction(-1, 2), 2, 0), math.pi / 2)


def n_minus(x) -> MetaplecticElement:
    """[[1, 0], [x, 1]] on the sheet continuous to the identity at x = 0."""
    return _lift(RealMatrix2(1, 0, x, 1))


def n_plus(x) -> MetaplecticElement:
    """Horizontal translation z -> z + x with beta = 0."""
    return MetaplecticElement(RealMatrix2(1, x, 0, 1), 0.0)


# ------------------------------------------------------------ Delta_1(4)

def _theta_group_winding(g: RealMatrix2) -> int:
    # e^{i beta/2} = (c/d) e^{i Arg(cz+d)/2}: add 2 pi exactly when (c/d) = -1
    return 1 if int(jacobi_symbol(int(g.c), int(g.d))) == -1 else 0


def _check_gamma14(g: RealMatrix2) -> None:
    if not g.is_integral() or g.det() != 1:
        raise ValueError(f"{g.rows()} is not an integer matrix of determinant 1")
    a, c, d = int(g.a), int(g.c), int(g.d)
    if c % 4 or a % 4 != 1 or d % 4 != 1:
        raise ValueError(f"{g.rows()} is not in Gamma_1(4)")


def delta14_element(g: RealMatrix2) -> MetaplecticElement:
    """The lift of g in Gamma_1(4) lying in Delta_1(4)."""
    _check_gamma14(g)
    return _lift(g, _theta_group_winding(g))


def in_delta14(u: MetaplecticElement, tol: float = 1e-9) -> bool:
    try:
        _check_gamma14(u.g)
    except ValueError:
        return False
    want = _arg_bottom(u.g, 1j) + TWO_PI * _theta_group_winding(u.g)
    r = (u.beta_at_i - want) / FOUR_PI
    return abs(r - round(r)) < tol


# ---------------------------------------------------------------- lifts

def phi_from_sign(s: SignFactor) -> float:
    """phi in (-2 pi, 2 pi] with exp(i phi/2) = s exp(-i pi/4), s in {+-1, +-i}."""
    table = {1: -math.pi / 2, 1j: math.pi / 2, -1: 1.5 * math.pi, -1j: -1.5 * math.pi}
    return table[SignFactor(s).value]


@dataclass(frozen=True)
class LiftResult:
    """Explicit equivalence of (p/q + iy, 0) with ``target`` under the theta group.

    ``witness`` is the Delta_1(4) element of the construction and
    ``composite`` maps ``target`` onto (p/q + iy, 0) up to phi in 4 pi Z:
    witness^-1 (after an integer translation) in case i,
    n(k) witness gamma0~ in case ii, and n(1/2) of the case ii composite
    for (p0, q0) in case iii.
    """

    case: str
    p: int
    q: int
    y: float
    target: MetaplecticPoint
    phi_pq: float
    witness: MetaplecticElement
    composite: MetaplecticElement
    shift: Fraction
    sign: SignFactor


def _solve_bottom_row(c: int, d: int) -> RealMatrix2:
    """[[a, b], [c, d]] in Gamma_1(4) (d = 1 mod 4) with the smallest |b|."""
    if c == 0:
        return RealMatrix2(1, 0, 0, 1)
    a = mod_inverse(d % abs(c), abs(c))
    b = (a * d - 1) // c
    # (a + t c, b + t d) keeps the determinant
    t = -round(Fraction(b, d))
    a, b = a + t * c, b + t * d
    if a % 4 != 1:
        raise RuntimeError("constructed matrix is not in Gamma_1(4)")
    return RealMatrix2(a, b, c, d)


def _translate_to(target_x: Fraction, image_x: Fraction) -> int:
    k = target_x - image_x
    if k.denominator != 1:
        raise RuntimeError(f"image {image_x} is not congruent to {target_x} mod 1")
    return int(k)


def _lift_odd(p: int, q: int, y: float):
    pp = (-mod_inverse(4 * p % q, q)) % q if q > 1 else 0
    yp = 1.0 / (4.0 * q * q * y)
    c, d = (4 * pp, q) if q % 4 == 1 else (-4 * pp, -q)
    g = _solve_bottom_row(c, d)
    witness = delta14_element(g)
    core = meta_multiply(witness, gamma0_tilde())
    # image of pp/q under g gamma0 is b/d
    k = _translate_to(Fraction(p, q), Fraction(int(g.b), d))
    composite = meta_multiply(n_plus(k), core)
    sign = epsilon(q).conjugate() * jacobi_symbol(p, q)
    return Fraction(pp, q), yp, witness, composite, sign


def lift_rational(p: int, q: int, y: float) -> LiftResult:
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")
    if not y > 0:
        raise ValueError("y must be positive")
    if q % 4 == 0:
        c, d = (q, -p) if p % 4 == 3 else (-q, p)
        g = _solve_bottom_row(c, d)
        witness = delta14_element(g)
        image_x = Fraction(int(g.a), c)
        tx = image_x % 1
        composite = meta_multiply(meta_inverse(witness), n_plus(-_translate_to(tx, image_x)))
        sign = epsilon(p) * jacobi_symbol(q, p % q)
        phi = phi_from_sign(sign)
        target = MetaplecticPoint(HalfPlanePoint(tx, 1.0 / (q * q * y)), phi)
        return LiftResult("i", p, q, y, target, phi, witness, composite, Fraction(0), sign)
    if q % 2 == 1:
        tx, yp, witness, composite, sign = _lift_odd(p, q, y)
        phi = phi_from_sign(sign)
        target = MetaplecticPoint(HalfPlanePoint(tx, yp), phi)
        return LiftResult("ii", p, q, y, target, phi, witness, composite, Fraction(0), sign)
    q0 = q // 2
    if (2 * p - q) % 4:
        # cannot happen for odd p; kept as a guard on the construction
        raise RuntimeError(f"4 does not divide 2p - q for (p, q) = ({p}, {q})")
    p0 = (2 * p - q) // 4
    tx, yp, witness, composite, sign = _lift_odd(p0, q0, y)
    composite = meta_multiply(n_plus(Fraction(1, 2)), composite)
    phi = phi_from_sign(sign)
    target = MetaplecticPoint(HalfPlanePoint(tx, yp), phi)
    return LiftResult("iii", p, q, y, target, phi, witness, composite, Fraction(1, 2), sign)


def verify_lift(res: LiftResult) -> Tuple[float, float]:
    """(z error, phi residual in units of 4 pi) of composite(target) vs (p/q + iy, 0).

    A valid lift has z error near rounding level and an integral residual.
    """
    image = meta_act(res.composite, res.target)
    z_err = abs(image.z.z - complex(res.p / res.q, res.y))
    return z_err, image.phi / FOUR_PI


def sign_class(p: int, q: int) -> Tuple[float, SignFactor]:
    """(phi_{p,q} in (-2 pi, 2 pi], Gauss-sum sign).

    The sign is eps_p^-1 (q/p) for q = 0 mod 4 (so g_1(p, q) = (1+i) s sqrt(q)),
    (p/q) for odd q, and (2p/q0) = (p0/q0) with q0 = q/2 for q = 2 mod 4.
    """
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")
    if q % 4 == 0:
        s = epsilon(p % q)
        t = jacobi_symbol(q, p % q)
        return phi_from_sign(s * t), s.conjugate() * t
    if q % 2 == 1:
        t = jacobi_symbol(p, q)
        return phi_from_sign(epsilon(q).conjugate() * t), t
    q0 = q // 2
    t = jacobi_symbol(2 * p, q0)
    return phi_from_sign(epsilon(q0).conjugate() * t), t


# ------------------------------------------------------------ reduction

_S = RealMatrix2(0, -1, 1, 0)


def reduce_to_fundamental_domain(z, max_iter: int = 10_000) -> Tuple[HalfPlanePoint, RealMatrix2]:
    """(z*, word) with z* = word z in {|Re z| <= 1/2, |z| >= 1}."""
    w = _z(z)
    if w.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    word = IDENTITY
    for _ in range(max_iter):
        n = math.floor(w.real + 0.5)
        if n:
            w -= n
            word = RealMatrix2(1, -n, 0, 1) @ word
        if abs(w) ** 2 < 1.0:
            w = -1.0 / w
            word = _S @ word
        else:
            return HalfPlanePoint(w.real, w.imag), word
    raise ReductionError(f"no reduction of {z} within {max_iter} steps")


def reduce_points(zs, max_iter: int = 10_000) -> np.ndarray:
    """Vectorized reduction of an array of points; returns reduced points."""
    w = np.array(zs, dtype=complex)
    if np.any(w.imag <= 0):
        raise ValueError("points must lie in the upper half-plane")
    active = np.ones(w.shape, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            return w
        sub = w[active]
        sub = sub - np.floor(sub.real + 0.5)
        inside = np.abs(sub) ** 2 < 1.0
        sub = np.where(inside, -1.0 / np.where(inside, sub, 1.0), sub)
        w[active] = sub
        idx = np.flatnonzero(active)
        active[idx[~inside]] = False
    raise ReductionError(f"reduction did not finish within {max_iter} steps")
