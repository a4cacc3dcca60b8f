"""
Hermite expansions and the theta functions

    theta_nu(z)     = y^(1/4) sum_n h_nu(n sqrt(y)) e(n^2 x)
    Theta_f(z, phi) = y^(1/4) sum_h f_phi(h sqrt(y)) e(x h^2),
    f_phi           = sum_nu f^(nu) exp(-i (2 nu + 1) phi / 2) h_nu,

together with the automorphy factor j_g(z) of Gamma_0(4).

Sums are evaluated by the same kernels as the finite Gauss sums: a
rational x (Fraction / Rational) goes through the exact residue table,
a float x through the real-argument theta kernel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import kernels
from .hermite import hermite_function, hermite_functions, hermite_polynomial
from .numtheory import Rational, epsilon, jacobi_symbol
from .quadrature import QuadratureError, integrate
from .weights import HermiteWeight, WeightFunction

__all__ = [
    "HalfPlanePoint",
    "HermiteExpansion",
    "hermite_polynomial",
    "hermite_function",
    "hermite_coefficients",
    "theta_nu",
    "theta_terms",
    "automorphy_factor",
    "big_theta",
    "DEFAULT_NU_MAX",
]

DEFAULT_NU_MAX = 40

RealLike = Union[float, int, Fraction, Rational]


@dataclass(frozen=True)
class HalfPlanePoint:
    """z = x + iy with y > 0.  ``x`` may be an exact rational."""

    x: RealLike
    y: float

    def __post_init__(self):
        if not float(self.y) > 0.0:
            raise ValueError(f"y must be positive, got {self.y}")
        if isinstance(self.x, Rational):
            object.__setattr__(self, "x", self.x.as_fraction())

    @classmethod
    def from_complex(cls, z: complex) -> "HalfPlanePoint":
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(float(self.x), float(self.y))

    def __complex__(self) -> complex:
        return self.z


def _as_point(z) -> HalfPlanePoint:
    if isinstance(z, HalfPlanePoint):
        return z
    return HalfPlanePoint.from_complex(complex(z))


@dataclass(frozen=True)
class HermiteExpansion:
    """Coefficients f^(0..nu_max) of a weight in the basis h_nu."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("expansion needs at least one coefficient")

    @property
    def nu_max(self) -> int:
        return len(self.coeffs) - 1

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    def rotated(self, phi: float) -> np.ndarray:
        """Coefficients of f_phi: f^(nu) exp(-i (2 nu + 1) phi / 2)."""
        nu = np.arange(len(self.coeffs))
        return self.array * np.exp(-0.5j * (2 * nu + 1) * phi)

    def __call__(self, t, phi: float = 0.0):
        t = np.asarray(t, dtype=float)
        basis = hermite_functions(self.nu_max, t)
        c = self.array if phi == 0.0 else self.rotated(phi)
        out = np.tensordot(c, basis, axes=(0, 0))
        return out if out.ndim else out.item()

    def norm_sq(self) -> float:
        return float(np.sum(self.array ** 2))

    @property
    def cutoff(self) -> float:
        # past the last turning point of h_nu_max, Gaussian tail below 1e-16
        return math.sqrt((2 * self.nu_max + 1) / (2 * math.pi)) + 3.5

    def to_weight(self) -> HermiteWeight:
        return HermiteWeight(self.array, cutoff=self.cutoff)


def hermite_coefficients(f: WeightFunction, nu_max: int = DEFAULT_NU_MAX, *, tol: float = 1e-10) -> HermiteExpansion:
    """f^(nu) = int f h_nu for nu = 0..nu_max.

    Integrated over the support of f with panels split at its breakpoints,
    and cross-checked against a second Gauss-Legendre rule of different
    order; disagreement beyond ``tol`` raises QuadratureError.
    """
    if isinstance(f, HermiteWeight):
        c = np.zeros(nu_max + 1)
        k = min(nu_max + 1, len(f.coeffs))
        c[:k] = f.coeffs[:k]
        return HermiteExpansion(c)
    a, b = f.support

    def integrand(t):
        return (np.asarray(f(t))[None, :] * hermite_functions(nu_max, t)).T

    first = integrate(integrand, a, b, f.breakpoints, panels=8, order=20)
    second = integrate(integrand, a, b, f.breakpoints, panels=6, order=13)
    gap = float(np.max(np.abs(first - second)))
    if gap > tol:
        raise QuadratureError(f"Hermite coefficients disagree between rules by {gap:.3g}")
    return HermiteExpansion(first)


def _lattice_sum(x: RealLike, h0: int, weights) -> complex:
    """sum_j w_j e(x (h0 + j)^2) for real or complex weights."""
    weights = np.asarray(weights)
    parts = [weights.real] + ([weights.imag] if np.iscomplexobj(weights) else [])
    if isinstance(x, (Fraction, Rational)):
        x = Fraction(x.p, x.q) if isinstance(x, Rational) else x
        p, q = x.numerator, x.denominator
        vals = [kernels.gauss_sum_batch([p % q], q, h0, w)[0] for w in parts]
    else:
        vals = [kernels.theta_sum_batch(np.array([float(x)]), h0, w)[0] for w in parts]
    return complex(vals[0] + (1j * vals[1] if len(vals) > 1 else 0))


def theta_terms(y: float, nu: int = 0) -> int:
    """Default truncation: |n| <= ceil(8 sqrt(2 nu + 1) / sqrt(y)) + 8."""
    return math.ceil(8.0 * math.sqrt(2 * nu + 1) / math.sqrt(y)) + 8


def theta_nu(z, nu: int, n_max: int | None = None) -> complex:
    """y^(1/4) sum_{|n| <= n_max} h_nu(n sqrt(y)) e(n^2 x)."""
    z = _as_point(z)
    y = float(z.y)
    need = theta_terms(y, nu)
    if n_max is None:
        n_max = need
    elif n_max < need:
        raise ValueError(f"n_max={n_max} too small for y={y:g}; need at least {need}")
    n = np.arange(-n_max, n_max + 1, dtype=float)
    w = hermite_function(nu, n * math.sqrt(y))
    return y ** 0.25 * _lattice_sum(z.x, -n_max, w)


def _entries(g):
    if hasattr(g, "a"):
        return g.a, g.b, g.c, g.d
    (a, b), (c, d) = g
    return a, b, c, d


def automorphy_factor(g, z) -> complex:
    """j_g(z) = eps_d^-1 (c/d) ((cz + d)/|cz + d|)^(1/2), principal root, g in Gamma_0(4)."""
    a, b, c, d = (int(v) for v in _entries(g))
    if a * d - b * c != 1 or c % 4 != 0:
        raise ValueError(f"{[[a, b], [c, d]]} is not in Gamma_0(4)")
    w = c * _as_point(z).z + d
    root = cmath.sqrt(w / abs(w))
    return complex(epsilon(d).conjugate()) * int(jacobi_symbol(c, d)) * root


def big_theta(f, point, n_max: int | None = None, *, nu_max: int = DEFAULT_NU_MAX) -> complex:
    """Theta_f(z, phi) = y^(1/4) sum_h f_phi(h sqrt(y)) e(x h^2).

    ``f`` is a HermiteExpansion or a WeightFunction.  For phi = 0 a weight is
    summed directly (f_0 = f); otherwise it is expanded to order ``nu_max``.
    ``point`` is a MetaplecticPoint or a (z, phi) pair.
    """
    if hasattr(point, "phi"):
        z, phi = point.z, float(point.phi)
    else:
        z, phi = point
        phi = float(phi)
    z = _as_point(z)
    y = float(z.y)
    sy = math.sqrt(y)
    direct = isinstance(f, WeightFunction) and math.remainder(phi, 4 * math.pi) == 0.0
    if not direct and not isinstance(f, HermiteExpansion):
        f = hermite_coefficients(f, nu_max)
    lo, hi = f.support if direct else (-f.cutoff, f.cutoff)
    h_lo, h_hi = math.ceil(lo / sy), math.floor(hi / sy)
    need = max(abs(h_lo), abs(h_hi))
    if n_max is not None and n_max < need:
        raise ValueError(f"n_max={n_max} too small; the weight reaches |h| = {need}")
    if h_hi < h_lo:
        return 0j
    t = np.arange(h_lo, h_hi + 1, dtype=float) * sy
    w = np.asarray(f(t), dtype=float) if direct else f(t, phi)
    return y ** 0.25 * _lattice_sum(z.x, h_lo, w)
