"""
Finite exponential sums: incomplete and classical Gauss sums, theta sums,
Kloosterman / twisted Kloosterman / Salie sums and their sign-class
restrictions, the mean square of incomplete Gauss sums, and the periodic
long sums g_phi(p, q) with their limit functions G_phi.

Phases e_q(p h^2) are read from a table of q-th roots of unity indexed by
p*h^2 mod q, with h^2 mod q updated incrementally inside the kernels.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .numtheory import (
    Rational,
    SignFactor,
    coprime_residues,
    divisor_count,
    epsilon,
    interval_measure,
    jacobi_symbol,
    mod_inverse,
    totient,
)
from .weights import Indicator, PeriodicWeight, WeightFunction, unit_indicator

__all__ = [
    "SumValue",
    "incomplete_gauss_sum",
    "incomplete_gauss_sums",
    "theta_sum",
    "theta_sums",
    "classical_gauss_sum_direct",
    "classical_gauss_sum_closed",
    "kloosterman",
    "twisted_kloosterman",
    "salie",
    "restricted_character_sum",
    "restricted_via_kloosterman",
    "kloosterman_table",
    "weil_bound",
    "mean_square",
    "mean_square_prime_formula",
    "long_gauss_sum",
    "G_phi",
    "G_phi_weights",
]


@dataclass(frozen=True)
class SumValue:
    """A computed exponential sum.

    ``exact`` marks values obtained without any transcendental phase
    (structural zeros, sums whose every phase is 1).
    """

    value: complex
    terms: int
    exact: bool = False

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __complex__(self) -> complex:
        return complex(self.value)

    def __abs__(self) -> float:
        return abs(self.value)

    def format(self) -> str:
        """'re,im' as printed by the command-line tool."""
        if self.exact:
            return f"{int(round(self.real))},{int(round(self.imag))}"
        return f"{_fixed(self.real)},{_fixed(self.imag)}"


def _fixed(v: float) -> str:
    s = f"{v:.15f}"
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def _require_coprime(p: int, q: int) -> None:
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) = {math.gcd(p, q)} != 1")


# ---------------------------------------------------------------- Gauss sums

def incomplete_gauss_sums(f: WeightFunction, ps: Sequence[int], q: int, N: int, *,
                          threads: int = 1, backend: str | None = None) -> np.ndarray:
    """g_f(p, q, N) for every p in ``ps`` (no coprimality check)."""
    if N < 1:
        raise ValueError("N must be positive")
    h0, w = f.samples(N)
    ps = np.asarray(ps, dtype=np.int64)
    if len(w) == 0:
        return np.zeros(len(ps), dtype=complex)
    return kernels.gauss_sum_batch(ps, q, h0, w, threads=threads, backend=backend)


def incomplete_gauss_sum(f: WeightFunction, p: int, q: int, N: int, *, backend: str | None = None) -> SumValue:
    """g_f(p, q, N) = sum_h f(h/N) e_q(p h^2)."""
    _require_coprime(p, q)
    h0, w = f.samples(N)
    if len(w) == 0 or not np.any(w):
        return SumValue(0j, len(w), exact=True)
    val = incomplete_gauss_sums(f, [p], q, N, backend=backend)[0]
    return SumValue(complex(val), len(w))


def theta_sum(f: WeightFunction, x: Union[float, Fraction, Rational], N: int, *,
              backend: str | None = None) -> SumValue:
    """S_f(x, N) = sum_h f(h/N) e(x h^2).

    Rational arguments (Fraction or Rational) take the exact residue path of
    :func:`incomplete_gauss_sum`; floats use the real-argument kernel.
    """
    if isinstance(x, Fraction):
        x = Rational.from_fraction(x)
    if isinstance(x, Rational):
        return incomplete_gauss_sum(f, x.p, x.q, N, backend=backend)
    if N < 1:
        raise ValueError("N must be positive")
    h0, w = f.samples(N)
    if len(w) == 0:
        return SumValue(0j, 0, exact=True)
    val = kernels.theta_sum_batch(np.array([float(x)]), h0, w, backend=backend)[0]
    return SumValue(complex(val), len(w), exact=(float(x) == 0.0 and bool(np.all(w == np.round(w)))))


def theta_sums(f: WeightFunction, xs, N: int, *, threads: int = 1, backend: str | None = None) -> np.ndarray:
    h0, w = f.samples(N)
    xs = np.asarray(xs, dtype=float)
    if len(w) == 0:
        return np.zeros(len(xs), dtype=complex)
    return kernels.theta_sum_batch(xs, h0, w, threads=threads, backend=backend)


def classical_gauss_sum_direct(p: int, q: int) -> SumValue:
    """g_1(p, q) = sum_{h mod q} e_q(p h^2), summed term by term."""
    _require_coprime(p, q)
    h = np.arange(q, dtype=np.int64)
    idx = (p % q) * (h * h % q) % q
    if not np.any(idx):
        return SumValue(complex(q), q, exact=True)
    val = kernels.gauss_sum_batch([p], q, 0, np.ones(q))[0]
    return SumValue(complex(val), q)


def classical_gauss_sum_closed(p: int, q: int) -> SumValue:
    """g_1(p, q) from its three-case evaluation in terms of eps and Jacobi symbols."""
    _require_coprime(p, q)
    if q % 4 == 2:
        return SumValue(0j, q, exact=True)
    if q == 1:
        return SumValue(1 + 0j, 1, exact=True)
    root = math.sqrt(q)
    if q % 4 == 0:
        p_odd = p % q  # odd since gcd(p, q) = 1; (q/.) is periodic mod q here
        sign = epsilon(p_odd).conjugate() * jacobi_symbol(q, p_odd)
        return SumValue((1 + 1j) * complex(sign) * root, q)
    sign = epsilon(q) * jacobi_symbol(p, q)
    return SumValue(complex(sign) * root, q)


# ------------------------------------------------------- Kloosterman family

def _units_and_inverses(q: int):
    ps = np.fromiter(coprime_residues(q), dtype=np.int64)
    inv = np.array([mod_inverse(int(p), q) for p in ps], dtype=np.int64)
    return ps, inv


def _character(kind: str, q: int, ps: np.ndarray) -> np.ndarray:
    if kind == "kloosterman":
        return np.ones(len(ps), dtype=complex)
    if kind == "twisted":
        if q % 4:
            raise ValueError(f"twisted Kloosterman sums need q = 0 mod 4, got q = {q}")
        return np.array([complex(epsilon(int(p)) * jacobi_symbol(q, int(p))) for p in ps])
    if kind == "salie":
        if q % 2 == 0 or q < 3:
            raise ValueError(f"Salie sums need odd q >= 3, got q = {q}")
        return np.array([complex(jacobi_symbol(int(p), q)) for p in ps])
    raise ValueError(f"unknown sum kind {kind!r}")


def _complete_sum(kind: str, m: int, n: int, q: int) -> SumValue:
    if q < 1:
        raise ValueError("q must be positive")
    ps, inv = _units_and_inverses(q)
    chi = _character(kind, q, ps)
    idx = (m * ps + n * inv) % q
    roots = kernels.roots_of_unity(q)
    if not np.any(idx):
        val = complex(math.fsum(chi.real), math.fsum(chi.imag))
        return SumValue(val, len(ps), exact=True)
    terms = chi * roots[idx]
    return SumValue(complex(math.fsum(terms.real), math.fsum(terms.imag)), len(ps))


def kloosterman(m: int, n: int, q: int) -> SumValue:
    """K(m, n, q) = sum_{p in Z_q^x} e((m p + n p-bar)/q)."""
    return _complete_sum("kloosterman", m, n, q)


def twisted_kloosterman(m: int, n: int, q: int) -> SumValue:
    """K~(m, n, q) = sum_p eps_p (q/p) e((m p + n p-bar)/q), q = 0 mod 4."""
    return _complete_sum("twisted", m, n, q)


def salie(m: int, n: int, q: int) -> SumValue:
    """S(m, n, q) = sum_p (p/q) e((m p + n p-bar)/q), q odd."""
    return _complete_sum("salie", m, n, q)


def _sign_classes(q: int, ps: np.ndarray) -> list:
    if q % 4 == 0:
        return [epsilon(int(p)) * jacobi_symbol(q, int(p)) for p in ps]
    if q % 2 == 1:
        return [jacobi_symbol(int(p), q) for p in ps]
    raise ValueError(f"sign classes are defined for q = 0 mod 4 or q odd, got q = {q}")


def _check_sigma(q: int, sigma: SignFactor) -> SignFactor:
    sigma = SignFactor(sigma)
    allowed = (1, -1, 1j, -1j) if q % 4 == 0 else (1, -1)
    if q % 4 == 2 or sigma.value not in allowed:
        raise ValueError(f"sigma = {sigma} is not a sign class for q = {q}")
    return sigma


def restricted_character_sum(m: int, n: int, q: int, sigma) -> SumValue:
    """Sum of e((m p + n p-bar)/q) over p in one sign class.

    The class is eps_p (q/p) = sigma for q = 0 mod 4 and (p/q) = sigma for
    odd q.
    """
    sigma = _check_sigma(q, sigma)
    ps, inv = _units_and_inverses(q)
    cls = _sign_classes(q, ps)
    keep = np.array([c == sigma for c in cls], dtype=bool)
    idx = (m * ps[keep] + n * inv[keep]) % q
    if not np.any(idx):
        return SumValue(complex(int(keep.sum())), int(keep.sum()), exact=True)
    terms = kernels.roots_of_unity(q)[idx]
    return SumValue(complex(math.fsum(terms.real), math.fsum(terms.imag)), int(keep.sum()))


def restricted_via_kloosterman(m: int, n: int, q: int, sigma) -> complex:
    """The same class sum assembled from complete sums.

    q = 0 mod 4:  (1/4)[K(m,n) + s^-1 K~(m,n) - i s^-2 K(m+q/4,n) + s^-3 conj K~(-m,-n)]
    q odd:        (1/2)[K(m,n) + s S(m,n)]
    where s = sigma and all sums are modulo q.
    """
    sigma = _check_sigma(q, sigma)
    s_inv = complex(sigma.inverse())
    if q % 4 == 0:
        return 0.25 * (
            complex(kloosterman(m, n, q))
            + s_inv * complex(twisted_kloosterman(m, n, q))
            + s_inv ** 2 * (-1j) * complex(kloosterman(m + q // 4, n, q))
            + s_inv ** 3 * complex(twisted_kloosterman(-m, -n, q)).conjugate()
        )
    return 0.5 * (complex(kloosterman(m, n, q)) + complex(sigma) * complex(salie(m, n, q)))


def kloosterman_table(kind: str, q: int, ms: Iterable[int], ns: Iterable[int], sigma=None) -> np.ndarray:
    """Matrix of sums over all (m, n) in ms x ns for one modulus.

    ``kind`` is one of 'kloosterman', 'twisted', 'salie', 'restricted' (the
    last needs ``sigma``).  Vectorized; used by the Weil-bound checks.
    """
    ms = np.asarray(list(ms), dtype=np.int64)
    ns = np.asarray(list(ns), dtype=np.int64)
    ps, inv = _units_and_inverses(q)
    if kind == "restricted":
        sigma = _check_sigma(q, sigma)
        keep = np.array([c == sigma for c in _sign_classes(q, ps)], dtype=bool)
        ps, inv = ps[keep], inv[keep]
        chi = np.ones(len(ps), dtype=complex)
    else:
        chi = _character(kind, q, ps)
    roots = kernels.roots_of_unity(q)
    mp = (ms[:, None] * ps[None, :]) % q
    ni = (ns[:, None] * inv[None, :]) % q
    out = np.empty((len(ms), len(ns)), dtype=complex)
    for j in range(len(ns)):
        idx = (mp + ni[j][None, :]) % q
        out[:, j] = (roots[idx] * chi[None, :]).sum(axis=1)
    return out


def weil_bound(m: int, n: int, q: int) -> float:
    """gcd(m, n, q)^(1/2) q^(1/2) tau(q)."""
    g = math.gcd(math.gcd(int(m), int(n)), int(q))
    return math.sqrt(g) * math.sqrt(q) * divisor_count(q)


# ------------------------------------------------------------- mean square

def mean_square(f: WeightFunction, q: int, N: int, D=None, *, threads: int = 1,
                backend: str | None = None) -> float:
    """M_f(q, N) = (1/(phi(q)|D|)) sum_{p in Z_q^x, p/q in D} |g_f(p, q, N)|^2."""
    ps = np.fromiter(coprime_residues(q, D), dtype=np.int64)
    if len(ps) == 0:
        raise ValueError(f"no residues p coprime to {q} with p/q in D")
    g = incomplete_gauss_sums(f, ps, q, N, threads=threads, backend=backend)
    return math.fsum(np.abs(g) ** 2) / (totient(q) * interval_measure(D))


def mean_square_prime_formula(q: int, N: int) -> float:
    """Exact M_f(q, N) for f = indicator of (0, 1], prime q, 2N < q, full torus.

    Sum over all p mod q of |g|^2 counts pairs h, h' in [1, N] with
    h^2 = h'^2 mod q, which for prime q and 2N < q forces h = h'; removing
    p = 0 leaves N(q - N).
    """
    if 2 * N >= q:
        raise ValueError("formula needs 2N < q")
    return N * (q - N) / (q - 1)


# ------------------------------------------------------------ long sums

def long_gauss_sum(phi: PeriodicWeight, p: int, q: int) -> SumValue:
    """g_phi(p, q) = sum_{h=0}^{q-1} phi(h/q) e_q(p h^2)."""
    _require_coprime(p, q)
    w = phi.at_residues(q)
    val = kernels.gauss_sum_batch([p], q, 0, w)[0]
    return SumValue(complex(val), q)


def long_gauss_sums(phi: PeriodicWeight, ps, q: int, *, threads: int = 1) -> np.ndarray:
    return kernels.gauss_sum_batch(np.asarray(ps, dtype=np.int64), q, 0, phi.at_residues(q), threads=threads)


def G_phi_weights(phi: PeriodicWeight, n_max: int):
    """(phi_hat(0), w) with w[n-1] = phi_hat(n) + phi_hat(-n) for n = 1..n_max.

    For real phi these are 2 Re phi_hat(n), so
    G_phi(x) = phi_hat(0) + sum_{n>=1} w[n-1] e(n^2 x) has real weights.
    """
    c = phi.fourier_coefficients(n_max)
    pos = c[n_max + 1:]
    neg = c[:n_max][::-1]
    return c[n_max].real, (pos + neg).real


def G_phi(phi: PeriodicWeight, x, n_max: int, *, weights=None, threads: int = 1):
    """G_phi(x) = sum_{|n| <= n_max} phi_hat(n) e(n^2 x); scalar or array x."""
    c0, w = weights if weights is not None else G_phi_weights(phi, n_max)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    vals = c0 + kernels.theta_sum_batch(xs, 1, w, threads=threads)
    return vals if np.ndim(x) else complex(vals[0])
