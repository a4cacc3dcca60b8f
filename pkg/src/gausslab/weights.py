"""Weight functions f for the sums sum_h f(h/N) e(x h^2).

Every weight has a closed support interval and evaluates to exactly 0
outside it, so a sum over h in Z reduces to a finite range of h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from .hermite import hermite_functions
from .quadrature import integrate

__all__ = [
    "WeightFunction",
    "Indicator",
    "HermiteWeight",
    "SampledWeight",
    "ScaledWeight",
    "PeriodicWeight",
    "unit_indicator",
    "zero_weight",
    "parse_weight",
]


class WeightFunction:
    """Base class: a real, compactly supported weight."""

    support: Tuple[float, float]

    def __call__(self, t):
        raise NotImplementedError

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Points where the weight may be discontinuous."""
        return tuple(self.support)

    def h_range(self, N: int) -> Tuple[int, int]:
        """Inclusive range of h for which h/N can lie in the support."""
        lo, hi = (Fraction(s) for s in self.support)
        return math.ceil(lo * N), math.floor(hi * N)

    def samples(self, N: int) -> Tuple[int, np.ndarray]:
        """(h_lo, weights) with weights[j] = f((h_lo + j)/N)."""
        h_lo, h_hi = self.h_range(N)
        if h_hi < h_lo:
            return 0, np.zeros(0)
        h = np.arange(h_lo, h_hi + 1, dtype=np.float64)
        return h_lo, np.asarray(self(h / N), dtype=np.float64)

    def norm_sq(self) -> float:
        a, b = self.support
        return float(integrate(lambda t: np.asarray(self(t)) ** 2, a, b, self.breakpoints))

    def is_zero(self) -> bool:
        return False

    def __mul__(self, factor: float) -> "WeightFunction":
        return ScaledWeight(self, float(factor))

    __rmul__ = __mul__


@dataclass(frozen=True)
class Indicator(WeightFunction):
    """Characteristic function of an interval; (a, b] by default."""

    a: float = 0.0
    b: float = 1.0
    left_closed: bool = False
    right_closed: bool = True

    @property
    def support(self):
        return (self.a, self.b)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        left = t >= self.a if self.left_closed else t > self.a
        right = t <= self.b if self.right_closed else t < self.b
        out = (left & right).astype(float)
        return out if out.ndim else float(out)

    def h_range(self, N: int) -> Tuple[int, int]:
        a, b = Fraction(self.a) * N, Fraction(self.b) * N
        lo = math.ceil(a) if self.left_closed else math.floor(a) + 1
        hi = math.floor(b) if self.right_closed else math.ceil(b) - 1
        return lo, hi

    def samples(self, N: int):
        lo, hi = self.h_range(N)
        if hi < lo:
            return 0, np.zeros(0)
        return lo, np.ones(hi - lo + 1)

    def norm_sq(self) -> float:
        return max(0.0, self.b - self.a)


def unit_indicator() -> Indicator:
    """The indicator of (0, 1]; sum_h f(h/N) e(x h^2) runs over h = 1..N."""
    return Indicator(0.0, 1.0)


class HermiteWeight(WeightFunction):
    """f = sum_nu coeffs[nu] h_nu, truncated to an effective support.

    The support is [-T, T] with T past the last turning point by enough that
    the neglected mass is below double precision.
    """

    def __init__(self, coeffs: Sequence[float], cutoff: float | None = None):
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim != 1 or len(self.coeffs) == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")
        nu_max = len(self.coeffs) - 1
        if cutoff is None:
            cutoff = math.sqrt((2 * nu_max + 1) / (2 * math.pi)) + 3.5
        self.cutoff = float(cutoff)

    @classmethod
    def basis(cls, nu: int) -> "HermiteWeight":
        c = np.zeros(nu + 1)
        c[nu] = 1.0
        return cls(c)

    @property
    def support(self):
        return (-self.cutoff, self.cutoff)

    @property
    def breakpoints(self):
        return ()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        vals = np.tensordot(self.coeffs, hermite_functions(len(self.coeffs) - 1, t), axes=(0, 0))
        vals = np.where(np.abs(t) <= self.cutoff, vals, 0.0)
        return vals if vals.ndim else float(vals)

    def norm_sq(self) -> float:
        return float(np.sum(self.coeffs ** 2))

    def __repr__(self) -> str:
        return f"HermiteWeight(nu_max={len(self.coeffs) - 1})"


class SampledWeight(WeightFunction):
    """Piecewise-linear interpolation of tabulated values; 0 off the grid."""

    def __init__(self, grid: Sequence[float], values: Sequence[float]):
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1 or len(self.grid) < 2:
            raise ValueError("grid and values must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")

    @property
    def support(self):
        return (float(self.grid[0]), float(self.grid[-1]))

    @property
    def breakpoints(self):
        return tuple(self.grid)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        vals = np.interp(t, self.grid, self.values, left=0.0, right=0.0)
        return vals if vals.ndim else float(vals)

    def is_zero(self) -> bool:
        return not np.any(self.values)


@dataclass(frozen=True)
class ScaledWeight(WeightFunction):
    base: WeightFunction
    factor: float

    @property
    def support(self):
        return self.base.support

    @property
    def breakpoints(self):
        return self.base.breakpoints

    def h_range(self, N: int):
        return self.base.h_range(N)

    def __call__(self, t):
        return self.factor * self.base(t)

    def samples(self, N: int):
        h0, w = self.base.samples(N)
        return h0, self.factor * w

    def norm_sq(self) -> float:
        return self.factor ** 2 * self.base.norm_sq()

    def is_zero(self) -> bool:
        return self.factor == 0.0 or self.base.is_zero()


def zero_weight() -> ScaledWeight:
    return ScaledWeight(unit_indicator(), 0.0)


@dataclass(frozen=True)
class PeriodicWeight:
    """phi(t) = base(t mod 1) for a weight supported in [0, 1]."""

    base: WeightFunction

    def __post_init__(self):
        lo, hi = self.base.support
        if lo < 0 or hi > 1:
            raise ValueError("periodic weights need a base supported in [0, 1]")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        r = t - np.floor(t)
        vals = self.base(r)
        if isinstance(self.base, Indicator) and self.base.right_closed and self.base.b == 1.0:
            vals = np.where(r == 0.0, 1.0, vals)
        return vals

    def at_residues(self, q: int) -> np.ndarray:
        """phi(h/q) for h = 0..q-1, exact for indicator bases."""
        if isinstance(self.base, Indicator):
            w = np.zeros(q)
            lo, hi = self.base.h_range(q)
            for h in range(lo, hi + 1):
                w[h % q] = 1.0
            return w
        return np.asarray(self(np.arange(q) / q), dtype=float)

    def fourier_coefficients(self, n_max: int) -> np.ndarray:
        """phi_hat(n) = int_0^1 phi(t) e(-n t) dt for n = -n_max..n_max, by quadrature."""
        a, b = self.base.support
        pos = np.empty(n_max + 1, dtype=complex)
        for n in range(n_max + 1):
            # about one oscillation per panel keeps the order-16 rule exact to rounding
            panels = 4 + int(abs(n) * (b - a))
            pos[n] = integrate(lambda t, n=n: np.asarray(self.base(t)) * np.exp(-2j * np.pi * n * t),
                               a, b, self.base.breakpoints, panels=panels, order=16,
                               rtol=1e-12, atol=1e-13)
        # real weight: phi_hat(-n) = conj(phi_hat(n))
        return np.concatenate([np.conj(pos[:0:-1]), pos])


def parse_weight(text: str) -> WeightFunction:
    """Parse a weight spec used in config files and on the command line.

    ``indicator`` / ``indicator:a:b`` (half-open (a, b]), ``hermite:nu``
    (a single Hermite function), ``zero``.
    """
    parts = text.strip().lower().split(":")
    kind = parts[0]
    if kind in ("indicator", "chi"):
        if len(parts) == 1:
            return unit_indicator()
        return Indicator(float(Fraction(parts[1])), float(Fraction(parts[2])))
    if kind in ("hermite", "gaussian"):
        nu = int(parts[1]) if len(parts) > 1 else 0
        return HermiteWeight.basis(nu)
    if kind == "zero":
        return zero_weight()
    raise ValueError(f"unknown weight {text!r}")
