"""
Experiment harness for the limit laws of normalized short Gauss sums.

Samples g_f(p, q, N)/sqrt(N) over p in Z_q^x are compared against theta
sums S_f(x, N)/sqrt(N) at uniformly random x, through two-sample KS
distances on the Re / Im / modulus projections, a log-log tail fit, the
sign-class split, a horocycle equidistribution count on SL(2,Z)\\H, and the
long-sum comparison with 7^(1/4) Y G_phi(x).

Random numbers come from numpy's Philox counter-based generator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import expsums, kernels
from .metaplectic import reduce_points, sign_class
from .numtheory import (
    coprime_residues,
    epsilon,
    interval_measure,
    is_prime,
    jacobi_symbol,
    normalize_intervals,
    totient,
)
from .quadrature import integrate
from .theta import hermite_coefficients
from .weights import Indicator, PeriodicWeight, WeightFunction, parse_weight, unit_indicator

__all__ = [
    "EmpiricalDistribution",
    "ExperimentConfig",
    "ks_distance",
    "make_rng",
    "short_gauss_experiment",
    "reference_theta_sample",
    "TailFit",
    "InsufficientTailError",
    "tail_exponent",
    "default_R_grid",
    "sign_joint_test",
    "fundamental_domain_measure",
    "domain_mass",
    "equal_mass_partition",
    "horocycle_experiment",
    "mean_square_check",
    "long_sum_experiment",
    "PROJECTIONS",
]

PROJECTIONS = ("re", "im", "abs")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def _project(z: np.ndarray, projection: str) -> np.ndarray:
    if projection in ("re", "real"):
        return z.real
    if projection in ("im", "imag"):
        return z.imag
    if projection in ("abs", "modulus"):
        return np.abs(z)
    raise ValueError(f"unknown projection {projection!r}")


class EmpiricalDistribution:
    """Complex samples with optional labels, weights and sample keys (e.g. p)."""

    def __init__(self, samples, labels=None, weights=None, keys=None):
        self.samples = np.asarray(samples, dtype=complex).ravel()
        n = len(self.samples)
        self.labels = None if labels is None else np.asarray([str(l) for l in labels], dtype=object)
        self.weights = None if weights is None else np.asarray(weights, dtype=float)
        self.keys = None if keys is None else np.asarray(keys)
        for arr, name in ((self.labels, "labels"), (self.weights, "weights"), (self.keys, "keys")):
            if arr is not None and len(arr) != n:
                raise ValueError(f"{name} length {len(arr)} != sample count {n}")
        if self.weights is not None and (np.any(self.weights < 0) or self.weights.sum() <= 0):
            raise ValueError("weights must be non-negative with positive total")

    def __len__(self) -> int:
        return len(self.samples)

    def _nonempty(self):
        if len(self.samples) == 0:
            raise ValueError("empty distribution")

    def _w(self) -> np.ndarray:
        if self.weights is None:
            return np.full(len(self.samples), 1.0 / len(self.samples))
        return self.weights / self.weights.sum()

    def project(self, projection: str = "re") -> np.ndarray:
        return _project(self.samples, projection)

    def histogram(self, projection: str = "re", bins=50, range=None):
        """(edges, mass) with mass summing to 1 over the bins."""
        self._nonempty()
        v = self.project(projection)
        if range is None:
            range = (float(v.min()), float(v.max()))
            if range[0] == range[1]:
                range = (range[0] - 0.5, range[1] + 0.5)
        # clip so every sample lands in a bin and the masses sum to 1
        v = np.clip(v, range[0], range[1])
        mass, edges = np.histogram(v, bins=bins, range=range, weights=self._w())
        return edges, mass / mass.sum()

    def cdf(self, t, projection: str = "re"):
        self._nonempty()
        v = self.project(projection)
        order = np.argsort(v, kind="stable")
        if self.weights is None:
            # exact k/n steps, so disjoint samples give a distance of exactly 1
            cum = np.arange(1, len(v) + 1) / len(v)
        else:
            cum = np.minimum(np.cumsum(self._w()[order]), 1.0)
        idx = np.searchsorted(v[order], np.asarray(t, dtype=float), side="right")
        out = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
        return out if np.ndim(t) else float(out)

    def tail(self, R) -> np.ndarray:
        """P(|z| > R)."""
        self._nonempty()
        a = np.abs(self.samples)
        w = self._w()
        R = np.atleast_1d(np.asarray(R, dtype=float))
        out = np.array([w[a > r].sum() for r in R])
        return out if out.size > 1 else float(out[0])

    def exceedances(self, R: float) -> int:
        return int(np.count_nonzero(np.abs(self.samples) > R))

    def second_moment(self) -> float:
        self._nonempty()
        return float(math.fsum(self._w() * np.abs(self.samples) ** 2))

    def by_label(self) -> Dict[str, "EmpiricalDistribution"]:
        if self.labels is None:
            raise ValueError("distribution has no labels")
        out = {}
        for lab in sorted(set(self.labels)):
            m = self.labels == lab
            out[lab] = EmpiricalDistribution(
                self.samples[m], self.labels[m],
                None if self.weights is None else self.weights[m],
                None if self.keys is None else self.keys[m])
        return out

    @classmethod
    def concat(cls, parts: Sequence["EmpiricalDistribution"]) -> "EmpiricalDistribution":
        labels = None if any(p.labels is None for p in parts) else np.concatenate([p.labels for p in parts])
        keys = None if any(p.keys is None for p in parts) else np.concatenate([p.keys for p in parts])
        return cls(np.concatenate([p.samples for p in parts]), labels, None, keys)


def ks_distance(A: EmpiricalDistribution, B: EmpiricalDistribution, projection: str = "re") -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_t |F_A(t) - F_B(t)| on a projection."""
    A._nonempty()
    B._nonempty()
    a, b = A.project(projection), B.project(projection)
    pts = np.concatenate([a, b])
    # ECDFs are right-continuous step functions; the sup is attained at a sample point
    fa = A.cdf(pts, projection)
    fb = B.cdf(pts, projection)
    return float(np.max(np.abs(fa - fb)))


# ---------------------------------------------------------------- configs

@dataclass
class ExperimentConfig:
    q: int
    a: int = 1
    alpha: Fraction = Fraction(7, 8)
    coeff: float = 1 / math.sqrt(7)
    N_override: Optional[int] = None
    D: Optional[tuple] = None
    weight: str = "indicator"
    reference_samples: int = 100_000
    seed: int = 0
    protocol: str = "short"
    reference_method: str = "sum"
    n_max: int = 2000
    bins: int = 60
    check_prime: bool = True

    def __post_init__(self):
        self.alpha = Fraction(self.alpha)
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.q < 1 or self.a < 1 or self.q % self.a:
            raise ValueError(f"a={self.a} must divide q={self.q}")
        if self.check_prime and not is_prime(self.q // self.a):
            raise ValueError(f"q/a = {self.q // self.a} is not prime")
        if self.protocol not in ("short", "long"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.reference_method not in ("sum", "theta"):
            raise ValueError(f"unknown reference method {self.reference_method!r}")
        self.D = normalize_intervals(self.D)
        if self.N < 1:
            raise ValueError("N evaluates below 1")

    @property
    def N(self) -> int:
        if self.N_override is not None:
            return int(self.N_override)
        return math.floor(self.coeff * self.q ** float(self.alpha))

    @property
    def f(self) -> WeightFunction:
        return parse_weight(self.weight)

    def regime(self) -> dict:
        """Where (q, N) sits relative to N/q -> 0 and N^(4/3)/q -> infinity."""
        N, q = self.N, self.q
        inside = Fraction(3, 4) < self.alpha < 1
        return {
            "N_over_q": N / q,
            "N43_over_q": N ** (4 / 3) / q,
            "alpha": str(self.alpha),
            "inside_proven_regime": bool(inside),
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha"] = str(self.alpha)
        d["D"] = [[str(lo), str(hi)] for lo, hi in self.D]
        d["N"] = self.N
        return d


# ------------------------------------------------------------ experiments

def _class_label(p: int, q: int) -> str:
    return str(sign_class(p, q)[1])


def short_gauss_experiment(config: ExperimentConfig, *, threads: int = 1) -> EmpiricalDistribution:
    """g_f(p, q, N)/sqrt(N) for every p in Z_q^x with p/q in D, labeled by sign class."""
    q, N = config.q, config.N
    ps = np.fromiter(coprime_residues(q, config.D), dtype=np.int64)
    if len(ps) == 0:
        raise ValueError("no admissible p")
    g = expsums.incomplete_gauss_sums(config.f, ps, q, N, threads=threads)
    labels = [_class_label(int(p), q) for p in ps]
    return EmpiricalDistribution(g / math.sqrt(N), labels, keys=ps)


def reference_theta_sample(f: WeightFunction, N: int, count: int, seed: int, *,
                           method: str = "sum", nu_max: int = 40, threads: int = 1,
                           xs=None) -> EmpiricalDistribution:
    """S_f(x, N)/sqrt(N) at ``count`` uniform x in [0, 1).

    method 'sum' uses the weights f(h/N); method 'theta' evaluates
    Theta_f(x + i/N^2, 0) with f replaced by its Hermite expansion to
    order ``nu_max`` and the lattice sum taken over every h where the
    expansion is non-negligible.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if xs is None:
        xs = make_rng(seed).random(count)
    xs = np.asarray(xs, dtype=float)
    if method == "sum":
        h0, w = f.samples(N)
    elif method == "theta":
        exp = hermite_coefficients(f, nu_max)
        n = math.floor(exp.cutoff * N)
        h0 = -n
        w = np.asarray(exp(np.arange(-n, n + 1) / N), dtype=float)
    else:
        raise ValueError(f"unknown method {method!r}")
    vals = kernels.theta_sum_batch(xs, h0, w, threads=threads) if len(w) else np.zeros(len(xs), complex)
    return EmpiricalDistribution(vals / math.sqrt(N), keys=xs)


class InsufficientTailError(ValueError):
    pass


@dataclass
class TailFit:
    slope: float
    intercept: float
    power_law: bool
    local_slopes: List[float] = field(default_factory=list)
    exceedances: List[int] = field(default_factory=list)


def tail_exponent(dist: EmpiricalDistribution, R_grid, *, min_exceed: int = 100,
                  min_samples: int = 10_000) -> TailFit:
    """Least-squares fit of log P(|z| > R) against log R over ``R_grid``.

    ``power_law`` is False when the slopes fitted on the lower and upper
    halves of the grid differ by more than max(0.5, 15%) of the overall
    slope, the signature of a faster-than-polynomial tail.
    """
    R = np.sort(np.asarray(R_grid, dtype=float))
    if len(dist) < min_samples:
        raise ValueError(f"need at least {min_samples} samples, have {len(dist)}")
    if len(R) < 4:
        raise ValueError("R_grid needs at least 4 points")
    exc = [dist.exceedances(r) for r in R]
    if exc[-1] < min_exceed:
        raise InsufficientTailError(f"only {exc[-1]} samples exceed R={R[-1]:g} (need {min_exceed})")
    lx, ly = np.log(R), np.log(dist.tail(R))
    slope, intercept = np.polyfit(lx, ly, 1)
    h = len(R) // 2
    s_lo = np.polyfit(lx[:h + 1], ly[:h + 1], 1)[0]
    s_hi = np.polyfit(lx[h:], ly[h:], 1)[0]
    power = abs(s_hi - s_lo) <= max(0.5, 0.15 * abs(slope))
    return TailFit(float(slope), float(intercept), bool(power), [float(s_lo), float(s_hi)], exc)


def default_R_grid(dist: EmpiricalDistribution, lo: float = 2.5, hi: float = 5.0,
                   points: int = 8, min_exceed: int = 100):
    """Geometric grid from ``lo`` up to min(hi, radius with min_exceed exceedances), or None."""
    a = np.sort(np.abs(dist.samples))
    if len(a) <= min_exceed:
        return None
    top = min(hi, float(a[-min_exceed - 1]))
    if top < 1.2 * lo:
        return None
    return np.geomspace(lo, top, points)


def sign_joint_test(labeled: EmpiricalDistribution, *, min_class: int = 30) -> dict:
    """Class-count uniformity and pairwise per-class KS distances."""
    parts = labeled.by_label()
    small = {k: len(v) for k, v in parts.items() if len(v) < min_class}
    if small:
        raise ValueError(f"classes with fewer than {min_class} samples: {small}")
    n, k = len(labeled), len(parts)
    counts = {lab: len(d) for lab, d in parts.items()}
    dev = max(abs(c - n / k) / (n / k) for c in counts.values())
    pairs = {}
    for i, la in enumerate(sorted(parts)):
        for lb in sorted(parts)[i + 1:]:
            pairs[f"{la}|{lb}"] = {pr: ks_distance(parts[la], parts[lb], pr) for pr in PROJECTIONS}
    means = {lab: [float(d.samples.real.mean()), float(d.samples.imag.mean())] for lab, d in parts.items()}
    return {
        "classes": k,
        "counts": counts,
        "max_count_deviation": dev,
        "pairwise_ks": pairs,
        "max_ks_re_im": max((max(v["re"], v["im"]) for v in pairs.values()), default=0.0),
        "max_ks_abs": max((v["abs"] for v in pairs.values()), default=0.0),
        "class_means": means,
    }


# ------------------------------------------------------------- horocycles

def fundamental_domain_measure() -> float:
    """Hyperbolic area of {|x| <= 1/2, |z| >= 1}: int dx / sqrt(1 - x^2)."""
    return float(integrate(lambda x: 1.0 / np.sqrt(1.0 - x * x), -0.5, 0.5))


def domain_mass(x0: float, x1: float, y0: float, y1: float = math.inf) -> float:
    """Hyperbolic area of the domain part with x0 <= x <= x1, y0 <= y <= y1 (|x| <= 1/2)."""
    def above(yt: float) -> float:
        # int_{x0}^{x1} 1/max(yt, sqrt(1 - x^2)) dx
        if math.isinf(yt):
            return 0.0
        # the domain lies above y = sqrt(3)/2
        yt = max(yt, math.sqrt(3) / 2)
        if yt >= 1.0:
            return (x1 - x0) / yt
        s = math.sqrt(1.0 - yt * yt)
        lo, hi = max(x0, -s), min(x1, s)
        inner = (math.asin(hi) - math.asin(lo)) if hi > lo else 0.0
        return inner + ((x1 - x0) - max(0.0, hi - lo)) / yt
    return above(y0) - above(y1)


def equal_mass_partition(cols: int = 4, rows: int = 5):
    """Column edges in x and per-column row edges in y cutting the domain into equal masses."""
    total = math.pi / 3
    xs = [math.sin(-math.pi / 6 + k * math.pi / (3 * cols)) for k in range(cols + 1)]
    xs[0], xs[-1] = -0.5, 0.5
    ys = []
    for x0, x1 in zip(xs[:-1], xs[1:]):
        col = total / cols
        edges = [0.0]
        for r in range(1, rows):
            want = col * (1 - r / rows)  # mass above the edge
            lo, hi = 0.5, 1e12
            for _ in range(200):
                mid = math.sqrt(lo * hi)
                if domain_mass(x0, x1, mid) > want:
                    lo = mid
                else:
                    hi = mid
            edges.append(math.sqrt(lo * hi))
        edges.append(math.inf)
        ys.append(edges)
    return xs, ys


def horocycle_experiment(q: int, y: float, cols: int = 4, rows: int = 5) -> dict:
    """Reduce p/q + iy (p in Z_q^x) to the domain and compare bin masses with dx dy / y^2."""
    warns = []
    if not is_prime(q):
        raise ValueError(f"q = {q} must be prime")
    if q * q * y < 10:
        warns.append(f"q^2 y = {q * q * y:.3g} is not large")
    if q ** 1.5 * y > 1:
        warns.append(f"q^(3/2) y = {q ** 1.5 * y:.3g} is not small")
    for w in warns:
        warnings.warn(w, RuntimeWarning, stacklevel=2)
    ps = np.fromiter(coprime_residues(q), dtype=np.int64)
    pts = reduce_points(ps / q + 1j * y)
    xs, ys = equal_mass_partition(cols, rows)
    total = math.pi / 3
    emp, theo = [], []
    ci = np.clip(np.searchsorted(xs, pts.real, side="right") - 1, 0, cols - 1)
    for c in range(cols):
        col_pts = pts.imag[ci == c]
        ri = np.clip(np.searchsorted(ys[c], col_pts, side="right") - 1, 0, rows - 1)
        for r in range(rows):
            emp.append(np.count_nonzero(ri == r) / len(pts))
            theo.append(domain_mass(xs[c], xs[c + 1], max(ys[c][r], 0.0), ys[c][r + 1]) / total)
    emp, theo = np.array(emp), np.array(theo)
    return {
        "q": q,
        "y": y,
        "points": int(len(pts)),
        "bins": cols * rows,
        "empirical_mass": emp.tolist(),
        "reference_mass": theo.tolist(),
        "tv": 0.5 * float(np.abs(emp - theo).sum()),
        "q2y": q * q * y,
        "q32y": q ** 1.5 * y,
        "warnings": warns,
    }


# ------------------------------------------------------------ mean square

def mean_square_check(config: ExperimentConfig, *, threads: int = 1) -> dict:
    """M_f(q, N)/N against the prime-modulus counting formula and ||f||^2/|D|."""
    f, q, N = config.f, config.q, config.N
    M = expsums.mean_square(f, q, N, config.D, threads=threads)
    out = {"M": M, "M_over_N": M / N, "norm_sq_over_D": f.norm_sq() / interval_measure(config.D)}
    out["bound_ratio"] = out["M_over_N"] / out["norm_sq_over_D"] if out["norm_sq_over_D"] else None
    exact_ok = (is_prime(q) and 2 * N < q and isinstance(f, Indicator) and f == unit_indicator()
                and config.D == normalize_intervals(None))
    if exact_ok:
        ex = expsums.mean_square_prime_formula(q, N)
        out["exact"] = ex
        out["exact_over_N"] = ex / N
        out["relative_error"] = abs(M - ex) / ex
    return out


# ---------------------------------------------------------------- long sums

def long_sum_experiment(q: int, c: float = 1 / math.sqrt(7), *, reference_samples: int = 100_000,
                        seed: int = 0, n_max: int = 2000, threads: int = 1) -> dict:
    """Sample-by-sample chain g_f/sqrt(N) = r 7^(1/4) (g_1/(eps_q sqrt q)) (g_phi/g_1) eps_q
    with N = floor(c q), phi the periodized indicator of (0, c] and
    r = sqrt(q c / N) the floor-rounding factor, plus the KS comparison of
    7^(1/4) g_phi/sqrt(q) against 7^(1/4) Y G_phi(x), Y = +-1, x uniform in [-1/2, 1/2).
    """
    if q % 2 == 0:
        raise ValueError("long-sum experiment needs odd q")
    N = math.floor(c * q)
    f = unit_indicator()
    phi = PeriodicWeight(Indicator(0.0, c))
    ps = np.fromiter(coprime_residues(q), dtype=np.int64)
    lhs = expsums.incomplete_gauss_sums(f, ps, q, N, threads=threads) / math.sqrt(N)
    g_phi = expsums.long_gauss_sums(phi, ps, q, threads=threads)
    eps_q = complex(epsilon(q))
    g1 = np.array([complex(expsums.classical_gauss_sum_closed(int(p), q)) for p in ps])
    r = math.sqrt(q * c / N)
    k = c ** -0.5  # 7^(1/4) for c = 1/sqrt(7)
    chain = r * k * (g1 / (eps_q * math.sqrt(q))) * (g_phi / g1) * eps_q
    resid = np.abs(lhs - chain) / np.maximum(np.abs(lhs), 1e-300)
    emp = EmpiricalDistribution(k * g_phi / math.sqrt(q), keys=ps)

    rng = make_rng(seed)
    xs = rng.random(reference_samples) - 0.5
    Y = np.where(rng.random(reference_samples) < 0.5, 1.0, -1.0)
    weights = expsums.G_phi_weights(phi, n_max)
    G = expsums.G_phi(phi, xs, n_max, weights=weights, threads=threads)
    ref = EmpiricalDistribution(k * Y * G, keys=xs)
    return {
        "q": q,
        "N": N,
        "eps_q": str(epsilon(q)),
        "floor_ratio": r,
        "floor_discrepancy": r - 1.0,
        "chain_max_relative_residual": float(resid.max()),
        "ks": {pr: ks_distance(emp, ref, pr) for pr in PROJECTIONS},
        "samples": int(len(ps)),
        "reference_samples": int(reference_samples),
        "n_max": n_max,
        "_empirical": emp,
        "_reference": ref,
    }
