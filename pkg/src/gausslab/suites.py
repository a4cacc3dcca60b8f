"""Invariant suites run by ``gausslab verify`` and the acceptance tests.

Each suite returns a SuiteResult; ``failures`` lists the offending inputs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from . import expsums, kernels
from .hermite import hermite_functions
from .metaplectic import (
    RealMatrix2,
    in_delta14,
    lift_rational,
    moebius,
    reduce_to_fundamental_domain,
    verify_lift,
)
from .numtheory import (
    coprime_residues,
    divisor_count,
    epsilon,
    jacobi_symbol,
    mod_inverse,
)
from .quadrature import integrate
from .theta import automorphy_factor, theta_nu


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: List[str] = field(default_factory=list)
    worst: float = 0.0
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg: str, limit: int = 50):
        if len(self.failures) < limit:
            self.failures.append(msg)
        elif len(self.failures) == limit:
            self.failures.append("... further failures suppressed")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.checked} checks, worst {self.worst:.3g}, {self.seconds:.1f}s"


def _timed(fn):
    def run(*a, **k):
        t = time.perf_counter()
        res = fn(*a, **k)
        res.seconds = time.perf_counter() - t
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def gauss_closed_form(q_max: int = 500) -> SuiteResult:
    """Direct vs closed-form classical Gauss sums, all p, all q <= q_max; error / sqrt(q)."""
    res = SuiteResult("gauss-closed-form")
    for q in range(1, q_max + 1):
        ps = np.fromiter(coprime_residues(q), dtype=np.int64)
        direct = kernels.gauss_sum_batch(ps, q, 0, np.ones(q))
        for p, d in zip(ps, direct):
            c = complex(expsums.classical_gauss_sum_closed(int(p), q))
            err = abs(d - c) / math.sqrt(q)
            res.checked += 1
            res.worst = max(res.worst, err)
            if err >= 1e-9:
                res.fail(f"p={p} q={q}: direct {d} closed {c}")
    return res


def weil_ratios(q: int, M: int = 20) -> Dict[str, float]:
    """max |sum| / (gcd(m,n,q)^(1/2) q^(1/2) tau(q)) over |m|, |n| <= M, per sum type.

    Restricted sign-class sums are divided by the class constant (7 for
    q = 0 mod 4, 2 for odd q) as well.
    """
    ps = np.fromiter(coprime_residues(q), dtype=np.int64)
    inv = np.array([mod_inverse(int(p), q) for p in ps], dtype=np.int64)
    ms = np.arange(-M, M + 1)
    roots = kernels.roots_of_unity(q)
    cols = {"kloosterman": np.ones(len(ps), dtype=complex)}
    const = 1.0
    if q % 4 == 0:
        cols["twisted"] = np.array([complex(epsilon(int(p)) * jacobi_symbol(q, int(p))) for p in ps])
        cls = cols["twisted"]
        for s in (1, -1, 1j, -1j):
            cols[f"restricted[{s}]"] = (np.abs(cls - s) < 1e-12).astype(complex)
        const = 7.0
    elif q % 2 == 1 and q >= 3:
        cols["salie"] = np.array([complex(jacobi_symbol(int(p), q)) for p in ps])
        for s in (1, -1):
            cols[f"restricted[{s}]"] = (np.abs(cols["salie"] - s) < 1e-12).astype(complex)
        const = 2.0
    W = np.stack(list(cols.values()), axis=1)
    mp = (ms[:, None] * ps[None, :]) % q
    ni = (ms[:, None] * inv[None, :]) % q
    g = np.gcd(np.gcd(ms[:, None], ms[None, :]), q)
    bound = np.sqrt(g) * math.sqrt(q) * divisor_count(q)
    out = {k: 0.0 for k in cols}
    for j in range(len(ms)):
        E = roots[(mp + ni[j][None, :]) % q]
        S = np.abs(E @ W)
        r = S / bound[:, j][:, None]
        for k, name in enumerate(cols):
            v = float(r[:, k].max()) / (const if name.startswith("restricted") else 1.0)
            out[name] = max(out[name], v)
    return out


@_timed
def weil_bounds(q_max: int = 400, M: int = 20) -> SuiteResult:
    res = SuiteResult("weil-bounds")
    for q in range(1, q_max + 1):
        for name, r in weil_ratios(q, M).items():
            res.checked += 1
            res.worst = max(res.worst, r)
            if r > 1.0 + 1e-9:
                res.fail(f"{name} q={q}: ratio {r:.6f} > 1")
    return res


@_timed
def hermite(nu_max: int = 10) -> SuiteResult:
    """|int h_nu h_mu - delta| < 1e-8 for nu, mu <= nu_max."""
    res = SuiteResult("hermite")
    T = math.sqrt((2 * nu_max + 1) / (2 * math.pi)) + 4.0
    G = integrate(lambda t: np.einsum("it,jt->tij", hermite_functions(nu_max, t), hermite_functions(nu_max, t)),
                  -T, T, panels=16, order=30)
    err = np.abs(G - np.eye(nu_max + 1))
    res.checked = err.size
    res.worst = float(err.max())
    for i, j in zip(*np.nonzero(err >= 1e-8)):
        res.fail(f"nu={i} mu={j}: {G[i, j]}")
    return res


def random_gamma0_4(rng: np.random.Generator, c_max: int = 40) -> RealMatrix2:
    """Random [[a, b], [c, d]] in Gamma_0(4) with 0 < |c| <= c_max."""
    while True:
        c = 4 * int(rng.integers(1, c_max // 4 + 1)) * (1 if rng.random() < 0.5 else -1)
        d = int(rng.integers(-60, 61))
        if d % 2 and math.gcd(c, d) == 1:
            break
    a = mod_inverse(d % abs(c), abs(c))
    a += abs(c) * int(rng.integers(-2, 3))
    b = (a * d - 1) // c
    return RealMatrix2(a, b, c, d)


@_timed
def theta_transform(n_g: int = 50, n_z: int = 20, nu_max: int = 6, seed: int = 7) -> SuiteResult:
    """theta_nu(gz) = j_g(z)^(2 nu + 1) theta_nu(z), relative 1e-8 (absolute where theta vanishes)."""
    res = SuiteResult("theta-transform")
    rng = np.random.default_rng(seed)
    for _ in range(n_g):
        g = random_gamma0_4(rng)
        for _ in range(n_z):
            z = complex(rng.uniform(-1, 1), rng.uniform(0.1, 2.0))
            gz = moebius(g, z)
            j = automorphy_factor(g, z)
            # odd nu vanish identically; the max() below makes that an absolute check
            for nu in range(nu_max + 1):
                lhs, rhs = theta_nu(gz, nu), j ** (2 * nu + 1) * theta_nu(z, nu)
                err = abs(lhs - rhs) / max(abs(rhs), 1e-3)
                res.checked += 1
                res.worst = max(res.worst, err)
                if err >= 1e-8:
                    res.fail(f"g={g.rows()} z={z} nu={nu}: {lhs} vs {rhs}")
    return res


@_timed
def lifts(q_max: int = 200, ys=(1e-2, 1e-4)) -> SuiteResult:
    """Witness checks for every p in Z_q^x, q <= q_max."""
    res = SuiteResult("lifts")
    for q in range(1, q_max + 1):
        for p in coprime_residues(q):
            for y in ys:
                r = lift_rational(p, q, y)
                z_err, turns = verify_lift(r)
                k_err = abs(turns - round(turns))
                res.checked += 1
                res.worst = max(res.worst, z_err)
                if z_err >= 1e-10 or k_err > 1e-9 or not in_delta14(r.witness):
                    res.fail(f"p={p} q={q} y={y} case {r.case}: z err {z_err:.3g}, phi/4pi = {turns}")
    return res


@_timed
def reduction(n: int = 2000, seed: int = 11) -> SuiteResult:
    res = SuiteResult("reduction")
    rng = np.random.default_rng(seed)
    for _ in range(n):
        z = complex(rng.uniform(-50, 50), 10 ** rng.uniform(-6, 1))
        zs, word = reduce_to_fundamental_domain(z)
        w = zs.z
        img = moebius(word, z).z
        err = abs(img - w) / max(1.0, abs(w))
        res.checked += 1
        res.worst = max(res.worst, err)
        ok = (abs(w.real) <= 0.5 + 1e-12 and abs(w) >= 1 - 1e-12 and word.is_integral()
              and word.det() == 1 and err < 1e-6)
        if not ok:
            res.fail(f"z={z}: z*={w}, word={word.rows()}, image err {err:.3g}")
    return res


SUITES: Dict[str, Callable[[], SuiteResult]] = {
    "gauss-closed-form": gauss_closed_form,
    "weil-bounds": weil_bounds,
    "hermite": hermite,
    "theta-transform": theta_transform,
    "lifts": lifts,
    "reduction": reduction,
}


def run_suite(name: str) -> List[SuiteResult]:
    if name == "all":
        return [fn() for fn in SUITES.values()]
    if name not in SUITES:
        raise KeyError(name)
    return [SUITES[name]()]
