"""Kernel backend selection.

The compiled extension ``gausslab._kernels`` is used when it imports;
otherwise the numpy implementation in ``gausslab._kernels_py`` takes over.
Set ``GAUSSLAB_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from types import ModuleType

import numpy as np

from . import _kernels_py

_compiled: ModuleType | None
try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _compiled = None

MAX_MODULUS = 1 << 31

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

if os.environ.get("GAUSSLAB_BACKEND", "").lower() == "python" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def get_backend(name: str | None = None) -> ModuleType:
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GAUSSLAB_THREADS", "1")))
    except ValueError:
        return 1


@lru_cache(maxsize=16)
def roots_of_unity(q: int) -> np.ndarray:
    """Read-only table of e(k/q), k = 0..q-1."""
    k = np.arange(q, dtype=np.float64)
    t = np.exp(2j * np.pi * k / q)
    # exact values where cheap: k = 0 and k = q/2, q/4, 3q/4
    t[0] = 1.0
    if q % 2 == 0:
        t[q // 2] = -1.0
    if q % 4 == 0:
        t[q // 4] = 1j
        t[3 * q // 4] = -1j
    t.setflags(write=False)
    return t


def _chunks(n: int, parts: int):
    parts = max(1, min(parts, n))
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(edges[i], edges[i + 1]) for i in range(parts)]


def gauss_sum_batch(ps, q: int, h0: int, weights, *, threads: int = 1, backend: str | None = None) -> np.ndarray:
    """Weighted sums sum_j w_j e_q(p (h0+j)^2), one per p, ascending-h compensated."""
    if not 1 <= q < MAX_MODULUS:
        raise ValueError(f"modulus {q} outside supported range [1, 2**31)")
    impl = get_backend(backend)
    ps = np.ascontiguousarray(ps, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    roots = roots_of_unity(int(q))
    if len(ps) == 0:
        return np.zeros(0, dtype=np.complex128)
    if threads <= 1 or len(ps) < 2 * threads:
        return impl.gauss_sum_batch(ps, int(q), int(h0), weights, roots)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(lambda ab: impl.gauss_sum_batch(ps[ab[0]:ab[1]], int(q), int(h0), weights, roots),
                         _chunks(len(ps), threads))
        return np.concatenate(list(parts))


def theta_sum_batch(xs, h0: int, weights, *, threads: int = 1, backend: str | None = None) -> np.ndarray:
    """Weighted sums sum_j w_j e(x (h0+j)^2), one per x."""
    impl = get_backend(backend)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if len(xs) == 0:
        return np.zeros(0, dtype=np.complex128)
    if threads <= 1 or len(xs) < 2 * threads:
        return impl.theta_sum_batch(xs, int(h0), weights)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(lambda ab: impl.theta_sum_batch(xs[ab[0]:ab[1]], int(h0), weights),
                         _chunks(len(xs), threads))
        return np.concatenate(list(parts))
