"""Hermite polynomials and the L2-normalized Hermite functions h_nu.

h_nu(t) = (2^(nu-1) nu!)^(-1/2) H_nu(2 sqrt(pi) t) exp(-2 pi t^2), which is
sqrt(2 sqrt(pi)) times the standard orthonormal Hermite function evaluated
at u = 2 sqrt(pi) t.  The functions are generated by the normalized
three-term recurrence so no factorials appear.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["MAX_ORDER", "hermite_polynomial", "hermite_function", "hermite_functions"]

MAX_ORDER = 300
_SCALE = 2.0 * math.sqrt(math.pi)


def _check_order(nu: int) -> int:
    nu = int(nu)
    if nu < 0:
        raise ValueError("order must be non-negative")
    if nu > MAX_ORDER:
        raise OverflowError(f"order {nu} exceeds the supported maximum {MAX_ORDER}")
    return nu


def hermite_polynomial(nu: int, t):
    """Physicists' Hermite polynomial H_nu(t) via H_{n+1} = 2t H_n - 2n H_{n-1}."""
    nu = _check_order(nu)
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if nu == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * t
    for n in range(1, nu):
        prev, cur = cur, 2.0 * t * cur - 2.0 * n * prev
    return cur if cur.ndim else float(cur)


def hermite_functions(nu_max: int, t) -> np.ndarray:
    """Array of shape (nu_max+1, *t.shape) holding h_0(t) .. h_{nu_max}(t)."""
    nu_max = _check_order(nu_max)
    t = np.asarray(t, dtype=float)
    u = _SCALE * t
    out = np.empty((nu_max + 1,) + t.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * u * u)
    if nu_max >= 1:
        out[1] = math.sqrt(2.0) * u * out[0]
    for n in range(1, nu_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * u * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    out *= math.sqrt(_SCALE)
    return out


def hermite_function(nu: int, t):
    vals = hermite_functions(nu, t)[-1]
    return vals if vals.ndim else float(vals)
