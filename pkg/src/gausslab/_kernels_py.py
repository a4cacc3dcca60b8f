"""Pure numpy fallback for the compiled kernels in _kernels.pyx.

Loops run over h and vectorize across p (or x), performing the same
Neumaier-compensated ascending-h summation as the compiled code, so the two
backends agree to rounding.
"""

from __future__ import annotations

import numpy as np

SPLITTER = 134217729.0  # 2**27 + 1
EXACT_H2_LIMIT = 1 << 27
EXACT_K_LIMIT = 1 << 54
TWO27 = float(1 << 27)
ANCHOR = 32
TWO_PI = 2.0 * np.pi


def _neumaier(s, c, v):
    t = s + v
    big = np.abs(s) >= np.abs(v)
    c += np.where(big, (s - t) + v, (v - t) + s)
    return t, c


def split(x):
    t = SPLITTER * x
    xh = t - (t - x)
    return xh, x - xh


def _frac(t):
    return t - np.floor(t)


def frac_mul(x, xh, xl, k: int):
    """Fractional part of x*k from exact partial products (k < 2**54)."""
    if k < EXACT_H2_LIMIT:
        r = _frac(xh * float(k)) + _frac(xl * float(k))
    elif k < EXACT_K_LIMIT:
        k1, k0 = float(k >> 27), float(k & (EXACT_H2_LIMIT - 1))
        r = (_frac(xh * k1 * TWO27) + _frac(xl * k1 * TWO27)) + (_frac(xh * k0) + _frac(xl * k0))
    else:
        r = _frac(x * float(k))
    return r - np.floor(r)


_QUARTER_RE = {0.0: 1.0, 0.25: 0.0, 0.5: -1.0, 0.75: 0.0}
_QUARTER_IM = {0.0: 0.0, 0.25: 1.0, 0.5: 0.0, 0.75: -1.0}


def cis(ph):
    """e(ph) for ph in [0, 1), exact at multiples of 1/4."""
    re, im = np.cos(TWO_PI * ph), np.sin(TWO_PI * ph)
    for k, v in _QUARTER_RE.items():
        hit = ph == k
        re = np.where(hit, v, re)
        im = np.where(hit, _QUARTER_IM[k], im)
    return re, im


def gauss_sum_batch(ps, q: int, h0: int, weights, roots):
    ps = np.asarray(ps, dtype=np.int64) % q
    weights = np.asarray(weights, dtype=np.float64)
    rr = np.ascontiguousarray(np.asarray(roots).real)
    ri = np.ascontiguousarray(np.asarray(roots).imag)
    sr = np.zeros(len(ps)); cr = np.zeros(len(ps))
    si = np.zeros(len(ps)); ci = np.zeros(len(ps))
    hm = h0 % q
    s = hm * hm % q
    d = (2 * hm + 1) % q
    for w in weights:
        idx = ps * s % q
        sr, cr = _neumaier(sr, cr, w * rr[idx])
        si, ci = _neumaier(si, ci, w * ri[idx])
        s = (s + d) % q
        d = (d + 2) % q
    return (sr + cr) + 1j * (si + ci)


def theta_sum_batch(xs, h0: int, weights):
    xs = np.asarray(xs, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    xh, xl = split(xs)
    ph = frac_mul(xs, xh, xl, 2)
    er, ei = cis(ph)
    n = len(xs)
    sr = np.zeros(n); cr = np.zeros(n); si = np.zeros(n); ci = np.zeros(n)
    tr = np.ones(n); ti = np.zeros(n); ur = np.ones(n); ui = np.zeros(n)
    for j, w in enumerate(weights):
        h = h0 + j
        if j % ANCHOR == 0:
            ph = frac_mul(xs, xh, xl, h * h)
            tr, ti = cis(ph)
            if 2 * h + 1 >= 0:
                ph = frac_mul(xs, xh, xl, 2 * h + 1)
            else:
                ph = frac_mul(xs, xh, xl, -(2 * h + 1))
                ph = np.where(ph > 0.0, 1.0 - ph, 0.0)
            ur, ui = cis(ph)
        sr, cr = _neumaier(sr, cr, w * tr)
        si, ci = _neumaier(si, ci, w * ti)
        tr, ti = tr * ur - ti * ui, tr * ui + ti * ur
        ur, ui = ur * er - ui * ei, ur * ei + ui * er
    return (sr + cr) + 1j * (si + ci)
