# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for weighted quadratic exponential sums.

Both kernels sum in ascending h with Neumaier compensation on the real and
imaginary parts separately.  _kernels_py mirrors them operation for
operation.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, cos, sin, fabs

cnp.import_array()

cdef double TWO_PI = 6.283185307179586
cdef double SPLITTER = 134217729.0  # 2**27 + 1
cdef long long EXACT_H2_LIMIT = 134217728  # 2**27
cdef long long EXACT_K_LIMIT = 18014398509481984  # 2**54
cdef double TWO27 = 134217728.0
cdef int ANCHOR = 32


cdef inline void _neumaier(double *s, double *c, double v) noexcept nogil:
    cdef double t = s[0] + v
    if fabs(s[0]) >= fabs(v):
        c[0] += (s[0] - t) + v
    else:
        c[0] += (v - t) + s[0]
    s[0] = t


cdef inline double _frac(double t) noexcept nogil:
    return t - floor(t)


cdef inline double _frac_mul(double x, double xh, double xl, long long k) noexcept nogil:
    # fractional part of x*k from exact partial products: x = xh + xl with
    # 26/27-bit halves, k split into 27-bit limbs; exact terms for k < 2**54
    cdef double r, k0, k1
    if k < EXACT_H2_LIMIT:
        r = _frac(xh * <double>k) + _frac(xl * <double>k)
    elif k < EXACT_K_LIMIT:
        k1 = <double>(k >> 27)
        k0 = <double>(k & (EXACT_H2_LIMIT - 1))
        r = (_frac(xh * k1 * TWO27) + _frac(xl * k1 * TWO27)) + (_frac(xh * k0) + _frac(xl * k0))
    else:
        r = _frac(x * <double>k)
    return r - floor(r)


cdef inline void _cis(double ph, double *re, double *im) noexcept nogil:
    # e(ph) for ph in [0, 1), exact at multiples of 1/4
    if ph == 0.0:
        re[0] = 1.0; im[0] = 0.0
    elif ph == 0.25:
        re[0] = 0.0; im[0] = 1.0
    elif ph == 0.5:
        re[0] = -1.0; im[0] = 0.0
    elif ph == 0.75:
        re[0] = 0.0; im[0] = -1.0
    else:
        re[0] = cos(TWO_PI * ph); im[0] = sin(TWO_PI * ph)


def gauss_sum_batch(const long long[:] ps, long long q, long long h0,
                    const double[:] weights, roots):
    """sum_j weights[j] * e(p (h0+j)^2 / q) for every p in ps."""
    cdef Py_ssize_t n_p = ps.shape[0], n_h = weights.shape[0], i, j
    out = np.empty(n_p, dtype=np.complex128)
    cdef double complex[:] res = out
    cdef const double[:] rr = np.ascontiguousarray(np.asarray(roots).real)
    cdef const double[:] ri = np.ascontiguousarray(np.asarray(roots).imag)
    cdef long long hm, s0, d0, s, d, p, idx
    cdef double sr, cr, si, ci, w
    hm = ((h0 % q) + q) % q
    s0 = (hm * hm) % q
    d0 = ((2 * hm + 1) % q + q) % q
    with nogil:
        for i in range(n_p):
            p = ((ps[i] % q) + q) % q
            s = s0
            d = d0
            sr = 0.0; cr = 0.0; si = 0.0; ci = 0.0
            for j in range(n_h):
                w = weights[j]
                idx = (p * s) % q
                _neumaier(&sr, &cr, w * rr[idx])
                _neumaier(&si, &ci, w * ri[idx])
                s = s + d
                if s >= q:
                    s = s - q
                d = d + 2
                if d >= q:
                    d = d - q
            res[i] = (sr + cr) + 1j * (si + ci)
    return out


def theta_sum_batch(const double[:] xs, long long h0, const double[:] weights):
    """sum_j weights[j] * e(x (h0+j)^2) for every x in xs."""
    cdef Py_ssize_t n_x = xs.shape[0], n_h = weights.shape[0], i, j
    out = np.empty(n_x, dtype=np.complex128)
    cdef double complex[:] res = out
    cdef double x, xh, xl, t, ph, w
    cdef double tr, ti, ur, ui, er, ei, nr, ni
    cdef double sr, cr, si, ci
    cdef long long h, ah
    with nogil:
        for i in range(n_x):
            x = xs[i]
            t = SPLITTER * x
            xh = t - (t - x)
            xl = x - xh
            ph = _frac_mul(x, xh, xl, 2)
            _cis(ph, &er, &ei)
            sr = 0.0; cr = 0.0; si = 0.0; ci = 0.0
            tr = 1.0; ti = 0.0; ur = 1.0; ui = 0.0
            for j in range(n_h):
                h = h0 + j
                ah = h if h >= 0 else -h
                if j % ANCHOR == 0:
                    ph = _frac_mul(x, xh, xl, ah * ah)
                    _cis(ph, &tr, &ti)
                    # step from h^2 to (h+1)^2 is e(x (2h+1))
                    if 2 * h + 1 >= 0:
                        ph = _frac_mul(x, xh, xl, 2 * h + 1)
                    else:
                        ph = _frac_mul(x, xh, xl, -(2 * h + 1))
                        ph = 1.0 - ph if ph > 0.0 else 0.0
                    _cis(ph, &ur, &ui)
                w = weights[j]
                _neumaier(&sr, &cr, w * tr)
                _neumaier(&si, &ci, w * ti)
                nr = tr * ur - ti * ui
                ni = tr * ui + ti * ur
                tr = nr; ti = ni
                nr = ur * er - ui * ei
                ni = ur * ei + ui * er
                ur = nr; ui = ni
            res[i] = (sr + cr) + 1j * (si + ci)
    return out
