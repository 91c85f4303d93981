# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.

Fixed-point convention: a real x in [0, 1) is carried as the 128-bit integer
round(x * 2**128), split into two unsigned 64-bit halves (hi, lo).  Products
n*X are then exact modulo 2**128, which keeps ||n x|| accurate to ~2**-100
for every n we scan.  ``k3kit._kernels_py`` mirrors this API in numpy.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cdef extern from *:
    """
    typedef unsigned __int128 k3_u128;
    typedef __int128 k3_i128;
    """
    ctypedef unsigned long long k3_u128
    ctypedef long long k3_i128

cdef double TWO_M64 = 5.421010862427522e-20   # 2**-64
cdef k3_u128 HALF = (<k3_u128>1) << 127

BACKEND = "compiled"


cdef inline k3_u128 _join(unsigned long long hi, unsigned long long lo) noexcept nogil:
    return ((<k3_u128>hi) << 64) | lo


cdef inline double _centred(k3_u128 r) noexcept nogil:
    # signed value of r / 2**128 in [-1/2, 1/2); computed from the magnitude so
    # that residuals near 0 keep full relative precision
    cdef k3_u128 m
    cdef double v
    if r >= HALF:
        m = (~r) + 1
        v = (<double>(<unsigned long long>(m >> 64)) + <double>(<unsigned long long>m) * TWO_M64) * TWO_M64
        return -v
    v = (<double>(<unsigned long long>(r >> 64)) + <double>(<unsigned long long>r) * TWO_M64) * TWO_M64
    return v


cdef inline double _unit(k3_u128 r) noexcept nogil:
    # r / 2**128 in [0, 1)
    return (<double>(<unsigned long long>(r >> 64)) + <double>(<unsigned long long>r) * TWO_M64) * TWO_M64


def residual_scan(unsigned long long p_hi, unsigned long long p_lo,
                  unsigned long long q_hi, unsigned long long q_lo,
                  Py_ssize_t n_start, Py_ssize_t n_stop):
    """Signed residuals n*p - round(n*p), n*q - round(n*q) for n in [n_start, n_stop)."""
    cdef Py_ssize_t count = max(n_stop - n_start, 0)
    res_p = np.empty(count, dtype=np.float64)
    res_q = np.empty(count, dtype=np.float64)
    cdef double[::1] rp = res_p
    cdef double[::1] rq = res_q
    cdef k3_u128 P = _join(p_hi, p_lo)
    cdef k3_u128 Q = _join(q_hi, q_lo)
    cdef k3_u128 ap = P * (<k3_u128>n_start)
    cdef k3_u128 aq = Q * (<k3_u128>n_start)
    cdef Py_ssize_t i
    with nogil:
        for i in range(count):
            rp[i] = _centred(ap)
            rq[i] = _centred(aq)
            ap = ap + P
            aq = aq + Q
    return res_p, res_q


def leaf_reduce(cnp.ndarray x1_in, cnp.ndarray x2_in, double theta0,
                unsigned long long p_hi, unsigned long long p_lo,
                unsigned long long q_hi, unsigned long long q_lo):
    """Reduce lattice coordinates to the fundamental domain and rotate the fibre angle.

    Returns an (N, 3) array (frac x1, frac x2, theta0 - k1 p - k2 q mod 1)
    with k = floor(x).
    """
    cdef double[::1] x1 = np.ascontiguousarray(x1_in, dtype=np.float64)
    cdef double[::1] x2 = np.ascontiguousarray(x2_in, dtype=np.float64)
    cdef Py_ssize_t n = x1.shape[0]
    out = np.empty((n, 3), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef k3_u128 P = _join(p_hi, p_lo)
    cdef k3_u128 Q = _join(q_hi, q_lo)
    cdef Py_ssize_t i
    cdef double f1, f2, t
    cdef long long k1, k2
    cdef k3_u128 rot
    with nogil:
        for i in range(n):
            f1 = floor(x1[i])
            f2 = floor(x2[i])
            k1 = <long long>f1
            k2 = <long long>f2
            o[i, 0] = x1[i] - f1
            o[i, 1] = x2[i] - f2
            # negative k wraps correctly modulo 2**128
            rot = (<k3_u128>(<k3_i128>k1)) * P + (<k3_u128>(<k3_i128>k2)) * Q
            t = theta0 - _unit(rot)
            t = t - floor(t)
            if t >= 1.0:
                t = 0.0
            o[i, 2] = t
    return out


def dyadic_histogram(cnp.ndarray pts_in, int cells):
    """Counts of points of [0,1)^3 in a cells^3 uniform grid."""
    cdef double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    hist = np.zeros((cells, cells, cells), dtype=np.int64)
    cdef long long[:, :, ::1] h = hist
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef int a, b, c
    with nogil:
        for i in range(n):
            a = <int>(pts[i, 0] * cells)
            b = <int>(pts[i, 1] * cells)
            c = <int>(pts[i, 2] * cells)
            if a >= cells:
                a = cells - 1
            if b >= cells:
                b = cells - 1
            if c >= cells:
                c = cells - 1
            if a < 0:
                a = 0
            if b < 0:
                b = 0
            if c < 0:
                c = 0
            h[a, b, c] += 1
    return hist
