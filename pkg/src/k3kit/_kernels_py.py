"""Pure numpy versions of the compiled kernels (same API, same results).

128-bit fixed-point numbers are handled as four 32-bit limbs held in
``uint64`` arrays so that limb products never overflow.
"""
import numpy as np

BACKEND = "python"

_MASK = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_CHUNK = 1 << 16


def _limbs(hi, lo):
    return [np.uint64(lo & 0xFFFFFFFF), np.uint64(lo >> 32),
            np.uint64(hi & 0xFFFFFFFF), np.uint64(hi >> 32)]


def _mul32(n, limbs):
    # n < 2**32, so n * limb + carry < 2**64
    out = []
    carry = np.zeros_like(n)
    for L in limbs:
        t = n * L + carry
        out.append(t & _MASK)
        carry = t >> _S32
    return out


def _mul(n, limbs):
    """n * X mod 2**128 for a uint64 array n."""
    n = np.asarray(n, dtype=np.uint64)
    low = _mul32(n & _MASK, limbs)
    high = _mul32(n >> _S32, limbs)
    shifted = [np.zeros_like(n)] + high[:3]
    return _add(low, shifted)


def _add(a, b):
    out = []
    carry = np.zeros_like(a[0])
    for x, y in zip(a, b):
        t = x + y + carry
        out.append(t & _MASK)
        carry = t >> _S32
    return out


def _neg(a):
    inv = [(~x) & _MASK for x in a]
    one = [np.ones_like(a[0])] + [np.zeros_like(a[0])] * 3
    return _add(inv, one)


def _to_unit(a):
    # same two-word conversion as the compiled kernel, so roundings agree
    hi = (a[3] << _S32) | a[2]
    lo = (a[1] << _S32) | a[0]
    return (hi.astype(np.float64) + lo.astype(np.float64) * 2.0 ** -64) * 2.0 ** -64


def _centred(a):
    neg = a[3] >= np.uint64(1 << 31)
    m = _neg(a)
    mag = np.where(neg, _to_unit(m), _to_unit(a))
    return np.where(neg, -mag, mag)


def residual_scan(p_hi, p_lo, q_hi, q_lo, n_start, n_stop):
    count = max(n_stop - n_start, 0)
    res_p = np.empty(count)
    res_q = np.empty(count)
    P, Q = _limbs(p_hi, p_lo), _limbs(q_hi, q_lo)
    for s in range(0, count, _CHUNK):
        n = np.arange(n_start + s, n_start + min(s + _CHUNK, count), dtype=np.uint64)
        res_p[s:s + len(n)] = _centred(_mul(n, P))
        res_q[s:s + len(n)] = _centred(_mul(n, Q))
    return res_p, res_q


def _signed_mul(k, limbs):
    kabs = np.abs(k).astype(np.uint64)
    prod = _mul(kabs, limbs)
    neg = _neg(prod)
    return [np.where(k < 0, b, a) for a, b in zip(prod, neg)]


def leaf_reduce(x1, x2, theta0, p_hi, p_lo, q_hi, q_lo):
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    f1, f2 = np.floor(x1), np.floor(x2)
    k1, k2 = f1.astype(np.int64), f2.astype(np.int64)
    rot = _add(_signed_mul(k1, _limbs(p_hi, p_lo)), _signed_mul(k2, _limbs(q_hi, q_lo)))
    t = theta0 - _to_unit(rot)
    t = t - np.floor(t)
    t[t >= 1.0] = 0.0
    return np.column_stack([x1 - f1, x2 - f2, t])


def dyadic_histogram(pts, cells):
    pts = np.asarray(pts, dtype=np.float64)
    idx = np.clip((pts * cells).astype(np.int64), 0, cells - 1)
    flat = (idx[:, 0] * cells + idx[:, 1]) * cells + idx[:, 2]
    return np.bincount(flat, minlength=cells ** 3).reshape(cells, cells, cells).astype(np.int64)
