"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when
``K3KIT_KERNELS=python`` is set, the numpy fallback is used.  Both expose
``residual_scan``, ``leaf_reduce`` and ``dyadic_histogram``.
"""
import os

from . import _kernels_py


def _select():
    if os.environ.get("K3KIT_KERNELS", "").lower() == "python":
        return _kernels_py
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return _kernels_py
    return _kernels


kernels = _select()
BACKEND = kernels.BACKEND


def fixed128(x) -> tuple[int, int]:
    """Split round(frac(x) * 2**128) into (hi, lo) 64-bit halves.

    ``x`` may be a Fraction, int, float or mpmath number; the fractional part
    is taken exactly for rationals.
    """
    from fractions import Fraction

    import mpmath

    if isinstance(x, (int, Fraction)):
        f = Fraction(x)
        f -= f.numerator // f.denominator
        r = round(f * (1 << 128))
    else:
        with mpmath.workprec(256):
            v = mpmath.mpf(x)
            v -= mpmath.floor(v)
            r = int(mpmath.nint(v * mpmath.mpf(2) ** 128))
    r %= 1 << 128
    return r >> 64, r & ((1 << 64) - 1)
