"""Finite-difference complex Hessians."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


def real_hessian(f: Callable[[np.ndarray], float], x: np.ndarray, h: Sequence[float]) -> np.ndarray:
    """Central-difference Hessian of a real function of real variables."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    h = np.broadcast_to(np.asarray(h, dtype=np.float64), (n,))
    Hm = np.empty((n, n))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        Hm[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / h[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h[i] * h[j])
            Hm[i, j] = Hm[j, i] = v
    return Hm


def complex_hessian(f: Callable[[np.ndarray], float], z: Sequence[complex],
                    h: Sequence[float]) -> np.ndarray:
    """Matrix of d^2 f / dz_i dzbar_j for a real function of complex variables.

    ``h[i]`` is the real step used for both Re z_i and Im z_i.
    """
    z = np.asarray(z, dtype=np.complex128)
    n = z.size
    x = np.concatenate([z.real, z.imag])
    steps = np.concatenate([np.asarray(h, float), np.asarray(h, float)])

    def g(v):
        return f(v[:n] + 1j * v[n:])

    R = real_hessian(g, x, steps)
    xx, yy = R[:n, :n], R[n:, n:]
    xy, yx = R[:n, n:], R[n:, :n]
    return 0.25 * (xx + yy) + 0.25j * (xy - yx)


def richardson_gap(f, z, h) -> float:
    """Largest entry difference between the Hessians at steps h and h/2."""
    A = complex_hessian(f, z, h)
    B = complex_hessian(f, z, np.asarray(h, float) / 2)
    return float(np.max(np.abs(A - B)))


def min_eigenvalue(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0])


def complex_hessian_batch(f: Callable[[np.ndarray], np.ndarray], Z: np.ndarray,
                          h: np.ndarray) -> np.ndarray:
    """Vectorised ``complex_hessian`` for N points at once.

    ``f`` maps an (N, n) complex array to N real values; ``Z`` is (N, n) and
    ``h`` the matching (N, n) array of real steps.  Returns (N, n, n).
    """
    Z = np.asarray(Z, dtype=np.complex128)
    N, n = Z.shape
    X = np.concatenate([Z.real, Z.imag], axis=1)
    S = np.concatenate([h, h], axis=1).astype(np.float64)
    m = 2 * n

    def g(V):
        return f(V[:, :n] + 1j * V[:, n:])

    R = np.empty((N, m, m))
    f0 = g(X)
    for i in range(m):
        ei = np.zeros((N, m))
        ei[:, i] = S[:, i]
        R[:, i, i] = (g(X + ei) - 2 * f0 + g(X - ei)) / S[:, i] ** 2
        for j in range(i + 1, m):
            ej = np.zeros((N, m))
            ej[:, j] = S[:, j]
            v = (g(X + ei + ej) - g(X + ei - ej) - g(X - ei + ej) + g(X - ei - ej)) / (4 * S[:, i] * S[:, j])
            R[:, i, j] = R[:, j, i] = v
    xx, yy = R[:, :n, :n], R[:, n:, n:]
    xy, yx = R[:, :n, n:], R[:, n:, :n]
    return 0.25 * (xx + yy) + 0.25j * (xy - yx)


def min_eigenvalues(Ms: np.ndarray) -> np.ndarray:
    Ms = np.asarray(Ms)
    return np.linalg.eigvalsh(0.5 * (Ms + np.conj(np.swapaxes(Ms, -1, -2))))[..., 0]
