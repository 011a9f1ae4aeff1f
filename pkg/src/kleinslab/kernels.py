"""Batched dense complex solves by Gaussian elimination with partial pivoting.

Two implementations of the same algorithm: a numba kernel looping over the
batch, and a numpy version vectorised across the batch. :func:`lu_solve_batch`
dispatches on :data:`kleinslab._jit.USE_NUMBA`.
"""

import numpy as np

from ._jit import USE_NUMBA, njit


def _prepare(M, B):
    M = np.ascontiguousarray(M, dtype=np.complex128)
    B = np.ascontiguousarray(B, dtype=np.complex128)
    if M.ndim != 3 or M.shape[1] != M.shape[2]:
        raise ValueError(f"expected a (batch, n, n) matrix stack, got shape {M.shape}")
    if B.ndim != 3 or B.shape[:2] != M.shape[:2]:
        raise ValueError(f"right-hand sides must have shape (batch, n, m), got {B.shape}")
    return M, B


@njit(cache=True, nogil=True)
def _lu_solve_numba(M, B):
    nb, n, _ = M.shape
    m = B.shape[2]
    X = np.empty((nb, n, m), dtype=np.complex128)
    singular = np.zeros(nb, dtype=np.bool_)
    a = np.empty((n, n), dtype=np.complex128)
    b = np.empty((n, m), dtype=np.complex128)
    for s in range(nb):
        a[:, :] = M[s]
        b[:, :] = B[s]
        for k in range(n):
            p = k
            big = abs(a[k, k])
            for i in range(k + 1, n):
                v = abs(a[i, k])
                if v > big:
                    big = v
                    p = i
            if big == 0.0:
                singular[s] = True
                break
            if p != k:
                for j in range(n):
                    t = a[k, j]
                    a[k, j] = a[p, j]
                    a[p, j] = t
                for j in range(m):
                    t = b[k, j]
                    b[k, j] = b[p, j]
                    b[p, j] = t
            piv = a[k, k]
            for i in range(k + 1, n):
                f = a[i, k] / piv
                if f != 0:
                    for j in range(k + 1, n):
                        a[i, j] -= f * a[k, j]
                    for j in range(m):
                        b[i, j] -= f * b[k, j]
                a[i, k] = 0.0
        if singular[s]:
            for i in range(n):
                for j in range(m):
                    X[s, i, j] = np.nan
            continue
        for j in range(m):
            for i in range(n - 1, -1, -1):
                acc = b[i, j]
                for q in range(i + 1, n):
                    acc -= a[i, q] * X[s, q, j]
                X[s, i, j] = acc / a[i, i]
    return X, singular


def _lu_solve_numpy(M, B):
    a = M.copy()
    b = B.copy()
    nb, n, _ = a.shape
    rows = np.arange(nb)
    singular = np.zeros(nb, dtype=bool)
    for k in range(n):
        p = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        big = np.abs(a[rows, p, k])
        singular |= big == 0.0
        swap = p != k
        if swap.any():
            idx = rows[swap]
            pk = p[swap]
            a[idx, k], a[idx, pk] = a[idx, pk].copy(), a[idx, k].copy()
            b[idx, k], b[idx, pk] = b[idx, pk].copy(), b[idx, k].copy()
        piv = np.where(singular, 1.0, a[:, k, k])
        f = a[:, k + 1:, k] / piv[:, None]
        a[:, k + 1:, k:] -= f[:, :, None] * a[:, None, k, k:]
        b[:, k + 1:, :] -= f[:, :, None] * b[:, None, k, :]
    X = np.empty_like(b)
    diag = np.where(singular[:, None], 1.0, np.diagonal(a, axis1=1, axis2=2))
    for i in range(n - 1, -1, -1):
        acc = b[:, i, :] - (a[:, i, i + 1:, None] * X[:, i + 1:, :]).sum(axis=1)
        X[:, i, :] = acc / diag[:, i, None]
    X[singular] = np.nan
    return X, singular


def lu_solve_batch(M, B, use_numba=None):
    """Solve ``M[s] @ X[s] = B[s]`` for every ``s`` in the batch.

    Parameters
    ----------
    M : array_like, shape (batch, n, n)
    B : array_like, shape (batch, n, m)
    use_numba : bool, optional
        Override the module-wide choice of kernel.

    Returns
    -------
    X : ndarray, shape (batch, n, m), complex128
        NaN rows where the matrix is exactly singular.
    singular : ndarray of bool, shape (batch,)
    """
    M, B = _prepare(M, B)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _lu_solve_numba(M, B)
    return _lu_solve_numpy(M, B)
