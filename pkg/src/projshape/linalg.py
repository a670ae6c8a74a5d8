"""Rank and basis helpers shared by every classification routine."""

import os

import numpy as np

DEFAULT_RANK_TOL = 1e-9


def default_tol():
    """Global relative rank tolerance; ``PROJSHAPE_TOL`` overrides it."""
    value = os.environ.get("PROJSHAPE_TOL")
    if value:
        return float(value)
    return DEFAULT_RANK_TOL


def _resolve(tol):
    return default_tol() if tol is None else float(tol)


def numerical_rank(M, tol=None):
    """Number of singular values above ``tol * sigma_max * max(rows, cols)``.

    Parameters
    ----------
    M : array_like, shape (m, n)
        Nonempty real matrix.
    tol : float, optional
        Relative threshold. Defaults to :func:`default_tol`.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        raise ValueError("numerical_rank of an empty matrix")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    # a nonzero matrix has rank >= 1 however coarse the tolerance
    return max(1, int(np.count_nonzero(s > _resolve(tol) * s[0] * max(M.shape))))


def batched_ranks(stack, tol=None):
    """Numerical ranks of a stack of equally sized matrices, shape (n, m, p)."""
    stack = np.asarray(stack, dtype=float)
    s = np.linalg.svd(stack, compute_uv=False)
    smax = s[:, :1]
    thresh = _resolve(tol) * smax * max(stack.shape[1:])
    ranks = np.maximum(np.count_nonzero(s > thresh, axis=1), 1)
    ranks[smax[:, 0] == 0.0] = 0
    return ranks


def normalize_rows(M):
    M = np.asarray(M, dtype=float)
    return M / np.linalg.norm(M, axis=1, keepdims=True)


def row_space_basis(M, tol=None):
    """Orthonormal basis (as rows) of the row space of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    r = numerical_rank(M, tol)
    _, _, vt = np.linalg.svd(M)
    return vt[:r]


def null_space_basis(M, tol=None):
    """Orthonormal basis (as columns) of ``{x : M x = 0}``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    r = numerical_rank(M, tol)
    _, _, vt = np.linalg.svd(M)
    return vt[r:].T
