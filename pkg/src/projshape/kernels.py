"""Backend selection for the hot sign-search kernel.

The compiled extension is used when it imports; setting
``PROJSHAPE_PURE_PYTHON=1`` forces the NumPy fallback.
"""

import os

import numpy as np

from . import _signsearch_py
from .errors import check_cancel

try:
    if os.environ.get("PROJSHAPE_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _signsearch
except ImportError:
    _signsearch = None

BACKEND = "cython" if _signsearch is not None else "python"
AVAILABLE = ("cython", "python") if _signsearch is not None else ("python",)

# low group size; its table of 2**14 doubles stays in cache
_LOW_BITS = 14
# candidates per cancellation check
_CHUNK = 1 << 20


def _max_sign_form_compiled(W, cancel):
    k = W.shape[0]
    b = min(k - 1, _LOW_BITS)
    qlow = np.empty(1 << b)
    _signsearch.low_table(W, b, qlow)
    total = 1 << (k - 1 - b)
    step = max(1, _CHUNK >> b)
    best, best_h, best_l = -np.inf, 0, 0
    for start in range(0, total, step):
        check_cancel(cancel)
        value, hmask, lmask = _signsearch.split_max(W, b, qlow, start, min(total, start + step))
        if value > best:
            best, best_h, best_l = value, hmask, lmask
    s = np.ones(k)
    for t in range(b):
        if (best_l >> t) & 1:
            s[t + 1] = -1.0
    for t in range(k - 1 - b):
        if (best_h >> t) & 1:
            s[b + 1 + t] = -1.0
    return float(best), s


def max_sign_form(W, cancel=None, backend=None):
    """Maximize ``s^T W s`` over ``s in {-1, +1}^k`` with ``s[0] = +1``.

    Parameters
    ----------
    W : ndarray, shape (k, k)
        Symmetric weight matrix.
    cancel : callable, optional
        Polled between chunks; returning True raises :class:`Cancelled`.
    backend : {"cython", "python"}, optional
        Defaults to :data:`BACKEND`.

    Returns
    -------
    value : float
    signs : ndarray of +-1.0
    """
    W = np.ascontiguousarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] < 1:
        raise ValueError("W must be a nonempty square matrix")
    if W.shape[0] == 1:
        return float(W[0, 0]), np.ones(1)
    backend = backend or BACKEND
    if backend == "cython":
        if _signsearch is None:
            raise RuntimeError("compiled sign-search extension is not available")
        return _max_sign_form_compiled(W, cancel)
    if backend == "python":
        return _signsearch_py.max_sign_form(W, cancel)
    raise ValueError(f"unknown backend {backend!r}")
