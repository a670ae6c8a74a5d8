"""NumPy fallback for the sign search, used when the extension is not built.

Splits the free signs into two halves and evaluates every combination as
``q_A[a] + q_B[b] + 2 (S_A W_AB S_B^T)[a, b]`` one block of rows at a time.
"""

import numpy as np

from .errors import check_cancel

_BLOCK_ENTRIES = 1 << 22


def sign_table(n):
    """All ``2**n`` sign vectors; row ``r`` has ``-1`` where bit ``t`` of ``r`` is set."""
    codes = np.arange(1 << n, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(n, dtype=np.int64)) & 1
    return 1.0 - 2.0 * bits


def max_sign_form(W, cancel=None):
    """``(value, signs)`` maximizing ``s^T W s`` over ``s`` with ``s[0] = +1``."""
    k = W.shape[0]
    m = k - 1
    n_low = min(m, (m + 1) // 2, 12)
    low = np.arange(1, 1 + n_low)
    high = np.concatenate([[0], np.arange(1 + n_low, k)])
    SB = sign_table(n_low)
    SA = np.hstack([np.ones((1 << (len(high) - 1), 1)), sign_table(len(high) - 1)])
    qB = np.einsum("ij,jk,ik->i", SB, W[np.ix_(low, low)], SB)
    qA = np.einsum("ij,jk,ik->i", SA, W[np.ix_(high, high)], SA)
    cross = W[np.ix_(high, low)] @ SB.T
    rows = max(1, _BLOCK_ENTRIES // SB.shape[0])
    best, best_a, best_b = -np.inf, 0, 0
    for a0 in range(0, SA.shape[0], rows):
        check_cancel(cancel)
        block = qA[a0 : a0 + rows, None] + qB[None, :] + 2.0 * (SA[a0 : a0 + rows] @ cross)
        flat = int(np.argmax(block))
        a, b = divmod(flat, block.shape[1])
        if block[a, b] > best:
            best, best_a, best_b = float(block[a, b]), a0 + a, b
    s = np.empty(k)
    s[high] = SA[best_a]
    s[low] = SB[best_b]
    return best, s
