# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Maximize ``s^T W s`` over sign vectors with ``s[0] = +1``.

The free signs ``1..k-1`` split into a low group ``1..b`` and a high group
``b+1..k-1``. The quadratic form of every low pattern is tabulated once.
For each high pattern (walked in Gray order) the low patterns are walked in
Gray order too; only the linear coupling term changes, by one product per
step, so each candidate costs O(1).

A mask bit ``t`` set means the corresponding sign is ``-1``.
"""

from libc.stdlib cimport free, malloc


cdef inline int _ctz(unsigned long long x) nogil:
    cdef int t = 0
    while (x & 1) == 0:
        x >>= 1
        t += 1
    return t


def low_table(const double[:, ::1] W, int b, double[::1] q):
    """Fill ``q[mask]`` with the quadratic form of the low signs ``1..b``."""
    cdef Py_ssize_t n = 1 << b
    cdef Py_ssize_t i, j, t, step
    cdef double value = 0.0, si
    cdef double *s = <double *> malloc((b + 1) * sizeof(double))
    cdef double *g = <double *> malloc((b + 1) * sizeof(double))
    cdef unsigned long long mask = 0
    if q.shape[0] < n:
        raise ValueError("output buffer too small")
    if s == NULL or g == NULL:
        free(s)
        free(g)
        raise MemoryError()
    with nogil:
        for i in range(b):
            s[i] = 1.0
        for i in range(b):
            g[i] = 0.0
            for j in range(b):
                g[i] += W[i + 1, j + 1]
            value += g[i]
        q[0] = value
        for step in range(1, n):
            t = _ctz(step)
            si = s[t]
            value += 4.0 * (W[t + 1, t + 1] - si * g[t])
            for i in range(b):
                g[i] -= 2.0 * si * W[t + 1, i + 1]
            s[t] = -si
            mask ^= (<unsigned long long> 1) << t
            q[mask] = value
    free(s)
    free(g)


def split_max(const double[:, ::1] W, int b, const double[::1] qlow, long long start, long long stop):
    """Best ``(value, high_mask, low_mask)`` over high Gray codes ``start <= n < stop``.

    ``W`` must be symmetric; ``qlow`` comes from :func:`low_table`. Ties keep
    the first candidate in walk order.
    """
    cdef Py_ssize_t k = W.shape[0]
    cdef Py_ssize_t nh = k - 1 - b
    cdef Py_ssize_t nlow = 1 << b
    cdef Py_ssize_t i, j, a, t, step
    cdef long long n, gray
    cdef double qa, lin, value, si, best
    cdef unsigned long long lmask, best_lmask = 0, best_h = 0
    if stop <= start:
        return float("-inf"), 0, 0
    # high group: position 0 is landmark 0, position p >= 1 is landmark b + p
    cdef double *sa = <double *> malloc((nh + 1) * sizeof(double))
    cdef double *ga = <double *> malloc((nh + 1) * sizeof(double))
    cdef double *h = <double *> malloc((b + 1) * sizeof(double))
    cdef double *sb = <double *> malloc((b + 1) * sizeof(double))
    cdef Py_ssize_t *idx = <Py_ssize_t *> malloc((nh + 1) * sizeof(Py_ssize_t))
    if sa == NULL or ga == NULL or h == NULL or sb == NULL or idx == NULL:
        free(sa)
        free(ga)
        free(h)
        free(sb)
        free(idx)
        raise MemoryError()
    with nogil:
        idx[0] = 0
        for a in range(1, nh + 1):
            idx[a] = b + a
        gray = start ^ (start >> 1)
        sa[0] = 1.0
        for a in range(1, nh + 1):
            sa[a] = -1.0 if (gray >> (a - 1)) & 1 else 1.0
        qa = 0.0
        for a in range(nh + 1):
            ga[a] = 0.0
            for j in range(nh + 1):
                ga[a] += W[idx[a], idx[j]] * sa[j]
            qa += sa[a] * ga[a]
        for t in range(b):
            h[t] = 0.0
            for a in range(nh + 1):
                h[t] += W[t + 1, idx[a]] * sa[a]
        best = -1e308
        n = start
        while True:
            lin = 0.0
            for t in range(b):
                sb[t] = 1.0
                lin += h[t]
            lmask = 0
            value = qa + qlow[0] + 2.0 * lin
            if value > best:
                best = value
                best_h = <unsigned long long> (n ^ (n >> 1))
                best_lmask = 0
            for step in range(1, nlow):
                t = _ctz(step)
                lin -= 2.0 * sb[t] * h[t]
                sb[t] = -sb[t]
                lmask ^= (<unsigned long long> 1) << t
                value = qa + qlow[lmask] + 2.0 * lin
                if value > best:
                    best = value
                    best_h = <unsigned long long> (n ^ (n >> 1))
                    best_lmask = lmask
            if n + 1 >= stop:
                break
            n += 1
            a = _ctz(n) + 1
            si = sa[a]
            qa += 4.0 * (W[idx[a], idx[a]] - si * ga[a])
            for j in range(nh + 1):
                ga[j] -= 2.0 * si * W[idx[a], idx[j]]
            for t in range(b):
                h[t] -= 2.0 * si * W[t + 1, idx[a]]
            sa[a] = -si
    free(sa)
    free(ga)
    free(h)
    free(sb)
    free(idx)
    return best, best_h, best_lmask
