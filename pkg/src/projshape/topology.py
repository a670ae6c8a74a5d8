"""Constructive witnesses: blur sequences, non-separable shape pairs and
random generators for the property suites.
"""

from dataclasses import dataclass, field

import numpy as np

from .constraints import constraint_flats, is_general_position, is_splittable
from .core import Configuration, canonicalize_point
from .errors import InfeasibleConstraint, InvalidBlockPair, NotSplittable
from .linalg import normalize_rows, null_space_basis, numerical_rank

# entries at most this (relative to the largest) count as structural zeros
_ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ShapeSequence:
    """Terms ``terms[t]`` built at parameter ``ns[t]``.

    ``limits`` holds one limit (blur) or two (merge). For a merge sequence
    ``partner_terms[t]`` is a second representative of the shape of
    ``terms[t]``, close to ``limits[1]``. ``residuals[t]`` lists the max-norm
    distance of each representative to its limit.
    """

    terms: list
    limits: tuple
    description: str
    ns: list
    residuals: list
    bounds: list
    partner_terms: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a shape sequence needs at least one term")

    def to_dict(self):
        terms = []
        for t, term in enumerate(self.terms):
            entry = {
                "n": self.ns[t],
                "matrix": term.matrix.tolist(),
                "residual": self.residuals[t],
                "bound": self.bounds[t],
            }
            if self.partner_terms:
                entry["partner_matrix"] = self.partner_terms[t].matrix.tolist()
            terms.append(entry)
        return {
            "description": self.description,
            "limits": [c.matrix.tolist() for c in self.limits],
            "terms": terms,
            **self.meta,
        }


def _ns(n_terms, ns):
    if ns is None:
        if n_terms < 1:
            raise ValueError("n_terms must be >= 1")
        ns = range(1, n_terms + 1)
    ns = [int(n) for n in ns]
    if not ns or min(ns) < 1:
        raise ValueError("sequence parameters must be positive integers")
    return ns


def flats_strictly_weaker(term, c, tol=None):
    """Every flat of ``term`` lies inside a flat of ``c`` at the same level, and they differ."""
    a, b = constraint_flats(term, tol), constraint_flats(c, tol)
    if a == b:
        return False
    for indices, j, _ in a:
        if not any(indices <= f.indices for f in b.level(j)):
            return False
    return True


def _blur_rank_deficient(c, z_choices, tol):
    P = c.matrix
    _, _, vt = np.linalg.svd(P)
    L = P @ vt.T
    L[:, -1] = 0.0
    for z in z_choices(c.k, 1):
        T = L.copy()
        T[:, -1:] = z
        if flats_strictly_weaker(Configuration(T), c, tol):
            mask = np.zeros(P.shape, bool)
            mask[:, -1] = True
            return L, T, mask, z
    raise RuntimeError("no blur direction found")  # pragma: no cover


def _blur_split(c, w, z_choices, tol):
    k, n = c.k, c.d + 1
    I = sorted(w.indices)
    Ic = sorted(set(range(k)) - w.indices)
    P = c.matrix
    B = np.hstack([null_space_basis(P[Ic], tol), null_space_basis(P[I], tol)])
    j = w.rank
    L = np.zeros((k, n))
    L[I, :j] = P[I] @ B[:, :j]
    L[Ic, j:] = P[Ic] @ B[:, j:]
    # Z fills the zero block under the column group of the other side
    if len(Ic) > j:
        rows, cols = Ic, slice(0, j)
    else:
        rows, cols = I, slice(j, n)
    width = L[:, cols].shape[1]
    mask = np.zeros((k, n), bool)
    mask[np.ix_(rows, np.arange(n)[cols])] = True
    for Z in z_choices(len(rows), width):
        T = L.copy()
        T[mask] = Z.ravel()
        if flats_strictly_weaker(Configuration(T), c, tol):
            return L, T, mask, Z
    raise RuntimeError("no blur direction found")  # pragma: no cover


def _z_choices(seed):
    def gen(rows, cols):
        yield np.ones((rows, cols))
        rng = np.random.default_rng(seed)
        for _ in range(64):
            yield rng.standard_normal((rows, cols))

    return gen


def blur_sequence(c, n_terms=10, ns=None, tol=None, seed=0):
    """Sequence of one fixed blurred shape converging to a representative of ``c``.

    The limit ``L`` is ``c`` brought to block form by the split; each term
    is ``L`` with an extra block ``Z / n``, so every term has the shape of
    ``L + Z``. ``Z`` is all-ones unless that leaves the constraints
    unchanged, in which case seeded random blocks are tried.

    Raises
    ------
    NotSplittable
        ``c`` is free, so its blur is trivial.
    """
    w = is_splittable(c, tol)
    if w is None:
        raise NotSplittable("configuration is free; its blur is trivial")
    ns = _ns(n_terms, ns)
    choices = _z_choices(seed)
    if w.rank_deficient:
        L, T, mask, Z = _blur_rank_deficient(c, choices, tol)
        kind = "rank-deficient"
    else:
        L, T, mask, Z = _blur_split(c, w, choices, tol)
        kind = "split"
    z_max = float(np.max(np.abs(Z)))
    terms, residuals, bounds = [], [], []
    for n in ns:
        M = L.copy()
        M[mask] = T[mask] / n
        terms.append(Configuration(M))
        residuals.append(float(np.max(np.abs(M - L))))
        bounds.append(z_max / n)
    return ShapeSequence(
        terms,
        (Configuration(L),),
        f"blur ({kind}) of the split {[i + 1 for i in sorted(w.indices)]}",
        ns,
        residuals,
        bounds,
        meta={
            "blurred_shape": T.tolist(),
            "z_frobenius": float(np.linalg.norm(Z)),
            "witness": w.to_dict(),
        },
    )


# -- non-separable pairs ---------------------------------------------------


def _is_zero(M, scale):
    return M.size == 0 or float(np.max(np.abs(M))) <= _ZERO_TOL * scale


@dataclass(frozen=True, eq=False)
class BlockPair:
    """Two configurations in simultaneous block form with shared factors.

    ``block_rows`` and ``block_cols`` are the sizes ``l`` row blocks and
    ``m`` column blocks. ``row_factors[r]`` is the diagonal of ``D_r`` and
    ``col_factors[s]`` is ``B_s``; where both blocks are nonzero,
    ``Q_rs = D_r P_rs B_s``. Missing factors default to identities.
    """

    p_matrix: np.ndarray
    q_matrix: np.ndarray
    block_rows: tuple
    block_cols: tuple
    row_factors: tuple = None
    col_factors: tuple = None

    def __post_init__(self):
        P = np.array(self.p_matrix, dtype=float)
        Q = np.array(self.q_matrix, dtype=float)
        object.__setattr__(self, "p_matrix", P)
        object.__setattr__(self, "q_matrix", Q)
        object.__setattr__(self, "block_rows", tuple(int(x) for x in self.block_rows))
        object.__setattr__(self, "block_cols", tuple(int(x) for x in self.block_cols))
        if self.row_factors is None:
            object.__setattr__(self, "row_factors", tuple(np.ones(x) for x in self.block_rows))
        if self.col_factors is None:
            object.__setattr__(self, "col_factors", tuple(np.eye(x) for x in self.block_cols))
        violations = block_pair_violations(self)
        if violations:
            raise InvalidBlockPair("; ".join(violations))

    @property
    def l(self):
        return len(self.block_rows)

    @property
    def m(self):
        return len(self.block_cols)

    def row_slices(self):
        edges = np.concatenate([[0], np.cumsum(self.block_rows)])
        return [slice(int(a), int(b)) for a, b in zip(edges, edges[1:])]

    def col_slices(self):
        edges = np.concatenate([[0], np.cumsum(self.block_cols)])
        return [slice(int(a), int(b)) for a, b in zip(edges, edges[1:])]

    def block(self, which, r, s):
        M = self.p_matrix if which == "p" else self.q_matrix
        return M[self.row_slices()[r], self.col_slices()[s]]

    def p(self):
        return Configuration(self.p_matrix)

    def q(self):
        return Configuration(self.q_matrix)

    def to_dict(self):
        return {
            "p": self.p_matrix.tolist(),
            "q": self.q_matrix.tolist(),
            "block_rows": list(self.block_rows),
            "block_cols": list(self.block_cols),
        }


def block_pair_violations(pair):
    """Human-readable list of violated structural conditions; empty if valid."""
    P, Q = pair.p_matrix, pair.q_matrix
    out = []
    if P.shape != Q.shape or P.ndim != 2:
        return ["p and q must be matrices of the same size"]
    if sum(pair.block_rows) != P.shape[0] or sum(pair.block_cols) != P.shape[1]:
        return ["block sizes do not partition the matrix"]
    if min(pair.block_rows) < 1 or min(pair.block_cols) < 1:
        return ["block sizes must be positive"]
    if len(pair.row_factors) != pair.l or len(pair.col_factors) != pair.m:
        return ["one factor per block is required"]
    if pair.l < 2 or pair.m < 2:
        out.append("(i) needs at least two row blocks and two column blocks")
    scale = max(float(np.max(np.abs(P))), float(np.max(np.abs(Q))), 1e-300)
    l, m = pair.l, pair.m
    pz = [[_is_zero(pair.block("p", r, s), scale) for s in range(m)] for r in range(l)]
    qz = [[_is_zero(pair.block("q", r, s), scale) for s in range(m)] for r in range(l)]
    for r in range(l):
        D = np.asarray(pair.row_factors[r], dtype=float)
        if D.shape != (pair.block_rows[r],) or np.any(D == 0):
            out.append(f"(ii) D_{r + 1} must be a nonsingular diagonal of size {pair.block_rows[r]}")
    for s in range(m):
        B = np.asarray(pair.col_factors[s], dtype=float)
        if B.shape != (pair.block_cols[s],) * 2 or numerical_rank(B) < B.shape[0]:
            out.append(f"(ii) B_{s + 1} must be nonsingular of size {pair.block_cols[s]}")
    if out:
        return out
    for r, s in ((0, 0), (l - 1, m - 1)):
        if pz[r][s] or qz[r][s]:
            out.append(f"(ii) corner block ({r + 1},{s + 1}) must be nonzero in both")
    for r in range(l):
        for s in range(m):
            if not pz[r][s] and not qz[r][s]:
                expected = pair.row_factors[r][:, None] * pair.block("p", r, s) @ pair.col_factors[s]
                if np.max(np.abs(expected - pair.block("q", r, s))) > 1e-9 * scale:
                    out.append(f"(ii) Q_{r + 1}{s + 1} != D_{r + 1} P_{r + 1}{s + 1} B_{s + 1}")
            if not pz[r][s] and any(
                not qz[a][b] for a in range(r + 1) for b in range(s, m) if (a, b) != (r, s)
            ):
                out.append(f"(iii) P_{r + 1}{s + 1} must vanish")
            if not qz[r][s] and any(
                not pz[a][b] for a in range(r, l) for b in range(s + 1) if (a, b) != (r, s)
            ):
                out.append(f"(iv) Q_{r + 1}{s + 1} must vanish")
    return out


def nonhausdorff_witness(d, k):
    """Two distinct free shapes with frames that no pair of neighbourhoods separates.

    For ``k = d + 3``: ``P`` stacks the all-ones row over the identity with
    its last row doubled, ``Q`` doubles the first identity row and ends in
    the all-ones row. Larger ``k`` repeats the landmark ``e_1``.
    """
    if d < 1 or k < d + 3:
        raise ValueError(f"need d >= 1 and k >= d+3, got d={d}, k={k}")
    n = d + 1
    eye = np.eye(n)
    ones = np.ones((1, n))
    extra = np.repeat(eye[:1], k - d - 3, axis=0)
    P = np.vstack([ones, eye[:1], extra, eye[1:], eye[-1:]])
    Q = np.vstack([eye[:1], eye[:1], extra, eye[1:], ones])
    rows = (2 + k - d - 3,) + (1,) * (d - 1) + (2,)
    return BlockPair(P, Q, rows, (1,) * n)


def merge_speeds(pair):
    """Smallest ``(d_r, b_s)`` in ``N_0`` obeying the ordering constraints.

    Both sequences strictly increase; ``d_r = b_s`` where both blocks are
    nonzero, ``d_r < b_s`` where only ``P_rs`` is, ``d_r > b_s`` where only
    ``Q_rs`` is. Solved as longest paths in the difference-constraint graph.
    """
    l, m = pair.l, pair.m
    scale = max(float(np.max(np.abs(pair.p_matrix))), float(np.max(np.abs(pair.q_matrix))))
    # x[u] >= x[v] + w, variables 0..l-1 are d_r and l..l+m-1 are b_s
    edges = []
    for r in range(1, l):
        edges.append((r, r - 1, 1))
    for s in range(1, m):
        edges.append((l + s, l + s - 1, 1))
    for r in range(l):
        for s in range(m):
            pn = not _is_zero(pair.block("p", r, s), scale)
            qn = not _is_zero(pair.block("q", r, s), scale)
            if pn and qn:
                edges += [(r, l + s, 0), (l + s, r, 0)]
            elif pn:
                edges.append((l + s, r, 1))
            elif qn:
                edges.append((r, l + s, 1))
    x = [0] * (l + m)
    for _ in range(l + m + 1):
        changed = False
        for u, v, w in edges:
            if x[v] + w > x[u]:
                x[u] = x[v] + w
                changed = True
        if not changed:
            return x[:l], x[l:]
    raise InvalidBlockPair("speed constraints are contradictory")


def merge_sequence(pair, n_terms=10, ns=None):
    """Configurations ``A(n)`` close to ``P`` whose transforms ``D_n A B_n`` approach ``Q``.

    Returns a :class:`ShapeSequence` with ``terms`` the ``A(n)`` and
    ``partner_terms`` the transformed representatives. ``bounds[t]`` is
    ``max block norm / n``; both residuals stay below it.
    """
    if not isinstance(pair, BlockPair):
        raise InvalidBlockPair("merge_sequence needs a BlockPair")
    ns = _ns(n_terms, ns)
    dr, bs = merge_speeds(pair)
    P, Q = pair.p_matrix, pair.q_matrix
    scale = max(float(np.max(np.abs(P))), float(np.max(np.abs(Q))))
    R, C = pair.row_slices(), pair.col_slices()
    shared = [[False] * pair.m for _ in range(pair.l)]
    for r in range(pair.l):
        for s in range(pair.m):
            shared[r][s] = not _is_zero(pair.block("p", r, s), scale) and not _is_zero(
                pair.block("q", r, s), scale
            )
    Dt = [pair.row_factors[r] if any(shared[r]) else np.ones(pair.block_rows[r]) for r in range(pair.l)]
    Bt = [
        pair.col_factors[s] if any(shared[r][s] for r in range(pair.l)) else np.eye(pair.block_cols[s])
        for s in range(pair.m)
    ]
    Bt_inv = [np.linalg.inv(B) for B in Bt]
    block_norm = 0.0
    for r in range(pair.l):
        for s in range(pair.m):
            block_norm = max(
                block_norm,
                float(np.max(np.abs(Dt[r][:, None] * P[R[r], C[s]] @ Bt[s]))),
                float(np.max(np.abs((Q[R[r], C[s]] / Dt[r][:, None]) @ Bt_inv[s]))),
            )
    terms, partners, residuals, bounds = [], [], [], []
    for n in ns:
        A = np.zeros_like(P)
        Dn = np.concatenate([float(n) ** dr[r] * Dt[r] for r in range(pair.l)])
        Bn = np.zeros((P.shape[1], P.shape[1]))
        for r in range(pair.l):
            for s in range(pair.m):
                if _is_zero(pair.block("p", r, s), scale):
                    A[R[r], C[s]] = float(n) ** (bs[s] - dr[r]) * (Q[R[r], C[s]] / Dt[r][:, None]) @ Bt_inv[s]
                else:
                    A[R[r], C[s]] = P[R[r], C[s]]
        for s in range(pair.m):
            Bn[C[s], C[s]] = float(n) ** (-bs[s]) * Bt[s]
        QA = Dn[:, None] * A @ Bn
        terms.append(Configuration(A))
        partners.append(Configuration(QA))
        residuals.append(
            {"p": float(np.max(np.abs(A - P))), "q": float(np.max(np.abs(QA - Q)))}
        )
        bounds.append(block_norm / n)
    return ShapeSequence(
        terms,
        (Configuration(P), Configuration(Q)),
        "merge of a non-separable block pair",
        ns,
        residuals,
        bounds,
        partner_terms=partners,
        meta={"speeds": {"d": dr, "b": bs}, "block_norm": block_norm},
    )


# -- generators ------------------------------------------------------------


def _sphere_rows(rng, k, n):
    X = normalize_rows(rng.standard_normal((k, n)))
    return np.array([canonicalize_point(x).coords for x in X])


def random_general_position(d, k, seed=None, tol=None):
    """Landmarks uniform on the sphere, canonicalized, resampled until in general position."""
    rng = np.random.default_rng(seed)
    while True:
        c = Configuration(_sphere_rows(rng, k, d + 1))
        if is_general_position(c, tol):
            return c


def random_with_constraint(d, k, constraint, seed=None, complement=False):
    """Configuration with the landmarks ``I`` (0-based) in a random rank-``j`` subspace.

    With ``complement=True`` the remaining landmarks are placed in a random
    rank ``d + 1 - j`` subspace, which plants a split.

    Raises
    ------
    InfeasibleConstraint
        ``(I, j)`` is trivial, out of range, or ``j > d``.
    """
    I, j = constraint
    I = sorted({int(i) for i in I})
    n = d + 1
    if not 1 <= j <= d:
        raise InfeasibleConstraint(f"level j={j} must lie in 1..{d}")
    if not I or I[0] < 0 or I[-1] >= k:
        raise InfeasibleConstraint(f"indices must lie in 0..{k - 1}")
    if len(I) <= j:
        raise InfeasibleConstraint(f"constraint ({[i + 1 for i in I]}, {j}) is trivial")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((k, n))
    U = rng.standard_normal((j, n))
    X[I] = rng.standard_normal((len(I), j)) @ U
    if complement:
        rest = sorted(set(range(k)) - set(I))
        V = rng.standard_normal((n - j, n))
        X[rest] = rng.standard_normal((len(rest), n - j)) @ V
    return Configuration(np.array([canonicalize_point(x).coords for x in X]))
