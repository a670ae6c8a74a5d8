"""Projective subspace constraints and the classifications derived from them.

The collection ``C(p)`` of all constraints ``(I, j)`` with ``rank(P_I) <= j``
is summarised by its flats: for every level ``j`` the maximal index sets of
rank at most ``j``. Every constraint is a subset of some flat, so the flats
decide general position, Tyler regularity and subspace-number membership.
Indices are 0-based internally and 1-based in serialized output.
"""

from dataclasses import dataclass, field
from itertools import combinations, islice
from math import gcd

import numpy as np

from .core import configuration_rank
from .errors import (
    DimensionMismatch,
    InstanceTooLarge,
    InvalidSubspaceNumbers,
    NotHausdorffInput,
    check_cancel,
)
from .linalg import batched_ranks, normalize_rows, numerical_rank

BRUTE_FORCE_CAP = 24


@dataclass(frozen=True)
class SubspaceConstraint:
    indices: frozenset
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(self.indices))
        if self.dim < 1 or len(self.indices) < self.dim:
            raise ValueError(f"invalid constraint ({sorted(self.indices)}, {self.dim})")

    @property
    def trivial(self):
        return len(self.indices) == self.dim


@dataclass(frozen=True)
class Flat:
    indices: frozenset
    rank: int

    def sorted(self):
        return tuple(sorted(self.indices))


@dataclass(frozen=True)
class ConstraintReport:
    """Non-trivial flats per level ``j = 1..d``.

    ``flats[j]`` is a tuple of :class:`Flat` sorted by index tuple. Trivial
    flats (``|I| == j``) are omitted.
    """

    d: int
    k: int
    flats: dict = field(compare=False)

    def __eq__(self, other):
        if not isinstance(other, ConstraintReport):
            return NotImplemented
        return (self.d, self.k) == (other.d, other.k) and self.as_sets() == other.as_sets()

    def as_sets(self):
        return {j: frozenset(f.indices for f in fl) for j, fl in self.flats.items()}

    def level(self, j):
        return self.flats.get(j, ())

    def __iter__(self):
        """Yield ``(indices, j, rank)`` for every listed flat."""
        for j in sorted(self.flats):
            for f in self.flats[j]:
                yield f.indices, j, f.rank

    @property
    def has_nontrivial(self):
        return any(self.flats[j] for j in self.flats)

    def permuted(self, perm):
        """Report of ``c.permuted(perm)``: old index ``perm[r]`` becomes ``r``."""
        inverse = {int(old): new for new, old in enumerate(perm)}
        return ConstraintReport(
            self.d,
            self.k,
            _sorted_levels(
                {
                    j: [Flat(frozenset(inverse[i] for i in f.indices), f.rank) for f in fl]
                    for j, fl in self.flats.items()
                }
            ),
        )

    def to_dict(self):
        return {
            "flats": {
                str(j): [{"indices": [i + 1 for i in f.sorted()], "rank": f.rank} for f in fl]
                for j, fl in sorted(self.flats.items())
            }
        }


def _sorted_levels(levels):
    return {j: tuple(sorted(fl, key=Flat.sorted)) for j, fl in levels.items()}


def _rank_j_closures(P, j, tol, cancel, include_trivial):
    """All closed sets of rank exactly ``j``, in order of discovery.

    For every ``j``-subset ``S`` the ranks of ``P_{S+i}`` are computed for all
    ``i`` in one batched SVD; entries with ``i`` in ``S`` give ``rank(P_S)``.
    """
    k, n = P.shape
    chunk = max(1, (1 << 20) // (k * (j + 1) * n))
    subsets = combinations(range(k), j)
    found = {}
    while True:
        check_cancel(cancel)
        block = np.array(list(islice(subsets, chunk)), dtype=np.intp).reshape(-1, j)
        m = block.shape[0]
        if m == 0:
            return list(found)
        stack = np.empty((m, k, j + 1, n))
        stack[:, :, :j, :] = P[block][:, None]
        stack[:, :, j, :] = P[None]
        ranks = batched_ranks(stack.reshape(m * k, j + 1, n), tol).reshape(m, k)
        own = ranks[np.arange(m), block[:, 0]]
        for row in np.flatnonzero(own == j):
            F = frozenset(np.flatnonzero(ranks[row] == j).tolist())
            if len(F) > j or include_trivial:
                found.setdefault(F, None)


def constraint_flats(c, tol=None, cancel=None):
    """Maximal constraint sets per level.

    For each ``j``-subset ``S`` spanning rank ``j`` the flat is
    ``{i : rank(P_{S+i}) = j}``; levels at or above the configuration rank
    have the full index set as their only flat.
    """
    P = normalize_rows(c.matrix)
    r = numerical_rank(P, tol)
    levels = {}
    for j in range(1, c.d + 1):
        if j >= r:
            levels[j] = [Flat(frozenset(range(c.k)), r)]
            continue
        levels[j] = [Flat(F, j) for F in _rank_j_closures(P, j, tol, cancel, False)]
    return ConstraintReport(c.d, c.k, _sorted_levels(levels))


def is_general_position(c, tol=None, report=None):
    report = report or constraint_flats(c, tol)
    return not report.has_nontrivial


@dataclass(frozen=True)
class SplitWitness:
    """A split ``rank(P_I) + rank(P_{I^c}) <= d + 1`` (0-based ``indices``)."""

    indices: frozenset
    rank: int
    complement_rank: int
    rank_deficient: bool = False

    @property
    def j(self):
        return self.rank

    def to_dict(self):
        return {
            "indices": [i + 1 for i in sorted(self.indices)],
            "j": self.rank,
            "complement_rank": self.complement_rank,
            "rank_deficient": self.rank_deficient,
        }


def _side_key(I):
    return (len(I), tuple(sorted(I)))


def is_splittable(c, tol=None, cancel=None, max_k=BRUTE_FORCE_CAP):
    """Return a :class:`SplitWitness` or ``None``.

    Rank-deficient configurations split off landmark 1. Otherwise both sides
    of a split are closed sets, and the side of smaller rank has rank at most
    ``(d+1)/2``, so only closures of low-rank subsets are tried. Among all
    splits the side minimizing ``(|I|, sorted I)`` is returned.
    """
    P = normalize_rows(c.matrix)
    d1 = c.d + 1
    r = numerical_rank(P, tol)
    if r < d1:
        rest = numerical_rank(P[1:], tol)
        return SplitWitness(frozenset({0}), 1, rest, rank_deficient=True)
    if c.k > max_k:
        raise InstanceTooLarge(f"k={c.k} exceeds the split-search cap {max_k}")
    everyone = frozenset(range(c.k))
    best = None
    for j in range(1, d1 // 2 + 1):
        for F in _rank_j_closures(P, j, tol, cancel, True):
            rest = everyone - F
            if not rest:
                continue
            rr = numerical_rank(P[sorted(rest)], tol)
            if j + rr > d1:
                continue
            for side, rk, crk in ((F, j, rr), (rest, rr, j)):
                if best is None or _side_key(side) < _side_key(best.indices):
                    best = SplitWitness(side, rk, crk)
    return best


def is_free(c, tol=None, cancel=None, max_k=BRUTE_FORCE_CAP):
    return is_splittable(c, tol, cancel, max_k) is None


def isotropy_dimension(c, tol=None):
    """Dimension of ``{(delta, beta) : diag(delta) P + P beta = 0}``.

    This is the Lie algebra of the stabilizer of ``P`` in diagonal x GL; it
    always contains the scalars, so ``c`` is free exactly when it equals 1.
    """
    P = normalize_rows(c.matrix)
    k, n = P.shape
    M = np.zeros((k * n, k + n * n))
    for i in range(k):
        for col in range(n):
            row = i * n + col
            M[row, i] = P[i, col]
            M[row, k + col : k + n * n : n] = P[i]
    return M.shape[1] - numerical_rank(M, tol)


def is_tyler_regular(c, tol=None, report=None):
    """Every non-trivial flat satisfies ``|I| (d+1) < j k`` (exact integers)."""
    report = report or constraint_flats(c, tol)
    return all(len(I) * (c.d + 1) < j * c.k for I, j, _ in report)


@dataclass(frozen=True)
class SubspaceNumbers:
    """Strictly increasing caps ``1 <= n_1 < ... < n_d``."""

    n: tuple

    def __post_init__(self):
        n = tuple(int(x) for x in self.n)
        if not n:
            raise InvalidSubspaceNumbers("subspace numbers must be nonempty")
        if n[0] < 1 or any(a >= b for a, b in zip(n, n[1:])):
            raise InvalidSubspaceNumbers(f"subspace numbers must satisfy 1 <= n_1 < ... < n_d, got {n}")
        object.__setattr__(self, "n", n)

    @property
    def d(self):
        return len(self.n)

    def __getitem__(self, j):
        """1-based access ``n_j``."""
        return self.n[j - 1]

    def __iter__(self):
        return iter(self.n)

    def __len__(self):
        return len(self.n)

    def tolist(self):
        return list(self.n)


def _numbers(n, d):
    if not isinstance(n, SubspaceNumbers):
        n = SubspaceNumbers(tuple(n))
    if n.d != d:
        raise DimensionMismatch(f"expected {d} subspace numbers, got {n.d}")
    return n


def tyler_numbers(d, k):
    """``t_j = ceil(j k / (d+1)) - 1`` for ``j = 1..d``."""
    if d < 1 or k < d + 3:
        raise ValueError(f"need d >= 1 and k >= d+3, got d={d}, k={k}")
    return SubspaceNumbers(tuple(-(-j * k // (d + 1)) - 1 for j in range(1, d + 1)))


def satisfies_subspace_numbers(c, n, tol=None, report=None):
    n = _numbers(n, c.d)
    report = report or constraint_flats(c, tol)
    return all(len(I) <= n[j] for I, j, _ in report)


def hausdorff_violations(n, d, k):
    """Levels ``j`` (1-based) with ``n_j + n_{d+1-j} >= k``."""
    n = _numbers(n, d)
    return [j for j in range(1, d + 1) if n[j] + n[d + 1 - j] >= k]


def is_hausdorff_numbers(n, d, k):
    return not hausdorff_violations(n, d, k)


def is_maximal_numbers(n, d, k):
    """No single strictly-increasing increment ``n + e_j`` stays Hausdorff.

    The criterion is monotone in ``n``, and any larger valid vector dominates
    some valid single increment, so probing increments suffices.
    """
    n = _numbers(n, d)
    if not is_hausdorff_numbers(n, d, k):
        raise NotHausdorffInput(f"{n.tolist()} violates the Hausdorff criterion for d={d}, k={k}")
    for j in range(1, d + 1):
        if j < d and n[j] + 1 >= n[j + 1]:
            continue
        m = list(n)
        m[j - 1] += 1
        if is_hausdorff_numbers(SubspaceNumbers(tuple(m)), d, k):
            return False
    return True


def tyler_maximal_gcd(d, k):
    if d < 1 or k < d + 3:
        raise ValueError(f"need d >= 1 and k >= d+3, got d={d}, k={k}")
    return gcd(k, d + 1) in (1, 2)


__all__ = [
    "BRUTE_FORCE_CAP",
    "ConstraintReport",
    "Flat",
    "SplitWitness",
    "SubspaceConstraint",
    "SubspaceNumbers",
    "configuration_rank",
    "constraint_flats",
    "hausdorff_violations",
    "is_free",
    "is_general_position",
    "is_hausdorff_numbers",
    "is_maximal_numbers",
    "is_splittable",
    "is_tyler_regular",
    "isotropy_dimension",
    "numerical_rank",
    "satisfies_subspace_numbers",
    "tyler_maximal_gcd",
    "tyler_numbers",
]
