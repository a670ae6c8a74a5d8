"""Tyler standardization, the projection embedding and the shape distance.

A Tyler standardized representative ``P`` has orthonormal columns and rows
of squared norm ``(d+1)/k``. It is unique up to row signs and a right
orthogonal factor, so ``P P^t`` removes the orthogonal part and only the
``2^(k-1)`` sign classes remain to be searched.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .constraints import BRUTE_FORCE_CAP, SplitWitness, constraint_flats, is_tyler_regular
from .core import Configuration
from .errors import (
    DimensionMismatch,
    InstanceTooLarge,
    NotStandardizable,
    NotStandardized,
    RankDeficient,
    ZeroRow,
    check_cancel,
)
from .linalg import normalize_rows, numerical_rank

STANDARDIZE_TOL = 1e-10
COMPARE_TOL = 1e-8
# a row this much shorter than the longest one counts as collapsed
_ZERO_ROW = 1e-14


def standardization_residual(P):
    """``max(||P^t P - I||_inf, max_i |P_i P_i^t - (d+1)/k|)``."""
    k, n = P.shape
    col = np.max(np.abs(P.T @ P - np.eye(n)))
    row = np.max(np.abs(np.einsum("ij,ij->i", P, P) - n / k))
    return float(max(col, row))


@dataclass(frozen=True, eq=False)
class TylerStandardization:
    matrix: np.ndarray
    projection: np.ndarray
    residual: float
    iterations: int

    @property
    def k(self):
        return self.matrix.shape[0]

    @property
    def d(self):
        return self.matrix.shape[1] - 1

    @cached_property
    def tyler_regular(self):
        return is_tyler_regular(Configuration(self.matrix))

    def permuted(self, perm):
        perm = np.asarray(perm)
        return TylerStandardization(
            self.matrix[perm], self.projection[np.ix_(perm, perm)], self.residual, self.iterations
        )

    def to_dict(self):
        return {
            "d": self.d,
            "k": self.k,
            "matrix": self.matrix.tolist(),
            "projection": self.projection.tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
        }


def _inverse_sqrt(G):
    w, V = np.linalg.eigh(G)
    if not w[0] > _ZERO_ROW * w[-1]:
        return None
    return (V / np.sqrt(w)) @ V.T


def tyler_standardize(c, tol=STANDARDIZE_TOL, max_iter=10000, cancel=None):
    """Alternate column whitening and row rescaling until both constraints hold.

    Parameters
    ----------
    c : Configuration
    tol : float
        Bound on :func:`standardization_residual` at exit.
    max_iter : int
        Number of (column, row) sweeps before giving up.
    cancel : callable, optional
        Polled every 256 sweeps.

    Returns
    -------
    TylerStandardization

    Raises
    ------
    NotStandardizable
        The residual is still above ``tol`` after ``max_iter`` sweeps, or
        ``P^t P`` became singular.
    ZeroRow
        A row collapsed relative to the others.
    """
    k, n = c.matrix.shape
    target = np.sqrt(n / k)
    P = normalize_rows(c.matrix) * target
    it = 0
    while True:
        residual = standardization_residual(P)
        if residual <= tol:
            return TylerStandardization(P, P @ P.T, residual, it)
        if it >= max_iter:
            raise NotStandardizable(
                f"no Tyler standardization within {max_iter} iterations "
                f"(residual {residual:.3e} > {tol:.1e})",
                residual=residual,
                iterations=it,
            )
        if it % 256 == 0:
            check_cancel(cancel)
        W = _inverse_sqrt(P.T @ P)
        if W is None:
            raise NotStandardizable(
                "P^t P is singular; configuration spans a proper subspace",
                residual=residual,
                iterations=it,
            )
        P = P @ W
        norms = np.linalg.norm(P, axis=1)
        small = np.flatnonzero(norms <= _ZERO_ROW * norms.max())
        if small.size:
            raise ZeroRow(
                f"row {int(small[0]) + 1} collapsed during standardization",
                residual=residual,
                iterations=it,
            )
        P = P * (target / norms)[:, None]
        it += 1


def projection_matrix(P, tol=None):
    """``P (P^t P)^{-1} P^t``, computed from an orthonormal basis of the column space."""
    P = np.asarray(P, dtype=float)
    if numerical_rank(P, tol) < P.shape[1]:
        raise RankDeficient("projection_matrix needs full column rank")
    Q, _ = np.linalg.qr(P)
    return Q @ Q.T


@dataclass(frozen=True)
class SignAlignment:
    """Result of the exhaustive sign search between two standardizations.

    ``metric_regime`` is False when either input is not Tyler regular; the
    sign action is then not free and the value need not behave as a metric.
    """

    distance: float
    signs: tuple
    metric_regime: bool

    def to_dict(self):
        return {
            "distance": self.distance,
            "signs": [int(s) for s in self.signs],
            "metric_regime": self.metric_regime,
        }


def align_signs(a, b, cancel=None, backend=None, max_k=BRUTE_FORCE_CAP):
    """Minimize ``||S P_a S - P_b||_F`` over sign matrices ``S`` with ``s_1 = +1``."""
    if a.matrix.shape != b.matrix.shape:
        raise DimensionMismatch(f"shapes {a.matrix.shape} and {b.matrix.shape} differ")
    if a.k > max_k:
        raise InstanceTooLarge(f"k={a.k} exceeds the sign-search cap {max_k}")
    Pa, Pb = a.projection, b.projection
    _, s = kernels.max_sign_form(Pa * Pb, cancel=cancel, backend=backend)
    # recomputed directly: the expanded form loses accuracy near zero
    dist = float(np.linalg.norm(s[:, None] * Pa * s[None, :] - Pb))
    return SignAlignment(dist, tuple(int(x) for x in s), bool(a.tyler_regular and b.tyler_regular))


def shape_distance(a, b, cancel=None, backend=None, max_k=BRUTE_FORCE_CAP):
    """Frobenius distance between the embedded shapes, minimized over row signs."""
    return align_signs(a, b, cancel, backend, max_k).distance


def diagonal_action_derivative(P, i, tol=COMPARE_TOL):
    """``E Pr + Pr E - 2 Pr E Pr`` with ``Pr = P P^t`` and ``E = e_i e_i^t``.

    This is the derivative of ``D -> projection_matrix(D P)`` at ``D = I``
    along the ``i``-th diagonal direction (``i`` is 0-based).
    """
    if isinstance(P, TylerStandardization):
        P = P.matrix
    P = np.asarray(P, dtype=float)
    if np.max(np.abs(P.T @ P - np.eye(P.shape[1]))) > tol:
        raise NotStandardized("P^t P is not the identity")
    Pr = P @ P.T
    col = Pr[:, i]
    out = -2.0 * np.outer(col, col)
    out[i, :] += Pr[i, :]
    out[:, i] += col
    return out


@dataclass(frozen=True)
class Standardizability:
    """``kind`` is ``"TylerRegular"``, ``"BalancedSplittable"`` or ``"No"``."""

    kind: str
    witness: SplitWitness = None

    def __bool__(self):
        return self.kind != "No"

    def to_dict(self):
        return {"kind": self.kind, "witness": None if self.witness is None else self.witness.to_dict()}


def is_standardizable(c, tol=None, report=None):
    """Classify by exact integer comparison of flat sizes against ``j k / (d+1)``.

    A flat at the bound is acceptable only when its complement has rank at
    most ``d + 1 - j``, i.e. it is one side of a balanced split.
    """
    report = report or constraint_flats(c, tol)
    P = normalize_rows(c.matrix)
    n, k = c.d + 1, c.k
    witness = None
    for I, j, _ in report:
        size = len(I) * n
        if size < j * k:
            continue
        rest = sorted(set(range(k)) - I)
        if size == j * k and rest:
            rr = numerical_rank(P[rest], tol)
            if rr <= n - j:
                if witness is None:
                    witness = SplitWitness(frozenset(I), j, rr)
                continue
        return Standardizability("No")
    if witness is None:
        return Standardizability("TylerRegular")
    return Standardizability("BalancedSplittable", witness)
