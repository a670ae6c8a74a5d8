"""Configurations, projective points, the group action and file I/O.

A configuration of ``k`` landmarks in ``RP^d`` is stored as a ``k x (d+1)``
matrix of homogeneous coordinates. Its projective shape is the orbit
``{D P B}`` under nonsingular diagonal ``D`` and invertible ``B``.
"""

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InvariantViolation, ParseError, ZeroVector
from .linalg import numerical_rank

# relative size below which a coordinate does not decide the canonical sign
_SIGN_TOL = 1e-12
POINT_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of ``RP^d`` in canonical form: unit norm, first nonzero entry positive.

    Equality is a finite-tolerance comparison of the canonical vectors.
    """

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords))

    @property
    def d(self):
        return self.coords.shape[0] - 1

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if other.coords.shape != self.coords.shape:
            return False
        return bool(np.max(np.abs(self.coords - other.coords)) <= POINT_TOL)

    __hash__ = None

    def angle_close(self, other, tol):
        """True when ``|<u, v>| >= 1 - tol``; ignores the sign convention."""
        return abs(float(self.coords @ other.coords)) >= 1.0 - tol

    def tolist(self):
        return self.coords.tolist()


def canonicalize_point(v):
    v = np.asarray(v, dtype=float).ravel()
    norm = np.linalg.norm(v)
    if not norm > 0.0:
        raise ZeroVector("cannot canonicalize the zero vector")
    u = v / norm
    big = np.flatnonzero(np.abs(u) > _SIGN_TOL)
    if u[big[0]] < 0:
        u = -u
    return ProjectivePoint(u)


@dataclass(frozen=True, eq=False)
class Configuration:
    """``k`` landmarks in ``RP^d`` as a ``k x (d+1)`` homogeneous matrix.

    Raises :class:`InvariantViolation` for zero or non-finite rows, ``d < 1``
    or ``k < d + 2``. Shape-space operations assume ``k >= d + 3``; a bare
    frame (``k = d + 2``) is accepted so frames can be analysed on their own.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.ndim != 2:
            raise InvariantViolation("configuration matrix must be 2-dimensional")
        if not np.all(np.isfinite(m)):
            raise InvariantViolation("configuration matrix has non-finite entries")
        k, cols = m.shape
        d = cols - 1
        if d < 1:
            raise InvariantViolation(f"projective dimension must be >= 1, got {d}")
        if k < d + 2:
            raise InvariantViolation(f"need k >= d+2 landmarks, got k={k}, d={d}")
        zero = np.flatnonzero(np.linalg.norm(m, axis=1) == 0.0)
        if zero.size:
            raise InvariantViolation(f"landmark {int(zero[0]) + 1} is the zero vector")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def k(self):
        return self.matrix.shape[0]

    @property
    def d(self):
        return self.matrix.shape[1] - 1

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(
            np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None

    def __repr__(self):
        return f"Configuration(d={self.d}, k={self.k})"

    def landmark(self, i):
        """Landmark ``i`` (0-based) as a canonical projective point."""
        return canonicalize_point(self.matrix[i])

    def permuted(self, perm):
        """Configuration whose row ``r`` is row ``perm[r]`` of this one."""
        return Configuration(self.matrix[np.asarray(perm)])

    def to_dict(self):
        return {"d": self.d, "k": self.k, "matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class GroupElement:
    """The pair ``(D, B)`` acting by ``P -> D P B``."""

    row_scales: np.ndarray
    right_matrix: np.ndarray

    def __post_init__(self):
        D = _frozen(np.ravel(self.row_scales))
        B = _frozen(self.right_matrix)
        if np.any(D == 0.0):
            raise InvariantViolation("row scales must be nonzero")
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise InvariantViolation("right matrix must be square")
        if numerical_rank(B) < B.shape[0]:
            raise InvariantViolation("right matrix is singular")
        object.__setattr__(self, "row_scales", D)
        object.__setattr__(self, "right_matrix", B)

    @classmethod
    def identity(cls, k, d):
        return cls(np.ones(k), np.eye(d + 1))

    @classmethod
    def random(cls, k, d, rng):
        """A well-conditioned random element; ``rng`` is a numpy Generator."""
        D = rng.uniform(0.5, 2.0, size=k) * rng.choice([-1.0, 1.0], size=k)
        while True:
            B = rng.standard_normal((d + 1, d + 1))
            if np.linalg.cond(B) < 1e3:
                return cls(D, B)


def compose(g2, g1):
    """Element acting as ``g2`` after ``g1``."""
    if g1.row_scales.shape != g2.row_scales.shape or g1.right_matrix.shape != g2.right_matrix.shape:
        raise DimensionMismatch("group elements have different sizes")
    return GroupElement(g2.row_scales * g1.row_scales, g1.right_matrix @ g2.right_matrix)


def act(g, c):
    """Apply ``g = (D, B)`` to ``c``: returns the configuration ``D P B``."""
    if g.row_scales.shape[0] != c.k or g.right_matrix.shape[0] != c.d + 1:
        raise DimensionMismatch(
            f"group element sized for k={g.row_scales.shape[0]}, "
            f"d={g.right_matrix.shape[0] - 1}; configuration has k={c.k}, d={c.d}"
        )
    return Configuration(g.row_scales[:, None] * c.matrix @ g.right_matrix)


def configuration_rank(c, tol=None):
    return numerical_rank(c.matrix / np.linalg.norm(c.matrix, axis=1, keepdims=True), tol)


# -- serialization ---------------------------------------------------------


def _from_rows(rows, d=None, k=None):
    try:
        m = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix is not a rectangular array of numbers: {exc}") from exc
    if m.ndim != 2:
        raise ParseError("matrix must be a list of equally long rows")
    if d is not None and m.shape[1] != d + 1:
        raise ParseError(f"declared d={d} but rows have {m.shape[1]} entries")
    if k is not None and m.shape[0] != k:
        raise ParseError(f"declared k={k} but matrix has {m.shape[0]} rows")
    return Configuration(m)


def loads_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise ParseError('JSON configuration needs a "matrix" field')
    d, k = doc.get("d"), doc.get("k")
    for name, v in (("d", d), ("k", k)):
        if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
            raise ParseError(f'"{name}" must be an integer')
    return _from_rows(doc["matrix"], d, k)


def loads_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(x.strip() for x in r)]
    try:
        rows = [[float(x) for x in r] for r in rows]
    except ValueError as exc:
        raise ParseError(f"invalid CSV number: {exc}") from exc
    if not rows:
        raise ParseError("empty CSV")
    return _from_rows(rows)


def dumps_json(c):
    return json.dumps(c.to_dict())


def dumps_csv(c):
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in c.matrix)


def _format(path, fmt):
    if fmt is not None:
        fmt = fmt.lower()
    elif Path(path).suffix.lower() == ".csv":
        fmt = "csv"
    else:
        fmt = "json"
    if fmt not in ("json", "csv"):
        raise ParseError(f"unknown format {fmt!r}")
    return fmt


def load(path, format=None):
    """Read a configuration from a JSON (canonical) or CSV file."""
    fmt = _format(path, format)
    text = Path(path).read_text()
    return loads_json(text) if fmt == "json" else loads_csv(text)


def save(c, path, format=None):
    fmt = _format(path, format)
    Path(path).write_text(dumps_json(c) if fmt == "json" else dumps_csv(c))
