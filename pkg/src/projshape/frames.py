"""Frames, pseudo-frames and the chart coordinates they induce.

Given ``d+1`` landmarks in general position (the *base*), every other
landmark is expressed in the base coordinates, ``P_* = P_1 P_0^{-1}``. The
colored graph on the ``d+1`` base columns has an edge ``(i, j)`` of color
``l`` whenever row ``l`` of ``P_*`` is nonzero in both columns. A
configuration is free exactly when this graph is connected, and a spanning
tree of it (a pseudo-frame) fixes enough scalings to give chart coordinates.
"""

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import Configuration, canonicalize_point
from .errors import (
    DimensionMismatch,
    NotAFrame,
    NotFree,
    PseudoFrameAbsent,
    SingularBase,
    check_cancel,
)
from .linalg import default_tol, normalize_rows, numerical_rank


@dataclass(frozen=True)
class ColoredGraph:
    """Multigraph on base columns ``0..d``; edges are ``(i, j, color)`` with ``i < j``.

    ``color`` is the 0-based landmark index of the row producing the edge.
    """

    n_vertices: int
    edges: tuple

    def __post_init__(self):
        edges = tuple(sorted((min(i, j), max(i, j), int(l)) for i, j, l in self.edges))
        object.__setattr__(self, "edges", edges)

    def is_connected(self):
        if self.n_vertices <= 1:
            return True
        adj = {v: set() for v in range(self.n_vertices)}
        for i, j, _ in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        seen = {0}
        todo = [0]
        while todo:
            for w in adj[todo.pop()] - seen:
                seen.add(w)
                todo.append(w)
        return len(seen) == self.n_vertices

    def colors(self):
        return sorted({l for _, _, l in self.edges})

    def edges_of_color(self, l):
        return [(i, j) for i, j, c in self.edges if c == l]

    def to_dict(self):
        return {
            "vertices": list(range(1, self.n_vertices + 1)),
            "edges": [{"i": i + 1, "j": j + 1, "color": l + 1} for i, j, l in self.edges],
        }

    def to_dot(self, name="G"):
        lines = [f"graph {name} {{"]
        lines += [f"  {v + 1};" for v in range(self.n_vertices)]
        lines += [f'  {i + 1} -- {j + 1} [label="{l + 1}"];' for i, j, l in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PseudoFrame:
    """``d+1`` base landmarks plus a spanning tree of their colored graph."""

    base: tuple
    tree: ColoredGraph

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(b) for b in self.base))
        if len(self.tree.edges) != len(self.base) - 1 or not self.tree.is_connected():
            raise ValueError("pseudo-frame tree must be a spanning tree on the base columns")

    @property
    def n_colors(self):
        """``#E``: number of landmarks coloring at least one tree edge."""
        return len(self.tree.colors())

    def edge_counts(self):
        """``|E_l|`` per color."""
        counts = {}
        for _, _, l in self.tree.edges:
            counts[l] = counts.get(l, 0) + 1
        return counts

    def to_dict(self):
        return {"base": [b + 1 for b in self.base], "tree": self.tree.to_dict()["edges"]}


@dataclass(frozen=True)
class ChartPoint:
    """Pseudo-frame chart coordinates of a shape.

    ``free_points`` are the landmarks outside the base not coloring any tree
    edge; ``tree_rows`` maps each tree color to the entries of its
    normalized row that the tree does not fix.
    """

    d: int
    k: int
    free_landmarks: tuple
    free_points: tuple
    tree_rows: dict

    @property
    def dimension(self):
        return self.d * len(self.free_points) + sum(len(v) for v in self.tree_rows.values())

    def to_dict(self):
        return {
            "free_points": [
                {"landmark": l + 1, "point": p.tolist()}
                for l, p in zip(self.free_landmarks, self.free_points)
            ],
            "tree_rows": {str(l + 1): v.tolist() for l, v in sorted(self.tree_rows.items())},
            "dimension": self.dimension,
        }


def _check_base(c, base):
    base = tuple(int(b) for b in base)
    if len(base) != c.d + 1 or len(set(base)) != len(base):
        raise SingularBase(f"base must list d+1={c.d + 1} distinct landmarks, got {base}")
    return base


def _graph_form(P, base, tol):
    P0 = P[list(base)]
    if numerical_rank(P0, tol) < P.shape[1]:
        raise SingularBase(f"base landmarks {[b + 1 for b in base]} are not in general position")
    rest = [i for i in range(P.shape[0]) if i not in set(base)]
    return rest, np.linalg.solve(P0.T, P[rest].T).T


def _support(Pstar, tol):
    tol = default_tol() if tol is None else tol
    norms = np.linalg.norm(Pstar, axis=1, keepdims=True)
    return np.abs(Pstar) > tol * norms


def normalize_to_graph_form(c, base, tol=None):
    """``P_1 P_0^{-1}``: non-base rows (original order) in base coordinates."""
    base = _check_base(c, base)
    _, Pstar = _graph_form(c.matrix, base, tol)
    return Pstar


def graph_of(c, base, tol=None):
    base = _check_base(c, base)
    rest, Pstar = _graph_form(normalize_rows(c.matrix), base, tol)
    mask = _support(Pstar, tol)
    edges = []
    for row, l in enumerate(rest):
        support = np.flatnonzero(mask[row])
        edges.extend((i, j, l) for i, j in combinations(support.tolist(), 2))
    return ColoredGraph(c.d + 1, tuple(edges))


def first_base(c, tol=None):
    """Lexicographically smallest set of ``d+1`` independent landmarks (greedy)."""
    P = normalize_rows(c.matrix)
    chosen = []
    for i in range(c.k):
        if numerical_rank(P[chosen + [i]], tol) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == c.d + 1:
                return tuple(chosen)
    return None


def is_free_via_graph(c, tol=None):
    base = first_base(c, tol)
    if base is None:
        return False
    return graph_of(c, base, tol).is_connected()


def find_frame(c, tol=None, cancel=None):
    """Lexicographically smallest ``d+2`` landmarks in general position, or None.

    ``F`` is a frame iff its first ``d+1`` members are independent and the
    last one has no zero coordinate with respect to them, so bases are
    scanned in lexicographic order and the first hit is the answer.
    """
    P = normalize_rows(c.matrix)
    n = c.d + 1
    for step, base in enumerate(combinations(range(c.k), n)):
        if step % 256 == 0:
            check_cancel(cancel)
        if base[-1] == c.k - 1:
            continue
        try:
            rest, Pstar = _graph_form(P, base, tol)
        except SingularBase:
            continue
        full = _support(Pstar, tol).all(axis=1)
        for row, l in enumerate(rest):
            if l > base[-1] and full[row]:
                return base + (l,)
    return None


def _bfs_tree(graph):
    incident = {v: [] for v in range(graph.n_vertices)}
    for e in graph.edges:
        incident[e[0]].append(e)
        incident[e[1]].append(e)
    for v in incident:
        incident[v].sort(key=lambda e: (e[2], e[0], e[1]))
    seen = {0}
    queue = deque([0])
    tree = []
    while queue:
        u = queue.popleft()
        for i, j, l in incident[u]:
            w = j if i == u else i
            if w not in seen:
                seen.add(w)
                tree.append((i, j, l))
                queue.append(w)
    return ColoredGraph(graph.n_vertices, tuple(tree))


def find_pseudo_frame(c, tol=None):
    """Canonical pseudo-frame of a free configuration, else None.

    The base is :func:`first_base`; the tree is breadth-first from column 1,
    scanning each vertex's edges by ``(color, i, j)``.
    """
    base = first_base(c, tol)
    if base is None:
        return None
    graph = graph_of(c, base, tol)
    if not graph.is_connected():
        return None
    return PseudoFrame(base, _bfs_tree(graph))


def frame_coordinates(c, frame, tol=None):
    """Landmarks outside ``frame`` after mapping the frame to the standard frame.

    The standard frame is ``e_1, ..., e_{d+1}, (1, ..., 1)``; the result lists
    the remaining landmarks in index order as canonical projective points.
    """
    frame = tuple(int(f) for f in frame)
    n = c.d + 1
    if len(frame) != n + 1 or len(set(frame)) != len(frame):
        raise NotAFrame(f"a frame needs d+2={n + 1} distinct landmarks")
    P = normalize_rows(c.matrix)
    F = P[list(frame)]
    for sub in combinations(range(n + 1), n):
        if numerical_rank(F[list(sub)], tol) < n:
            raise NotAFrame(f"landmarks {[f + 1 for f in frame]} are not in general position")
    X = np.linalg.solve(F[:n].T, P.T).T
    X = X / X[frame[-1]]
    return [canonicalize_point(X[i]) for i in range(c.k) if i not in set(frame)]


def _tree_scalings(pf, Pstar, row_of):
    """Row and column scalings making every tree-determined entry equal to 1.

    The color/column incidence graph of the tree must itself be a tree for
    the scalings to exist for arbitrary entries; column 1 is fixed to 1.
    """
    n = len(pf.base)
    touched = {}
    for i, j, l in pf.tree.edges:
        touched.setdefault(l, set()).update((i, j))
    n_incidences = sum(len(v) for v in touched.values())
    if n_incidences != len(touched) + n - 1:
        raise ValueError("each color class of the pseudo-frame tree must be connected")
    col = {0: 1.0}
    row = {}
    todo = deque([("v", 0)])
    while todo:
        kind, x = todo.popleft()
        if kind == "v":
            for l, verts in touched.items():
                if x in verts and l not in row:
                    row[l] = 1.0 / (Pstar[row_of[l], x] * col[x])
                    todo.append(("c", l))
        else:
            for v in touched[x]:
                if v not in col:
                    col[v] = 1.0 / (Pstar[row_of[x], v] * row[x])
                    todo.append(("v", v))
    return row, np.array([col[v] for v in range(n)]), touched


def pseudo_frame_coordinates(c, pf, tol=None):
    base = _check_base(c, pf.base)
    rest, Pstar = _graph_form(normalize_rows(c.matrix), base, tol)
    row_of = {l: r for r, l in enumerate(rest)}
    mask = _support(Pstar, tol)
    for i, j, l in pf.tree.edges:
        if l not in row_of or not (mask[row_of[l], i] and mask[row_of[l], j]):
            raise PseudoFrameAbsent(
                f"edge ({i + 1}, {j + 1}) of color {l + 1} is absent from the configuration"
            )
    row_scale, col_scale, touched = _tree_scalings(pf, Pstar, row_of)
    scaled = Pstar * col_scale
    tree_rows = {}
    for l, verts in touched.items():
        keep = [v for v in range(len(base)) if v not in verts]
        tree_rows[l] = row_scale[l] * scaled[row_of[l], keep]
        tree_rows[l].flags.writeable = False
    free = [l for l in rest if l not in touched]
    chart = ChartPoint(
        c.d,
        c.k,
        tuple(free),
        tuple(canonicalize_point(scaled[row_of[l]]) for l in free),
        tree_rows,
    )
    assert chart.dimension == c.d * (c.k - c.d - 2), "chart dimension identity violated"
    return chart


def _rows_close(x, y, tol):
    return bool(np.all(np.abs(x - y) <= tol * np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))))


def shape_equal(a, b, tol=1e-8, rank_tol=None):
    """Decide ``[a] == [b]`` for free configurations via pseudo-frame charts."""
    if (a.k, a.d) != (b.k, b.d):
        raise DimensionMismatch(f"configurations differ in size: (k={a.k}, d={a.d}) vs (k={b.k}, d={b.d})")
    pf = find_pseudo_frame(a, rank_tol)
    if pf is None:
        raise NotFree("shape_equal needs a free first argument")
    ca = pseudo_frame_coordinates(a, pf, rank_tol)
    try:
        cb = pseudo_frame_coordinates(b, pf, rank_tol)
    except (SingularBase, PseudoFrameAbsent):
        return False
    if ca.free_landmarks != cb.free_landmarks:
        return False
    if not all(p.angle_close(q, tol) for p, q in zip(ca.free_points, cb.free_points)):
        return False
    return all(_rows_close(ca.tree_rows[l], cb.tree_rows[l], tol) for l in ca.tree_rows)


def from_frame_coordinates(k, frame, points):
    """Configuration with the standard frame at ``frame`` and ``points`` elsewhere.

    Inverse of :func:`frame_coordinates` up to projective equivalence.
    """
    frame = [int(f) for f in frame]
    d = len(frame) - 2
    rows = np.empty((k, d + 1))
    rows[frame] = np.vstack([np.eye(d + 1), np.ones(d + 1)])
    others = [i for i in range(k) if i not in set(frame)]
    rows[others] = [p.coords if hasattr(p, "coords") else p for p in points]
    return Configuration(rows)
