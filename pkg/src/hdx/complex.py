"""Finite simplicial complexes with canonical cell ordering.

Cells are stored as strictly increasing vertex tuples, grouped by dimension
and sorted lexicographically, so every matrix built on top of a complex has a
reproducible basis. The canonical orientation of a cell is its sorted order.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from itertools import combinations

import numpy as np

from .errors import ValidationError

__all__ = [
    "Cell",
    "Relation",
    "SimplicialComplex",
    "adjacency_relation",
    "build_from_facets",
    "degree",
    "orientation_sign",
]

Cell = tuple[int, ...]


def orientation_sign(ordered: Sequence[int]) -> int:
    """Sign of the permutation that sorts ``ordered``.

    >>> orientation_sign((0, 1, 2)), orientation_sign((1, 0, 2)), orientation_sign((2, 0, 1))
    (1, -1, 1)
    """
    seq = list(ordered)
    if len(set(seq)) != len(seq):
        raise ValidationError(f"repeated vertex in {tuple(seq)}")
    inversions = sum(
        1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b]
    )
    return -1 if inversions % 2 else 1


class SimplicialComplex:
    """An immutable, downward-closed family of cells on vertices ``0..n-1``.

    ``dim`` is the nominal top dimension. It is normally the largest cell
    dimension, but may be larger (e.g. a Linial-Meshulam sample with no
    top cells), in which case ``cells(dim)`` is empty.
    """

    def __init__(self, n: int, cells_by_dim: dict[int, list[Cell]], dim: int):
        self.n = n
        self.dim = dim
        self._cells = {j: tuple(cells_by_dim.get(j, ())) for j in range(-1, dim + 1)}
        self._index = {j: {c: i for i, c in enumerate(cs)} for j, cs in self._cells.items()}
        self._degrees: dict[int, np.ndarray] = {}

    # -- basic access -----------------------------------------------------

    def cells(self, j: int) -> tuple[Cell, ...]:
        return self._cells.get(j, ())

    def num_cells(self, j: int) -> int:
        return len(self._cells.get(j, ()))

    def index(self, cell: Iterable[int]) -> int:
        c = tuple(sorted(cell))
        try:
            return self._index[len(c) - 1][c]
        except KeyError:
            raise ValidationError(f"cell {c} is not in the complex") from None

    def __contains__(self, cell: object) -> bool:
        try:
            c = tuple(sorted(cell))  # type: ignore[arg-type]
        except TypeError:
            return False
        return c in self._index.get(len(c) - 1, {})

    def f_vector(self) -> list[int]:
        """Cell counts for dimensions ``-1..dim``."""
        return [self.num_cells(j) for j in range(-1, self.dim + 1)]

    def degrees(self, j: int) -> np.ndarray:
        """Degrees of all ``j``-cells, in canonical order."""
        if j not in self._degrees:
            deg = np.zeros(self.num_cells(j), dtype=np.int64)
            idx = self._index.get(j, {})
            for tau in self.cells(j + 1):
                for face in combinations(tau, j + 1):
                    deg[idx[face]] += 1
            deg.flags.writeable = False
            self._degrees[j] = deg
        return self._degrees[j]

    def facets(self) -> list[Cell]:
        """Maximal cells (not contained in any larger cell), by dimension then lex."""
        out = []
        for j in range(0, self.dim + 1):
            deg = self.degrees(j)
            out.extend(c for c, k in zip(self.cells(j), deg) if k == 0)
        return out

    def is_complete_skeleton(self) -> bool:
        """True iff this is ``K_n^(m)`` with ``m = dim``."""
        from math import comb

        return all(self.num_cells(j) == comb(self.n, j + 1) for j in range(-1, self.dim + 1))

    # -- comparisons / serialization -----------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.n == other.n and self.dim == other.dim and self._cells == other._cells

    def __hash__(self) -> int:
        return hash((self.n, self.dim, tuple(self._cells.items())))

    def __repr__(self) -> str:
        return f"SimplicialComplex(n={self.n}, dim={self.dim}, f={self.f_vector()[1:]})"

    def to_dict(self) -> dict:
        d = {"n": self.n, "facets": [list(c) for c in self.facets()]}
        if self.dim != max((len(c) - 1 for c in self.facets()), default=-1):
            d["dim"] = self.dim
        return d


def build_from_facets(
    n: int, facets: Iterable[Sequence[int]], dim: int | None = None
) -> SimplicialComplex:
    """Downward closure of ``facets`` on ``n`` vertices.

    All ``n`` vertices and the empty cell are always present. ``dim`` may
    raise the nominal dimension above the largest facet.
    """
    if n < 0:
        raise ValidationError("vertex count must be non-negative")
    tops: set[Cell] = set()
    for f in facets:
        f = tuple(int(v) for v in f)
        if not f:
            raise ValidationError("facets must be nonempty")
        if len(set(f)) != len(f):
            raise ValidationError(f"duplicate vertex within facet {f}")
        if any(v < 0 or v >= n for v in f):
            raise ValidationError(f"vertex id out of range [0, {n}) in facet {f}")
        tops.add(tuple(sorted(f)))
    top = max((len(f) - 1 for f in tops), default=0 if n else -1)
    if dim is not None:
        if dim < top:
            raise ValidationError(f"dim={dim} is below the largest facet dimension {top}")
        top = dim

    by_dim: dict[int, set[Cell]] = {j: set() for j in range(-1, top + 1)}
    by_dim[-1].add(())
    if top >= 0:
        by_dim[0].update((v,) for v in range(n))
    for f in tops:
        for k in range(1, len(f) + 1):
            by_dim[k - 1].update(combinations(f, k))
    return SimplicialComplex(n, {j: sorted(s) for j, s in by_dim.items()}, top)


def degree(X: SimplicialComplex, sigma: Iterable[int]) -> int:
    """Number of cells of one dimension higher containing ``sigma``."""
    c = tuple(sorted(sigma))
    return int(X.degrees(len(c) - 1)[X.index(c)])


class Relation(enum.Enum):
    SIMILAR = "similar"
    PITCHFORK = "pitchfork"
    NONE = "none"


def _induced_orientation(oriented: Sequence[int], dropped: int) -> int:
    # orientation induced on the face omitting `dropped`, relative to the sorted face
    pos = list(oriented).index(dropped)
    rest = [v for v in oriented if v != dropped]
    return (-1) ** pos * orientation_sign(rest)


def adjacency_relation(
    X: SimplicialComplex, sigma: Sequence[int], sigma_prime: Sequence[int]
) -> Relation:
    """Classify two oriented cells of equal dimension under ``~`` and ``pitchfork``.

    ``PITCHFORK`` means the cells share a codimension-one face and induce the
    same orientation on it, but their union is not a cell of ``X``.
    """
    a, b = tuple(sigma), tuple(sigma_prime)
    if len(a) != len(b):
        raise ValidationError("cells must have the same dimension")
    for c in (a, b):
        orientation_sign(c)
        if c not in X:
            raise ValidationError(f"cell {c} is not in the complex")
    common = set(a) & set(b)
    if len(common) != len(a) - 1:
        return Relation.NONE
    if len(a) > 1:
        (va,) = set(a) - common
        (vb,) = set(b) - common
        if _induced_orientation(a, va) != _induced_orientation(b, vb):
            return Relation.NONE
    if tuple(sorted(set(a) | set(b))) in X:
        return Relation.SIMILAR
    return Relation.PITCHFORK
