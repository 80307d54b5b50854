"""Gallery counting and the spectral mixing bounds built on it.

A ``j``-gallery in ``A_0, ..., A_l`` is a chain of ``j``-cells
``s_0, ..., s_{l-j}`` with ``s_i`` having one vertex in each of
``A_i, ..., A_{i+j}`` and consecutive cells sharing a ``(j-1)``-face.
Galleries are counted two ways: a layered dynamic program over cells, and a
product of projected adjacency operators applied to characteristic forms.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np
import scipy.sparse as sp

from .complex import SimplicialComplex, orientation_sign
from .errors import BoundViolation, CertificationError, NumericalError, ValidationError
from .hodge import adjacency_matrix
from .spectral import ExpanderCertificate

__all__ = [
    "DescentReport",
    "MixingReport",
    "VertexFamily",
    "c_d",
    "characteristic_form",
    "cjl_constant",
    "count_galleries_bruteforce",
    "count_galleries_operator",
    "descent_check",
    "from_j_to_l_check",
    "mixing_check",
    "projection_apply",
]


@dataclass(frozen=True)
class VertexFamily:
    """Ordered vertex sets ``A_0, ..., A_l``."""

    sets: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, sets: Iterable[Iterable[int]]) -> VertexFamily:
        return cls(tuple(tuple(sorted(set(int(v) for v in s))) for s in sets))

    @property
    def ell(self) -> int:
        return len(self.sets) - 1

    @property
    def sizes(self) -> list[int]:
        return [len(s) for s in self.sets]

    def window_disjoint(self, width: int) -> bool:
        """Every ``width`` consecutive sets are pairwise disjoint."""
        width = min(width, len(self.sets))
        for start in range(len(self.sets) - width + 1):
            window = self.sets[start:start + width]
            if sum(map(len, window)) != len(set().union(*window)):
                return False
        return True

    def is_disjoint(self) -> bool:
        return self.window_disjoint(len(self.sets))

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return VertexFamily(self.sets[item])
        return self.sets[item]


def _family(sets) -> VertexFamily:
    return sets if isinstance(sets, VertexFamily) else VertexFamily.of(sets)


def _require_windows(fam: VertexFamily, width: int) -> None:
    if not fam.window_disjoint(width):
        raise ValidationError(f"every {width} consecutive sets must be pairwise disjoint")


def characteristic_form(X: SimplicialComplex, sets) -> np.ndarray:
    """The ``j``-form that is ``sgn(pi)`` on cells with ``s_i`` in ``A_{pi(i)}``, zero elsewhere.

    ``j = len(sets) - 1``; the result is indexed by the canonical order of ``X^j``.
    """
    fam = _family(sets)
    _require_windows(fam, len(fam))
    j = fam.ell
    owner = {v: i for i, s in enumerate(fam.sets) for v in s}
    form = np.zeros(X.num_cells(j), dtype=np.int64)
    for choice in product(*fam.sets):
        cell = tuple(sorted(choice))
        if cell in X:
            form[X.index(cell)] = orientation_sign([owner[v] for v in cell])
    return form


def projection_apply(delta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Restrict ``phi`` to the support of the characteristic form ``delta``.

    The projection keeps the values of ``phi`` on cells where ``delta`` is
    nonzero; multiplying by the signs themselves would not be idempotent.
    """
    return np.where(delta != 0, phi, 0 * phi)


def _layer(X: SimplicialComplex, sets: Sequence[tuple[int, ...]]) -> list[tuple[int, ...]]:
    return [c for c in (tuple(sorted(ch)) for ch in product(*sets)) if c in X]


def count_galleries_bruteforce(X: SimplicialComplex, j: int, sets) -> int:
    """``|F^j(A_0, ..., A_l)|`` by dynamic programming over the layered intersection graph."""
    fam = _family(sets)
    ell = fam.ell
    if not 0 <= j <= ell:
        raise ValidationError(f"need 0 <= j <= l, got j={j}, l={ell}")
    _require_windows(fam, j + 2)
    if j > X.dim:
        return 0
    layers = [_layer(X, fam.sets[i:i + j + 1]) for i in range(ell - j + 1)]
    counts = {c: 1 for c in layers[0]}
    for nxt in layers[1:]:
        new = {}
        for c in nxt:
            cs = set(c)
            new[c] = sum(w for p, w in counts.items() if len(cs.intersection(p)) == j)
        counts = new
    return sum(counts.values())


def count_galleries_operator(
    X: SimplicialComplex,
    j: int,
    sets,
    kind: str = "similar",
    diag_shift: np.ndarray | None = None,
) -> int:
    """Count galleries as ``|<delta_0, (prod P_i A) delta_last>|`` at level ``j``.

    ``kind="similar"`` yields ``|F^{j+1}|`` and ``kind="pitchfork"`` yields
    ``|F^j|``. ``diag_shift`` adds a diagonal to the adjacency operator,
    which must not change the result for disjoint sets.
    """
    fam = _family(sets)
    ell = fam.ell
    top = min(X.dim - 1, ell - 1) if kind == "similar" else min(X.dim, ell)
    if kind not in ("similar", "pitchfork"):
        raise ValidationError(f"unknown kind {kind!r}")
    if not 0 <= j <= top:
        raise ValidationError(f"{kind} count needs 0 <= j <= {top}, got j={j}")
    _require_windows(fam, j + 2)

    A = adjacency_matrix(X, j, kind).astype(float)
    if diag_shift is not None:
        A = A + sp.diags(np.asarray(diag_shift, dtype=float))
    chars = [characteristic_form(X, fam.sets[i:i + j + 1]).astype(float) for i in range(ell - j + 1)]
    v = chars[-1]
    for i in range(ell - j - 1, -1, -1):
        v = projection_apply(chars[i], A @ v)
    value = float(chars[0] @ v)
    nearest = round(value)
    if abs(value - nearest) > 1e-6:
        raise NumericalError(f"operator gallery count {value} is not an integer")
    return abs(int(nearest))


@lru_cache(maxsize=None)
def cjl_constant(j: int, ell: int) -> Fraction:
    """``c_{j,l} = c_{j-1,l} + (l-j)(1 + j c_{j-1,j})`` with ``c_{-1,l} = 0``."""
    if j == -1:
        return Fraction(0)
    if not 0 <= j < ell:
        raise ValidationError(f"c_(j,l) needs 0 <= j < l, got j={j}, l={ell}")
    prev_j = cjl_constant(j - 1, j) if j >= 1 else Fraction(0)
    return cjl_constant(j - 1, ell) + (ell - j) * (1 + j * prev_j)


def c_d(d: int) -> Fraction:
    """The mixing constant for ``d``-complexes, ``c_{d-1,d}``."""
    if d < 1:
        raise ValidationError("c_d needs d >= 1")
    return cjl_constant(d - 1, d)


def _cert_map(certs) -> dict[int, ExpanderCertificate]:
    if isinstance(certs, Mapping):
        return dict(certs)
    return {c.j: c for c in certs if c is not None}


def _needs(cm: dict[int, ExpanderCertificate], js: Iterable[int]) -> list[ExpanderCertificate]:
    out = []
    for j in js:
        c = cm.get(j)
        if c is None:
            raise CertificationError(f"missing certificate at j={j}")
        if not c.valid or c.k <= 0:
            raise CertificationError(f"not an expander at j={j} (k={c.k}, eps={c.eps})")
        out.append(c)
    return out


def _tol(bound: float, tol: float) -> float:
    return tol * max(1.0, abs(bound))


@dataclass
class DescentReport:
    j: int
    ell: int
    f_upper: int
    f_lower: int
    predicted: float
    deviation: float
    bound: float
    improved_bound: float
    tol: float = 1e-9
    degenerate: bool = False

    @property
    def holds(self) -> bool:
        return self.deviation <= self.bound + _tol(self.bound, self.tol)

    @property
    def holds_improved(self) -> bool:
        return self.deviation <= self.improved_bound + _tol(self.improved_bound, self.tol)

    def to_dict(self) -> dict:
        return {
            "j": self.j, "l": self.ell, "f_upper": self.f_upper, "f_lower": self.f_lower,
            "predicted": self.predicted, "deviation": self.deviation, "bound": self.bound,
            "improved_bound": self.improved_bound, "holds": self.holds,
            "holds_improved": self.holds_improved, "degenerate": self.degenerate,
        }


def descent_check(
    X: SimplicialComplex, j: int, sets, certs, tol: float = 1e-9, strict: bool = True
) -> DescentReport:
    """Compare ``|F^{j+1}|`` with ``(k_j/k_{j-1})^{l-j} |F^j|`` and both error bounds."""
    fam = _family(sets)
    ell = fam.ell
    if not 0 <= j <= X.dim - 1 or j + 1 > ell:
        raise ValidationError(f"descent needs 0 <= j < min(dim, l); got j={j}, dim={X.dim}, l={ell}")
    prev, cur = _needs(_cert_map(certs), (j - 1, j))
    f_up = count_galleries_bruteforce(X, j + 1, fam)
    f_lo = count_galleries_bruteforce(X, j, fam)
    steps = ell - j
    predicted = (cur.k / prev.k) ** steps * f_lo
    ends = math.sqrt(
        count_galleries_bruteforce(X, j, fam[: j + 1]) * count_galleries_bruteforce(X, j, fam[ell - j:])
    )
    bound = steps * cur.k ** steps * (cur.eps + prev.eps) * ends
    eps = max(cur.eps, prev.eps)
    improved = steps * cur.k ** steps * 2 * eps * ((1 + eps) / 2) ** (steps - 1) * ends
    rep = DescentReport(j, ell, f_up, f_lo, predicted, abs(f_up - predicted), bound, improved,
                        tol, degenerate=0 in fam.sizes)
    if strict and not (rep.holds and rep.holds_improved):
        raise BoundViolation(f"descent bound violated: {rep.to_dict()}")
    return rep


@dataclass
class MixingReport:
    observed: int
    main_term: float
    bound: float
    certs: list[ExpanderCertificate]
    sizes: list[int]
    j: int | None = None
    ell: int | None = None
    tol: float = 1e-9
    degenerate: bool = False
    slack: float = field(init=False)

    def __post_init__(self) -> None:
        self.slack = self.bound - abs(self.observed - self.main_term)

    @property
    def holds(self) -> bool:
        return self.slack >= -_tol(self.bound, self.tol)

    def to_dict(self) -> dict:
        d = {
            "observed": self.observed, "main_term": self.main_term, "bound": self.bound,
            "slack": self.slack, "holds": self.holds, "degenerate": self.degenerate,
            "certs": [{"j": c.j, "k": c.k, "eps": c.eps} for c in self.certs],
            "sets": self.sizes,
        }
        if self.j is not None:
            d["j"], d["l"] = self.j, self.ell
        return d


def from_j_to_l_check(
    X: SimplicialComplex, j: int, sets, certs, tol: float = 1e-9, strict: bool = True
) -> MixingReport:
    """``|F^{j+1}|`` against ``k_0...k_{j-1} k_j^{l-j} / n^l * prod |A_i|`` with constant ``c_{j,l}``."""
    fam = _family(sets)
    ell = fam.ell
    if not 0 <= j < ell or j > X.dim - 1:
        raise ValidationError(f"need 0 <= j < l and j < dim; got j={j}, l={ell}, dim={X.dim}")
    _require_windows(fam, len(fam))
    used = _needs(_cert_map(certs), range(0, j + 1))
    K = math.prod(c.k for c in used[:-1]) * used[-1].k ** (ell - j)
    main = K / X.n ** ell * math.prod(fam.sizes)
    bound = float(cjl_constant(j, ell)) * K * sum(c.eps for c in used) * max(fam.sizes)
    observed = count_galleries_bruteforce(X, j + 1, fam)
    rep = MixingReport(observed, main, bound, used, fam.sizes, j=j, ell=ell, tol=tol,
                       degenerate=0 in fam.sizes)
    if strict and not rep.holds:
        raise BoundViolation(f"mixing bound violated: {rep.to_dict()}")
    return rep


def mixing_check(X: SimplicialComplex, sets, certs, tol: float = 1e-9, strict: bool = True) -> MixingReport:
    """The top-dimensional case: ``|F(A_0, ..., A_d)|`` for ``d + 1`` disjoint sets."""
    fam = _family(sets)
    if fam.ell != X.dim:
        raise ValidationError(f"need exactly dim+1 = {X.dim + 1} sets, got {len(fam)}")
    return from_j_to_l_check(X, X.dim - 1, fam, certs, tol=tol, strict=strict)
