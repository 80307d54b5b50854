"""Exact integer operators on forms: boundaries, Laplacians, adjacency.

All matrices are ``scipy.sparse.csr_matrix`` with ``int64`` entries,
written in the canonical (sorted) basis of each cell dimension. A ``j``-form
is a vector of length ``|X^j|``; its value on a cell presented in a
non-canonical order is the stored value times the presentation's sign.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable
from typing import TextIO

import numpy as np
import scipy.sparse as sp

from .complex import SimplicialComplex, _induced_orientation, orientation_sign
from .errors import ValidationError

__all__ = [
    "adjacency_matrix",
    "boundary_matrix",
    "coboundary_matrix",
    "degree_matrix",
    "identity_report",
    "laplacian",
    "read_coo",
    "write_coo",
]

DTYPE = np.int64


def _csr(rows: Iterable[int], cols: Iterable[int], vals: Iterable[int], shape) -> sp.csr_matrix:
    m = sp.coo_matrix(
        (np.fromiter(vals, DTYPE), (np.fromiter(rows, np.int64), np.fromiter(cols, np.int64))),
        shape=shape,
    ).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    return m


def _check(X: SimplicialComplex, j: int, lo: int, hi: int, what: str) -> None:
    if not lo <= j <= hi:
        raise ValidationError(f"{what}: j={j} outside [{lo}, {hi}] for a {X.dim}-complex")


def boundary_matrix(X: SimplicialComplex, j: int) -> sp.csr_matrix:
    """``d_j``: a ``|X^{j-1}| x |X^j|`` matrix with entries in {-1, 0, 1}.

    Built from ``(d f)(s) = sum over v with v+s in X^j of f(v s)``: the
    entry at (face ``s``, cell ``v+s``) is the sign of the presentation
    ``(v, *s)`` relative to sorted order.
    """
    _check(X, j, 0, X.dim, "boundary_matrix")
    return _boundary(X, j)


def _boundary(X: SimplicialComplex, j: int) -> sp.csr_matrix:
    # unchecked; j = dim + 1 gives the empty map used by rank computations
    rows, cols, vals = [], [], []
    for c, tau in enumerate(X.cells(j)):
        for v in tau:
            face = tuple(w for w in tau if w != v)
            rows.append(X.index(face))
            cols.append(c)
            vals.append(orientation_sign((v, *face)))
    return _csr(rows, cols, vals, (X.num_cells(j - 1), X.num_cells(j)))


def coboundary_matrix(X: SimplicialComplex, j: int) -> sp.csr_matrix:
    """``delta_j``, the transpose of ``d_j``."""
    return boundary_matrix(X, j).T.tocsr()


def laplacian(X: SimplicialComplex, j: int, kind: str = "upper") -> sp.csr_matrix:
    """Upper ``d_{j+1} d_{j+1}^T``, lower ``d_j^T d_j`` or full (their sum)."""
    if kind == "upper":
        _check(X, j, -1, X.dim - 1, "upper laplacian")
        b = _boundary(X, j + 1)
        return (b @ b.T).tocsr()
    if kind == "lower":
        _check(X, j, 0, X.dim, "lower laplacian")
        b = _boundary(X, j)
        return (b.T @ b).tocsr()
    if kind == "full":
        _check(X, j, 0, X.dim - 1, "full laplacian")
        return (laplacian(X, j, "upper") + laplacian(X, j, "lower")).tocsr()
    raise ValidationError(f"unknown laplacian kind {kind!r}")


def degree_matrix(X: SimplicialComplex, j: int) -> sp.csr_matrix:
    _check(X, j, 0, X.dim, "degree_matrix")
    return sp.diags(X.degrees(j).astype(DTYPE), format="csr", dtype=DTYPE)


def adjacency_matrix(X: SimplicialComplex, j: int, kind: str = "similar") -> sp.csr_matrix:
    """Signed adjacency for the ``~`` (``similar``) or ``pitchfork`` relation.

    Entry ``(s, s')`` is +1 when canonical ``s'`` is related to canonical
    ``s``, and -1 when it is the reversed ``s'`` that is related. Computed
    straight from the induced orientations on shared faces, independently
    of :func:`boundary_matrix`.
    """
    if kind == "similar":
        _check(X, j, 0, X.dim - 1, "similar adjacency")
    elif kind == "pitchfork":
        _check(X, j, 0, X.dim, "pitchfork adjacency")
    else:
        raise ValidationError(f"unknown adjacency kind {kind!r}")

    cofaces: dict[tuple, list[tuple[int, int]]] = defaultdict(list)
    for idx, s in enumerate(X.cells(j)):
        for v in s:
            face = tuple(w for w in s if w != v)
            sign = 1 if j == 0 else _induced_orientation(s, v)
            cofaces[face].append((idx, sign))

    cells = X.cells(j)
    rows, cols, vals = [], [], []
    for group in cofaces.values():
        for a, sa in group:
            for b, sb in group:
                if a == b:
                    continue
                if kind == "similar":
                    union = tuple(sorted(set(cells[a]) | set(cells[b])))
                    if union not in X:
                        continue
                rows.append(a)
                cols.append(b)
                vals.append(sa * sb)
    n = X.num_cells(j)
    return _csr(rows, cols, vals, (n, n))


def _equal(a: sp.spmatrix, b: sp.spmatrix) -> bool:
    if a.shape != b.shape:
        return False
    diff = (sp.csr_matrix(a) - sp.csr_matrix(b)).tocsr()
    diff.eliminate_zeros()
    return diff.nnz == 0


def identity_report(X: SimplicialComplex) -> dict[str, bool]:
    """Check every exact operator identity on ``X``; one entry per identity."""
    out: dict[str, bool] = {}
    d = X.dim
    for j in range(0, d):
        prod = boundary_matrix(X, j) @ boundary_matrix(X, j + 1)
        out[f"chain:d{j}d{j + 1}=0"] = sp.csr_matrix(prod).count_nonzero() == 0
    for j in range(0, d + 1):
        n = X.num_cells(j)
        eye = sp.identity(n, dtype=DTYPE, format="csr")
        out[f"lower:{j}"] = _equal(
            laplacian(X, j, "lower"), (j + 1) * eye + adjacency_matrix(X, j, "pitchfork")
        )
    for j in range(0, d):
        up = laplacian(X, j, "upper")
        out[f"upper:{j}"] = _equal(up, degree_matrix(X, j) - adjacency_matrix(X, j, "similar"))
        full = laplacian(X, j, "full")
        out[f"full:{j}"] = _equal(full, up + laplacian(X, j, "lower"))
        diag = X.degrees(j) + j + 1
        out[f"full_diag:{j}"] = bool(np.array_equal(full.diagonal(), diag))
        out[f"trace:{j}"] = int(up.diagonal().sum()) == int(X.degrees(j).sum())
    if d >= 0:
        out["upper:-1=[n]"] = _equal(laplacian(X, -1, "upper"), sp.csr_matrix([[X.n]]))
    return out


def write_coo(m: sp.spmatrix, fh: TextIO) -> None:
    """Write ``rows cols nnz`` then one ``row col value`` line per entry."""
    c = sp.coo_matrix(m)
    order = np.lexsort((c.col, c.row))
    fh.write(f"{c.shape[0]} {c.shape[1]} {c.nnz}\n")
    for k in order:
        fh.write(f"{c.row[k]} {c.col[k]} {int(c.data[k])}\n")


def read_coo(fh: TextIO) -> sp.csr_matrix:
    header = fh.readline().split()
    if len(header) != 3:
        raise ValidationError("coordinate header must be 'rows cols nnz'")
    r, c, nnz = map(int, header)
    rows, cols, vals = [], [], []
    for line in fh:
        if line.strip():
            a, b, v = line.split()
            rows.append(int(a))
            cols.append(int(b))
            vals.append(int(v))
    if len(vals) != nnz:
        raise ValidationError(f"expected {nnz} entries, found {len(vals)}")
    return _csr(rows, cols, vals, (r, c))
