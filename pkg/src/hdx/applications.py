"""Consequences of spectral expansion: colorings, geometric overlap, ideal expanders."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import SimplicialComplex
from .errors import CertificationError, ValidationError
from .generators import SplitMix64, derive_seed, random_disjoint_family
from .mixing import _cert_map, _needs, c_d, count_galleries_bruteforce
from .spectral import certificate_vector

__all__ = [
    "OverlapBound",
    "chromatic_lower_bound",
    "chromatic_number_exact",
    "ideal_expander_check",
    "max_coverage",
    "overlap_bound",
    "overlap_estimate",
]

CHROMATIC_MAX_N = 20
BARYCENTRIC_TOL = 1e-12
IDEAL_EPS = 1e-8


def _eps_sum(d: int, certs) -> float:
    return sum(c.eps for c in _needs(_cert_map(certs), range(0, d)))


def chromatic_lower_bound(d: int, certs) -> float:
    """``1 / ((d+1) * (c_d * sum eps)^(1/d))``; take the ceiling for an integer bound.

    A sum below ``1e-8`` counts as zero: it is eigensolver noise on an ideal spectrum.
    """
    total = _eps_sum(d, certs)
    if total <= IDEAL_EPS:
        raise CertificationError("sum of eps is zero: chromatic number unbounded by this method")
    return 1.0 / ((d + 1) * (float(c_d(d)) * total) ** (1.0 / d))


def _colorable(order: list[int], cells_at: dict[int, list[tuple[int, ...]]], c: int, n: int) -> bool:
    color = [-1] * n

    def blocked(v: int, col: int) -> bool:
        return any(all(color[w] == col for w in cell if w != v) for cell in cells_at[v])

    def place(pos: int, used: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        for col in range(min(used + 1, c)):
            if blocked(v, col):
                continue
            color[v] = col
            if place(pos + 1, max(used, col + 1)):
                return True
            color[v] = -1
        return False

    return place(0, 0)


def chromatic_number_exact(X: SimplicialComplex, c_max: int | None = None) -> int | None:
    """Smallest ``c`` admitting a coloring with no monochromatic top cell, or ``None`` if above ``c_max``."""
    if X.n > CHROMATIC_MAX_N:
        raise ValidationError(f"exact chromatic search is limited to n <= {CHROMATIC_MAX_N}")
    c_max = X.n if c_max is None else c_max
    tops = X.cells(X.dim)
    if not tops:
        return 1 if c_max >= 1 else None
    if X.dim == 0:
        return None  # every vertex is itself a monochromatic top cell
    cells_at: dict[int, list[tuple[int, ...]]] = {v: [] for v in range(X.n)}
    for cell in tops:
        for v in cell:
            cells_at[v].append(cell)
    order = sorted(range(X.n), key=lambda v: (-len(cells_at[v]), v))
    for c in range(1, c_max + 1):
        if _colorable(order, cells_at, c, X.n):
            return c
    return None


@dataclass(frozen=True)
class OverlapBound:
    value: float
    vacuous: bool

    def to_dict(self) -> dict:
        return {"value": self.value, "vacuous": self.vacuous}


def overlap_bound(d: int, pach: float, certs) -> OverlapBound:
    """Lower bound on geometric overlap given Pach's constant for dimension ``d``."""
    if not 0 < pach <= 1:
        raise ValidationError("Pach's constant must lie in (0, 1]")
    total = _eps_sum(d, certs)
    value = pach * math.factorial(d) / 2**d * ((pach / (d + 1)) ** d - float(c_d(d)) * total)
    return OverlapBound(value, value <= 0)


def max_coverage(X: SimplicialComplex, coords: np.ndarray, points: np.ndarray) -> float:
    """Largest fraction of top cells whose image simplex contains one of ``points``.

    Membership uses barycentric coordinates with tolerance 1e-12. Cells whose
    image is degenerate (zero volume) are counted as covering nothing.
    """
    d = X.dim
    tops = np.array(X.cells(d), dtype=np.int64)
    if tops.size == 0:
        raise ValidationError("complex has no top-dimensional cells")
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (X.n, d):
        raise ValidationError(f"embedding must have shape ({X.n}, {d})")
    V = coords[tops]                          # (m, d+1, d)
    base = V[:, 0, :]                         # (m, d)
    T = np.transpose(V[:, 1:, :] - base[:, None, :], (0, 2, 1))  # (m, d, d)
    det = np.linalg.det(T)
    ok = np.abs(det) > 1e-14
    inside_count = np.zeros(len(points), dtype=np.int64)
    if ok.any():
        inv = np.linalg.inv(T[ok])            # (m', d, d)
        rel = np.asarray(points)[None, :, :] - base[ok][:, None, :]  # (m', p, d)
        lam = np.einsum("mij,mpj->mpi", inv, rel)
        first = 1.0 - lam.sum(axis=2)
        inside = (lam >= -BARYCENTRIC_TOL).all(axis=2) & (first >= -BARYCENTRIC_TOL)
        inside_count = inside.sum(axis=0)
    return float(inside_count.max(initial=0)) / len(tops)


def overlap_estimate(
    X: SimplicialComplex,
    embeddings: int = 8,
    seed: int = 0,
    centroids: int = 500,
    random_points: int = 500,
    fixed: list[np.ndarray] | None = None,
) -> dict:
    """Heuristic min-over-embeddings of max point coverage.

    Each embedding draws vertex coordinates uniformly in the unit cube
    (unless ``fixed`` embeddings are given). Candidate points are centroids
    of up to ``centroids`` sampled top cells plus ``random_points`` uniform
    points in the bounding box. The result is neither an upper nor a lower
    bound on the true overlap.
    """
    d = X.dim
    if d < 1 or X.num_cells(d) == 0:
        raise ValidationError("overlap estimate needs a complex with top cells of dimension >= 1")
    tops = np.array(X.cells(d), dtype=np.int64)
    runs = fixed if fixed is not None else [None] * embeddings
    per = []
    for e, coords in enumerate(runs):
        rng = np.random.default_rng(derive_seed(seed, e))
        if coords is None:
            coords = rng.random((X.n, d))
        coords = np.asarray(coords, dtype=float)
        pick = tops
        if len(tops) > centroids:
            pick = tops[np.sort(rng.choice(len(tops), centroids, replace=False))]
        pts = [coords[pick].mean(axis=1)]
        if random_points:
            lo, hi = coords.min(axis=0), coords.max(axis=0)
            pts.append(lo + (hi - lo) * rng.random((random_points, d)))
        per.append(max_coverage(X, coords, np.vstack(pts)))
    return {"estimate": min(per), "per_embedding": per, "heuristic": True, "seed": seed}


def ideal_expander_check(X: SimplicialComplex, families: int = 20, seed: int = 0) -> dict:
    """Decide whether every ``eps_j`` vanishes and, if so, test the consequences.

    For an ideal complex the gallery counts must be fixed by the set sizes,
    and the complex must be a complete skeleton ``K_n^(dim)``.
    """
    d = X.dim
    certs = certificate_vector(X, strict=False)[1:]
    ideal = all(c is not None and c.valid and c.eps <= IDEAL_EPS for c in certs)
    complete = X.is_complete_skeleton()
    report: dict = {
        "ideal": ideal,
        "k": [c.k if c else None for c in certs],
        "eps": [c.eps if c else None for c in certs],
        "complete_skeleton": complete,
    }
    if not ideal:
        report.update(accepted=False, mixing_verified=None, reason="some eps_j > 0")
        return report

    k = [c.k for c in certs]
    # singleton sets: |F({v_0}, ..., {v_{j+1}})| = k_0...k_j / n^(j+1) must be 0 or 1
    ratios = [math.prod(k[: j + 1]) / X.n ** (j + 1) for j in range(d)]
    report["singleton_ratios"] = ratios
    rigid = all(abs(r - 1) <= 1e-8 for r in ratios)

    failures = []
    trials = 0
    for t in range(families if X.n >= 2 else 0):
        rng = SplitMix64(derive_seed(seed, t))
        ell = 1 + rng.below(min(X.n - 1, d + 1))
        base = [1 + rng.below(3) for _ in range(ell + 1)]
        while sum(base) > X.n:
            base[base.index(max(base))] -= 1
        fam = random_disjoint_family(X, base, rng.next_u64())
        for j in range(0, min(ell, d) + 1):
            obs = count_galleries_bruteforce(X, j, fam)
            if j == 0:
                pred = float(math.prod(base))
            else:
                pred = math.prod(k[: j - 1]) * k[j - 1] ** (ell - j + 1) / X.n ** ell * math.prod(base)
            trials += 1
            if abs(obs - pred) > 1e-9 * max(1.0, pred):
                failures.append({"sizes": base, "j": j, "observed": obs, "predicted": pred})
    report.update(
        mixing_checks=trials,
        mixing_verified=not failures,
        mixing_failures=failures[:5],
        rigidity_consistent=rigid == complete,
        accepted=ideal and complete and not failures,
    )
    return report
