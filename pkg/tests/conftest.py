from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

import pytest

from hdx.complex import build_from_facets
from hdx.generators import complete_skeleton, linial_meshulam, random_disjoint_family


@pytest.fixture
def k4():
    return complete_skeleton(4, 1)


@pytest.fixture
def triangle():
    """The full 2-simplex on three vertices."""
    return build_from_facets(3, [[0, 1, 2]])


@pytest.fixture
def cycle3():
    return build_from_facets(3, [[0, 1], [1, 2], [0, 2]])


@pytest.fixture
def cycle4():
    return build_from_facets(4, [[0, 1], [1, 2], [2, 3], [0, 3]])


def exact_rank(rows: list[list[int]]) -> int:
    """Rank over the rationals by Gaussian elimination (oracle for SVD ranks)."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


def naive_galleries(X, j, sets) -> int:
    """Enumerate every candidate sequence of j-cells; the slowest possible oracle."""
    ell = len(sets) - 1
    layers = []
    for i in range(ell - j + 1):
        layer = [tuple(sorted(c)) for c in product(*sets[i:i + j + 1])]
        layers.append([c for c in layer if c in X])
    total = 0
    for seq in product(*layers):
        if all(len(set(a) & set(b)) == j for a, b in zip(seq, seq[1:])):
            total += 1
    return total


def lm_corpus(count: int, max_n: int = 12, dims=(1, 2, 3), seed: int = 0):
    """Seeded Linial-Meshulam complexes with mixed dimensions and densities."""
    rng = random.Random(seed)
    out = []
    for t in range(count):
        d = dims[t % len(dims)]
        n = rng.randint(d + 2, max_n)
        p = rng.uniform(0.2, 1.0)
        out.append(linial_meshulam(d, n, p, 1000 * seed + t))
    return out


def random_instance(rng: random.Random, max_n: int = 10, max_d: int = 3):
    """A small complex plus a disjoint family with l <= d."""
    d = rng.randint(1, max_d)
    n = rng.randint(d + 2, max_n)
    X = linial_meshulam(d, n, rng.uniform(0.3, 1.0), rng.getrandbits(64))
    ell = rng.randint(1, d)
    sizes = [1] * (ell + 1)
    for _ in range(n - ell - 1):
        if rng.random() < 0.5:
            sizes[rng.randrange(ell + 1)] += 1
    fam = random_disjoint_family(X, sizes, rng.getrandbits(64))
    return X, fam


def all_cells(n: int, k: int):
    return list(combinations(range(n), k))


# ---- acceptance reporting -------------------------------------------------------------

_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = dict(report.user_properties).get("criterion")
    if label:
        _ACCEPTANCE.append((label, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"[{outcome}] criterion {label}")
