"""Acceptance suite: one test per criterion, each tagged for the summary printout."""

import math
import random
import time
from itertools import combinations

import numpy as np
import pytest

from hdx.applications import chromatic_lower_bound, chromatic_number_exact, ideal_expander_check
from hdx.cli import main
from hdx.complex import build_from_facets
from hdx.errors import CertificationError
from hdx.generators import complete_skeleton, linial_meshulam, random_disjoint_family, save_complex
from hdx.hodge import adjacency_matrix, boundary_matrix, degree_matrix, laplacian
from hdx.mixing import (
    c_d,
    cjl_constant,
    count_galleries_bruteforce,
    count_galleries_operator,
    descent_check,
    from_j_to_l_check,
    mixing_check,
)
from hdx.spectral import certificate_vector, count_lemma, error_operator_norm, nontrivial_spectrum, spectral_duality

from conftest import random_instance

pytestmark = pytest.mark.acceptance


def identity_corpus():
    rng = random.Random(1)
    out = []
    for t in range(50):
        d = (1, 2, 3)[t % 3]
        n = rng.randint(d + 2, 12)
        out.append(linial_meshulam(d, n, rng.uniform(0.2, 0.9), 7000 + t))
    out += [complete_skeleton(n, m) for n in range(1, 9) for m in range(n)]
    return out


IDENTITY_CORPUS = identity_corpus()


@pytest.fixture(scope="module")
def gallery_corpus():
    """At least 500 (complex, j, l, family) instances with n <= 10 and l <= d <= 3."""
    rng = random.Random(2024)
    items = []
    for _ in range(520):
        X, fam = random_instance(rng, max_n=10, max_d=3)
        items.append((X, rng.randint(0, fam.ell), fam))
    return items


def _valid_certs(X):
    certs = certificate_vector(X, strict=False)
    return certs if all(c is not None and c.valid for c in certs) else None


def _eq(a, b) -> bool:
    return (a != b).nnz == 0


def test_c01_exact_operator_identities(record_property):
    record_property("criterion", "1 exact operator identities")
    start = time.perf_counter()
    for X in IDENTITY_CORPUS:
        d = X.dim
        for j in range(d):
            assert (boundary_matrix(X, j) @ boundary_matrix(X, j + 1)).count_nonzero() == 0
        for j in range(d + 1):
            eye = (j + 1) * np.eye(X.num_cells(j), dtype=np.int64)
            low = laplacian(X, j, "lower").toarray()
            np.testing.assert_array_equal(low, eye + adjacency_matrix(X, j, "pitchfork").toarray())
        for j in range(d):
            up = laplacian(X, j, "upper")
            assert _eq(up, degree_matrix(X, j) - adjacency_matrix(X, j, "similar"))
            assert _eq(laplacian(X, j, "full"), up + laplacian(X, j, "lower"))
    assert time.perf_counter() - start < 30


def test_c02_spectral_duality(record_property):
    record_property("criterion", "2 spectral duality")
    for X in IDENTITY_CORPUS:
        for j in range(1, X.dim + 1):
            assert spectral_duality(X, j, tol=1e-6), (X, j)


def test_c03_complete_skeleton_spectra(record_property):
    record_property("criterion", "3 complete-skeleton spectra")
    for n in range(1, 13):
        for m in range(n):
            X = complete_skeleton(n, m)
            certs = certificate_vector(X)
            for j in range(m):
                vals = nontrivial_spectrum(X, j)
                assert np.abs(vals - n).max() <= 1e-8
                c = certs[j + 1]
                assert abs(c.k - n) <= 1e-8 and c.eps <= 1e-8 and c.valid


def test_c04_gallery_oracle_equivalence(record_property, gallery_corpus):
    record_property("criterion", "4 gallery oracle equivalence")
    start = time.perf_counter()
    compared = 0
    for X, j, fam in gallery_corpus:
        assert count_galleries_operator(X, j, fam, "pitchfork") == count_galleries_bruteforce(X, j, fam)
        compared += 1
        if j < min(X.dim, fam.ell):
            assert count_galleries_operator(X, j, fam, "similar") == count_galleries_bruteforce(X, j + 1, fam)
            compared += 1
    assert len(gallery_corpus) >= 500 and compared >= 500
    assert time.perf_counter() - start < 120


def test_c05_diagonal_shift_invariance(record_property):
    record_property("criterion", "5 diagonal-shift invariance")
    rng = random.Random(55)
    nprng = np.random.default_rng(55)
    done = 0
    while done < 100:
        X, fam = random_instance(rng, max_n=10)
        levels = [(j, "similar") for j in range(min(X.dim, fam.ell))]
        levels += [(j, "pitchfork") for j in range(min(X.dim, fam.ell) + 1)]
        j, kind = levels[rng.randrange(len(levels))]
        base = count_galleries_operator(X, j, fam, kind)
        for _ in range(20):
            T = nprng.normal(scale=5.0, size=X.num_cells(j))
            assert count_galleries_operator(X, j, fam, kind, diag_shift=T) == base
        done += 1


def test_c06_descent_lemma(record_property, gallery_corpus):
    record_property("criterion", "6 descent lemma")
    checked = violations = 0
    for X, _, fam in gallery_corpus:
        certs = _valid_certs(X)
        if certs is None:
            continue
        for j in range(min(X.dim, fam.ell)):
            rep = descent_check(X, j, fam, certs, strict=False)
            violations += not (rep.holds and rep.holds_improved)
            checked += 1
    assert checked > 0 and violations == 0


def test_c07_from_j_to_l_and_mixing(record_property, gallery_corpus):
    record_property("criterion", "7 top-dimensional mixing and from_j_to_l")
    assert (c_d(1), c_d(2), c_d(3)) == (1, 4, 16)
    checked = violations = 0
    for X, _, fam in gallery_corpus:
        certs = _valid_certs(X)
        if certs is None:
            continue
        for j in range(min(X.dim, fam.ell)):
            rep = from_j_to_l_check(X, j, fam, certs, strict=False)
            ks = [c.k for c in certs[1:j + 2]]
            expected = (float(cjl_constant(j, fam.ell)) * math.prod(ks[:-1]) * ks[-1] ** (fam.ell - j)
                        * sum(c.eps for c in certs[1:j + 2]) * max(fam.sizes))
            assert rep.bound == pytest.approx(expected, rel=1e-12, abs=1e-300)
            violations += not rep.holds
            checked += 1
        if fam.ell == X.dim:
            violations += not mixing_check(X, fam, certs, strict=False).holds
            checked += 1
    assert checked > 0 and violations == 0


def test_c08_error_operator_bound(record_property, gallery_corpus):
    record_property("criterion", "8 error-operator bound")
    seen = set()
    for X, _, _ in gallery_corpus:
        key = (X.n, tuple(X.facets()))
        if key in seen:
            continue
        seen.add(key)
        certs = certificate_vector(X, strict=False)
        for j in range(X.dim):
            a, b = certs[j], certs[j + 1]
            if a is None or b is None or not (a.valid and b.valid):
                continue
            rep = error_operator_norm(X, j, a, b, tol=1e-8, strict=False)
            assert rep.norm <= rep.bound + 1e-8
    for n in range(2, 13):
        X = complete_skeleton(n, 1)
        certs = certificate_vector(X)
        assert error_operator_norm(X, 0, certs[0], certs[1]).norm <= 1e-10


def test_c09_count_lemma(record_property, k4):
    record_property("criterion", "9 count lemma")
    fixtures = [complete_skeleton(n, m) for n in range(2, 11) for m in range(1, n)]
    fixtures += [build_from_facets(n, [list(range(n))]) for n in range(2, 8)]
    for X in fixtures:
        rep = count_lemma(X)
        assert rep["applicable"], X
        for row in rep["rows"]:
            assert row["cells_abs_diff"] <= 1e-6 * row["cells"]
            if "avg_degree" in row:
                assert row["avg_degree_abs_diff"] <= 1e-6 * row["avg_degree"]
    rows = count_lemma(k4)["rows"]
    assert rows[0]["avg_degree_predicted"] == pytest.approx(3, rel=1e-6)
    assert rows[1]["cells_predicted"] == pytest.approx(6, rel=1e-6)


def test_c10_ideal_rigidity(record_property, cycle4):
    record_property("criterion", "10 ideal rigidity")
    corpus = [complete_skeleton(n, m) for n, m in [(3, 1), (4, 2), (5, 2), (6, 1), (6, 3), (7, 2)]]
    corpus += [cycle4, build_from_facets(5, [[0, 1, 2], [1, 2, 3], [2, 3, 4]]),
               linial_meshulam(2, 7, 0.5, 3), linial_meshulam(1, 8, 0.6, 4), linial_meshulam(3, 7, 0.7, 5),
               linial_meshulam(2, 6, 1.0, 6)]
    assert len(corpus) >= 10
    accepted = 0
    for X in corpus:
        rep = ideal_expander_check(X, families=20, seed=X.n)
        assert rep["accepted"] == X.is_complete_skeleton(), X
        if rep["accepted"]:
            accepted += 1
            assert rep["mixing_verified"] and not rep["mixing_failures"]
            assert rep["mixing_checks"] >= 20
    assert accepted == 7


def test_c11_chromatic_consistency(record_property, k4, triangle):
    record_property("criterion", "11 chromatic consistency")
    assert chromatic_number_exact(k4) == 4
    assert chromatic_number_exact(triangle) == 2
    rng = random.Random(11)
    compared = 0
    for t in range(60):
        d = rng.randint(1, 3)
        X = linial_meshulam(d, rng.randint(d + 2, 14), rng.uniform(0.4, 1.0), 900 + t)
        certs = _valid_certs(X)
        if certs is None:
            continue
        try:
            bound = chromatic_lower_bound(d, certs)
        except CertificationError:
            continue  # sum of eps is zero: no finite bound
        assert math.ceil(bound) <= chromatic_number_exact(X)
        compared += 1
    assert compared >= 20


def test_c12_cli_determinism(record_property, tmp_path):
    record_property("criterion", "12 determinism")
    src = tmp_path / "x.json"
    save_complex(linial_meshulam(2, 8, 0.7, 12), src)
    commands = [
        ["generate", "lm", "2", "9", "0.5", "--seed", "4"],
        ["generate", "complete", "5", "2"],
        ["spectrum", "--input", src],
        ["certify", "--input", src, "--j", "1"],
        ["mixing", "--input", src, "--sizes", "2,2,3", "--trials", "5", "--seed", "7"],
        ["descent", "--input", src, "--sizes", "2,2,2", "--j", "1", "--trials", "3", "--seed", "7"],
        ["galleries", "--input", src, "--j", "1", "--sets", "0,1;2,3;4"],
        ["invariants", "--generator", "lm:2:7:0.5:3", "--trials", "4"],
        ["lemma", "--input", src],
        ["chromatic", "--input", src],
        ["overlap", "--input", src, "--pach", "0.1", "--embeddings", "3", "--seed", "2"],
        ["ideal", "--generator", "complete:5:2", "--seed", "5"],
        ["matrix", "--input", src, "--j", "1", "--op", "upper"],
    ]
    for i, argv in enumerate(commands):
        outs = []
        for rep in range(2):
            path = tmp_path / f"out{i}_{rep}"
            code = main([str(a) for a in argv] + ["--out", str(path)])
            assert code == 0, argv
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] and outs[0], argv
