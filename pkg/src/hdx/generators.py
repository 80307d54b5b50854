"""Deterministic complex generators, a portable RNG, and Complex JSON I/O.

Randomness comes from SplitMix64 so that a seed reproduces the same complex
in any language that implements the same few lines of integer arithmetic:

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    return z ^ (z >> 31)

A uniform float is ``(next() >> 11) * 2**-53``; a uniform integer below
``b`` rejects draws ``>= 2**64 - (2**64 mod b)`` and returns ``draw mod b``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb
from pathlib import Path

from .complex import SimplicialComplex, build_from_facets
from .errors import ValidationError
from .mixing import VertexFamily

__all__ = [
    "GeneratorSpec",
    "SplitMix64",
    "complete_skeleton",
    "complex_from_dict",
    "dumps_complex",
    "linial_meshulam",
    "load_complex",
    "random_disjoint_family",
    "save_complex",
]

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            k = self.below(i + 1)
            items[i], items[k] = items[k], items[i]


def derive_seed(seed: int, index: int) -> int:
    """Per-trial seed: the first SplitMix64 output for ``seed + index``."""
    return SplitMix64((seed + index) & MASK64).next_u64()


def complete_skeleton(n: int, m: int) -> SimplicialComplex:
    """``K_n^(m)``: every cell of dimension at most ``m`` on ``n`` vertices."""
    if n < 1 or not 0 <= m < n:
        raise ValidationError(f"complete_skeleton needs 0 <= m < n, got n={n}, m={m}")
    return build_from_facets(n, combinations(range(n), m + 1))


def linial_meshulam(d: int, n: int, p: float, seed: int) -> SimplicialComplex:
    """Complete ``(d-1)``-skeleton plus each possible ``d``-cell with probability ``p``.

    Candidate ``d``-cells are visited in lexicographic order, one uniform
    draw each; a cell is kept when the draw is ``< p``.
    """
    if d < 1 or n <= d or not 0.0 <= p <= 1.0:
        raise ValidationError(f"linial_meshulam needs d >= 1, n > d, 0 <= p <= 1; got {d}, {n}, {p}")
    rng = SplitMix64(seed)
    tops = [c for c in combinations(range(n), d + 1) if rng.random() < p]
    return build_from_facets(n, list(combinations(range(n), d)) + tops, dim=d)


def random_disjoint_family(X: SimplicialComplex | int, sizes: list[int], seed: int) -> VertexFamily:
    """Disjoint vertex sets of the requested sizes, from a seeded shuffle of the vertices."""
    n = X if isinstance(X, int) else X.n
    if any(s < 0 for s in sizes) or sum(sizes) > n:
        raise ValidationError(f"sizes {sizes} do not fit in {n} vertices")
    verts = list(range(n))
    SplitMix64(seed).shuffle(verts)
    sets, start = [], 0
    for s in sizes:
        sets.append(tuple(sorted(verts[start:start + s])))
        start += s
    return VertexFamily(tuple(sets))


def complex_from_dict(data: dict) -> SimplicialComplex:
    try:
        n = int(data["n"])
        facets = data["facets"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"complex JSON needs integer 'n' and list 'facets': {exc}") from exc
    return build_from_facets(n, facets, data.get("dim"))


def dumps_complex(X: SimplicialComplex) -> str:
    return json.dumps(X.to_dict(), sort_keys=True) + "\n"


def load_complex(path: str | Path) -> SimplicialComplex:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read complex from {path}: {exc}") from exc
    return complex_from_dict(data)


def save_complex(X: SimplicialComplex, path: str | Path) -> None:
    Path(path).write_text(dumps_complex(X))


@dataclass(frozen=True)
class GeneratorSpec:
    """``complete:n:m``, ``lm:d:n:p:seed`` or ``file:path``."""

    kind: str
    params: tuple

    @classmethod
    def parse(cls, text: str) -> GeneratorSpec:
        kind, _, rest = text.partition(":")
        args = rest.split(":") if rest else []
        try:
            if kind == "complete" and len(args) == 2:
                n, m = map(int, args)
                if not 0 <= m <= n - 1:
                    raise ValidationError(f"complete skeleton needs 0 <= m <= n-1, got {text!r}")
                return cls(kind, (n, m))
            if kind in ("lm", "linial_meshulam") and len(args) == 4:
                d, n, p, seed = int(args[0]), int(args[1]), float(args[2]), int(args[3], 0)
                if not 0 <= p <= 1 or not 0 <= seed <= MASK64:
                    raise ValidationError(f"bad Linial-Meshulam parameters {text!r}")
                return cls("lm", (d, n, p, seed))
            if kind == "file" and rest:
                return cls(kind, (rest,))
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"cannot parse generator {text!r}: {exc}") from exc
        raise ValidationError(f"unknown generator {text!r}; use complete:n:m, lm:d:n:p:seed or file:path")

    def build(self) -> SimplicialComplex:
        if self.kind == "complete":
            return complete_skeleton(*self.params)
        if self.kind == "lm":
            return linial_meshulam(*self.params)
        return load_complex(self.params[0])


def expected_top_cells(d: int, n: int, p: float) -> float:
    return p * comb(n, d + 1)
