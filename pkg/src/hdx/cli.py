"""Command-line front end.

Every command writes deterministic JSON (sorted keys). Multi-trial commands
emit one JSON line per trial followed by a summary line, unless
``--format json`` asks for a single object. Exit codes: 0 success,
2 validation error, 3 numerical failure, 4 bound violation.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path

from . import applications, hodge, mixing, spectral
from .complex import SimplicialComplex
from .errors import HdxError, ValidationError
from .generators import (
    GeneratorSpec,
    complete_skeleton,
    derive_seed,
    dumps_complex,
    linial_meshulam,
    load_complex,
    random_disjoint_family,
)

SEED_ENV = "HDX_SEED"


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, allow_nan=False)


class _Output:
    def __init__(self, path: str | None):
        self.path = path
        self.lines: list[str] = []

    def emit(self, obj) -> None:
        self.lines.append(_dumps(obj))

    def flush(self) -> None:
        text = "".join(line + "\n" for line in self.lines)
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _trials(args, default: int = 1) -> int:
    return default if args.trials is None else args.trials


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            raise ValidationError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _complex(args) -> SimplicialComplex:
    if args.input and args.generator:
        raise ValidationError("give only one of --input and --generator")
    if args.input:
        return load_complex(args.input)
    if args.generator:
        return GeneratorSpec.parse(args.generator).build()
    raise ValidationError("an input complex is required (--input or --generator)")


def _ints(text: str | None, what: str) -> list[int]:
    if not text:
        raise ValidationError(f"--{what} is required")
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"--{what} must be comma-separated integers") from None


def _k_overrides(args) -> dict[int, float]:
    if not args.k:
        return {}
    try:
        values = [float(x) for x in args.k.split(",")]
    except ValueError:
        raise ValidationError("--k must be comma-separated numbers") from None
    return dict(enumerate(values))


def _certs(X: SimplicialComplex, args) -> list[spectral.ExpanderCertificate]:
    certs = spectral.certificate_vector(X, _k_overrides(args), strict=False)
    for c, j in zip(certs, range(-1, X.dim)):
        if c is None or not c.valid:
            raise spectral.CertificationError(f"not an expander at j={j}")
    return certs


# -- commands ---------------------------------------------------------------


def cmd_generate(args, out: _Output) -> int:
    kind, params = args.kind, args.params
    try:
        if kind == "complete":
            n, m = (int(p) for p in params)
            X = complete_skeleton(n, m)
        elif kind in ("lm", "linial_meshulam"):
            if len(params) == 3:
                params = [*params, str(_seed(args))]
            d, n, p, seed = int(params[0]), int(params[1]), float(params[2]), int(params[3], 0)
            X = linial_meshulam(d, n, p, seed)
        else:
            raise ValidationError(f"unknown generator kind {kind!r}")
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad generator parameters {params}: {exc}") from exc
    out.lines.append(dumps_complex(X).rstrip("\n"))
    return 0


def cmd_spectrum(args, out: _Output) -> int:
    X = _complex(args)
    out.emit(spectral.spectral_summary(X, _k_overrides(args)).to_dict())
    return 0


def cmd_certify(args, out: _Output) -> int:
    X = _complex(args)
    j = 0 if args.j is None else args.j
    k = None
    if args.k:
        try:
            k = float(args.k)
        except ValueError:
            raise ValidationError("--k must be a single number for certify") from None
    out.emit(spectral.certify(X, j, k).to_dict())
    return 0


def _trial_family(X: SimplicialComplex, sizes: list[int], seed: int, t: int):
    return random_disjoint_family(X, sizes, derive_seed(seed, t))


def _finish(out: _Output, args, trials: list[dict], summary: dict) -> int:
    if args.format == "json":
        out.emit({"trials": trials, "summary": summary})
    else:
        for tr in trials:
            out.emit(tr)
        out.emit({"summary": summary})
    return 4 if summary["violations"] else 0


def cmd_mixing(args, out: _Output) -> int:
    X = _complex(args)
    sizes = _ints(args.sizes, "sizes")
    certs = _certs(X, args)
    seed = _seed(args)
    trials, slacks, violations = [], [], 0
    for t in range(_trials(args)):
        fam = _trial_family(X, sizes, seed, t)
        rep = mixing.mixing_check(X, fam, certs, tol=args.tol, strict=False)
        violations += not rep.holds
        slacks.append(rep.slack)
        trials.append({"trial": t, **rep.to_dict()})
    summary = {"trials": len(trials), "min_slack": min(slacks, default=None), "violations": violations}
    return _finish(out, args, trials, summary)


def cmd_descent(args, out: _Output) -> int:
    X = _complex(args)
    sizes = _ints(args.sizes, "sizes")
    if args.l is not None and args.l != len(sizes) - 1:
        raise ValidationError(f"--l={args.l} does not match {len(sizes)} set sizes")
    j = 0 if args.j is None else args.j
    certs = _certs(X, args)
    seed = _seed(args)
    trials, slacks, violations = [], [], 0
    for t in range(_trials(args)):
        fam = _trial_family(X, sizes, seed, t)
        rep = mixing.descent_check(X, j, fam, certs, tol=args.tol, strict=False)
        prop = mixing.from_j_to_l_check(X, j, fam, certs, tol=args.tol, strict=False)
        ok = rep.holds and rep.holds_improved and prop.holds
        violations += not ok
        slacks.append(rep.bound - rep.deviation)
        trials.append({"trial": t, "descent": rep.to_dict(), "from_j_to_l": prop.to_dict()})
    summary = {"trials": len(trials), "min_slack": min(slacks, default=None), "violations": violations}
    return _finish(out, args, trials, summary)


def _parse_sets(text: str | None) -> list[list[int]]:
    if not text:
        raise ValidationError("--sets is required, e.g. '0;1;2' or '0,3;1;2,4'")
    try:
        return [[int(v) for v in part.split(",") if v.strip()] for part in text.split(";")]
    except ValueError:
        raise ValidationError("--sets must look like '0,3;1;2'") from None


def cmd_galleries(args, out: _Output) -> int:
    X = _complex(args)
    sets = _parse_sets(args.sets)
    j = 0 if args.j is None else args.j
    fam = mixing.VertexFamily.of(sets)
    count = mixing.count_galleries_bruteforce(X, j, fam)
    result = {"j": j, "sets": [list(s) for s in fam.sets], "count": count}
    if j <= X.dim and j <= fam.ell and fam.window_disjoint(j + 2):
        result["operator_pitchfork"] = mixing.count_galleries_operator(X, j, fam, "pitchfork")
    if 1 <= j <= X.dim and fam.window_disjoint(j + 1):
        result["operator_similar"] = mixing.count_galleries_operator(X, j - 1, fam, "similar")
    out.emit(result)
    return 0


def _invariants(X: SimplicialComplex) -> dict[str, bool]:
    checks = hodge.identity_report(X)
    for j in range(1, X.dim + 1):
        checks[f"duality:{j}"] = spectral.spectral_duality(X, j)
    for j in range(0, X.dim):
        nt = spectral.nontrivial_spectrum(X, j)
        checks[f"zero_iff_betti:{j}"] = bool((nt == 0).any()) == (spectral.betti(X, j) > 0)
    checks["lambda_-1=n"] = bool(spectral.nontrivial_spectrum(X, -1).tolist() == [float(X.n)])
    return checks


def cmd_invariants(args, out: _Output) -> int:
    spec = GeneratorSpec.parse(args.generator) if args.generator else None
    if spec is not None and spec.kind == "lm" and _trials(args) > 1:
        d, n, p, seed = spec.params
        complexes = [linial_meshulam(d, n, p, derive_seed(seed, t)) for t in range(_trials(args))]
    else:
        complexes = [_complex(args)]
    failed = 0
    records = []
    for t, X in enumerate(complexes):
        checks = _invariants(X)
        ok = all(checks.values())
        failed += not ok
        records.append({"trial": t, "n": X.n, "dim": X.dim, "pass": ok, "checks": checks})
    summary = {"trials": len(complexes), "failed": failed, "violations": failed}
    return _finish(out, args, records, summary)


def cmd_lemma(args, out: _Output) -> int:
    X = _complex(args)
    out.emit(spectral.count_lemma(X))
    return 0


def cmd_chromatic(args, out: _Output) -> int:
    X = _complex(args)
    exact = applications.chromatic_number_exact(X, args.cmax)
    result: dict = {"exact": exact, "lower_bound": None, "note": None}
    try:
        result["lower_bound"] = applications.chromatic_lower_bound(X.dim, _certs(X, args))
    except HdxError as exc:
        result["note"] = str(exc)
    out.emit(result)
    return 0


def cmd_overlap(args, out: _Output) -> int:
    X = _complex(args)
    result = applications.overlap_estimate(
        X, embeddings=args.embeddings, seed=_seed(args),
        centroids=args.centroids, random_points=args.points,
    )
    result["bound"] = None
    if args.pach is not None:
        result["bound"] = applications.overlap_bound(X.dim, args.pach, _certs(X, args)).to_dict()
    out.emit(result)
    return 0


def cmd_ideal(args, out: _Output) -> int:
    X = _complex(args)
    out.emit(applications.ideal_expander_check(X, families=_trials(args, 20), seed=_seed(args)))
    return 0


def cmd_matrix(args, out: _Output) -> int:
    X = _complex(args)
    j = 0 if args.j is None else args.j
    builders = {
        "boundary": lambda: hodge.boundary_matrix(X, j),
        "upper": lambda: hodge.laplacian(X, j, "upper"),
        "lower": lambda: hodge.laplacian(X, j, "lower"),
        "full": lambda: hodge.laplacian(X, j, "full"),
        "similar": lambda: hodge.adjacency_matrix(X, j, "similar"),
        "pitchfork": lambda: hodge.adjacency_matrix(X, j, "pitchfork"),
        "degree": lambda: hodge.degree_matrix(X, j),
    }
    buf = io.StringIO()
    hodge.write_coo(builders[args.op](), buf)
    out.lines.append(buf.getvalue().rstrip("\n"))
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="complex JSON file")
    common.add_argument("--generator", help="complete:n:m | lm:d:n:p:seed | file:path")
    common.add_argument("--j", type=int)
    common.add_argument("--l", type=int)
    common.add_argument("--sizes", help="comma-separated set sizes")
    common.add_argument("--seed", type=lambda s: int(s, 0), help=f"default: ${SEED_ENV} or 0")
    common.add_argument("--trials", type=int, help="default 1 (ideal: 20 families)")
    common.add_argument("--k", help="k_j override(s), comma-separated from j=0")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--pach", type=float, help="Pach's constant for the overlap bound")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "jsonl"), default="jsonl")

    parser = argparse.ArgumentParser(prog="hdx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a generated complex as JSON")
    g.add_argument("kind", help="complete | lm")
    g.add_argument("params", nargs="+", help="complete: n m; lm: d n p [seed]")
    g.set_defaults(func=cmd_generate)

    for name, func, text in [
        ("spectrum", cmd_spectrum, "upper Laplacian spectra, Betti numbers, certificates"),
        ("certify", cmd_certify, "(j, k, eps) certificate at --j"),
        ("mixing", cmd_mixing, "top-dimensional mixing bound over random families"),
        ("descent", cmd_descent, "descent and from-j-to-l bounds over random families"),
        ("galleries", cmd_galleries, "count j-galleries in --sets"),
        ("invariants", cmd_invariants, "exact operator identities and spectral invariants"),
        ("lemma", cmd_lemma, "average degree / cell count from spectra"),
        ("chromatic", cmd_chromatic, "exact chromatic number and spectral lower bound"),
        ("overlap", cmd_overlap, "heuristic overlap estimate and bound"),
        ("ideal", cmd_ideal, "ideal-expander check"),
        ("matrix", cmd_matrix, "export an operator in coordinate text format"),
    ]:
        p = sub.add_parser(name, parents=[common], help=text)
        p.set_defaults(func=func)
        if name == "galleries":
            p.add_argument("--sets", help="sets separated by ';', vertices by ','")
        if name == "chromatic":
            p.add_argument("--cmax", type=int)
        if name == "overlap":
            p.add_argument("--embeddings", type=int, default=8)
            p.add_argument("--centroids", type=int, default=500)
            p.add_argument("--points", type=int, default=500)
        if name == "matrix":
            p.add_argument("--op", default="boundary",
                           choices=("boundary", "upper", "lower", "full", "similar", "pitchfork", "degree"))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    out = _Output(args.out)
    try:
        if args.trials is not None and args.trials < 0:
            raise ValidationError("--trials must be non-negative")
        code = args.func(args, out)
    except HdxError as exc:
        sys.stdout.write(_dumps({"error": exc.kind, "message": str(exc), "exit_code": exc.exit_code}) + "\n")
        return exc.exit_code
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
