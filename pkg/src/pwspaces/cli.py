"""Command-line front end.

Commands: classify, norm, verify, oracle, corpus.  Exit codes are a
stable contract:

    0  success (a named class; all checks clean)
    1  parse/validation failure, or an out-of-range request
    2  the classifier answered UNCLASSIFIED
    3  a requested check's hypothesis is not met
    4  a check recorded violations

With CI=1 in the environment, randomized commands require an explicit
--seed; interactive runs default to seed 0.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from .classify import classify
from .errors import (
    DimensionTooLarge,
    HypothesisNotMet,
    PwError,
    SpecValidationError,
)
from .norms import pair_norm_pth_power_exact, space_norm
from .rationals import format_rational
from .specfile import (
    fixture_names,
    load_fixture,
    load_spec_file,
    load_vector_file,
    spec_digest,
)
from .verify import CHECK_KINDS, check_inequality

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNCLASSIFIED = 2
EXIT_HYPOTHESIS = 3
EXIT_VIOLATIONS = 4


def _load_spec(path: str):
    spec, expected = load_spec_file(path)
    return spec.normalized(), expected


def _pair_label(pair) -> str:
    kind = pair.scheme.kind
    if pair.is_trivial:
        return "trivial"
    return kind


def cmd_classify(args) -> int:
    spec, expected = _load_spec(args.spec)
    cls, evidence = classify(spec)
    if args.json:
        payload = {
            "class": cls.name,
            "reason": cls.reason,
            "spec_digest": spec_digest(spec),
            "expected_class": expected,
            "evidence": [
                {"rule": r.rule, "detail": r.detail, "quantities": dict(r.quantities)}
                for r in evidence.rules
            ],
        }
        print(json.dumps(payload, sort_keys=True, default=str))
    else:
        print(f"class: {cls}")
        if expected is not None:
            print(f"expected: {expected}")
        print(f"spec: {spec_digest(spec)}")
        print("evidence:")
        for r in evidence.rules:
            print(f"  - {r.rule}: {r.detail}")
            for key, value in r.quantities:
                print(f"      {key} = {value}")
    return EXIT_UNCLASSIFIED if cls.is_unclassified else EXIT_OK


def cmd_norm(args) -> int:
    spec, _ = _load_spec(args.spec)
    x = load_vector_file(args.vector, spec, exact=args.exact)
    breakdown = space_norm(x, spec)
    rows = []
    for i, pair in enumerate(spec.pairs):
        row = {
            "pair": i + 1,
            "kind": _pair_label(pair),
            "value": breakdown.per_pair[i],
        }
        if args.exact:
            try:
                exact = pair_norm_pth_power_exact(x, pair, spec.p)
                row["value_pth_power_exact"] = format_rational(exact)
            except PwError:
                row["value_pth_power_exact"] = None
        rows.append(row)
    if args.json:
        print(
            json.dumps(
                {
                    "per_pair": rows,
                    "overall": breakdown.overall,
                    "argmax_pair": breakdown.argmax + 1,
                },
                sort_keys=True,
            )
        )
    else:
        for row in rows:
            extra = ""
            if args.exact and row.get("value_pth_power_exact"):
                extra = f"   (norm^p = {row['value_pth_power_exact']})"
            print(f"pair {row['pair']} [{row['kind']}]: {row['value']:.12g}{extra}")
        print(f"overall: {breakdown.overall:.12g} (pair {breakdown.argmax + 1})")
    return EXIT_OK


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise SpecValidationError(f"{what} must be a comma list of integers") from exc


def cmd_verify(args) -> int:
    spec, _ = _load_spec(args.spec)
    seed = args.seed
    if seed is None:
        if os.environ.get("CI") == "1":
            print("error: CI mode requires an explicit --seed", file=sys.stderr)
            return EXIT_USAGE
        seed = 0
    checks = (
        list(CHECK_KINDS)
        if args.checks == "all"
        else [c.strip() for c in args.checks.split(",") if c.strip()]
    )
    for c in checks:
        if c not in CHECK_KINDS:
            print(f"error: unknown check {c!r}", file=sys.stderr)
            return EXIT_USAGE
    dims = _parse_int_list(args.dims, "--dims")
    reports = []
    for kind in checks:
        report = check_inequality(
            kind, spec, dims, args.samples, seed, tol=args.tol
        )
        reports.append(report)
    if args.json:
        print(
            json.dumps(
                [r.to_dict(include_timing=False) for r in reports], sort_keys=True
            )
        )
    else:
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            print(
                f"{status} {r.check}: violations={r.violations} "
                f"worst_slack={r.worst_slack:.3e} dims={list(r.dims)} "
                f"samples={r.samples} seed={r.seed} [{r.wall_time:.2f}s]"
            )
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for r in reports:
            path = outdir / f"{r.check}.json"
            path.write_text(
                json.dumps(r.to_dict(include_timing=False), sort_keys=True, indent=2)
                + "\n",
                encoding="utf-8",
            )
    if any(not r.passed for r in reports):
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .verify import sphere_oracle

    spec, _ = _load_spec(args.spec)
    index = args.pair
    if not 1 <= index <= len(spec.pairs):
        print(
            f"error: pair index {index} out of range 1..{len(spec.pairs)}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    pair = spec.pairs[index - 1]
    result = sphere_oracle(pair, spec.p, args.dim, args.grid)
    if args.json:
        print(json.dumps(result.to_dict(), sort_keys=True))
    else:
        witness = ", ".join(f"{v:.9g}" for v in result.witness)
        print(f"max pair norm on the unit l_p sphere: {result.value:.12g}")
        print(f"at x = ({witness})")
        print(f"grid {result.grid}, coarse-grid accuracy bound {result.accuracy_bound:.3g}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    rows = []
    for name in fixture_names():
        spec, expected = load_fixture(name)
        rows.append(
            {
                "name": name,
                "expected_class": expected,
                "p": format_rational(spec.p),
                "pairs": len(spec.normalized().pairs),
                "digest": spec_digest(spec),
            }
        )
    if args.json:
        print(json.dumps(rows, sort_keys=True))
    else:
        width = max(len(r["name"]) for r in rows)
        for r in rows:
            print(
                f"{r['name']:<{width}}  p={r['p']}  pairs={r['pairs']}  "
                f"{r['expected_class'] or '-':<24} {r['digest']}"
            )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwspaces",
        description="partition/weight sequence-space norms: evaluate, classify, certify",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="name the isomorphism class of a spec file")
    c.add_argument("spec", help="path to a spec JSON file")
    c.add_argument("--json", action="store_true", help="machine-readable output")
    c.set_defaults(fn=cmd_classify)

    n = sub.add_parser("norm", help="evaluate the norm of a vector file")
    n.add_argument("spec")
    n.add_argument("vector", help="lines of 'block offset value'")
    n.add_argument("--exact", action="store_true",
                   help="also report exact p-th powers (rational inputs, <= 16 entries)")
    n.add_argument("--json", action="store_true")
    n.set_defaults(fn=cmd_norm)

    v = sub.add_parser("verify", help="run numerical inequality certifications")
    v.add_argument("spec")
    v.add_argument("--checks", default="lower_lp,l2_domination",
                   help=f"comma list from {','.join(CHECK_KINDS)} or 'all'")
    v.add_argument("--dims", default="4,8,16")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--tol", type=float, default=1e-12)
    v.add_argument("--json", action="store_true")
    v.add_argument("--out", default=None, help="directory for per-check JSON reports")
    v.set_defaults(fn=cmd_verify)

    o = sub.add_parser("oracle", help="brute-force sphere maximum of one pair norm")
    o.add_argument("spec")
    o.add_argument("pair", type=int, help="1-based pair index in the normalized spec")
    o.add_argument("--dim", type=int, default=2)
    o.add_argument("--grid", type=int, default=12)
    o.add_argument("--json", action="store_true")
    o.set_defaults(fn=cmd_oracle)

    k = sub.add_parser("corpus", help="list the bundled fixture specs")
    k.add_argument("--json", action="store_true")
    k.set_defaults(fn=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except HypothesisNotMet as exc:
        print(f"hypothesis not met: {exc.predicate}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except DimensionTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpecValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PwError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
