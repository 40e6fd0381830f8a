"""Manifest-driven command line front end.

    birmap run MANIFEST [--out DIR] [--seed N] [--prime P] [--fail-fast]
                        [--golden DIR]
    birmap catalogue [--all]
    birmap degrees NAME [--n-max N] [--seed N] [--classify]
    birmap invariant NAME (--check {qrt_nm2,qrt_nm4,hky} | --search D [--asymmetric])
    birmap confine NAME [--entry {mu,lambda}] [--n0 N] [--horizon H] [--truncation T]
    birmap linearise {thirdkind,hky,gambier,gambier_qrt} [--steps N]
    birmap deauto {thirdkind,hky,nm2,nm4} [--n-max N]

Exit status 0 means every assertion passed; 1 means analysis failures;
2 means the manifest (or arguments) did not validate.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import catalogue as cat
from .errors import BirmapError, ManifestInvalid
from .manifest import (DEFAULT_MANIFEST_PRIME, Manifest, load_manifest,
                       parse_manifest, run_manifest)
from .reports import rows_to_csv, report_to_json, write_reports

_DEAUTO_PAIRS = {
    "thirdkind": ("n0_plus", "thirdkind_deauto", None),
    "hky": ("n0_minus", "hky_deauto", None),
    "nm2": ("nm2", "nm2_deauto", "nm2"),
    "nm4": ("nm4", "nm4_deauto", "nm4"),
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ManifestInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BirmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="birmap",
                                description="exact analysis of multiplicative "
                                            "birational mappings")
    sub = p.add_subparsers(required=True)

    run = sub.add_parser("run", help="execute a manifest")
    run.add_argument("manifest", type=Path)
    run.add_argument("--out", type=Path, default=None, help="report directory")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--prime", type=int, default=None)
    run.add_argument("--fail-fast", action="store_true")
    run.add_argument("--golden", type=Path, default=None,
                     help="compare freshly generated reports against this directory")
    run.set_defaults(func=_cmd_run)

    cat_p = sub.add_parser("catalogue", help="list the built-in mappings")
    cat_p.add_argument("--all", action="store_true", help="include negative controls")
    cat_p.set_defaults(func=_cmd_catalogue)

    deg = sub.add_parser("degrees", help="degree sequence of a catalogue mapping")
    deg.add_argument("name")
    deg.add_argument("--n-max", type=int, default=16)
    deg.add_argument("--seed", type=int, default=0)
    deg.add_argument("--classify", action="store_true")
    deg.set_defaults(func=_cmd_degrees)

    inv = sub.add_parser("invariant", help="check or search conserved quantities")
    inv.add_argument("name")
    inv.add_argument("--check", choices=["qrt_nm2", "qrt_nm4", "hky"])
    inv.add_argument("--search", type=int, metavar="BIDEGREE")
    inv.add_argument("--asymmetric", action="store_true")
    inv.add_argument("--seed", type=int, default=0)
    inv.add_argument("--prime", type=int, default=DEFAULT_MANIFEST_PRIME)
    inv.set_defaults(func=_cmd_invariant)

    con = sub.add_parser("confine", help="singularity-confinement trace")
    con.add_argument("name", help="a factorised catalogue mapping, e.g. pain_e7")
    con.add_argument("--entry", choices=["mu", "lambda"], default="mu")
    con.add_argument("--n0", type=int, default=3)
    con.add_argument("--horizon", type=int, default=8)
    con.add_argument("--truncation", type=int, default=12)
    con.add_argument("--seed", type=int, default=0)
    con.add_argument("--prime", type=int, default=DEFAULT_MANIFEST_PRIME)
    con.set_defaults(func=_cmd_confine)

    lin = sub.add_parser("linearise", help="run a linearisation verification suite")
    lin.add_argument("scheme", choices=["thirdkind", "hky", "gambier", "gambier_qrt"])
    lin.add_argument("--steps", type=int, default=20)
    lin.add_argument("--seed", type=int, default=0)
    lin.add_argument("--prime", type=int, default=DEFAULT_MANIFEST_PRIME)
    lin.set_defaults(func=_cmd_linearise)

    dea = sub.add_parser("deauto", help="autonomous vs deautonomised growth match")
    dea.add_argument("family", choices=sorted(_DEAUTO_PAIRS))
    dea.add_argument("--n-max", type=int, default=16)
    dea.add_argument("--seed", type=int, default=0)
    dea.set_defaults(func=_cmd_deauto)

    return p


def _analysis_manifest(analyses: list[dict], seed: int, prime: int) -> Manifest:
    return parse_manifest({"seed": seed, "prime": prime, "analyses": analyses})


def _finish(result, out=None, golden=None) -> int:
    csv_text = rows_to_csv(result.rows)
    json_text = report_to_json(result.summary)
    if out is not None:
        written = write_reports(result.rows, result.summary, out)
        print("wrote " + ", ".join(written))
    else:
        sys.stdout.write(csv_text)
    for f in result.failures:
        print(f"FAIL {f}", file=sys.stderr)
    if golden is not None:
        want_csv = (Path(golden) / "report.csv").read_text(encoding="utf-8")
        if want_csv != csv_text:
            print("FAIL golden: report.csv differs", file=sys.stderr)
            return 1
        want_json = Path(golden) / "report.json"
        if want_json.exists() and want_json.read_text(encoding="utf-8") != json_text:
            print("FAIL golden: report.json differs", file=sys.stderr)
            return 1
        print("golden reports match", file=sys.stderr)
    return result.exit_code


def _cmd_run(args) -> int:
    manifest = load_manifest(args.manifest)
    result = run_manifest(manifest, seed=args.seed, prime=args.prime,
                          fail_fast=args.fail_fast)
    out = args.out or manifest.output.get("dir")
    return _finish(result, out=out, golden=args.golden)


def _cmd_catalogue(args) -> int:
    rows = cat.catalogue_rows(include_controls=args.all)
    width = max(len(name) for name, _, _ in rows)
    for name, growth_kind, desc in rows:
        print(f"{name:<{width}}  {growth_kind:<11}  {desc}")
    return 0


def _cmd_degrees(args) -> int:
    entry = cat.get_entry(args.name)
    analyses = [{"id": f"degrees-{args.name}", "kind": "degrees", "mapping": args.name,
                 "n_max": args.n_max, "classify": bool(args.classify)}]
    if entry.golden is not None:
        analyses[0]["expect"] = list(entry.golden)
    result = run_manifest(_analysis_manifest(analyses, args.seed, DEFAULT_MANIFEST_PRIME))
    return _finish(result)


def _cmd_invariant(args) -> int:
    if (args.check is None) == (args.search is None):
        raise ManifestInvalid("invariant", "pass exactly one of --check or --search")
    if args.check:
        analyses = [{"id": f"invcheck-{args.name}", "kind": "invariant_check",
                     "mapping": args.name, "invariant": args.check, "trials": 100}]
    else:
        analyses = [{"id": f"invsearch-{args.name}", "kind": "invariant_search",
                     "mapping": args.name, "bidegree": args.search,
                     "symmetric": not args.asymmetric}]
    result = run_manifest(_analysis_manifest(analyses, args.seed, args.prime))
    return _finish(result)


def _cmd_confine(args) -> int:
    analyses = [{"id": f"confine-{args.name}", "kind": "confinement",
                 "mapping": args.name, "entry": args.entry, "n0": args.n0,
                 "horizon": args.horizon, "truncation": args.truncation}]
    result = run_manifest(_analysis_manifest(analyses, args.seed, args.prime))
    return _finish(result)


def _cmd_linearise(args) -> int:
    analyses = [{"id": f"linearise-{args.scheme}", "kind": "linearisation",
                 "scheme": args.scheme, "steps": args.steps}]
    result = run_manifest(_analysis_manifest(analyses, args.seed, args.prime))
    return _finish(result)


def _cmd_deauto(args) -> int:
    auto, deauto, family = _DEAUTO_PAIRS[args.family]
    analyses = [{"id": f"deauto-{args.family}", "kind": "growth_match",
                 "mappings": [auto, deauto], "n_max": args.n_max, "expect": True}]
    if family is not None:
        analyses.append({"id": f"zconstraint-{args.family}", "kind": "z_constraint",
                         "family": family, "z_from": deauto, "expect": True})
    result = run_manifest(_analysis_manifest(analyses, args.seed, DEFAULT_MANIFEST_PRIME))
    return _finish(result)


if __name__ == "__main__":
    sys.exit(main())
