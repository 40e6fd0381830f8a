"""Manifest loading, validation, and analysis execution.

A manifest is JSON with exact numbers only (ints, or rationals as "a/b"
strings); floats are rejected.  Unknown keys are rejected everywhere, and
validation happens before any computation.  Every analysis carries its own
assertions ("expect" fields); run_manifest returns nonzero when any of them
fail, with the failures enumerated by analysis id and constraint name.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from . import catalogue as cat
from . import confinement, growth, invariants, linearisation
from .errors import BirmapError, ManifestInvalid
from .fields import PrimeField
from .mapping import Mapping, MappingSpec, RHSSpec
from .reports import ReportRow
from .sequences import ParameterSequence

DEFAULT_MANIFEST_PRIME = 2013265921  # = 1 mod 12, so i and j exist

_ANALYSIS_KINDS = ("degrees", "growth_match", "invariant_check", "invariant_search",
                   "z_constraint", "confinement", "linearisation", "parameter_count",
                   "characteristic_roots")

_INVARIANTS = {
    "qrt_nm2": cat.qrt_invariant_nm2,
    "qrt_nm4": cat.qrt_invariant_nm4,
    "hky": cat.hky_invariant,
}

_SCHEMES = ("thirdkind", "hky", "gambier", "gambier_qrt")


@dataclass
class Manifest:
    seed: int
    prime: int
    mappings: dict[str, object]  # id -> builder
    analyses: list[dict]
    output: dict = dc_field(default_factory=dict)


def _require_keys(obj: dict, where: str, required: set[str], optional: set[str]):
    if not isinstance(obj, dict):
        raise ManifestInvalid(where, "expected an object")
    unknown = set(obj) - required - optional
    if unknown:
        raise ManifestInvalid(where, f"unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ManifestInvalid(where, f"missing keys {sorted(missing)}")


def _check_no_floats(obj, where: str):
    if isinstance(obj, float):
        raise ManifestInvalid(where, "floats are not allowed; use ints or 'a/b' strings")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_no_floats(v, f"{where}.{k}")
    if isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_no_floats(v, f"{where}[{i}]")


def _parse_sequence(obj, where: str) -> ParameterSequence:
    _require_keys(obj, where, {"kind"}, {"value", "base", "ratio", "values", "label"})
    kind = obj["kind"]
    try:
        if kind == "constant":
            return ParameterSequence.constant(obj["value"], label=obj.get("label", "z"))
        if kind == "geometric":
            return ParameterSequence.geometric(obj["base"], obj["ratio"],
                                               label=obj.get("label", "z"))
        if kind == "table":
            return ParameterSequence.table({int(k): v for k, v in obj["values"].items()},
                                           label=obj.get("label", "z"))
        if kind == "random":
            return ParameterSequence.random(obj.get("label", "z"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestInvalid(where, str(exc)) from exc
    raise ManifestInvalid(f"{where}.kind", f"unknown sequence kind {kind!r}")


def _parse_mapping(obj, where: str):
    if "builtin" in obj:
        _require_keys(obj, where, {"id", "builtin"}, set())
        try:
            return obj["id"], cat.get_entry(obj["builtin"]).build
        except KeyError as exc:
            raise ManifestInvalid(f"{where}.builtin", str(exc)) from exc
    _require_keys(obj, where, {"id", "form", "z"}, {"N", "f", "g"})
    if obj["form"] != "ratio":
        raise ManifestInvalid(f"{where}.form",
                              "inline mappings support the ratio form; use builtins otherwise")
    z = _parse_sequence(obj["z"], f"{where}.z")
    g = obj.get("g", {"kind": "const_power"})
    if g.get("kind") == "const_power":
        rhs = RHSSpec.const_power()
    else:
        rhs = RHSSpec.explicit(_parse_sequence(g, f"{where}.g"))
    try:
        spec = MappingSpec(spec_id=obj["id"], form="ratio", z=z,
                           N=int(obj.get("N", 0)), f=obj.get("f", 1), rhs=rhs)
    except (TypeError, ValueError) as exc:
        raise ManifestInvalid(where, str(exc)) from exc
    return obj["id"], spec.realize


def load_manifest(path) -> Manifest:
    where = str(path)
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestInvalid(f"{where}:{exc.lineno}", exc.msg) from exc
    return parse_manifest(raw)


def parse_manifest(raw: dict) -> Manifest:
    _check_no_floats(raw, "manifest")
    _require_keys(raw, "manifest", {"analyses"}, {"seed", "prime", "mappings", "output"})
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ManifestInvalid("manifest.seed", "must be an integer")
    prime = raw.get("prime", DEFAULT_MANIFEST_PRIME)
    if not isinstance(prime, int):
        raise ManifestInvalid("manifest.prime", "must be an integer")
    output = raw.get("output", {})
    _require_keys(output, "manifest.output", set(), {"dir", "formats"})
    mappings = {}
    for i, mobj in enumerate(raw.get("mappings", [])):
        mid, builder = _parse_mapping(mobj, f"manifest.mappings[{i}]")
        if mid in mappings:
            raise ManifestInvalid(f"manifest.mappings[{i}].id", f"duplicate id {mid!r}")
        mappings[mid] = builder
    analyses = []
    for i, aobj in enumerate(raw["analyses"]):
        analyses.append(_validate_analysis(aobj, f"manifest.analyses[{i}]", mappings))
    return Manifest(seed=seed, prime=prime, mappings=mappings, analyses=analyses,
                    output=output)


_ANALYSIS_KEYS = {
    "degrees": ({"id", "kind", "mapping"}, {"n_max", "expect", "classify", "expect_class"}),
    "growth_match": ({"id", "kind", "mappings"}, {"n_max", "expect"}),
    "invariant_check": ({"id", "kind", "mapping", "invariant"}, {"trials", "expect"}),
    "invariant_search": ({"id", "kind", "mapping", "bidegree"},
                         {"symmetric", "expect_dimension", "expect_candidates"}),
    "z_constraint": ({"id", "kind", "family", "z_from"}, {"range", "expect"}),
    "confinement": ({"id", "kind", "mapping"},
                    {"entry", "n0", "horizon", "truncation", "expect_length",
                     "expect_confined"}),
    "linearisation": ({"id", "kind", "scheme"}, {"steps", "expect"}),
    "parameter_count": ({"id", "kind", "family"}, {"expect"}),
    "characteristic_roots": ({"id", "kind"}, {"expect"}),
}


def _validate_analysis(obj, where: str, mappings: dict) -> dict:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ManifestInvalid(where, "analysis needs a 'kind'")
    kind = obj["kind"]
    if kind not in _ANALYSIS_KINDS:
        raise ManifestInvalid(f"{where}.kind", f"unknown analysis kind {kind!r}")
    required, optional = _ANALYSIS_KEYS[kind]
    _require_keys(obj, where, required, optional)
    for key in ("mapping", "z_from"):
        if key in obj and obj[key] not in mappings and obj[key] not in cat.CATALOGUE:
            raise ManifestInvalid(f"{where}.{key}", f"unknown mapping {obj[key]!r}")
    if kind == "growth_match":
        for j, mid in enumerate(obj["mappings"]):
            if mid not in mappings and mid not in cat.CATALOGUE:
                raise ManifestInvalid(f"{where}.mappings[{j}]", f"unknown mapping {mid!r}")
    if kind == "invariant_check" and obj["invariant"] not in _INVARIANTS:
        raise ManifestInvalid(f"{where}.invariant",
                              f"unknown invariant {obj['invariant']!r}; "
                              f"have {sorted(_INVARIANTS)}")
    if kind == "linearisation" and obj["scheme"] not in _SCHEMES:
        raise ManifestInvalid(f"{where}.scheme", f"unknown scheme {obj['scheme']!r}")
    if kind in ("z_constraint", "parameter_count") and obj["family"] not in confinement.FAMILIES:
        raise ManifestInvalid(f"{where}.family", f"unknown family {obj['family']!r}")
    return obj


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    rows: list[ReportRow]
    summary: dict
    failures: list[str]

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0


def _builder_for(manifest: Manifest, name: str):
    if name in manifest.mappings:
        return manifest.mappings[name]
    return cat.get_entry(name).build


def run_manifest(manifest: Manifest, *, seed: int | None = None,
                 prime: int | None = None, fail_fast: bool = False) -> RunResult:
    seed = manifest.seed if seed is None else seed
    prime = manifest.prime if prime is None else prime
    field = PrimeField(prime)
    rows: list[ReportRow] = []
    failures: list[str] = []
    summary: dict = {"seed": seed, "prime": prime, "analyses": {}}
    for spec in manifest.analyses:
        aid = spec["id"]
        rng = random.Random(f"{seed}|{aid}")
        try:
            passed, payload = _EXECUTORS[spec["kind"]](manifest, spec, field, seed, rng, rows)
        except BirmapError as exc:
            passed, payload = False, {"error": str(exc)}
        summary["analyses"][aid] = {"kind": spec["kind"], "passed": passed, **payload}
        rows.append(ReportRow(aid, payload.get("spec", ""), "", "summary",
                              "pass" if passed else "fail"))
        if not passed:
            failures.append(f"{aid}: " + payload.get("reason", payload.get("error", "failed")))
            if fail_fast:
                break
    return RunResult(rows, summary, failures)


def _exec_degrees(manifest, spec, field, seed, rng, rows):
    name = spec["mapping"]
    builder = _builder_for(manifest, name)
    n_max = spec.get("n_max", growth.DEFAULT_N_MAX)
    ds = growth.degree_sequence(builder, n_max, seed=seed)
    for i, d in enumerate(ds.degrees):
        rows.append(ReportRow(spec["id"], name, i, str(d)))
    payload = {"spec": name, "degrees": list(ds.degrees),
               "prime_witnesses": list(ds.prime_witnesses)}
    passed = True
    reasons = []
    if "expect" in spec:
        want = tuple(spec["expect"])
        got = ds.degrees[: len(want)]
        if got != want:
            passed = False
            reasons.append(f"degrees {list(got)} != expected {list(want)}")
    if spec.get("classify"):
        verdict = growth.classify_growth(ds)
        payload["growth_class"] = verdict.kind
        payload["entropy"] = verdict.entropy_estimate
        rows.append(ReportRow(spec["id"], name, "class", verdict.kind))
        if "expect_class" in spec and verdict.kind != spec["expect_class"]:
            passed = False
            reasons.append(f"class {verdict.kind} != {spec['expect_class']}")
    if reasons:
        payload["reason"] = "; ".join(reasons)
    return passed, payload


def _exec_growth_match(manifest, spec, field, seed, rng, rows):
    a, b = spec["mappings"]
    n_max = spec.get("n_max", growth.DEFAULT_N_MAX)
    ok = growth.growth_match(_builder_for(manifest, a), _builder_for(manifest, b),
                             n_max, seed=seed)
    rows.append(ReportRow(spec["id"], f"{a}~{b}", 0, str(ok)))
    want = spec.get("expect", True)
    payload = {"spec": f"{a}~{b}", "match": ok}
    if ok != want:
        payload["reason"] = f"growth match is {ok}, expected {want}"
    return ok == want, payload


def _exec_invariant_check(manifest, spec, field, seed, rng, rows):
    name = spec["mapping"]
    mapping = _builder_for(manifest, name)(field, seed)
    cand = _INVARIANTS[spec["invariant"]](field, mapping.z(0))
    ok = invariants.check_invariant(mapping, cand, spec.get("trials", 100), rng)
    rows.append(ReportRow(spec["id"], name, 0, str(ok)))
    want = spec.get("expect", True)
    payload = {"spec": name, "conserved": ok}
    if ok != want:
        payload["reason"] = f"conservation is {ok}, expected {want}"
    return ok == want, payload


def _exec_invariant_search(manifest, spec, field, seed, rng, rows):
    name = spec["mapping"]
    mapping = _builder_for(manifest, name)(field, seed)
    res = invariants.search_invariant(mapping, spec["bidegree"],
                                      spec.get("symmetric", True), rng)
    rows.append(ReportRow(spec["id"], name, "dimension", str(res.dimension)))
    rows.append(ReportRow(spec["id"], name, "candidates", str(len(res.candidates))))
    passed = True
    reasons = []
    if "expect_dimension" in spec and res.dimension != spec["expect_dimension"]:
        passed = False
        reasons.append(f"span dimension {res.dimension} != {spec['expect_dimension']}")
    if "expect_candidates" in spec and len(res.candidates) != spec["expect_candidates"]:
        passed = False
        reasons.append(f"{len(res.candidates)} candidates != {spec['expect_candidates']}")
    payload = {"spec": name, "dimension": res.dimension,
               "candidates": len(res.candidates)}
    if reasons:
        payload["reason"] = "; ".join(reasons)
    return passed, payload


def _exec_z_constraint(manifest, spec, field, seed, rng, rows):
    name = spec["z_from"]
    mapping = _builder_for(manifest, name)(field, seed)
    lo, hi = spec.get("range", [0, 10])
    report = confinement.constraint_check_z(mapping.z, spec["family"], range(lo, hi))
    for n, r in report.residuals:
        rows.append(ReportRow(spec["id"], name, n, str(r)))
    want = spec.get("expect", True)
    payload = {"spec": name, "constraint": report.constraint_id,
               "satisfied": report.satisfied}
    if report.satisfied != want:
        payload["reason"] = (f"{report.constraint_id} satisfied={report.satisfied}, "
                             f"expected {want}")
    return report.satisfied == want, payload


def _exec_confinement(manifest, spec, field, seed, rng, rows):
    name = spec["mapping"]
    mapping = _builder_for(manifest, name)(field, seed)
    pat = confinement.confinement_trace(
        mapping, spec.get("entry", "mu"), spec.get("n0", 3), rng=rng,
        horizon=spec.get("horizon", 8),
        truncation=spec.get("truncation", 12))
    for step in pat.steps:
        rows.append(ReportRow(spec["id"], name, step.index,
                              f"val={step.valuation};dep={step.c_dependent}"))
    passed = True
    reasons = []
    if "expect_confined" in spec and pat.confined != spec["expect_confined"]:
        passed = False
        reasons.append(f"confined={pat.confined}")
    if "expect_length" in spec and (not pat.confined
                                    or pat.pattern_length != spec["expect_length"]):
        passed = False
        reasons.append(f"pattern length {pat.pattern_length}")
    payload = {"spec": name, "confined": pat.confined,
               "pattern_length": pat.pattern_length, "exit": pat.exit}
    if reasons:
        payload["reason"] = "; ".join(reasons)
    return passed, payload


def _exec_linearisation(manifest, spec, field, seed, rng, rows):
    scheme = spec["scheme"]
    steps = spec.get("steps", 20)
    ok, detail = _run_scheme(scheme, field, seed, rng, steps)
    rows.append(ReportRow(spec["id"], scheme, 0, detail))
    want = spec.get("expect", True)
    payload = {"spec": scheme, "result": ok, "detail": detail}
    if ok != want:
        payload["reason"] = f"scheme {scheme}: {detail}"
    return ok == want, payload


def _run_scheme(scheme: str, field, seed, rng, steps: int) -> tuple[bool, str]:
    F = field
    if scheme == "thirdkind":
        m = cat.build_thirdkind_deauto(F, seed)
        xs = m.orbit(F.random_nonzero(rng), F.random_nonzero(rng), steps)
        ks = [linearisation.thirdkind_k(m.q, xs, n) for n in range(2, min(10, steps - 1))]
        if len(set(ks)) != 1:
            return False, f"k not constant: {len(set(ks))} values"
        pencil = linearisation.PencilInstance(ks[0], m.q)
        res = [linearisation.pencil_residual(pencil, xs, n)
               for n in range(2, min(10, steps - 1))]
        return all(r == 0 for r in res), f"k constant across {len(ks)} indices"
    if scheme == "hky":
        entry = cat.get_entry("n0_minus")
        m = entry.build(F, seed)
        z = m.z(0)
        lam = linearisation.hky_lambda(F, z)
        x0, x1 = F.random_nonzero(rng), F.random_nonzero(rng)
        xs = m.orbit(x0, x1, steps)
        C = linearisation.hky_C(F, xs, lam)
        prods_ok = all(F.mul(C[i], C[i + 1]) == F.coerce(1) for i in range(len(C) - 1))
        rec = linearisation.hky_reconstruct(F, z, x0, x1, steps)
        return prods_ok and rec == xs[: len(rec)], "C products and reconstruction"
    if scheme == "gambier":
        m = cat.build_hky_deauto(F, seed)
        xs = m.orbit(F.random_nonzero(rng), F.random_nonzero(rng), steps)
        ys = [F.div(xs[i + 1], xs[i]) for i in range(len(xs) - 1)]
        res = [linearisation.gambier_equation_residual(m.q, ys, n)
               for n in range(1, len(ys) - 1)]
        if any(r != 0 for r in res):
            return False, "ratio-variable equation residual nonzero"
        return linearisation.gambier_verify(m.q, ys), "cascade verified"
    if scheme == "gambier_qrt":
        m = cat.build_gambier_deauto(F, seed)
        xs = m.orbit(F.random_nonzero(rng), F.random_nonzero(rng), steps)
        res = linearisation.gambier_qrt_form(m.z, xs)
        return all(r == 0 for r in res), f"{len(res)} residuals"
    raise ManifestInvalid("scheme", f"unknown scheme {scheme!r}")


def _exec_parameter_count(manifest, spec, field, seed, rng, rows):
    count = confinement.parameter_count(spec["family"])
    rows.append(ReportRow(spec["id"], spec["family"], 0, str(count)))
    want = spec.get("expect")
    ok = want is None or count == want
    payload = {"spec": spec["family"], "count": count}
    if not ok:
        payload["reason"] = f"count {count} != {want}"
    return ok, payload


def _exec_characteristic_roots(manifest, spec, field, seed, rng, rows):
    roots = confinement.characteristic_roots(field)
    for r, mult in sorted(roots.items(), key=lambda kv: int(kv[0])):
        rows.append(ReportRow(spec["id"], "nm4", str(r), str(mult)))
    total = sum(roots.values())
    payload = {"spec": "nm4", "distinct_roots": len(roots), "total_multiplicity": total}
    ok = total == 6 and len(roots) == 4
    if not ok:
        payload["reason"] = "root multiset malformed"
    return ok, payload


_EXECUTORS = {
    "degrees": _exec_degrees,
    "growth_match": _exec_growth_match,
    "invariant_check": _exec_invariant_check,
    "invariant_search": _exec_invariant_search,
    "z_constraint": _exec_z_constraint,
    "confinement": _exec_confinement,
    "linearisation": _exec_linearisation,
    "parameter_count": _exec_parameter_count,
    "characteristic_roots": _exec_characteristic_roots,
}
