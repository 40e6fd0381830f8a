"""CLI and manifest tests: validation, determinism, golden files, exit codes."""
import json
import subprocess
import sys
from pathlib import Path

import pytest

from birmap.cli import main
from birmap.errors import ManifestInvalid
from birmap.manifest import load_manifest, parse_manifest, run_manifest
from birmap.reports import report_to_json, rows_to_csv

DATA = Path(__file__).resolve().parents[1] / "src" / "birmap" / "data"
GOLDEN_MANIFEST = DATA / "manifests" / "degrees-golden.json"


def write_manifest(tmp_path, payload) -> Path:
    p = tmp_path / "m.json"
    p.write_text(json.dumps(payload), encoding="utf-8")
    return p


def test_bundled_manifest_passes_and_is_deterministic():
    manifest = load_manifest(GOLDEN_MANIFEST)
    r1 = run_manifest(manifest)
    r2 = run_manifest(manifest)
    assert r1.exit_code == 0
    assert rows_to_csv(r1.rows) == rows_to_csv(r2.rows)
    assert report_to_json(r1.summary) == report_to_json(r2.summary)


def test_bundled_golden_files_match_fresh_run():
    manifest = load_manifest(GOLDEN_MANIFEST)
    result = run_manifest(manifest)
    assert rows_to_csv(result.rows) == (DATA / "golden" / "report.csv").read_text()
    assert report_to_json(result.summary) == (DATA / "golden" / "report.json").read_text()


def test_cli_run_golden_mode_exit_zero(tmp_path):
    code = main(["run", str(GOLDEN_MANIFEST), "--out", str(tmp_path),
                 "--golden", str(DATA / "golden")])
    assert code == 0
    assert (tmp_path / "report.csv").exists()


def test_console_entry_point_works():
    proc = subprocess.run([sys.executable, "-m", "birmap.cli", "catalogue"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for name in ("n0_plus", "nm4", "pain_e7", "pain_e8"):
        assert name in proc.stdout


def test_catalogue_lists_core_and_controls():
    from birmap.catalogue import catalogue_rows

    core = catalogue_rows()
    names = [n for n, _, _ in core]
    assert names.count("n4") == 1
    for required in ("n0_plus", "n0_minus", "n2_plus", "n2_minus", "nm2", "n4", "nm4",
                     "thirdkind_deauto", "hky_deauto", "gambier_deauto",
                     "pain_e7", "pain_e8"):
        assert required in names
    assert len(catalogue_rows(include_controls=True)) > len(core)
    # stable across calls
    assert core == catalogue_rows()


def test_broken_constraint_manifest_fails_naming_the_constraint(tmp_path, capsys):
    path = write_manifest(tmp_path, {
        "seed": 3,
        "analyses": [{"id": "break-z", "kind": "z_constraint", "family": "nm2",
                      "z_from": "nm2_deauto_broken", "expect": True}],
    })
    manifest = load_manifest(path)
    result = run_manifest(manifest)
    assert result.exit_code == 1
    assert any("z-constraint-nm2" in f for f in result.failures)
    code = main(["run", str(path)])
    captured = capsys.readouterr()
    assert code == 1
    assert "z-constraint-nm2" in captured.err


def test_empty_analyses_exit_zero(tmp_path):
    path = write_manifest(tmp_path, {"analyses": []})
    result = run_manifest(load_manifest(path))
    assert result.exit_code == 0 and result.rows == []


def test_manifest_rejects_unknown_keys(tmp_path):
    with pytest.raises(ManifestInvalid) as err:
        parse_manifest({"analyses": [], "surprise": 1})
    assert "surprise" in str(err.value)
    with pytest.raises(ManifestInvalid) as err:
        parse_manifest({"analyses": [{"id": "a", "kind": "degrees", "mapping": "nm2",
                                      "frobnicate": True}]})
    assert "frobnicate" in str(err.value)


def test_manifest_rejects_floats():
    with pytest.raises(ManifestInvalid) as err:
        parse_manifest({"seed": 1, "analyses": [],
                        "mappings": [{"id": "m", "form": "ratio",
                                      "z": {"kind": "constant", "value": 1.5}}]})
    assert "float" in str(err.value)


def test_manifest_rejects_unknown_mapping_reference():
    with pytest.raises(ManifestInvalid) as err:
        parse_manifest({"analyses": [{"id": "a", "kind": "degrees",
                                      "mapping": "nope"}]})
    assert "nope" in str(err.value)


def test_manifest_rejects_bad_kind_and_scheme():
    with pytest.raises(ManifestInvalid):
        parse_manifest({"analyses": [{"id": "a", "kind": "astrology"}]})
    with pytest.raises(ManifestInvalid):
        parse_manifest({"analyses": [{"id": "a", "kind": "linearisation",
                                      "scheme": "hopf"}]})


def test_cli_invalid_manifest_exit_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"analyses": [], "oops": 1}')
    assert main(["run", str(path)]) == 2
    path.write_text('{"analyses": [')
    assert main(["run", str(path)]) == 2


def test_inline_mapping_spec(tmp_path):
    path = write_manifest(tmp_path, {
        "seed": 2,
        "mappings": [{"id": "mine", "form": "ratio", "N": -2, "f": 1,
                      "z": {"kind": "constant", "value": {"random": "z"}}}],
        "analyses": [{"id": "deg", "kind": "degrees", "mapping": "mine", "n_max": 9,
                      "expect": [0, 1, 2, 3, 6, 9, 12, 17, 22, 27]}],
    })
    result = run_manifest(load_manifest(path))
    assert result.exit_code == 0


def test_prime_and_seed_overrides(tmp_path):
    path = write_manifest(tmp_path, {
        "analyses": [{"id": "inv", "kind": "invariant_check", "mapping": "nm2",
                      "invariant": "qrt_nm2", "trials": 30}]})
    manifest = load_manifest(path)
    r = run_manifest(manifest, prime=1811939329, seed=9)
    assert r.exit_code == 0
    assert r.summary["prime"] == 1811939329 and r.summary["seed"] == 9


def test_cli_subcommands_exit_zero():
    assert main(["degrees", "nm4", "--n-max", "15"]) == 0
    assert main(["linearise", "gambier_qrt", "--steps", "12"]) == 0
    assert main(["deauto", "nm2", "--n-max", "12"]) == 0
    assert main(["confine", "pain_e7"]) == 0
    assert main(["invariant", "n0_minus", "--search", "2"]) == 0
    assert main(["invariant", "nm2", "--check", "qrt_nm2"]) == 0


def test_rows_sorted_deterministically():
    from birmap.reports import ReportRow, sort_rows

    rows = [ReportRow("b", "s", 10, "x"), ReportRow("a", "s", 2, "y"),
            ReportRow("a", "s", "class", "z"), ReportRow("a", "s", 1, "w")]
    ordered = sort_rows(rows)
    assert [r.analysis for r in ordered] == ["a", "a", "a", "b"]
    assert [r.index for r in ordered][:2] == [1, 2]
