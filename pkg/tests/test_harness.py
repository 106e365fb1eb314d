import json
import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ncg_residue import harness
from ncg_residue.harness import (SchemaError, SuiteConfig, UsageError, emit_report, jets_from_dict, main,
                                 parse_report, run_suite)
from ncg_residue.residue import VerificationRecord


def run(argv, capsysbinary):
    code = main(argv)
    out = capsysbinary.readouterr()
    return code, out.out, out.err.decode()


def test_small_suite_exit_zero(capsysbinary):
    code, out, _ = run(["verify", "--dim", "2,4", "--theorem", "divergence,grading", "--seeds", "2"], capsysbinary)
    assert code == 0
    recs = parse_report(out)
    assert len(recs) == 8
    assert [(r.theorem, r.n, r.seed) for r in recs] == sorted((r.theorem, r.n, r.seed) for r in recs)


def test_validity_skip_exit_zero(capsysbinary, caplog):
    with caplog.at_level(logging.WARNING, logger="ncg_residue"):
        code, out, _ = run(["verify", "--dim", "2", "--theorem", "divergence-bdry2"], capsysbinary)
    assert code == 0
    doc = json.loads(out)
    assert doc["records"] == []
    assert "skipped" in doc["skipped"][0]
    assert any("n >= 4" in r.message for r in caplog.records)


def test_unknown_theorem_exit_two(capsysbinary):
    code, _, err = run(["verify", "--theorem", "nope"], capsysbinary)
    assert code == 2
    assert "unknown theorem" in err


@pytest.mark.parametrize("argv", [["verify", "--dim", "3"], ["verify", "--dim", "10"], ["verify", "--seeds", "0"],
                                  ["verify", "--tolerance", "-1"], ["frobnicate"], ["verify", "--dim", "x"]])
def test_usage_errors_exit_two(argv, capsysbinary):
    assert run(argv, capsysbinary)[0] == 2


def test_mismatch_exit_one(monkeypatch, capsysbinary):
    def bad(theorem, jets, tolerance, seed):
        return VerificationRecord(theorem, jets.n, seed, 1.0, 2.0, 1.0, 0.5, "mismatch", "")
    monkeypatch.setattr(harness, "compare", bad)
    assert run(["verify", "--dim", "2", "--theorem", "divergence", "--seeds", "1"], capsysbinary)[0] == 1


def test_thread_cap_env(monkeypatch, capsysbinary):
    monkeypatch.setenv("NCG_RESIDUE_THREADS", "1")
    assert run(["verify", "--dim", "2", "--theorem", "divergence", "--seeds", "1"], capsysbinary)[0] == 0
    monkeypatch.setenv("NCG_RESIDUE_THREADS", "zero")
    assert run(["verify", "--dim", "2", "--theorem", "divergence", "--seeds", "1"], capsysbinary)[0] == 2


def test_report_determinism_and_roundtrip():
    config = SuiteConfig(dims=[2, 4], theorems=["torsion-vector", "divergence-bdry1"], seeds=[0, 1])
    a, skipped = run_suite(config)
    b, _ = run_suite(SuiteConfig(dims=[2, 4], theorems=["torsion-vector", "divergence-bdry1"], seeds=[0, 1]))
    for fmt in ("json", "csv", "md"):
        assert emit_report(a, fmt, skipped) == emit_report(list(reversed(b)), fmt, skipped)
    assert parse_report(emit_report(a)) == a


def test_empty_and_single_reports():
    assert json.loads(emit_report([])) == {"records": [], "skipped": []}
    assert emit_report([], "csv").decode().count("\n") == 1
    assert emit_report([], "md").decode().count("\n") == 2
    rec = VerificationRecord("divergence", 2, 0, 1 + 2j, 1 + 2j, 0.0, 0.0, "match", "note")
    csv_lines = emit_report([rec], "csv").decode().strip().splitlines()
    assert len(csv_lines) == 2 and csv_lines[1].startswith("divergence,2,0,")
    md_lines = emit_report([rec], "md").decode().strip().splitlines()
    assert len(md_lines) == 3 and "| match | note |" in md_lines[2]


def hessian_file(tmp_path, doc):
    path = tmp_path / "jets.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_density_unit_hessian(tmp_path, capsysbinary):
    path = hessian_file(tmp_path, {"n": 4, "f1": [0, 0, 0, 0], "f2": np.eye(4).tolist()})
    code, out, err = run(["density", "--jets", path], capsysbinary)
    assert code == 0
    row = json.loads(out)[0]
    assert_allclose(row["interior_composition"][0], -32 * np.pi ** 2, rtol=1e-12)
    assert_allclose(row["interior_assembly"][0], -32 * np.pi ** 2, rtol=1e-12)


def test_density_linear_function_is_zero(tmp_path, capsysbinary):
    path = hessian_file(tmp_path, {"n": 2, "f1": [1.0, -2.0], "f2": [[0, 0], [0, 0]]})
    code, out, _ = run(["density", "--jets", path], capsysbinary)
    row = json.loads(out)[0]
    assert code == 0
    assert abs(complex(*row["interior_composition"])) < 1e-12
    assert row["boundary_case2"] is None


def test_missing_dv_defaults_with_warning(caplog):
    doc = {"n": 2, "f1": [1, 0], "f2": [[0, 0], [0, 0]], "u": [1, 0], "v": [0, 1],
           "perturbation": {"kind": "torsion_vector", "Y": [0.5, 0.5]}}
    with caplog.at_level(logging.WARNING, logger="ncg_residue"):
        jets, sandwich = jets_from_dict(doc)
    assert sandwich
    assert_allclose(jets.dv, 0)
    assert any("'dv'" in r.message for r in caplog.records)
    assert any("'T'" in r.message for r in caplog.records)


def test_torsion_entries_fold_onto_ordered_triples():
    doc = {"n": 4, "perturbation": {"kind": "torsion_grading",
                                    "T": [{"i": 2, "j": 1, "k": 0, "value": 1.5}, {"i": 1, "j": 2, "k": 3, "value": 2}]}}
    jets, _ = jets_from_dict(doc)
    assert jets.perturbation.T.components == {(0, 1, 2): -1.5, (1, 2, 3): 2.0}


def test_schema_errors_list_fields(tmp_path, capsysbinary):
    doc = {"n": 4, "f1": [1, 2], "f2": [[1, 2], [3, 4]], "extra": 1,
           "perturbation": {"kind": "torsion_vector", "T": [{"i": 0, "j": 0, "k": 1, "value": 1}], "Y": "x"}}
    with pytest.raises(SchemaError) as info:
        jets_from_dict(doc)
    text = " ".join(info.value.fields)
    for field in ("f1", "f2", "extra", "perturbation.T[0]", "Y"):
        assert field in text
    code, _, err = run(["density", "--jets", hessian_file(tmp_path, doc)], capsysbinary)
    assert code == 2
    assert "f1" in err


@pytest.mark.parametrize("doc", [[], {"n": 3}, {"n": "4"}, {"n": 4, "perturbation": {"kind": "spin"}}])
def test_schema_rejects(doc):
    with pytest.raises(SchemaError):
        jets_from_dict(doc)


def test_invalid_json_file(tmp_path, capsysbinary):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["density", "--jets", str(path)], capsysbinary)[0] == 2
    assert run(["density", "--jets", str(tmp_path / "missing.json")], capsysbinary)[0] == 2


def test_table(capsysbinary):
    code, out, _ = run(["table", "--dim", "4", "--format", "json"], capsysbinary)
    assert code == 0
    row = json.loads(out)[0]
    assert row["case1"] == "3*I*pi/8" and row["case2"] == "I*pi/4"


def test_oracle(capsysbinary):
    code, out, _ = run(["oracle", "--dim", "4", "--theorem", "grading,divergence-bdry2", "--seeds", "1"],
                       capsysbinary)
    assert code == 0
    recs = parse_report(out)
    assert [r.status for r in recs] == ["match", "match"]
    assert run(["oracle", "--samples", "10"], capsysbinary)[0] == 2


def test_config_validation():
    with pytest.raises(UsageError):
        SuiteConfig(seeds=[-1]).validate()
    with pytest.raises(UsageError):
        SuiteConfig(fmt="xml").validate()
