"""CLI dispatch, exit codes, golden reports, and determinism."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from degenkit import cli
from degenkit.curves import CurveReport
from degenkit.lattice import FinAb

GOLDEN = Path(__file__).resolve().parent / "golden"

GOLDEN_CASES = {
    "analyze_example_3_4": ["analyze", "example_3_4", "--json"],
    "analyze_tate_u1u2": ["analyze", "tate_u1u2", "--json"],
    "analyze_product_tate": ["analyze", "product_tate", "--json"],
    "analyze_generated_ta_seed7": ["analyze", "generated_ta_seed7", "--json"],
    "analyze_generated_nonta_seed11": ["analyze", "generated_nonta_seed11", "--json"],
    "trait_example_3_4_11": ["trait", "example_3_4", "--profile", "1,1", "--json"],
    "trait_example_3_4_23_l2": ["trait", "example_3_4", "--profile", "2,3", "--l", "2", "--json"],
    "oracle_example_3_4_l2": ["oracle", "example_3_4", "--l", "2", "--r", "4",
                              "--profile", "1,1", "--json"],
    "oracle_example_3_4_l3": ["oracle", "example_3_4", "--l", "3", "--json"],
    "converse_example_3_4": ["converse", "example_3_4", "--json"],
    "converse_generated_ta_seed7": ["converse", "generated_ta_seed7", "--json"],
    "psi_example_3_4_kummer23": ["psi", "example_3_4", "--kummer", "2,3", "--json"],
    "curve_genus2_graph": ["curve", "genus2_graph", "--json"],
}


def run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden_reports(capsys, name):
    code, out, err = run_cli(capsys, GOLDEN_CASES[name])
    assert code == 0, err
    assert out == (GOLDEN / f"{name}.json").read_text()


def test_reports_are_byte_identical_across_runs(capsys):
    argv = ["oracle", "example_3_4", "--l", "2", "--r", "4", "--profile", "1,1", "--json"]
    _, first, _ = run_cli(capsys, argv)
    _, second, _ = run_cli(capsys, argv)
    assert first == second


def test_human_and_json_numerics_agree(capsys):
    _, human, _ = run_cli(capsys, ["analyze", "example_3_4"])
    _, as_json, _ = run_cli(capsys, ["analyze", "example_3_4", "--json"])
    report = json.loads(as_json)
    assert "failing_primes: [2]" in human
    assert report["verdict"]["failing_primes"] == [2]
    assert "invariant_factors: [2]" in human
    assert report["purity_cokernel"]["invariant_factors"] == [2]


class TestVerdictPayloads:
    def test_analyze_example(self, capsys):
        _, out, _ = run_cli(capsys, ["analyze", "example_3_4", "--json"])
        verdict = json.loads(out)["verdict"]
        assert verdict == {"toric_additive": False, "weakly_toric_additive": True,
                           "failing_primes": [2]}

    def test_trait_matrix_family(self, capsys):
        for (a, b) in [(1, 1), (2, 3), (5, 1)]:
            _, out, _ = run_cli(capsys, ["trait", "example_3_4",
                                         "--profile", f"{a},{b}", "--json"])
            payload = json.loads(out)["trait"]
            assert payload["phi_f"] == [[4 * a, 2 * a], [2 * a, a + b]]

    def test_trait_zero_profile_warns(self, capsys):
        code, out, _ = run_cli(capsys, ["trait", "example_3_4", "--profile", "0,0", "--json"])
        report = json.loads(out)
        assert code == 0
        assert "trait misses the divisor" in report["warnings"]
        assert report["trait"]["upsilon"]["invariant_factors"] == []

    def test_psi_kummer(self, capsys):
        _, out, _ = run_cli(capsys, ["psi", "example_3_4", "--kummer", "2,3", "--json"])
        kummer = json.loads(out)["psi"]["kummer"]
        assert kummer["rescaled_psi"]["invariant_factors"] == [6]
        assert kummer["fixed_points"]["invariant_factors"] == []
        assert kummer["equals_psi"] is True

    def test_converse_certified_fixture(self, capsys):
        _, out, _ = run_cli(capsys, ["converse", "generated_ta_seed7", "--json"])
        payload = json.loads(out)["converse"]
        assert payload["verdict"] == "TA-certified"
        assert payload["idempotent"] and payload["kernel_decomposition"]

    def test_curve_fixture(self, capsys):
        _, out, _ = run_cli(capsys, ["curve", "genus2_graph", "--json"])
        report = json.loads(out)
        assert report["rank_profile"] == {"mu": 2, "branch_mu": [1, 1], "deficit": 0}
        assert report["verdict"]["toric_additive"] is True
        assert report["curve"]["cokernel_torsion_free"] is True


class TestExitCodes:
    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, ["analyze", "no_such_fixture"])
        assert code == 2
        assert "not found" in err

    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{this is not json")
        code, _, err = run_cli(capsys, ["analyze", str(bad)])
        assert code == 2
        assert "not valid JSON" in err

    def test_schema_violation(self, capsys, tmp_path):
        doc = tmp_path / "doc.json"
        doc.write_text(json.dumps({
            "format_version": "1", "kind": "degeneration", "name": "x",
            "closed_point": {"rank": 2},
            "branches": [{"name": "D1", "rank": 1, "pairing": [[1]],
                          "specialization": [[1]]}],
        }))
        code, _, err = run_cli(capsys, ["analyze", str(doc)])
        assert code == 2
        assert "specialization" in err

    def test_invalid_datum(self, capsys, tmp_path):
        doc = tmp_path / "doc.json"
        doc.write_text(json.dumps({
            "format_version": "1", "kind": "degeneration", "name": "x",
            "closed_point": {"rank": 2},
            "branches": [{"name": "D1", "rank": 1, "pairing": [[1]],
                          "specialization": [[2, 0]]}],
        }))
        code, _, err = run_cli(capsys, ["analyze", str(doc)])
        assert code == 2
        assert "not surjective" in err

    def test_l_equals_residue_char(self, capsys, tmp_path):
        doc = tmp_path / "p5.json"
        doc.write_text(json.dumps({
            "format_version": "1", "kind": "degeneration", "name": "p5",
            "residue_char": 5,
            "closed_point": {"rank": 1},
            "branches": [{"name": "D1", "rank": 1, "pairing": [[1]],
                          "specialization": [[1]]}],
        }))
        code, _, err = run_cli(capsys, ["oracle", str(doc), "--l", "5"])
        assert code == 2
        assert "residue characteristic" in err

    def test_kind_mismatch(self, capsys):
        code, _, err = run_cli(capsys, ["curve", "example_3_4"])
        assert code == 2
        assert "expected a graph" in err

    def test_wrong_format_version(self, capsys, tmp_path):
        doc = tmp_path / "doc.json"
        doc.write_text(json.dumps({"format_version": "2", "kind": "graph"}))
        code, _, err = run_cli(capsys, ["curve", str(doc)])
        assert code == 2
        assert "format_version" in err

    def test_falsification_exit_code(self, capsys, monkeypatch):
        # wire-level check: a falsification event must yield exit code 1
        def fake(graph):
            from degenkit.degeneration import Verdict
            verdict = Verdict(False, True, (), FinAb((2,)), 0)
            from degenkit.curves import graph_to_datum
            return CurveReport(graph_to_datum(graph), verdict, FinAb((2,)),
                               False, False, ("synthetic falsification",))
        monkeypatch.setattr(cli, "curve_equivalences", fake)
        code, out, _ = run_cli(capsys, ["curve", "genus2_graph", "--json"])
        assert code == 1
        assert any("falsification" in w for w in json.loads(out)["warnings"])

    def test_oracle_disagreement_exit_code(self, capsys, monkeypatch):
        # force the Galois side to lie; the report must flag it and exit 1
        monkeypatch.setattr(cli.galois, "star_condition", lambda rep: False)
        code, out, _ = run_cli(capsys, ["oracle", "example_3_4", "--l", "3", "--json"])
        assert code == 1
        report = json.loads(out)
        assert report["oracle"]["agree"] is False
        assert any("falsification" in w for w in report["warnings"])


class TestGenerate:
    def test_deterministic_by_seed(self, capsys):
        _, first, _ = run_cli(capsys, ["generate", "datum", "--seed", "5"])
        _, second, _ = run_cli(capsys, ["generate", "datum", "--seed", "5"])
        assert first == second
        _, other, _ = run_cli(capsys, ["generate", "datum", "--seed", "6"])
        assert other != first

    def test_generated_documents_are_consumable(self, capsys, tmp_path):
        for what, command in [("datum", "analyze"), ("ta-datum", "converse"),
                              ("graph", "curve")]:
            out = tmp_path / f"{what}.json"
            code, _, _ = run_cli(capsys, ["generate", what, "--seed", "3",
                                          "--out", str(out)])
            assert code == 0
            code, _, err = run_cli(capsys, [command, str(out), "--json"])
            assert code == 0, err


class TestFixtureResolution:
    def test_env_override(self, capsys, tmp_path, monkeypatch):
        src = cli.resolve_input("example_3_4")
        alt = tmp_path / "renamed.json"
        alt.write_bytes(Path(src).read_bytes())
        monkeypatch.setenv("DEGENKIT_FIXTURES", str(tmp_path))
        code, out, _ = run_cli(capsys, ["analyze", "renamed", "--json"])
        assert code == 0
        assert json.loads(out)["input"]["name"] == "example_3_4"

    def test_big_integer_strings(self, capsys, tmp_path):
        doc = tmp_path / "big.json"
        huge = str(10 ** 30)
        doc.write_text(json.dumps({
            "format_version": "1", "kind": "degeneration", "name": "big",
            "closed_point": {"rank": 1},
            "branches": [{"name": "D1", "rank": 1, "pairing": [[huge]],
                          "specialization": [[1]]}],
        }))
        code, out, _ = run_cli(capsys, ["psi", str(doc), "--json"])
        assert code == 0
        assert json.loads(out)["psi"]["order"] == 10 ** 30
