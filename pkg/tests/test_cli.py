import json
import subprocess
import sys
from pathlib import Path

import pytest

from gerstenhaber import serialize as S
from gerstenhaber.cli import main, resolve_seed
from gerstenhaber.report import Report

from test_hamiltonian import so3_on_r3_case

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


class TestSpecExamples:
    def test_check_qlb_double(self, capsys):
        code, doc = run_json(capsys, "check-qlb", DATA / "double-so3.json")
        assert code == 0
        assert doc["report"]["passed"]
        assert all(e["residual"] == "0" for e in doc["report"]["entries"])

    def test_twist_then_negate_is_identity(self, capsys, tmp_path):
        out = tmp_path / "back.json"
        code, _, _ = run(capsys, "twist", DATA / "double-so3.json", "--t", DATA / "t-double-so3.json",
                         "--then-negate", "-o", out)
        assert code == 0
        original = S.canonical(json.loads((DATA / "double-so3.json").read_text()))
        assert out.read_text() == original

    def test_groupoid_sample(self, capsys):
        code, doc = run_json(capsys, "groupoid-sample", DATA / "gxg-so3.json", "--count", 20)
        assert code == 0
        assert doc["report"]["flags"]["max_multiplicativity_residual"] < 1e-6


class TestExitCodes:
    @pytest.mark.parametrize("command,file,expect", [
        ("validate-algebroid", "so3-action.json", 0),
        ("validate-algebroid", "so3-action-bad-anchor.json", 1),
        ("twisted-poisson", "twisted-poisson.json", 0),
        ("twisted-poisson", "twisted-poisson-perturbed.json", 1),
        ("coisotropy", "coisotropic.json", 0),
        ("coisotropy", "not-coisotropic.json", 1),
        ("manin-extract", "double-so3-triple.json", 0),
        ("double", "so3.json", 0),
        ("transformation-qlb", "transformation-adjoint.json", 1),
    ])
    def test_code_matches_report(self, capsys, command, file, expect):
        code, doc = run_json(capsys, command, DATA / file)
        assert code == expect
        assert doc["report"]["passed"] is (expect == 0)

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "check-qlb", DATA / "nope.json")
        assert code == 2 and "nope.json" in err

    def test_json_syntax_error_has_position(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"degree": 2,\n  "delta_x": [}\n')
        code, _, err = run(capsys, "check-qlb", bad)
        assert code == 2 and "line 2" in err

    def test_coefficient_parse_error_has_position(self, capsys, tmp_path):
        doc = json.loads((DATA / "so3-action.json").read_text())
        doc["anchor"][0][1] = "x3 +* 2"
        f = tmp_path / "a.json"
        f.write_text(json.dumps(doc))
        code, _, err = run(capsys, "validate-algebroid", f)
        assert code == 2 and "position" in err

    def test_schema_error(self, capsys, tmp_path):
        f = tmp_path / "a.json"
        f.write_text(json.dumps({"coords": ["x"]}))
        code, _, err = run(capsys, "validate-algebroid", f)
        assert code == 2 and "frame" in err

    def test_perturbed_twisted_poisson_prints_defect(self, capsys):
        code, out, _ = run(capsys, "twisted-poisson", DATA / "twisted-poisson-perturbed.json")
        assert code == 1
        assert "d/dx1∧d/dx2∧d/dx3" in out


class TestCommands:
    def test_manin_extract_values(self, capsys):
        code, doc = run_json(capsys, "manin-extract", DATA / "double-so3-triple.json")
        assert code == 0
        assert doc["result"]["F"] == []
        assert doc["result"]["omega"] == [{"i": 1, "j": 2, "k": 3, "value": "1/4"}]

    def test_base_field_of_double_is_zero(self, capsys):
        code, doc = run_json(capsys, "base-field", DATA / "double-so3.json")
        assert code == 0
        assert doc["result"]["terms"] == []

    @pytest.mark.parametrize("kind,file", [("complete", "lift-so3.json"), ("vertical", "lift-so3.json"),
                                           ("gauge", "lift-gauge-so3.json"),
                                           ("linear", "double-so3.json")])
    def test_lift(self, capsys, kind, file):
        code, doc = run_json(capsys, "lift", kind, DATA / file)
        assert code == 0
        assert doc["result"]["degree"] >= 0

    def test_check_differential(self, capsys):
        code, doc = run_json(capsys, "check-differential", DATA / "double-so3.json")
        assert code == 0

    def test_check_hamiltonian(self, capsys, tmp_path):
        q, fields, J, Pi = so3_on_r3_case()
        def on_base(P):
            d = S.multivector_to_json(P)
            del d["frame"]
            return d
        doc = {"qlb": S.qlb_to_json(q), "coords": ["x1", "x2", "x3"],
               "fields": [on_base(f) for f in fields], "J": [], "Pi_X": on_base(Pi)}
        f = tmp_path / "ham.json"
        f.write_text(json.dumps(doc))
        code, out = run_json(capsys, "check-hamiltonian", f)
        assert code == 0
        doc["Pi_X"] = {"degree": 2, "terms": [{"idx": [1, 2], "coef": "1"}]}
        f.write_text(json.dumps(doc))
        code, out = run_json(capsys, "check-hamiltonian", f)
        assert code == 1

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "check-qlb", DATA / "double-so3.json", "--verbose")
        assert code == 0
        assert "PASS" in out

    def test_report_json_roundtrip(self, capsys):
        _, doc = run_json(capsys, "groupoid-sample", DATA / "gxg-so3.json", "--count", 2)
        rep = Report.from_dict(doc["report"])
        assert json.loads(rep.to_json()) == doc["report"]


class TestSeed:
    def test_precedence(self, monkeypatch):
        monkeypatch.delenv("GERSTENHABER_SEED", raising=False)
        assert resolve_seed(None) == 0
        monkeypatch.setenv("GERSTENHABER_SEED", "17")
        assert resolve_seed(None) == 17
        assert resolve_seed(3) == 3

    def test_env_seed_reaches_groupoid_sample(self, capsys, monkeypatch, tmp_path):
        doc = json.loads((DATA / "gxg-so3.json").read_text())
        del doc["seed"]
        f = tmp_path / "s.json"
        f.write_text(json.dumps(doc))
        monkeypatch.setenv("GERSTENHABER_SEED", "5")
        _, a = run_json(capsys, "groupoid-sample", f, "--count", 2)
        _, b = run_json(capsys, "groupoid-sample", f, "--count", 2, "--seed", 5)
        _, c = run_json(capsys, "groupoid-sample", f, "--count", 2, "--seed", 6)
        assert a["report"]["flags"]["seed"] == 5
        assert a == b
        assert a != c


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gerstenhaber", "check-qlb", str(DATA / "double-so3.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
