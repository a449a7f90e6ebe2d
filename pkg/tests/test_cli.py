"""The calcforge command line: subcommands, exit codes, witness files and report stability."""
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from calcforge import __version__
from calcforge.calculi import builtin_ruleset
from calcforge.calculi.base import RuleSet
from calcforge.cli import main
from calcforge.diagram import empty
from calcforge.phase import GroupPhase
from calcforge.rewrite import RewriteRule

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_interp_empty_diagram(tmp_path, capsys):
    p = tmp_path / "empty.json"
    p.write_text(empty("zx").dumps())
    code, out, _ = run(capsys, "interp", p)
    rep = json.loads(out)
    assert code == 0 and rep["version"] == __version__ and rep["command"] == "interp"
    assert (rep["matrix"]["rows"], rep["matrix"]["cols"]) == (1, 1)
    assert rep["matrix"]["entries"] == [[{"n": 1, "c": ["1"]}]]
    code, out, _ = run(capsys, "interp", p, "--mode", "float")
    assert code == 0


def test_interp_hadamard(capsys, tmp_path):
    code, _, _ = run(capsys, "interp", SAMPLES / "hadamard.json", "--report", tmp_path / "r.json")
    assert code == 0 and json.loads((tmp_path / "r.json").read_text())["mode"] == "exact"


def test_rules_list_and_check(capsys):
    code, out, _ = run(capsys, "rules", "list")
    assert code == 0 and {r["name"] for r in json.loads(out)["rulesets"]} >= {"zq", "ring", "zh", "zx_vilmart"}
    code, out, _ = run(capsys, "rules", "check", "zq")
    assert code == 0 and json.loads(out)["all_sound"]


def test_rules_check_unsound_file(capsys, tmp_path):
    rule = builtin_ruleset("zx_vilmart")["S1"]
    eq = rule.equation()
    flipped = RewriteRule("S1-flipped", eq.lhs, eq.rhs.with_phases({"s": GroupPhase.of(0, a=1, b=-1)}),
                          bbox_pairing=dict(rule.bbox_pairing))
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(RuleSet("bad", "zx", (flipped,)).to_json()))
    w = tmp_path / "w.json"
    code, out, _ = run(capsys, "rules", "check", path, "--witness", w)
    assert code == 1 and not json.loads(out)["all_sound"]
    code, _, _ = run(capsys, "check-eq", w)
    assert code == 1


@pytest.mark.parametrize("mode", ["galois", "grid", "auto"])
def test_verify_family(capsys, mode):
    code, out, _ = run(capsys, "verify", SAMPLES / "spider_family.json", "--mode", mode)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"]["status"] == "Verified"


def test_refuted_writes_witness_and_check_eq_agrees(capsys, tmp_path):
    w = tmp_path / "w.json"
    code, out, err = run(capsys, "verify", SAMPLES / "spider_wrong.json", "--witness", w)
    assert code == 1 and json.loads(out)["verdict"]["status"] == "Refuted"
    assert w.exists() and "witness written" in err
    code, out, _ = run(capsys, "check-eq", w)
    assert code == 1 and json.loads(out)["equal"] is False


def test_usage_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"calculus": "zx",\n "vertices": [}')
    code, _, err = run(capsys, "interp", bad)
    assert code == 2 and "line 2" in err
    code, _, err = run(capsys, "interp", tmp_path / "missing.json")
    assert code == 2 and "missing.json" in err
    code, _, err = run(capsys, "check-eq", SAMPLES / "spider_family.json")
    assert code == 2 and "calcforge verify" in err
    code, _, err = run(capsys, "rules", "check", "nonesuch")
    assert code == 2
    code, _, err = run(capsys, "interp", SAMPLES / "hadamard.json", "--policy", "nope")
    assert code == 2 and "--policy" in err
    code, _, err = run(capsys, "phasehom", "classify", "--n", "12")
    assert code == 2


def test_verify_inapplicable_exit_code(capsys, tmp_path):
    p = tmp_path / "q.json"
    p.write_text(json.dumps(builtin_ruleset("zq")["Q"].equation().to_json()))
    code, out, _ = run(capsys, "verify", p, "--mode", "grid")
    assert code == 2 and json.loads(out)["verdict"]["status"] == "Inapplicable"


def test_reports_are_byte_identical(capsys, tmp_path):
    for k in (1, 2):
        run(capsys, "verify", SAMPLES / "spider_family.json", "--report", tmp_path / f"r{k}.json")
        run(capsys, "infer", SAMPLES / "spider_skeleton_points.json", "--verify", "--report", tmp_path / f"i{k}.json")
    assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
    assert (tmp_path / "i1.json").read_bytes() == (tmp_path / "i2.json").read_bytes()


def test_infer_and_translate(capsys, tmp_path):
    code, out, _ = run(capsys, "infer", SAMPLES / "spider_skeleton_points.json", "--verify")
    rep = json.loads(out)
    assert code == 0 and rep["conjectures"]
    assert any(c["verdict"]["status"] == "Verified" for c in rep["conjectures"])
    code, out, _ = run(capsys, "infer", SAMPLES / "spider_submodule.json")
    assert code == 0
    code, out, _ = run(capsys, "translate", SAMPLES / "hadamard.json", "--to", "zq", "--check",
                       "-o", tmp_path / "t.json")
    assert code == 0 and json.loads(out)["check"]["equal"]
    code, out, _ = run(capsys, "translate", tmp_path / "t.json", "--to", "zx", "--check")
    assert code == 0


def test_phasehom(capsys):
    code, out, _ = run(capsys, "phasehom", "classify", "--n", "8")
    rep = json.loads(out)
    assert code == 0 and rep["multipliers"] == [1, 7] and rep["agree"]
    code, out, _ = run(capsys, "phasehom", "apply", SAMPLES / "spider_family.json", "--j", "7")
    assert code == 0


def test_synth_with_store(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_vertices": 1}))
    store = tmp_path / "store"
    code, out, _ = run(capsys, "synth", "--config", cfg, "--store", store)
    assert code == 0 and (store / "index.json").exists()
    first = json.loads(out)["summary"]
    code, out, _ = run(capsys, "synth", "--config", cfg, "--store", store)
    assert json.loads(out)["summary"]["already_processed"] == first["enumerated"]
    cfg.write_text(json.dumps({"max_vertices": 1, "calculus": "zq"}))
    code, _, err = run(capsys, "synth", "--config", cfg)
    assert code == 2 and "calculus" in err


def test_console_script():
    exe = shutil.which("calcforge")
    cmd = [exe] if exe else [sys.executable, "-m", "calcforge.cli"]
    out = subprocess.run(cmd + ["--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
