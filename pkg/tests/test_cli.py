import json

import pytest

from helpers import FIXTURES
from tsa.cli import EquivalenceReport, cmd_equiv, main
from tsa.a2g import automaton_to_grammar
from tsa.automaton import SearchBudget
from tsa.fixtures import aibjcidj_grammar, anbncndn
from tsa.g2a import grammar_to_automaton

E1 = str(FIXTURES / "example1.tsa")
E2 = str(FIXTURES / "example2.tsa")
E3 = str(FIXTURES / "example3.pmcfg")
GENEROUS = SearchBudget()


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_equivalence_report_semantics():
    assert EquivalenceReport(3).equivalent
    assert not EquivalenceReport(3, truncated=True).equivalent
    assert EquivalenceReport(3, truncated=True).exit_code == 3
    assert EquivalenceReport(3, {"a"}).exit_code == 1


def test_cmd_equiv_examples():
    g = aibjcidj_grammar()
    assert cmd_equiv(g, grammar_to_automaton(g), 12, GENEROUS).equivalent
    assert cmd_equiv(automaton_to_grammar(anbncndn(), 2), anbncndn(), 12, GENEROUS).equivalent
    rep = cmd_equiv(g, anbncndn(), 4, GENEROUS)
    assert {"ac", "bd"} <= rep.only_in_grammar and not rep.only_in_automaton


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", E3)
    assert code == 0 and "5 rules" in out and "fan-out 2" in out
    code, out, _ = run(capsys, "validate", "--json", E1)
    assert code == 0 and json.loads(out)["transitions"] == 9


def test_recognize_and_exit_codes(capsys):
    code, out, _ = run(capsys, "recognize", E1, "abcd")
    assert code == 0 and out.strip() == "accepted: τ1 τ2 τ3 τ4 τ5 τ6 τ7 τ8 τ9"
    assert run(capsys, "recognize", E1, "abc")[0] == 1
    assert run(capsys, "recognize", E1, "aabbccdd", "--max-steps", "4")[0] == 3
    assert run(capsys, "recognize", E3, "bd")[0] == 0


def test_recognize_json_is_a_trace(capsys):
    code, out, _ = run(capsys, "recognize", "--json", E1, "abcd")
    records = json.loads(out)
    assert code == 0 and len(records) == 10
    assert records[-1]["state"] == "5" and records[-1]["transition"] == 9


def test_replay(capsys, tmp_path):
    runfile = tmp_path / "run"
    runfile.write_text("1 2 3 4 5 6 7 8 9\n")
    code, out, _ = run(capsys, "replay", E1, "abcd", "--run", str(runfile))
    assert code == 0 and out.strip().endswith("accepting")
    runfile.write_text("τ2 τ3\n")
    code, out, _ = run(capsys, "replay", E1, "abcd", "--run", str(runfile))
    assert code == 1 and "replay failed" in out
    runfile.write_text("99\n")
    assert run(capsys, "replay", E1, "abcd", "--run", str(runfile))[0] == 2


def test_enumerations(capsys):
    code, out, _ = run(capsys, "enum-grammar", E3, "--max-len", "4")
    assert code == 0 and out.split() == ["ε", "ac", "bd", "aacc", "abcd", "bbdd"]
    code, out, _ = run(capsys, "enum-automaton", "--json", E1, "--max-len", "8")
    assert code == 0 and json.loads(out) == {"words": ["", "abcd", "aabbccdd"], "truncated": False}
    assert run(capsys, "enum-automaton", E1, "--max-len", "8", "--max-steps", "5")[0] == 3


def test_checks(capsys):
    assert run(capsys, "check", "cycle-free", E1)[0] == 0
    assert run(capsys, "check", "snf", E1)[0] == 0
    code, out, _ = run(capsys, "check", "snf", E2)
    assert code == 1 and out.startswith("violated")
    assert run(capsys, "check", "restriction", E2, "--k", "2", "--max-len", "6")[0] == 0
    assert run(capsys, "check", "restriction", E2, "--k", "1", "--max-len", "6")[0] == 1
    assert run(capsys, "check", "restriction", E2)[0] == 2


def test_conversions_compose(capsys, tmp_path):
    code, out, _ = run(capsys, "g2a", E3)
    assert code == 0
    compiled = tmp_path / "g.tsa"
    compiled.write_text(out)
    assert run(capsys, "equiv", E3, str(compiled), "--max-len", "8")[0] == 0
    code, out, _ = run(capsys, "a2g", E1, "--k", "2")
    assert code == 0
    back = tmp_path / "m.pmcfg"
    back.write_text(out)
    assert run(capsys, "equiv", str(back), E1, "--max-len", "12")[0] == 0


def test_normalize(capsys, tmp_path):
    code, out, _ = run(capsys, "normalize", "snf", E2)
    assert code == 0
    snf = tmp_path / "snf.tsa"
    snf.write_text(out)
    assert run(capsys, "check", "snf", str(snf))[0] == 0
    code, out, _ = run(capsys, "normalize", "cycle-free", E1)
    assert code == 0 and out == (FIXTURES / "example1.tsa").read_text()


def test_inequivalence_is_reported(capsys):
    code, out, _ = run(capsys, "equiv", "--json", E3, E1, "--max-len", "4")
    rep = json.loads(out)
    assert code == 1 and not rep["equivalent"] and {"ac", "bd"} <= set(rep["only_in_grammar"])


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "a2g", str(tmp_path / "missing.tsa"), "--k", "2")[0] == 2
    bad = tmp_path / "bad.pmcfg"
    bad.write_text("initial: S\nS -> [ x1 ] ( A )\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2 and "line 2, column 8" in err
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
