import pytest

from helpers import aibjcidj_words, anbncndn_words
from tsa.a2g import (
    PreconditionError,
    SegmentKind,
    admissible_sequences,
    admissible_tuples,
    apply_output_homomorphism,
    automaton_to_grammar,
    automaton_to_run_grammar,
    enumerate_segments,
    stay_runs,
)
from tsa.automaton import Transition, Tsa, replay
from tsa.fixtures import aibjcidj_branching, anbncndn
from tsa.grammar import CompositionFunction, Pmcfg, Rule, Variable, classify, enumerate_bounded_language, words_to_strings
from tsa.treestack import ID, TRUE

M = anbncndn()

# expected run grammar for M with k = 2, transitions as 0-based indices
EXPECTED_RULES = {
    ("⟨1,5;@,@⟩", "0 x1.1 3 4 x1.2 7 8", ("⟨1,2,3,4;*,*,*⟩",)),
    ("⟨1,5;@,@⟩", "1 x1.1 2 4 x1.2 6 8", ("⟨2,2,3,3;#,#,#⟩",)),
    ("⟨1,2,3,4;*,*,*⟩", "0 x1.1 3 | 5 x1.2 7", ("⟨1,2,3,4;*,*,*⟩",)),
    ("⟨1,2,3,4;*,*,*⟩", "1 x1.1 2 | 5 x1.2 6", ("⟨2,2,3,3;#,#,#⟩",)),
    ("⟨2,2,3,3;#,#,#⟩", " | ", ()),
}


def rule_key(r):
    comps = " | ".join(" ".join(map(str, c)) for c in r.comp.components)
    return (r.lhs, comps, r.rhs)


def runs_of(t):
    return tuple(s.run for s in t.segments)


def test_stay_runs():
    assert stay_runs(M, 4, 5, "@", "@") == {(8,)}
    assert stay_runs(M, 2, 2, "#", "#") == {()}
    assert stay_runs(M, 1, 2, "*", "*") == set()


def test_segments_of_first_fixture():
    segs = enumerate_segments(M)

    def has(kind, run, **fields):
        return any(
            s.kind is kind and s.run == run and all(getattr(s, k) == v for k, v in fields.items()) for s in segs
        )

    assert has(SegmentKind.UP, (0,), entry=1, exit=1, parent_from="@", child_index=1, child_to="*")
    assert has(SegmentKind.DOWN, (3,), entry=2, exit=2, parent_from="@", child_from="*")
    assert has(SegmentKind.DOWN_UP, (3, 4), entry=2, exit=3, parent_from="@", child_from="*", child_to=None)


def test_admissible_tuples():
    tuples = admissible_tuples(M, 2)
    t = next(t for t in tuples if runs_of(t) == ((0,), (3, 4), (7, 8)))
    assert len(t.gaps) == 2 and t.type == (1, 5, "@", "@")
    empty = [t for t in tuples if runs_of(t) == ((),) and t.type == (2, 2, "#", "#")]
    assert len(empty) == 1 and empty[0].gaps == ()
    assert all(t.segments[0].kind in (SegmentKind.UP, SegmentKind.STAY) for t in tuples)
    assert all(len(t.segments) == 1 or t.segments[-1].kind is SegmentKind.DOWN for t in tuples)


def test_admissible_sequences():
    seqs = list(admissible_sequences(M, 2))
    match = [s for s in seqs if tuple(map(runs_of, s.tuples)) == (((0,), (3,)), ((5,), (7,)))]
    assert len(match) == 1
    s = match[0]
    assert s.distinct_children == 1
    assert [[str(x) for x in c if isinstance(x, Variable)] for c in s.components()] == [["x1.1"], ["x1.2"]]
    leaf = [s for s in seqs if str(s.lhs) == "⟨2,2,3,3;#,#,#⟩" and not s.rhs]
    assert len(leaf) == 1 and all(runs_of(t) == ((),) for t in leaf[0].tuples)


def test_first_entry_into_a_child_is_a_push():
    for s in admissible_sequences(M, 2):
        entered = set()
        for t in s.tuples:
            for seg in t.segments:
                if seg.child_index is None:
                    continue
                assert seg.ends_with_push == (seg.child_index not in entered)
                entered.add(seg.child_index)


def test_run_grammar_rules_for_anbncndn():
    rg = automaton_to_run_grammar(M, 2)
    assert {rule_key(r) for r in rg.grammar.rules} == EXPECTED_RULES
    assert len(rg.grammar.rules) == 5


def test_run_grammar_generates_valid_runs():
    g = automaton_to_run_grammar(M, 2).grammar
    runs = enumerate_bounded_language(g, 9, 10)
    assert tuple(range(9)) in runs and (1, 2, 4, 6, 8) in runs
    for run in runs:
        word = [M.transitions[i].read for i in run if M.transitions[i].read is not None]
        assert M.is_final(replay(M, word, run)[-1].state)


def test_output_homomorphism():
    runs = automaton_to_run_grammar(M, 2).grammar
    g = apply_output_homomorphism(runs, M)
    first = {rule_key(r) for r in g.rules if r.lhs == "⟨1,5;@,@⟩"}
    assert ("⟨1,5;@,@⟩", "a x1.1 b x1.2 d", ("⟨1,2,3,4;*,*,*⟩",)) in first
    assert ("⟨2,2,3,3;#,#,#⟩", " | ", ()) in {rule_key(r) for r in g.rules}
    assert words_to_strings(enumerate_bounded_language(g, 8, 20)) == anbncndn_words(8)
    bad = Pmcfg.build([Rule("S", CompositionFunction((), [[42]]))], ["S"])
    with pytest.raises(ValueError):
        apply_output_homomorphism(bad, M)


def test_precondition_violations_are_reported():
    loop = Tsa(("q",), (), (), "q", [Transition("q", None, TRUE, ID, "q")], ("q",))
    with pytest.raises(PreconditionError):
        automaton_to_run_grammar(loop, 1)
    with pytest.raises(PreconditionError):
        automaton_to_run_grammar(aibjcidj_branching(), 2)


def test_first_fixture_grammar():
    g = automaton_to_grammar(M, 2)
    c = classify(g)
    assert c.is_mcfg and c.fan_out <= 2
    assert words_to_strings(enumerate_bounded_language(g, 12, 40)) == anbncndn_words(12)


def test_second_fixture_grammar_follows_its_formula():
    g = automaton_to_grammar(aibjcidj_branching(), 2)
    assert classify(g).is_mcfg and classify(g).fan_out <= 2
    assert words_to_strings(enumerate_bounded_language(g, 8, 40)) == aibjcidj_words(8)


def test_automaton_with_loop_goes_through_cycle_removal():
    m = Tsa((1, 2), (), ("a", "b"), 1,
            [Transition(1, "a", TRUE, ID, 1), Transition(1, "b", TRUE, ID, 2)], (2,))
    g = automaton_to_grammar(m, 1)
    assert words_to_strings(enumerate_bounded_language(g, 5, 30)) == {"a" * n + "b" for n in range(5)}


def test_no_final_states_gives_empty_language():
    m = Tsa((1,), (), ("a",), 1, [Transition(1, "a", TRUE, ID, 1)], ())
    assert enumerate_bounded_language(automaton_to_grammar(m, 1), 4, 10) == set()
