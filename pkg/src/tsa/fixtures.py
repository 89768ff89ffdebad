"""Reference inputs: two tree stack automata and a 2-MCFG."""

from __future__ import annotations

from .automaton import Transition, Tsa
from .grammar import CompositionFunction, Pmcfg, Rule, Variable
from .treestack import BOTTOM, DOWN, ID, TRUE, Equals, Push, Up

STAR, HASH = "*", "#"


def _t(source, read, predicate, instruction, target, name):
    return Transition(source, read, predicate, instruction, target, name)


def anbncndn() -> Tsa:
    """Recognises a^n b^n c^n d^n with a monadic stack; 2-restricted."""
    delta = [
        _t(1, "a", TRUE, Push(1, STAR), 1, "τ1"),
        _t(1, None, TRUE, Push(1, HASH), 2, "τ2"),
        _t(2, None, Equals(HASH), DOWN, 2, "τ3"),
        _t(2, "b", Equals(STAR), DOWN, 2, "τ4"),
        _t(2, None, BOTTOM, Up(1), 3, "τ5"),
        _t(3, "c", Equals(STAR), Up(1), 3, "τ6"),
        _t(3, None, Equals(HASH), DOWN, 4, "τ7"),
        _t(4, "d", Equals(STAR), DOWN, 4, "τ8"),
        _t(4, None, BOTTOM, ID, 5, "τ9"),
    ]
    return Tsa((1, 2, 3, 4, 5), (STAR, HASH), tuple("abcd"), 1, delta, (5,))


def aibjcidj_branching() -> Tsa:
    """Recognises a^i b^j c^i d^j (i, j >= 1) using two branches of the tree."""
    delta = [
        _t(1, "a", BOTTOM, Push(1, STAR), 2, "τ'1"),
        _t(2, "a", TRUE, Push(1, STAR), 2, "τ'2"),
        _t(2, None, TRUE, Push(1, HASH), 3, "τ'3"),
        _t(3, None, TRUE, DOWN, 3, "τ'4"),
        _t(3, "b", BOTTOM, Push(2, STAR), 4, "τ'5"),
        _t(4, "b", TRUE, Push(1, STAR), 4, "τ'6"),
        _t(4, None, TRUE, Push(1, HASH), 5, "τ'7"),
        _t(5, None, TRUE, DOWN, 5, "τ'8"),
        _t(5, None, BOTTOM, Up(1), 6, "τ'9"),
        _t(6, "c", Equals(STAR), Up(1), 6, "τ'10"),
        _t(6, None, Equals(HASH), DOWN, 7, "τ'11"),
        _t(7, None, Equals(STAR), DOWN, 7, "τ'12"),
        _t(7, None, BOTTOM, Up(2), 8, "τ'13"),
        _t(8, "d", Equals(STAR), Up(1), 8, "τ'14"),
        _t(8, None, Equals(HASH), ID, 9, "τ'15"),
    ]
    return Tsa(tuple(range(1, 10)), (STAR, HASH), tuple("abcd"), 1, delta, (9,))


def aibjcidj_grammar() -> Pmcfg:
    """The 2-MCFG S -> [x1.1 x2.1 x1.2 x2.2](A, B) for a^i b^j c^i d^j."""
    x = Variable
    rules = [
        Rule("S", CompositionFunction((2, 2), [[x(1, 1), x(2, 1), x(1, 2), x(2, 2)]]), ("A", "B"), "r1"),
        Rule("A", CompositionFunction((2,), [["a", x(1, 1)], ["c", x(1, 2)]]), ("A",), "r2"),
        Rule("A", CompositionFunction((), [[], []]), (), "r3"),
        Rule("B", CompositionFunction((2,), [["b", x(1, 1)], ["d", x(1, 2)]]), ("B",), "r4"),
        Rule("B", CompositionFunction((), [[], []]), (), "r5"),
    ]
    return Pmcfg({"S": 1, "A": 2, "B": 2}, frozenset("abcd"), frozenset({"S"}), rules)
