"""From a restricted tree stack automaton to an MCFG.

The run grammar has one nonterminal per *node behaviour*
``<q1, q1', ..., qs, qs'; g0, ..., gs>``: a node is active ``s`` times; the
i-th activity starts in state ``qi`` with symbol ``g(i-1)`` under the
pointer, stays at or above the node, and ends in ``qi'`` with symbol ``gi``
just before the pointer leaves downwards.  One activity is a chain of
segments at the node separated by excursions into children (the gaps); each
excursion becomes a variable of the child's nonterminal.  Its terminals are
transition indices, so the grammar generates runs; mapping each transition
to the symbol it reads gives a grammar for the automaton's language.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Hashable, Iterator

from .automaton import GENEROUS, SearchBudget, Tsa
from .grammar import CompositionFunction, Pmcfg, Rule, Variable, restrict_to_productive, trim
from .normalform import SnfStatus, is_cycle_free, is_stack_normal_form_bounded, remove_cycles, stay_edges, to_stack_normal_form
from .treestack import ROOT, Down, Push, Up, admits

State = Hashable
Symbol = Hashable


class SegmentKind(Enum):
    UP = "up"
    DOWN = "down"
    DOWN_UP = "down-up"
    STAY = "stay"


@dataclass(frozen=True)
class Segment:
    """A piece of activity at one node between (or around) child excursions."""

    kind: SegmentKind
    run: tuple[int, ...]
    parent_from: Symbol
    parent_to: Symbol
    entry: State
    exit: State
    child_from: Symbol | None = None  # symbol checked by the leading down
    child_to: Symbol | None = None  # symbol pushed by the trailing push
    child_index: int | None = None
    ends_with_push: bool = False


@dataclass(frozen=True)
class Gap:
    """Excursion into child ``child`` entered in ``enter`` and left from ``leave``."""

    enter: State
    leave: State
    child: int
    pushed: Symbol | None  # None when entered by up
    left_with: Symbol


@dataclass(frozen=True)
class SegmentTuple:
    segments: tuple[Segment, ...]
    gaps: tuple[Gap, ...]

    @property
    def type(self) -> tuple:
        first, last = self.segments[0], self.segments[-1]
        return (first.entry, last.exit, first.parent_from, last.parent_to)

    def fill(self, variables) -> tuple:
        out = list(self.segments[0].run)
        for var, seg in zip(variables, self.segments[1:]):
            out.append(var)
            out.extend(seg.run)
        return tuple(out)


@dataclass(frozen=True)
class NodeType:
    """Canonical nonterminal ``<q1, q1', ..., qs, qs'; g0, ..., gs>``."""

    states: tuple
    symbols: tuple

    def __post_init__(self):
        if len(self.states) % 2 or not self.states or len(self.symbols) != len(self.states) // 2 + 1:
            raise ValueError(f"malformed node type {self.states} / {self.symbols}")

    @property
    def fan_out(self) -> int:
        return len(self.states) // 2

    def __str__(self):
        return "⟨" + ",".join(map(str, self.states)) + ";" + ",".join(map(str, self.symbols)) + "⟩"


@dataclass(frozen=True)
class SegmentSequence:
    tuples: tuple[SegmentTuple, ...]
    # (component, gap) -> (child number, occurrence number), both from 1
    positions: dict
    lhs: NodeType
    rhs: tuple[NodeType, ...]

    def __hash__(self):
        return hash((self.tuples, self.lhs, self.rhs))

    @property
    def distinct_children(self) -> int:
        return len(self.rhs)

    def components(self) -> tuple[tuple, ...]:
        return tuple(
            t.fill([Variable(*self.positions[(i, g)]) for g in range(1, len(t.gaps) + 1)])
            for i, t in enumerate(self.tuples, 1)
        )


class PreconditionError(ValueError):
    pass


class _Analysis:
    """Per-automaton tables shared by the enumerations."""

    def __init__(self, m: Tsa):
        self.m = m
        ok, witness = is_cycle_free(m)
        if not ok:
            raise PreconditionError(f"automaton is not cycle-free: {witness}")
        self.edges = stay_edges(m)
        self.symbols = (ROOT, *m.stack_alphabet)
        self.moves_up = {}
        self.downs = []
        for idx, t in enumerate(m.transitions):
            f = t.instruction
            if isinstance(f, (Push, Up)):
                self.moves_up.setdefault(t.source, []).append(idx)
            elif isinstance(f, Down):
                self.downs.append(idx)
        self._stay_cache: dict = {}

    def stay_from(self, q, g) -> list[tuple[tuple[int, ...], tuple]]:
        """Every stay run from vertex (q, g) with its end vertex, the empty run first."""
        key = (q, g)
        cached = self._stay_cache.get(key)
        if cached is not None:
            return cached
        out = [((), key)]
        on_path = {key}

        def walk(v, prefix):
            for idx, w in self.edges.get(v, ()):
                if w in on_path:
                    raise PreconditionError(f"stay loop through {w}")
                run = prefix + (idx,)
                out.append((run, w))
                on_path.add(w)
                walk(w, run)
                on_path.discard(w)

        walk(key, ())
        self._stay_cache[key] = out
        return out

    def up_segments(self, q, g) -> Iterator[Segment]:
        """Stay runs from (q, g) followed by a push or up."""
        for run, (q2, g2) in self.stay_from(q, g):
            for idx in self.moves_up.get(q2, ()):
                t = self.m.transitions[idx]
                if not admits(t.predicate, g2):
                    continue
                f = t.instruction
                push = isinstance(f, Push)
                yield Segment(
                    SegmentKind.UP,
                    run + (idx,),
                    g,
                    g2,
                    q,
                    t.target,
                    child_to=f.symbol if push else None,
                    child_index=f.child,
                    ends_with_push=push,
                )

    def down_entries(self) -> Iterator[tuple[int, Symbol]]:
        for idx in self.downs:
            t = self.m.transitions[idx]
            for b in self.m.stack_alphabet:
                if admits(t.predicate, b):
                    yield idx, b


def stay_runs(m: Tsa, q, q2, g, g2) -> set[tuple[int, ...]]:
    """All stay runs from state q with symbol g to state q2 with symbol g2."""
    a = _Analysis(m)
    return {run for run, end in a.stay_from(q, g) if end == (q2, g2)}


def enumerate_segments(m: Tsa) -> list[Segment]:
    """All up, down and down-up segments, for every parent symbol."""
    a = _Analysis(m)
    out = []
    for q in m.states:
        for g in a.symbols:
            out.extend(a.up_segments(q, g))
    for idx, b in a.down_entries():
        t = m.transitions[idx]
        for g in a.symbols:
            for run, (q2, g2) in a.stay_from(t.target, g):
                out.append(Segment(SegmentKind.DOWN, (idx,) + run, g, g2, t.source, q2 if run else t.target, child_from=b))
            for up in a.up_segments(t.target, g):
                out.append(
                    Segment(
                        SegmentKind.DOWN_UP,
                        (idx,) + up.run,
                        g,
                        up.parent_to,
                        t.source,
                        up.exit,
                        child_from=b,
                        child_to=up.child_to,
                        child_index=up.child_index,
                        ends_with_push=up.ends_with_push,
                    )
                )
    return out


# children bookkeeping: tuple of (child index, entries so far, last exit symbol)
def _entries(children, j) -> tuple[int, Symbol | None]:
    for c, n, last in children:
        if c == j:
            return n, last
    return 0, None


def _enter(children, j):
    n, last = _entries(children, j)
    rest = tuple(c for c in children if c[0] != j)
    return tuple(sorted(rest + ((j, n + 1, last),), key=lambda c: c[0]))


def _leave(children, j, sym):
    return tuple((c, n, sym if c == j else last) for c, n, last in children)


def _component(a: _Analysis, k, q, g, q_end, g_end, children, enforce_entries) -> Iterator[tuple[SegmentTuple, tuple]]:
    """Admissible tuples starting at (q, g); optionally constrained at the end."""

    def ends_ok(q2, g2):
        return (q_end is None or q2 == q_end) and (g_end is None or g2 == g_end)

    for run, (q2, g2) in a.stay_from(q, g):
        if ends_ok(q2, g2):
            yield SegmentTuple((Segment(SegmentKind.STAY, run, g, g2, q, q2),), ()), children

    def may_enter(seg, kids):
        n, _ = _entries(kids, seg.child_index)
        if n >= k:
            return False
        if enforce_entries:
            return seg.ends_with_push == (n == 0)
        return True

    def after(segs, gaps, kids):
        prev = segs[-1]
        for idx, b in a.down_entries():
            t = a.m.transitions[idx]
            gap = Gap(prev.exit, t.source, prev.child_index, prev.child_to, b)
            kids2 = _leave(kids, prev.child_index, b)
            parent = prev.parent_to
            for run, (q2, g2) in a.stay_from(t.target, parent):
                if ends_ok(q2, g2):
                    seg = Segment(SegmentKind.DOWN, (idx,) + run, parent, g2, t.source, q2, child_from=b)
                    yield SegmentTuple(tuple(segs) + (seg,), tuple(gaps) + (gap,)), kids2
            for up in a.up_segments(t.target, parent):
                if not may_enter(up, kids2):
                    continue
                seg = Segment(
                    SegmentKind.DOWN_UP,
                    (idx,) + up.run,
                    parent,
                    up.parent_to,
                    t.source,
                    up.exit,
                    child_from=b,
                    child_to=up.child_to,
                    child_index=up.child_index,
                    ends_with_push=up.ends_with_push,
                )
                yield from after(segs + [seg], gaps + [gap], _enter(kids2, up.child_index))

    for up in a.up_segments(q, g):
        if may_enter(up, children):
            yield from after([up], [], _enter(children, up.child_index))


def admissible_tuples(m: Tsa, k: int) -> set[SegmentTuple]:
    """Every admissible tuple with at most k excursions into each child."""
    a = _Analysis(m)
    out = set()
    for q in m.states:
        for g in a.symbols:
            for t, _ in _component(a, k, q, g, None, None, (), enforce_entries=False):
                out.add(t)
    return out


def _finish(tuples: tuple[SegmentTuple, ...]) -> SegmentSequence:
    order: list[int] = []
    seen: dict[int, int] = {}
    positions = {}
    per_child: dict[int, list[Gap]] = {}
    for i, t in enumerate(tuples, 1):
        for kappa, gap in enumerate(t.gaps, 1):
            if gap.child not in per_child:
                order.append(gap.child)
                per_child[gap.child] = []
            per_child[gap.child].append(gap)
            positions[(i, kappa)] = (order.index(gap.child) + 1, len(per_child[gap.child]))
    states, symbols = [], [tuples[0].type[2]]
    for t in tuples:
        q1, q2, _, g2 = t.type
        states += [q1, q2]
        symbols.append(g2)
    rhs = []
    for j in order:
        gaps = per_child[j]
        b_states = [s for gap in gaps for s in (gap.enter, gap.leave)]
        b_symbols = [gaps[0].pushed] + [gap.left_with for gap in gaps]
        rhs.append(NodeType(tuple(b_states), tuple(b_symbols)))
    return SegmentSequence(tuples, positions, NodeType(tuple(states), tuple(symbols)), tuple(rhs))


def _sequences_of_type(a: _Analysis, k: int, nt: NodeType) -> Iterator[SegmentSequence]:
    s = nt.fan_out

    def go(i, chosen, kids):
        if i == s:
            yield _finish(tuple(chosen))
            return
        q, q_end = nt.states[2 * i], nt.states[2 * i + 1]
        for t, kids2 in _component(a, k, q, nt.symbols[i], q_end, nt.symbols[i + 1], kids, True):
            yield from go(i + 1, chosen + [t], kids2)

    yield from go(0, [], ())


def admissible_sequences(m: Tsa, k: int, max_components: int | None = None) -> Iterator[SegmentSequence]:
    """Admissible sequences of up to k (or ``max_components``) tuples, chained on the node symbol."""
    a = _Analysis(m)
    limit = k if max_components is None else max_components

    def go(chosen, kids, g):
        if chosen:
            yield _finish(tuple(chosen))
        if len(chosen) == limit:
            return
        for q in m.states:
            for t, kids2 in _component(a, k, q, g, None, None, kids, True):
                yield from go(chosen + [t], kids2, t.type[3])

    for g in a.symbols:
        yield from go([], (), g)


@dataclass
class RunGrammar:
    grammar: Pmcfg
    types: dict  # nonterminal name -> NodeType
    sequences: list  # the SegmentSequence behind each rule, in rule order


def automaton_to_run_grammar(
    m: Tsa,
    k: int,
    *,
    snf_check_len: int | None = 4,
    snf_budget: SearchBudget = GENEROUS,
) -> RunGrammar:
    """Grammar over transition indices generating the valid runs of ``m``.

    ``m`` must be cycle-free, in stack normal form and k-restricted.  The
    first two are checked (stack normal form only up to ``snf_check_len``).
    """
    a = _Analysis(m)
    if snf_check_len is not None:
        chk = is_stack_normal_form_bounded(m, snf_check_len, snf_budget)
        if chk.status is SnfStatus.VIOLATED:
            raise PreconditionError(f"automaton is not in stack normal form: run {chk.witness}")
    initials = [NodeType((m.initial_state, q), (ROOT, ROOT)) for q in m.final_states]
    seen = set(initials)
    queue = deque(initials)
    rules: list[Rule] = []
    sequences = []
    while queue:
        nt = queue.popleft()
        for seq in _sequences_of_type(a, k, nt):
            arg_sorts = tuple(b.fan_out for b in seq.rhs)
            comp = CompositionFunction(arg_sorts, seq.components())
            rules.append(Rule(str(nt), comp, tuple(str(b) for b in seq.rhs)))
            sequences.append(seq)
            for b in seq.rhs:
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
    types = {str(nt): nt for nt in seen}
    g = Pmcfg(
        {name: nt.fan_out for name, nt in types.items()},
        frozenset(range(len(m.transitions))),
        frozenset(str(nt) for nt in initials),
        tuple(rules),
    )
    pruned = trim(g)
    keep = {id(r) for r in pruned.rules}
    kept_sequences = [s for r, s in zip(rules, sequences) if id(r) in keep]
    return RunGrammar(pruned, {n: types[n] for n in pruned.nonterminals}, kept_sequences)


def apply_output_homomorphism(g_runs: Pmcfg, m: Tsa) -> Pmcfg:
    """Replace each transition index by the symbol it reads (dropping non-reading ones)."""
    n = len(m.transitions)

    def image(item):
        if isinstance(item, Variable):
            return [item]
        if not isinstance(item, int) or not 0 <= item < n:
            raise ValueError(f"unknown transition id {item!r}")
        read = m.transitions[item].read
        return [] if read is None else [read]

    rules = []
    for r in g_runs.rules:
        comps = [[x for item in comp for x in image(item)] for comp in r.comp.components]
        rules.append(Rule(r.lhs, CompositionFunction(r.comp.arg_sorts, comps), r.rhs, r.label))
    return Pmcfg(g_runs.nonterminals, frozenset(m.terminals), g_runs.initials, tuple(rules))


def automaton_to_grammar(m: Tsa, k: int, max_iterations: int = 100) -> Pmcfg:
    """A k-MCFG for the language of the k-restricted automaton ``m``."""
    m = remove_cycles(m, max_iterations).automaton
    m = to_stack_normal_form(m)
    runs = automaton_to_run_grammar(m, k, snf_check_len=None)
    return restrict_to_productive(apply_output_homomorphism(runs.grammar, m))
