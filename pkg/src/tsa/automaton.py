"""Tree stack automata: transitions, runs, bounded search and restriction counters.

Runs are sequences of 0-based indices into ``Tsa.transitions``.  Words are
sequences of terminals (a ``str`` works as a sequence of characters).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .treestack import (
    ROOT,
    Bottom,
    Equals,
    Instruction,
    Predicate,
    Push,
    Set,
    TreeStack,
    apply_instruction,
    check_predicate,
    initial_tree_stack,
    moves_up,
    render_position,
)

State = Hashable
Run = tuple


@dataclass(frozen=True)
class Transition:
    source: State
    read: Hashable | None  # None reads nothing
    predicate: Predicate
    instruction: Instruction
    target: State
    name: str | None = field(default=None, compare=False)

    def __str__(self):
        read = "eps" if self.read is None else self.read
        return f"{self.source} -{read}-> {self.target} [{self.predicate}] {self.instruction}"


@dataclass(frozen=True)
class Tsa:
    states: tuple
    stack_alphabet: tuple
    terminals: tuple
    initial_state: State
    transitions: tuple[Transition, ...]
    final_states: tuple
    # asserted k-restriction bound, used to prune searches
    restriction: int | None = None

    def __post_init__(self):
        for name in ("states", "stack_alphabet", "terminals", "transitions", "final_states"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        by_source: dict = {}
        for idx, t in enumerate(self.transitions):
            by_source.setdefault(t.source, []).append(idx)
        object.__setattr__(self, "_by_source", {q: tuple(v) for q, v in by_source.items()})
        object.__setattr__(self, "_finals", frozenset(self.final_states))

    def outgoing(self, state: State) -> tuple[int, ...]:
        return self._by_source.get(state, ())

    def is_final(self, state: State) -> bool:
        return state in self._finals

    def transition_name(self, index: int) -> str:
        return self.transitions[index].name or f"τ{index + 1}"

    def with_restriction(self, k: int | None) -> "Tsa":
        return Tsa(
            self.states,
            self.stack_alphabet,
            self.terminals,
            self.initial_state,
            self.transitions,
            self.final_states,
            k,
        )


def validate_automaton(m: Tsa) -> list[str]:
    problems = []
    states = set(m.states)
    gamma = set(m.stack_alphabet)
    sigma = set(m.terminals)
    if ROOT in gamma:
        problems.append("stack alphabet must not contain @")
    if m.initial_state not in states:
        problems.append(f"initial state {m.initial_state} not declared")
    for q in m.final_states:
        if q not in states:
            problems.append(f"final state {q} not declared")
    for idx, t in enumerate(m.transitions):
        name = m.transition_name(idx)
        for q in (t.source, t.target):
            if q not in states:
                problems.append(f"{name}: undeclared state {q}")
        if t.read is not None and t.read not in sigma:
            problems.append(f"{name}: undeclared terminal {t.read!r}")
        syms = []
        if isinstance(t.predicate, Equals):
            syms.append(t.predicate.symbol)
        if isinstance(t.instruction, (Push, Set)):
            syms.append(t.instruction.symbol)
        for s in syms:
            if s not in gamma:
                problems.append(f"{name}: undeclared stack symbol {s}")
    return problems


@dataclass(frozen=True)
class Configuration:
    state: State
    storage: TreeStack
    remaining: tuple

    def render(self) -> str:
        rest = "".join(map(str, self.remaining)) or "ε"
        return f"({self.state}, {self.storage.render()}, {rest})"


@dataclass(frozen=True)
class SearchBudget:
    max_steps: int = 400
    max_eps_between_reads: int = 200
    # overrides the automaton's own restriction bound when set
    restriction_k: int | None = None
    # bound on tree size (number of push steps); None means unbounded
    max_pushes: int | None = None

    def __post_init__(self):
        for v in (self.max_steps, self.max_eps_between_reads):
            if v < 0:
                raise ValueError("budgets must be non-negative")
        if self.restriction_k is not None and self.restriction_k < 1:
            raise ValueError("restriction_k must be positive")


GENEROUS = SearchBudget()


class ReplayError(Exception):
    """A run could not be replayed; ``step`` is the 0-based failing position."""

    def __init__(self, step: int, reason: str, message: str):
        super().__init__(message)
        self.step = step
        self.reason = reason


def initial_configuration(m: Tsa, word: Sequence) -> Configuration:
    return Configuration(m.initial_state, initial_tree_stack(), tuple(word))


def step(m: Tsa, c: Configuration, t: Transition) -> Configuration | None:
    """Successor of ``c`` under ``t``, or ``None`` if ``t`` is inapplicable."""
    if c.state != t.source:
        return None
    rest = c.remaining
    if t.read is not None:
        if not rest or rest[0] != t.read:
            return None
        rest = rest[1:]
    if not check_predicate(c.storage, t.predicate):
        return None
    storage = apply_instruction(c.storage, t.instruction)
    if storage is None:
        return None
    return Configuration(t.target, storage, rest)


def replay(m: Tsa, word: Sequence, run: Iterable[int]) -> list[Configuration]:
    """Full configuration trace of ``run`` on ``word`` (which must be consumed exactly)."""
    configs = [initial_configuration(m, word)]
    for i, idx in enumerate(run):
        if not 0 <= idx < len(m.transitions):
            raise ReplayError(i, "unknown", f"step {i}: no transition with index {idx}")
        t = m.transitions[idx]
        cur = configs[-1]
        nxt = step(m, cur, t)
        if nxt is None:
            if t.read is not None and not cur.remaining and cur.state == t.source:
                raise ReplayError(i, "underrun", f"step {i}: {m.transition_name(idx)} reads past the end of input")
            raise ReplayError(i, "inapplicable", f"step {i}: {m.transition_name(idx)} is not applicable")
        configs.append(nxt)
    if configs[-1].remaining:
        raise ReplayError(len(configs) - 1, "leftover", f"input left over: {configs[-1].remaining!r}")
    return configs


def trace_records(m: Tsa, configs: Sequence[Configuration], run: Sequence[int]) -> list[dict]:
    """JSON-ready step records: the initial configuration, then one per transition."""
    records = []
    for i, c in enumerate(configs):
        records.append(
            {
                "step": i,
                "transition": None if i == 0 else run[i - 1] + 1,
                "transition_name": None if i == 0 else m.transition_name(run[i - 1]),
                "state": str(c.state),
                "storage": c.storage.render(),
                "pointer": render_position(c.storage.pointer),
                "remaining": "".join(map(str, c.remaining)),
            }
        )
    return records


# -- restriction counters -----------------------------------------------------


def counter_history(m: Tsa, word: Sequence, run: Sequence[int]) -> list[dict]:
    """Counter maps after every prefix of ``run`` (absent positions are 0)."""
    configs = replay(m, word, run)
    current: dict = {}
    history = [dict(current)]
    for idx, after in zip(run, configs[1:]):
        if moves_up(m.transitions[idx].instruction):
            pos = after.storage.pointer
            current[pos] = current.get(pos, 0) + 1
        history.append(dict(current))
    return history


def counters(m: Tsa, word: Sequence, run: Sequence[int]) -> dict:
    return counter_history(m, word, run)[-1]


def check_run_restriction(m: Tsa, word: Sequence, run: Sequence[int], k: int) -> bool:
    # counters only grow, so the final map holds the maxima
    return all(v <= k for v in counters(m, word, run).values())


# -- bounded search -----------------------------------------------------------


@dataclass
class RecognitionResult:
    run: Run | None
    truncated: bool

    @property
    def accepted(self) -> bool:
        return self.run is not None


def _bump(counts: tuple, pos) -> tuple[tuple, int]:
    d = dict(counts)
    d[pos] = d.get(pos, 0) + 1
    return tuple(sorted(d.items())), d[pos]


def recognize(m: Tsa, word: Sequence, budget: SearchBudget = GENEROUS) -> RecognitionResult:
    """Lexicographically least accepting run within the budget.

    Depth-first search in transition-index order visits runs in lexicographic
    order.  Subtrees already shown to fail with at least the current budget
    are skipped.
    """
    word = tuple(word)
    n = len(word)
    k = budget.restriction_k or m.restriction
    track = k is not None
    inf = float("inf")
    # key -> (steps_left, eps_left) with which the subtree was fully refuted
    dead: dict = {}

    def key_of(state, storage, pos, counts):
        return (state, storage, pos, counts) if track else (state, storage, pos)

    def dominated(key, steps_left, eps_left):
        rec = dead.get(key)
        return rec is not None and steps_left <= rec[0] and eps_left <= rec[1]

    root_state = (m.initial_state, initial_tree_stack(), 0, ())
    # frame: [state, storage, pos, counts, eps_run, steps, next_outgoing_slot, truncated]
    stack = [[*root_state, 0, 0, 0, False]]
    path: list[int] = []
    while stack:
        frame = stack[-1]
        state, storage, pos, counts, eps_run, steps, slot, _ = frame
        if slot == 0 and pos == n and m.is_final(state):
            return RecognitionResult(tuple(path), False)
        out = m.outgoing(state)
        if slot >= len(out):
            stack.pop()
            steps_left = budget.max_steps - steps
            eps_left = budget.max_eps_between_reads - eps_run
            if frame[7]:
                rec = dead.get(key_of(state, storage, pos, counts))
                if rec is None or (steps_left >= rec[0] and eps_left >= rec[1]):
                    dead[key_of(state, storage, pos, counts)] = (steps_left, eps_left)
            else:
                dead[key_of(state, storage, pos, counts)] = (inf, inf)
            if stack:
                stack[-1][7] = stack[-1][7] or frame[7]
                path.pop()
            continue
        frame[6] = slot + 1
        idx = out[slot]
        t = m.transitions[idx]
        npos = pos
        if t.read is not None:
            if pos >= n or word[pos] != t.read:
                continue
            npos = pos + 1
        if not check_predicate(storage, t.predicate):
            continue
        nstore = apply_instruction(storage, t.instruction)
        if nstore is None:
            continue
        if budget.max_pushes is not None and len(nstore.nodes) - 1 > budget.max_pushes:
            frame[7] = True
            continue
        ncounts = counts
        if track and moves_up(t.instruction):
            ncounts, value = _bump(counts, nstore.pointer)
            if value > k:
                continue
        neps = 0 if t.read is not None else eps_run + 1
        if steps + 1 > budget.max_steps or neps > budget.max_eps_between_reads:
            frame[7] = True
            continue
        nkey = key_of(t.target, nstore, npos, ncounts)
        if dominated(nkey, budget.max_steps - steps - 1, budget.max_eps_between_reads - neps):
            if dead[nkey][0] != inf:
                frame[7] = True
            continue
        path.append(idx)
        stack.append([t.target, nstore, npos, ncounts, neps, steps + 1, 0, False])
    return RecognitionResult(None, _root_truncated(dead, key_of(*root_state), inf))


def _root_truncated(dead, root_key, inf) -> bool:
    rec = dead.get(root_key)
    return rec is None or rec[0] != inf


@dataclass
class Exploration:
    """Outcome of a breadth-first sweep over configurations."""

    words: set
    witnesses: dict  # word -> first accepting run found
    truncated: bool
    snf_violation: Run | None = None
    snf_violation_word: tuple | None = None


def _unlink(link) -> tuple:
    out = []
    while link is not None:
        link, idx = link
        out.append(idx)
    return tuple(reversed(out))


def explore(
    m: Tsa,
    max_len: int,
    budget: SearchBudget = GENEROUS,
    *,
    stop_on_snf_violation=False,
    lower_bound: Callable[[State, TreeStack], float] | None = None,
) -> Exploration:
    """Breadth-first search over (state, storage, emitted word) nodes.

    Emitted words longer than ``max_len`` are cut (exactly: words only grow).
    Step, epsilon and tree-size budgets cut branches and mark the result as
    truncated.  ``lower_bound``, if given, must never exceed the number of
    symbols any accepting continuation still reads; configurations that
    cannot finish within ``max_len`` are then dropped without truncation.
    """
    k = budget.restriction_k or m.restriction
    track = k is not None
    result = Exploration(set(), {}, False)
    start = (m.initial_state, initial_tree_stack(), (), ())
    best_eps: dict = {}
    best_eps[start] = 0
    # queue entries: (state, storage, emitted, counts, eps_run, steps, run_link)
    queue = deque([(*start, 0, 0, None)])
    while queue:
        state, storage, emitted, counts, eps_run, steps, link = queue.popleft()
        if m.is_final(state):
            if emitted not in result.witnesses:
                result.words.add(emitted)
                result.witnesses[emitted] = _unlink(link)
            if storage.pointer != () and result.snf_violation is None:
                result.snf_violation = _unlink(link)
                result.snf_violation_word = emitted
                if stop_on_snf_violation:
                    return result
        for idx in m.outgoing(state):
            t = m.transitions[idx]
            if t.read is not None and len(emitted) >= max_len:
                continue
            if not check_predicate(storage, t.predicate):
                continue
            nstore = apply_instruction(storage, t.instruction)
            if nstore is None:
                continue
            if budget.max_pushes is not None and len(nstore.nodes) - 1 > budget.max_pushes:
                result.truncated = True
                continue
            ncounts = counts
            if track and moves_up(t.instruction):
                ncounts, value = _bump(counts, nstore.pointer)
                if value > k:
                    continue
            neps = 0 if t.read is not None else eps_run + 1
            if steps + 1 > budget.max_steps or neps > budget.max_eps_between_reads:
                result.truncated = True
                continue
            nemitted = emitted if t.read is None else emitted + (t.read,)
            if lower_bound is not None and len(nemitted) + lower_bound(t.target, nstore) > max_len:
                continue
            key = (t.target, nstore, nemitted, ncounts)
            seen = best_eps.get(key)
            if seen is not None and seen <= neps:
                continue
            best_eps[key] = neps
            queue.append((t.target, nstore, nemitted, ncounts, neps, steps + 1, (link, idx)))
    return result


def enumerate_bounded_automaton_language(m: Tsa, max_len: int, budget: SearchBudget = GENEROUS) -> Exploration:
    """All words of length <= max_len accepted within the budget, with witness runs."""
    return explore(m, max_len, budget)


def automaton_language(m: Tsa, max_len: int, budget: SearchBudget = GENEROUS) -> set:
    return enumerate_bounded_automaton_language(m, max_len, budget).words
