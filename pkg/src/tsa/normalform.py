"""Normal forms for tree stack automata: cycle removal and stack normal form."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Hashable

from .automaton import GENEROUS, SearchBudget, Transition, Tsa, explore
from .treestack import (
    BOTTOM,
    DOWN,
    ID,
    ROOT,
    TRUE,
    Always,
    Bottom,
    Equals,
    Id,
    Push,
    Set,
    Up,
    admits,
)

Vertex = tuple  # (state, symbol)


def stay_edges(m: Tsa) -> dict[Vertex, list[tuple[int, Vertex]]]:
    """Adjacency of the stay graph on (state, symbol) vertices.

    An edge follows a transition with an id- or set-instruction whose
    predicate admits the symbol; at the root only id applies.
    """
    symbols = [ROOT, *m.stack_alphabet]
    edges: dict[Vertex, list] = {(q, g): [] for q in m.states for g in symbols}
    for idx, t in enumerate(m.transitions):
        f = t.instruction
        if not isinstance(f, (Id, Set)):
            continue
        for g in symbols:
            if not admits(t.predicate, g):
                continue
            if g == ROOT:
                if isinstance(f, Id):
                    edges.setdefault((t.source, g), []).append((idx, (t.target, g)))
                continue
            after = g if isinstance(f, Id) else f.symbol
            edges.setdefault((t.source, g), []).append((idx, (t.target, after)))
    return edges


@dataclass(frozen=True)
class LoopWitness:
    state: Hashable
    symbol: Hashable
    run: tuple[int, ...]


def _shortest_return(edges, start: Vertex) -> tuple[int, ...] | None:
    # BFS in transition order: the first path found is the lexicographically
    # least among the shortest ones
    parent: dict[Vertex, tuple] = {}
    queue = deque()
    for idx, v in edges.get(start, ()):
        if v == start:
            return (idx,)
        if v not in parent:
            parent[v] = (None, idx)
            queue.append(v)
    while queue:
        u = queue.popleft()
        for idx, v in edges.get(u, ()):
            if v == start:
                path = [idx]
                w = u
                while w is not None:
                    prev, i = parent[w]
                    path.append(i)
                    w = prev
                return tuple(reversed(path))
            if v not in parent:
                parent[v] = (u, idx)
                queue.append(v)
    return None


def find_loop(m: Tsa) -> LoopWitness | None:
    """Shortest nonempty stay run returning to its start vertex, if any."""
    edges = stay_edges(m)
    best = None
    for start in edges:
        path = _shortest_return(edges, start)
        if path is None:
            continue
        cand = (len(path), path, start)
        if best is None or cand[:2] < best[:2]:
            best = cand
    if best is None:
        return None
    _, path, (q, g) = best
    return LoopWitness(q, g, path)


def is_cycle_free(m: Tsa) -> tuple[bool, LoopWitness | None]:
    w = find_loop(m)
    return w is None, w


def _fresh(base: str, taken: set) -> str:
    name = base
    n = 1
    while name in taken:
        n += 1
        name = f"{base}{n}"
    taken.add(name)
    return name


def fresh_child_index(m: Tsa) -> int:
    used = [t.instruction.child for t in m.transitions if isinstance(t.instruction, (Push, Up))]
    return 1 + max(used, default=0)


def remove_loop(m: Tsa, loop: LoopWitness) -> Tsa:
    """One round of the loop-unfolding construction for ``loop``.

    Iterations of the loop are replayed on a chain of fresh nodes pushed
    above the current position, marked ``*`` (more to unwind) and ``#``
    (one step from home), after which the automaton walks back down.  The
    last transition of the loop is redirected to a copy of the loop's
    start state that cannot begin the loop again.
    """
    delta = m.transitions
    first, last = loop.run[0], loop.run[-1]
    n = len(loop.run)
    q = loop.state
    taken_states = set(m.states)
    primes = [_fresh(f"{q}'{i}", taken_states) for i in range(n)]
    q_up = _fresh(f"{q}↑", taken_states)
    q_down = _fresh(f"{q}↓", taken_states)
    q_tilde = _fresh(f"{q}~", taken_states)
    taken_syms = set(m.stack_alphabet) | {ROOT}
    star = _fresh("*", taken_syms)
    hash_ = _fresh("#", taken_syms)
    j = fresh_child_index(m)
    # restrict the entry to the loop's symbol so that iterations only start
    # where the original loop could run
    entry = BOTTOM if loop.symbol == ROOT else Equals(loop.symbol)

    new: list[Transition] = [t for i, t in enumerate(delta) if i != last]
    for i, t in enumerate(delta):
        if t.source == q and i != first:
            new.append(Transition(q_tilde, t.read, t.predicate, t.instruction, t.target, _name(t, "~")))
    tn = delta[last]
    new.append(Transition(tn.source, tn.read, tn.predicate, tn.instruction, q_tilde, _name(tn, "~")))
    new.append(Transition(q, None, entry, Push(j, hash_), q_up, "τ↑"))
    new.append(Transition(q_up, None, TRUE, Push(j, star), primes[0], "τ'0"))
    reads = [delta[i].read for i in loop.run]
    for kappa in range(1, n):
        new.append(Transition(primes[kappa - 1], reads[kappa - 1], TRUE, ID, primes[kappa], f"τ'{kappa}"))
    new.append(Transition(primes[n - 1], reads[n - 1], TRUE, ID, q_up, f"τ'{n}"))
    new.append(Transition(q_up, None, TRUE, ID, q_down, "τ'"))
    new.append(Transition(q_down, None, Equals(star), DOWN, q_down, "τ↓a"))
    new.append(Transition(q_down, None, Equals(hash_), DOWN, q, "τ↓b"))

    finals = list(m.final_states)
    if m.is_final(q):
        finals.append(q_tilde)
    return Tsa(
        (*m.states, *primes, q_up, q_down, q_tilde),
        (*m.stack_alphabet, star, hash_),
        m.terminals,
        m.initial_state,
        new,
        finals,
        m.restriction,
    )


def _name(t: Transition, suffix: str) -> str | None:
    return f"{t.name}{suffix}" if t.name else None


class CycleRemovalError(RuntimeError):
    def __init__(self, witness: LoopWitness, iterations: int):
        super().__init__(f"automaton still has a stay loop after {iterations} iterations: {witness}")
        self.witness = witness
        self.iterations = iterations


@dataclass
class CycleRemoval:
    automaton: Tsa
    iterations: int


def remove_cycles(m: Tsa, max_iterations: int = 100) -> CycleRemoval:
    for i in range(max_iterations + 1):
        w = find_loop(m)
        if w is None:
            return CycleRemoval(m, i)
        if i == max_iterations:
            raise CycleRemovalError(w, i)
        m = remove_loop(m, w)
    raise AssertionError("unreachable")


class SnfStatus(Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass
class SnfCheck:
    status: SnfStatus
    witness: tuple | None = None
    word: tuple | None = None


def is_stack_normal_form_bounded(m: Tsa, max_len: int, budget: SearchBudget = GENEROUS) -> SnfCheck:
    """Look for a reachable final state with the pointer away from the root."""
    res = explore(m, max_len, budget, stop_on_snf_violation=True)
    if res.snf_violation is not None:
        return SnfCheck(SnfStatus.VIOLATED, res.snf_violation, res.snf_violation_word)
    if res.truncated:
        return SnfCheck(SnfStatus.INCONCLUSIVE)
    return SnfCheck(SnfStatus.HOLDS)


def to_stack_normal_form(m: Tsa) -> Tsa:
    """Walk down to the root from every final state before accepting."""
    taken = set(m.states)
    q_down = _fresh("q↓", taken)
    q_f = _fresh("q_f", taken)
    new = list(m.transitions)
    for q in m.final_states:
        new.append(Transition(q, None, TRUE, ID, q_down, f"snf({q})"))
    new.append(Transition(q_down, None, TRUE, DOWN, q_down, "snf↓"))
    new.append(Transition(q_down, None, BOTTOM, ID, q_f, "snf⊥"))
    return Tsa(
        (*m.states, q_down, q_f),
        m.stack_alphabet,
        m.terminals,
        m.initial_state,
        new,
        (q_f,),
        m.restriction,
    )
