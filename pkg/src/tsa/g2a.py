"""Compile a PMCFG into a tree stack automaton that guesses derivations.

States are positions ``<r, i, j>`` inside rule components (plus the
``+``/``-`` variants used while moving between tree nodes) and the box
``□``.  The tree stack holds the derivation being guessed: a node stores
the position in its parent's rule to return to while it is active, and its
own rule once suspended.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automaton import Transition, Tsa, replay
from .grammar import (
    Derivation,
    Pmcfg,
    Variable,
    classify,
    evaluate_derivation,
    restrict_to_productive,
    validate_grammar,
)
from .treestack import DOWN, ID, TRUE, Equals, Push, Set, TreeStack, Up


@dataclass(frozen=True)
class Box:
    def __str__(self):
        return "□"


BOX = Box()


@dataclass(frozen=True)
class RuleSymbol:
    label: str

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class RulePosition:
    """Position right after the ``item``-th symbol of component ``comp`` of a rule."""

    rule: str
    comp: int
    item: int

    def __str__(self):
        return f"⟨{self.rule},{self.comp},{self.item}⟩"


@dataclass(frozen=True)
class CompiledState:
    base: RulePosition | Box
    mark: str = ""  # "", "+", "-" or "✓" (accepting, box only)

    def __str__(self):
        return f"{self.base}{'−' if self.mark == '-' else self.mark}"


def _st(base, mark=""):
    return CompiledState(base, mark)


# Accepting in the initial state would make the empty run valid, so the
# final suspend moves to a separate accepting copy of the box.
ACCEPT = CompiledState(BOX, "✓")


class GrammarError(ValueError):
    pass


def grammar_to_automaton(g: Pmcfg, *, productive_only: bool = False) -> Tsa:
    """The automaton recognising L(G) (exactly, when all nonterminals are productive).

    With ``productive_only`` the grammar is first restricted to productive
    nonterminals so that language equality holds.
    """
    problems = validate_grammar(g)
    if problems:
        raise GrammarError("; ".join(problems))
    labels = g.labels()
    rules = list(zip(labels, g.rules))
    if productive_only:
        keep = {id(r) for r in restrict_to_productive(g).rules}
        rules = [(lab, r) for lab, r in rules if id(r) in keep]
    by_lhs: dict[str, list] = {}
    for lab, r in rules:
        by_lhs.setdefault(r.lhs, []).append((lab, r))

    delta: dict[Transition, None] = {}

    def emit(source, read, pred, instr, target, name):
        t = Transition(source, read, pred, instr, target, name)
        delta.setdefault(t)

    for lab, r in rules:
        if r.lhs in g.initials:
            u = r.comp.components[0]
            emit(_st(BOX), None, TRUE, Push(1, BOX), _st(RulePosition(lab, 1, 0)), f"init({lab})")
            emit(
                _st(RulePosition(lab, 1, len(u))), None, Equals(BOX), Set(RuleSymbol(lab)), _st(BOX, "-"),
                f"suspend1({lab},1,□)",
            )
            emit(_st(BOX, "-"), None, TRUE, DOWN, ACCEPT, "suspend2(□)")
    for lab, r in rules:
        for i, comp in enumerate(r.comp.components, 1):
            for j, item in enumerate(comp, 1):
                before = RulePosition(lab, i, j - 1)
                here = RulePosition(lab, i, j)
                if not isinstance(item, Variable):
                    emit(_st(before), item, TRUE, ID, _st(here), f"read({lab},{i},{j})")
                    continue
                kappa, m = item.arg_index, item.comp_index
                for lab2, r2 in by_lhs.get(r.rhs[kappa - 1], []):
                    v_m = r2.comp.components[m - 1]
                    start = _st(RulePosition(lab2, m, 0))
                    emit(_st(before), None, TRUE, Push(kappa, here), start, f"call({lab},{i},{j},{lab2})")
                    emit(_st(before), None, TRUE, Up(kappa), _st(here, "+"), f"resume1({lab},{i},{j})")
                    emit(_st(here, "+"), None, Equals(RuleSymbol(lab2)), Set(here), start,
                         f"resume2({lab},{i},{j},{lab2})")
                    emit(_st(RulePosition(lab2, m, len(v_m))), None, Equals(here), Set(RuleSymbol(lab2)),
                         _st(here, "-"), f"suspend1({lab2},{m},{here})")
                    emit(_st(here, "-"), None, TRUE, DOWN, _st(here), f"suspend2({here})")

    positions = [
        RulePosition(lab, i, j)
        for lab, r in rules
        for i, comp in enumerate(r.comp.components, 1)
        for j in range(len(comp) + 1)
    ]
    states = [_st(BOX), _st(BOX, "+"), _st(BOX, "-"), ACCEPT]
    for p in positions:
        states += [_st(p), _st(p, "+"), _st(p, "-")]
    gamma = [BOX, *(RuleSymbol(lab) for lab, _ in rules), *positions]
    return Tsa(
        states,
        gamma,
        tuple(sorted(g.terminals, key=repr)),
        _st(BOX),
        tuple(delta),
        (ACCEPT,),
        restriction_bound(g),
    )


def restriction_bound(g: Pmcfg) -> int | None:
    """k for a k-MCFG (the compiled automaton is then k-restricted), else None."""
    c = classify(g)
    return c.fan_out if c.is_mcfg else None


@dataclass
class Extraction:
    derivation: Derivation
    complete: bool
    value: tuple | None = None


def extract_derivation(g: Pmcfg, final_storage: TreeStack) -> Extraction:
    """Read the guessed derivation off the first subtree of an accepting storage."""
    by_label = dict(zip(g.labels(), g.rules))

    def build(pos):
        sym = final_storage.nodes[pos]
        if not isinstance(sym, RuleSymbol) and str(sym) not in by_label:
            raise ValueError(f"node {pos} holds {sym}, not a rule; storage is not final")
        rule = by_label[str(sym)]
        kids = tuple(
            build(pos + (k,)) if pos + (k,) in final_storage.nodes else None
            for k in range(1, len(rule.rhs) + 1)
        )
        return Derivation(rule, kids)

    if (1,) not in final_storage.nodes:
        raise ValueError("storage has no derivation subtree")
    d = build((1,))
    if classify(g).is_nondeleting:
        if not d.is_complete():
            raise ValueError("non-deleting grammar but extracted tree is partial")
        return Extraction(d, True, evaluate_derivation(g, d))
    return Extraction(d, d.is_complete())


def rule_constancy_violations(m: Tsa, word, run) -> list[str]:
    """Positions where states of two different rules were seen (should be none).

    Only plain rule-position states count; the ``+``/``-`` states carry the
    parent's position while the pointer sits on the child.
    """
    configs = replay(m, word, run)
    seen: dict = {}
    problems = []
    for i, c in enumerate(configs):
        pos = c.storage.pointer
        st = c.state
        if not pos or not isinstance(st, CompiledState) or st.mark or isinstance(st.base, Box):
            continue
        rule = st.base.rule
        if seen.setdefault(pos, rule) != rule:
            problems.append(f"step {i}: position {pos} in rule {rule}, earlier {seen[pos]}")
    return problems


def top_level_shape_ok(m: Tsa, run) -> bool:
    """Accepting runs begin with an init and end with the final suspend, both reading nothing."""
    if not run:
        return False
    first, last = m.transitions[run[0]], m.transitions[run[-1]]
    return (
        (first.name or "").startswith("init(")
        and last.name == "suspend2(□)"
        and first.read is None
        and last.read is None
    )


def minimal_component_lengths(g: Pmcfg) -> dict[str, tuple[float, ...]]:
    """Least length of each component over all complete derivations (inf if none)."""
    inf = float("inf")
    best = {n: [inf] * s for n, s in g.nonterminals.items()}
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            for c, comp in enumerate(r.comp.components):
                n = sum(best[r.rhs[x.arg_index - 1]][x.comp_index - 1] if isinstance(x, Variable) else 1 for x in comp)
                if n < best[r.lhs][c]:
                    best[r.lhs][c] = n
                    changed = True
    return {n: tuple(v) for n, v in best.items()}


def pending_read_bound(g: Pmcfg):
    """A lower bound on the symbols the compiled automaton must still read.

    Every rule position on the path from the root to the pointer (and the one
    in the current state) is a component that will be finished later; what
    is left of it reads at least its terminals plus the shortest yields of
    its variables.  Suitable as ``lower_bound`` for ``explore``.
    """
    lengths = minimal_component_lengths(g)
    rest: dict[RulePosition, float] = {}
    for lab, r in zip(g.labels(), g.rules):
        for i, comp in enumerate(r.comp.components, 1):
            acc = 0
            rest[RulePosition(lab, i, len(comp))] = 0
            for j in range(len(comp), 0, -1):
                x = comp[j - 1]
                acc += lengths[r.rhs[x.arg_index - 1]][x.comp_index - 1] if isinstance(x, Variable) else 1
                rest[RulePosition(lab, i, j - 1)] = acc

    def bound(state, storage: TreeStack) -> float:
        total = rest.get(state.base, 0) if isinstance(state, CompiledState) else 0
        pos = storage.pointer
        nodes = storage.nodes
        for n in range(1, len(pos) + 1):
            total += rest.get(nodes[pos[:n]], 0)
        return total

    return bound
