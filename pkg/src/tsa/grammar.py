"""Parallel multiple context-free grammars.

A grammar is a finite set of rules ``A -> f(A1, ..., Al)`` where ``f`` is a
composition function given as a tuple of templates over terminals and
variables ``x_i^j`` (the j-th component of the i-th argument).  Words are
represented as tuples of terminal symbols so that terminals may be arbitrary
hashable tokens (characters for hand-written grammars, transition indices for
run grammars).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

Terminal = Hashable
Word = tuple


@dataclass(frozen=True, order=True)
class Variable:
    """The variable ``x_{arg_index}^{comp_index}``; both indices start at 1."""

    arg_index: int
    comp_index: int

    def __post_init__(self):
        if self.arg_index < 1 or self.comp_index < 1:
            raise ValueError(f"variable indices must be positive: {self!r}")

    def __str__(self):
        return f"x{self.arg_index}.{self.comp_index}"


Item = Union[Variable, Terminal]


@dataclass(frozen=True)
class CompositionFunction:
    arg_sorts: tuple[int, ...]
    components: tuple[tuple[Item, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "arg_sorts", tuple(self.arg_sorts))
        object.__setattr__(self, "components", tuple(tuple(c) for c in self.components))

    @property
    def fan_out(self) -> int:
        return len(self.components)

    @property
    def rank(self) -> int:
        return len(self.arg_sorts)

    def variables(self) -> Iterator[Variable]:
        for comp in self.components:
            for item in comp:
                if isinstance(item, Variable):
                    yield item

    def terminals(self) -> Iterator[Terminal]:
        for comp in self.components:
            for item in comp:
                if not isinstance(item, Variable):
                    yield item

    def out_of_range(self) -> list[Variable]:
        return [
            v
            for v in self.variables()
            if v.arg_index > self.rank or v.comp_index > self.arg_sorts[v.arg_index - 1]
        ]

    def is_linear(self) -> bool:
        seen = list(self.variables())
        return len(seen) == len(set(seen))

    def is_nondeleting(self) -> bool:
        used = set(self.variables())
        return all(
            Variable(i, j) in used
            for i, s in enumerate(self.arg_sorts, 1)
            for j in range(1, s + 1)
        )

    def __call__(self, *args: Sequence[Word]) -> tuple[Word, ...]:
        if len(args) != self.rank:
            raise ValueError(f"expected {self.rank} arguments, got {len(args)}")
        for i, (arg, s) in enumerate(zip(args, self.arg_sorts), 1):
            if len(arg) != s:
                raise ValueError(f"argument {i} has {len(arg)} components, sort is {s}")
        out = []
        for comp in self.components:
            word: list = []
            for item in comp:
                if isinstance(item, Variable):
                    word.extend(args[item.arg_index - 1][item.comp_index - 1])
                else:
                    word.append(item)
            out.append(tuple(word))
        return tuple(out)

    def __str__(self):
        def render(comp):
            return " ".join(str(item) for item in comp) or "ε"

        return "[" + ", ".join(render(c) for c in self.components) + "]"


@dataclass(frozen=True)
class Rule:
    lhs: str
    comp: CompositionFunction
    rhs: tuple[str, ...] = ()
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))

    def __str__(self):
        head = f"{self.label}: " if self.label else ""
        return f"{head}{self.lhs} -> {self.comp}({', '.join(self.rhs)})"


@dataclass(frozen=True)
class Pmcfg:
    nonterminals: Mapping[str, int]
    terminals: frozenset
    initials: frozenset
    rules: tuple[Rule, ...]

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", dict(self.nonterminals))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "initials", frozenset(self.initials))
        object.__setattr__(self, "rules", tuple(self.rules))

    def __hash__(self):
        return hash((self.rules, self.initials))

    def sort(self, nonterminal: str) -> int:
        return self.nonterminals[nonterminal]

    def rules_for(self, nonterminal: str) -> list[Rule]:
        return [r for r in self.rules if r.lhs == nonterminal]

    def label(self, index: int) -> str:
        """Name of the rule at ``index``: its own label, else ``r<index+1>``."""
        return self.rules[index].label or f"r{index + 1}"

    def labels(self) -> list[str]:
        return [self.label(i) for i in range(len(self.rules))]

    @classmethod
    def build(
        cls,
        rules: Iterable[Rule],
        initials: Iterable[str],
        nonterminals: Mapping[str, int] | None = None,
        terminals: Iterable[Terminal] | None = None,
    ) -> "Pmcfg":
        """Assemble a grammar, taking sorts from rule heads where not given."""
        rules = tuple(rules)
        sorts = dict(nonterminals or {})
        for r in rules:
            sorts.setdefault(r.lhs, r.comp.fan_out)
        for r in rules:
            for a, s in zip(r.rhs, r.comp.arg_sorts):
                sorts.setdefault(a, s)
        for s in initials:
            sorts.setdefault(s, 1)
        if terminals is None:
            terminals = {t for r in rules for t in r.comp.terminals()}
        return cls(sorts, frozenset(terminals), frozenset(initials), rules)


@dataclass(frozen=True)
class Derivation:
    """A rule-labelled tree; ``children[i]`` derives ``rule.rhs[i]``.

    Partial trees (as extracted from automaton storage for deleting grammars)
    use ``None`` for missing children.
    """

    rule: Rule
    children: tuple["Derivation | None", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def is_complete(self) -> bool:
        return len(self.children) == len(self.rule.rhs) and all(
            c is not None and c.is_complete() for c in self.children
        )

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children if c is not None)

    def render(self, label=lambda r: r.label or "?") -> str:
        if not self.rule.rhs:
            return label(self.rule)
        kids = ", ".join("_" if c is None else c.render(label) for c in self.children)
        return f"{label(self.rule)}({kids})"


class DerivationError(ValueError):
    pass


@dataclass(frozen=True)
class Classification:
    is_mcfg: bool
    is_nondeleting: bool
    fan_out: int


def validate_grammar(g: Pmcfg) -> list[str]:
    """Return human-readable well-formedness violations (empty if valid)."""
    problems = []
    for s in sorted(g.initials):
        if s not in g.nonterminals:
            problems.append(f"initial {s}: undeclared nonterminal")
        elif g.nonterminals[s] != 1:
            problems.append(f"initial {s}: initial not in N₁ (sort {g.nonterminals[s]})")
    for n, s in g.nonterminals.items():
        if s < 1:
            problems.append(f"nonterminal {n}: sort must be positive, got {s}")
    seen_labels = set()
    for idx, r in enumerate(g.rules):
        name = g.label(idx)
        if name in seen_labels:
            problems.append(f"rule {name}: duplicate rule label")
        seen_labels.add(name)
        f = r.comp
        if r.lhs not in g.nonterminals:
            problems.append(f"rule {name}: undeclared nonterminal {r.lhs}")
        elif g.nonterminals[r.lhs] != f.fan_out:
            problems.append(
                f"rule {name}: fan-out {f.fan_out} does not match sort {g.nonterminals[r.lhs]} of {r.lhs}"
            )
        if len(r.rhs) != f.rank:
            problems.append(f"rule {name}: {len(r.rhs)} rhs nonterminals but rank {f.rank}")
        for i, (a, s) in enumerate(zip(r.rhs, f.arg_sorts), 1):
            if a not in g.nonterminals:
                problems.append(f"rule {name}: undeclared nonterminal {a}")
            elif g.nonterminals[a] != s:
                problems.append(
                    f"rule {name}: argument {i} has sort {s} but {a} has sort {g.nonterminals[a]}"
                )
        for v in f.out_of_range():
            problems.append(f"rule {name}: variable index out of range: {v}")
        for t in f.terminals():
            if t not in g.terminals:
                problems.append(f"rule {name}: unknown terminal {t!r}")
    return problems


def classify(g: Pmcfg) -> Classification:
    return Classification(
        is_mcfg=all(r.comp.is_linear() for r in g.rules),
        is_nondeleting=all(r.comp.is_nondeleting() for r in g.rules),
        fan_out=max((r.comp.fan_out for r in g.rules), default=1),
    )


def evaluate_derivation(g: Pmcfg, d: Derivation) -> tuple[Word, ...]:
    """Evaluate ``d`` bottom-up to its tuple of words."""
    r = d.rule
    if len(d.children) != len(r.rhs):
        raise DerivationError(
            f"rule {r} has {len(r.rhs)} rhs nonterminals but node has {len(d.children)} children"
        )
    args = []
    for i, (child, want) in enumerate(zip(d.children, r.rhs), 1):
        if child is None:
            raise DerivationError(f"child {i} of {r} is missing")
        if child.rule.lhs != want:
            raise DerivationError(f"child {i} of {r} derives {child.rule.lhs}, expected {want}")
        if g.nonterminals.get(want, child.rule.comp.fan_out) != child.rule.comp.fan_out:
            raise DerivationError(f"sort mismatch for {want}")
        args.append(evaluate_derivation(g, child))
    return r.comp(*args)


# Marks a component that already exceeds the length bound.  Such components
# can only be dropped by deleting rules; if they reach the root the word is
# discarded, so replacing them by a marker keeps the enumeration exact.
_LONG = None


def _apply_bounded(f: CompositionFunction, args, max_len: int):
    out = []
    for comp in f.components:
        word: list = []
        for item in comp:
            if isinstance(item, Variable):
                piece = args[item.arg_index - 1][item.comp_index - 1]
                if piece is _LONG:
                    word = None
                    break
                word.extend(piece)
            else:
                word.append(item)
            if len(word) > max_len:
                word = None
                break
        out.append(_LONG if word is None else tuple(word))
    return tuple(out)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ways to write ``total`` as an ordered sum of ``parts`` positive ints."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def enumerate_bounded_language(g: Pmcfg, max_len: int, max_derivation_nodes: int) -> set[Word]:
    """Words of length <= max_len with a complete derivation of <= max_derivation_nodes nodes."""
    # by_size[A][n]: tuples derivable from A with exactly n nodes
    by_size: dict[str, list[set]] = defaultdict(lambda: [set() for _ in range(max_derivation_nodes + 1)])
    for n in range(1, max_derivation_nodes + 1):
        for r in g.rules:
            rank = len(r.rhs)
            for split in _compositions(n - 1, rank):
                pools = [by_size[a][k] for a, k in zip(r.rhs, split)]
                if any(not p for p in pools):
                    continue
                bucket = by_size[r.lhs][n]
                for args in product(*pools):
                    bucket.add(_apply_bounded(r.comp, args, max_len))
    words = set()
    for s in g.initials:
        if s not in by_size:
            continue
        for bucket in by_size[s]:
            for tup in bucket:
                if len(tup) == 1 and tup[0] is not _LONG:
                    words.add(tup[0])
    return words


def productive_nonterminals(g: Pmcfg) -> set[str]:
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            if r.lhs not in productive and all(a in productive for a in r.rhs):
                productive.add(r.lhs)
                changed = True
    return productive


def restrict_to_productive(g: Pmcfg) -> Pmcfg:
    """Drop every rule that mentions an unproductive nonterminal."""
    good = productive_nonterminals(g)
    rules = tuple(r for r in g.rules if r.lhs in good and all(a in good for a in r.rhs))
    return Pmcfg(g.nonterminals, g.terminals, g.initials, rules)


def reachable_nonterminals(g: Pmcfg) -> set[str]:
    seen = set(g.initials)
    stack = list(g.initials)
    while stack:
        a = stack.pop()
        for r in g.rules_for(a):
            for b in r.rhs:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
    return seen


def trim(g: Pmcfg) -> Pmcfg:
    """Keep only productive rules whose lhs is reachable from an initial."""
    g = restrict_to_productive(g)
    live = reachable_nonterminals(g)
    rules = tuple(r for r in g.rules if r.lhs in live)
    sorts = {n: s for n, s in g.nonterminals.items() if n in live}
    return Pmcfg(sorts, g.terminals, g.initials, rules)


def words_to_strings(words: Iterable[Word]) -> set[str]:
    return {"".join(map(str, w)) for w in words}
