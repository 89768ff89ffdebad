"""Shared test helpers: fixture paths, independent language oracles, random grammars."""

from __future__ import annotations

import random
from itertools import product
from pathlib import Path

from tsa.grammar import CompositionFunction, Pmcfg, Rule, Variable, productive_nonterminals, restrict_to_productive

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def anbncndn_words(max_len: int) -> set[str]:
    return {"a" * n + "b" * n + "c" * n + "d" * n for n in range(max_len // 4 + 1)}


def aibjcidj_words(max_len: int, *, positive: bool = True) -> set[str]:
    lo = 1 if positive else 0
    return {
        "a" * i + "b" * j + "c" * i + "d" * j
        for i, j in product(range(lo, max_len + 1), repeat=2)
        if 2 * i + 2 * j <= max_len
    }


def random_mcfg(rng: random.Random, max_nonterminals: int = 4, max_rules: int = 6, terminals: str = "ab") -> Pmcfg:
    """A random linear, non-deleting 2-MCFG whose initial nonterminal is productive.

    Rules of rank at most one always emit a terminal: terminal-free chain
    rules make the number of distinct derivation trees (and hence tree stack
    configurations) explode without adding words.
    """
    while True:
        n = rng.randint(1, max_nonterminals)
        names = ["S"] + [chr(ord("A") + i) for i in range(n - 1)]
        sorts = {"S": 1, **{x: rng.randint(1, 2) for x in names[1:]}}
        rules = []
        for i in range(rng.randint(1, max_rules)):
            lhs = names[0] if i == 0 else rng.choice(names)
            rank = rng.choice((0, 0, 1, 1, 2))
            rhs = tuple(rng.choice(names) for _ in range(rank))
            items = [Variable(a, c) for a, x in enumerate(rhs, 1) for c in range(1, sorts[x] + 1)]
            items += [rng.choice(terminals) for _ in range(rng.randint(0 if rank == 2 else 1, 2))]
            rng.shuffle(items)
            comps = [[] for _ in range(sorts[lhs])]
            for item in items:
                comps[rng.randrange(len(comps))].append(item)
            arg_sorts = tuple(sorts[x] for x in rhs)
            rules.append(Rule(lhs, CompositionFunction(arg_sorts, comps), rhs, f"r{i + 1}"))
        g = Pmcfg(sorts, frozenset(terminals), frozenset({"S"}), tuple(rules))
        if "S" in productive_nonterminals(g):
            return restrict_to_productive(g)


def brute_force_language(g: Pmcfg, max_len: int, max_nodes: int) -> set[str]:
    """Words of complete derivations with at most ``max_nodes`` nodes, by plain recursion.

    Deliberately naive: derivations are built tree by tree and evaluated by
    string substitution, sharing no code with the library's enumerator.
    """

    def tuples(nt: str, budget: int) -> set[tuple[str, ...]]:
        out = set()
        if budget < 1:
            return out
        for r in g.rules:
            if r.lhs != nt:
                continue
            for args in children(r.rhs, budget - 1):
                out.add(tuple(substitute(comp, args) for comp in r.comp.components))
        return out

    def children(rhs, budget):
        if not rhs:
            yield ()
            return
        for used in range(1, budget + 1):
            for first in tuples(rhs[0], used):
                for rest in children(rhs[1:], budget - used):
                    yield (first, *rest)

    def substitute(comp, args) -> str:
        out = []
        for item in comp:
            if isinstance(item, Variable):
                out.append(args[item.arg_index - 1][item.comp_index - 1])
            else:
                out.append(item)
        return "".join(out)

    words = set()
    for s in g.initials:
        words |= {t[0] for t in tuples(s, max_nodes) if len(t[0]) <= max_len}
    return words
