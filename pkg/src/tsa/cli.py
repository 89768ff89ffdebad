"""Command-line front end.

Exit codes: 0 success or equivalent, 1 inequivalent / rejected / violated,
2 usage or input error, 3 search truncated so the answer is inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .a2g import PreconditionError, automaton_to_grammar
from .automaton import ReplayError, SearchBudget, Tsa, check_run_restriction, explore, recognize, replay, trace_records
from .formats import FormatError, parse_automaton_file, parse_grammar_file, print_automaton, print_grammar
from .g2a import GrammarError, grammar_to_automaton
from .grammar import Pmcfg, classify, enumerate_bounded_language, productive_nonterminals, words_to_strings
from .normalform import (
    CycleRemovalError,
    SnfStatus,
    is_cycle_free,
    is_stack_normal_form_bounded,
    remove_cycles,
    to_stack_normal_form,
)

OK, FAILED, USAGE, TRUNCATED = 0, 1, 2, 3


@dataclass
class EquivalenceReport:
    max_len: int
    only_in_grammar: set[str] = field(default_factory=set)
    only_in_automaton: set[str] = field(default_factory=set)
    truncated: bool = False

    @property
    def equivalent(self) -> bool:
        return not self.only_in_grammar and not self.only_in_automaton and not self.truncated

    @property
    def exit_code(self) -> int:
        if self.only_in_grammar or self.only_in_automaton:
            return FAILED
        return TRUNCATED if self.truncated else OK

    def to_json(self) -> dict:
        return {
            "max_len": self.max_len,
            "equivalent": self.equivalent,
            "only_in_grammar": _sorted_words(self.only_in_grammar),
            "only_in_automaton": _sorted_words(self.only_in_automaton),
            "truncated": self.truncated,
        }


def _sorted_words(words) -> list[str]:
    return sorted(words, key=lambda w: (len(w), w))


def cmd_equiv(g: Pmcfg, m: Tsa, max_len: int, budget: SearchBudget, max_nodes: int = 40) -> EquivalenceReport:
    """Compare the bounded languages of ``g`` and ``m`` up to ``max_len``."""
    lg = words_to_strings(enumerate_bounded_language(g, max_len, max_nodes))
    ex = explore(m, max_len, budget)
    lm = words_to_strings(ex.words)
    return EquivalenceReport(max_len, lg - lm, lm - lg, ex.truncated)


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_grammar(path: str) -> Pmcfg:
    return parse_grammar_file(_read(path))


def _load_automaton(path: str) -> Tsa:
    return parse_automaton_file(_read(path))


def _looks_like_automaton(text: str) -> bool:
    return any(line.strip().startswith(("states:", "trans")) for line in text.splitlines())


def _load_either(path: str) -> Pmcfg | Tsa:
    text = _read(path)
    return parse_automaton_file(text) if _looks_like_automaton(text) else parse_grammar_file(text)


def _budget(args) -> SearchBudget:
    return SearchBudget(
        max_steps=args.max_steps,
        max_eps_between_reads=args.max_eps,
        restriction_k=getattr(args, "k", None),
    )


def _word(text: str) -> tuple[str, ...]:
    return () if text in ("", "ε") else tuple(text)


def _show(word: str) -> str:
    return word or "ε"


def _emit(args, payload, text: str):
    if args.json:
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        print(text)


def run_validate(args) -> int:
    text = _read(args.file)
    if _looks_like_automaton(text):
        m = parse_automaton_file(text)
        ok, w = is_cycle_free(m)
        info = {"kind": "automaton", "states": len(m.states), "transitions": len(m.transitions), "cycle_free": ok}
        _emit(args, info, f"automaton: {len(m.states)} states, {len(m.transitions)} transitions"
              + ("" if ok else f"; stay loop at ({w.state}, {w.symbol})"))
        return OK
    g = parse_grammar_file(text)
    c = classify(g)
    dead = sorted(set(g.nonterminals) - productive_nonterminals(g))
    info = {
        "kind": "grammar",
        "rules": len(g.rules),
        "fan_out": c.fan_out,
        "mcfg": c.is_mcfg,
        "nondeleting": c.is_nondeleting,
        "unproductive": dead,
    }
    msg = f"grammar: {len(g.rules)} rules, fan-out {c.fan_out}, {'MCFG' if c.is_mcfg else 'PMCFG'}"
    if dead:
        msg += "; unproductive: " + " ".join(dead)
    _emit(args, info, msg)
    return OK


def run_g2a(args) -> int:
    m = grammar_to_automaton(_load_grammar(args.grammar), productive_only=args.productive_only)
    sys.stdout.write(print_automaton(m))
    return OK


def run_a2g(args) -> int:
    g = automaton_to_grammar(_load_automaton(args.automaton), args.k)
    sys.stdout.write(print_grammar(g))
    return OK


def run_recognize(args) -> int:
    src = _load_either(args.file)
    m = grammar_to_automaton(src) if isinstance(src, Pmcfg) else src
    word = _word(args.word)
    res = recognize(m, word, _budget(args))
    if res.accepted:
        if args.json:
            print(json.dumps(trace_records(m, replay(m, word, res.run), res.run), ensure_ascii=False, indent=2))
        else:
            print("accepted: " + " ".join(m.transition_name(i) for i in res.run))
        return OK
    verdict = "inconclusive (search truncated)" if res.truncated else "rejected"
    _emit(args, {"accepted": False, "truncated": res.truncated}, verdict)
    return TRUNCATED if res.truncated else FAILED


def _parse_run(text: str, m: Tsa) -> list[int]:
    names = {m.transition_name(i): i for i in range(len(m.transitions))}
    run = []
    for tok in text.replace(",", " ").split():
        if tok.isdigit():
            idx = int(tok) - 1
            if not 0 <= idx < len(m.transitions):
                raise UsageError(f"no transition number {tok}")
            run.append(idx)
        elif tok in names:
            run.append(names[tok])
        else:
            raise UsageError(f"unknown transition {tok!r}")
    return run


def run_replay(args) -> int:
    m = _load_automaton(args.automaton)
    run = _parse_run(_read(args.run), m)
    word = _word(args.word)
    try:
        configs = replay(m, word, run)
    except ReplayError as exc:
        _emit(args, {"error": exc.reason, "step": exc.step, "message": str(exc)}, f"replay failed: {exc}")
        return FAILED
    if args.json:
        print(json.dumps(trace_records(m, configs, run), ensure_ascii=False, indent=2))
    else:
        for i, c in enumerate(configs):
            via = "" if i == 0 else f"  {m.transition_name(run[i - 1])}"
            print(f"{i:>3}{via:<10} {c.render()}")
    accepting = m.is_final(configs[-1].state)
    if not args.json:
        print("accepting" if accepting else "not accepting")
    return OK if accepting else FAILED


def run_enum_grammar(args) -> int:
    words = _sorted_words(words_to_strings(enumerate_bounded_language(_load_grammar(args.grammar), args.max_len, args.max_nodes)))
    _emit(args, {"words": words}, "\n".join(map(_show, words)))
    return OK


def run_enum_automaton(args) -> int:
    ex = explore(_load_automaton(args.automaton), args.max_len, _budget(args))
    words = _sorted_words(words_to_strings(ex.words))
    text = "\n".join(map(_show, words))
    if ex.truncated:
        text += "\n# search truncated; the list may be incomplete"
    _emit(args, {"words": words, "truncated": ex.truncated}, text)
    return TRUNCATED if ex.truncated else OK


def run_check(args) -> int:
    m = _load_automaton(args.automaton)
    if args.property == "cycle-free":
        ok, w = is_cycle_free(m)
        payload = {"cycle_free": ok, "witness": None if ok else {"state": str(w.state), "symbol": str(w.symbol),
                                                                  "run": [i + 1 for i in w.run]}}
        text = "cycle-free" if ok else (
            f"stay loop at ({w.state}, {w.symbol}): " + " ".join(m.transition_name(i) for i in w.run))
        _emit(args, payload, text)
        return OK if ok else FAILED
    if args.property == "snf":
        chk = is_stack_normal_form_bounded(m, args.max_len, _budget(args))
        payload = {"status": chk.status.value, "witness": None if chk.witness is None else [i + 1 for i in chk.witness]}
        text = chk.status.value
        if chk.status is SnfStatus.VIOLATED:
            text += ": accepts away from the root after " + " ".join(m.transition_name(i) for i in chk.witness)
        _emit(args, payload, text)
        return {SnfStatus.HOLDS: OK, SnfStatus.VIOLATED: FAILED, SnfStatus.INCONCLUSIVE: TRUNCATED}[chk.status]
    k = args.k if args.k is not None else m.restriction
    if k is None:
        raise UsageError("check restriction needs --k (the automaton declares no restriction)")
    ex = explore(m.with_restriction(None), args.max_len, SearchBudget(args.max_steps, args.max_eps))
    bad = [(w, r) for w, r in sorted(ex.witnesses.items(), key=lambda x: (len(x[0]), x[0]))
           if not check_run_restriction(m, w, r, k)]
    payload = {"k": k, "runs_checked": len(ex.witnesses), "violations": [
        {"word": "".join(map(str, w)), "run": [i + 1 for i in r]} for w, r in bad], "truncated": ex.truncated}
    if bad:
        text = "\n".join(f"violated on {_show(''.join(map(str, w)))}: " + " ".join(m.transition_name(i) for i in r)
                         for w, r in bad)
    else:
        text = f"{len(ex.witnesses)} accepting runs are {k}-restricted"
    _emit(args, payload, text)
    if bad:
        return FAILED
    return TRUNCATED if ex.truncated else OK


def run_normalize(args) -> int:
    m = _load_automaton(args.automaton)
    m = remove_cycles(m).automaton if args.form == "cycle-free" else to_stack_normal_form(m)
    sys.stdout.write(print_automaton(m))
    return OK


def run_equiv(args) -> int:
    rep = cmd_equiv(_load_grammar(args.grammar), _load_automaton(args.automaton), args.max_len,
                    _budget(args), args.max_nodes)
    if args.json:
        print(json.dumps(rep.to_json(), ensure_ascii=False, indent=2))
    else:
        if rep.equivalent:
            print(f"equivalent up to length {rep.max_len}")
        for title, words in (("only in grammar", rep.only_in_grammar), ("only in automaton", rep.only_in_automaton)):
            if words:
                print(f"{title}: " + " ".join(map(_show, _sorted_words(words))))
        if rep.truncated:
            print("automaton search truncated; result inconclusive")
    return rep.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tsa", description="Tree stack automata and multiple context-free grammars.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--max-steps", type=int, default=400, help="transitions per run")
    budget.add_argument("--max-eps", type=int, default=200, help="consecutive non-reading transitions")
    lengths = argparse.ArgumentParser(add_help=False)
    lengths.add_argument("--max-len", type=int, default=8, help="longest word to enumerate")
    nodes = argparse.ArgumentParser(add_help=False)
    nodes.add_argument("--max-nodes", type=int, default=40, help="largest derivation to enumerate")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="parse and check a grammar or automaton file")
    s.add_argument("file")
    s.set_defaults(func=run_validate)

    s = sub.add_parser("g2a", help="compile a grammar into an automaton")
    s.add_argument("grammar")
    s.add_argument("--productive-only", action="store_true", help="drop unproductive nonterminals first")
    s.set_defaults(func=run_g2a)

    s = sub.add_parser("a2g", help="convert a k-restricted automaton into a k-MCFG")
    s.add_argument("automaton")
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=run_a2g)

    s = sub.add_parser("recognize", parents=[common, budget], help="search for an accepting run")
    s.add_argument("file", help="automaton, or grammar (compiled first)")
    s.add_argument("word", help="input word; '' or ε for the empty word")
    s.add_argument("--k", type=int, help="override the restriction bound")
    s.set_defaults(func=run_recognize)

    s = sub.add_parser("replay", parents=[common], help="replay a run given as transition numbers or names")
    s.add_argument("automaton")
    s.add_argument("word")
    s.add_argument("--run", required=True, help="file with 1-based transition numbers or names")
    s.set_defaults(func=run_replay)

    s = sub.add_parser("enum-grammar", parents=[common, lengths, nodes], help="bounded language of a grammar")
    s.add_argument("grammar")
    s.set_defaults(func=run_enum_grammar)

    s = sub.add_parser("enum-automaton", parents=[common, budget, lengths], help="bounded language of an automaton")
    s.add_argument("automaton")
    s.add_argument("--k", type=int, help="override the restriction bound")
    s.set_defaults(func=run_enum_automaton)

    s = sub.add_parser("check", parents=[common, budget, lengths], help="check an automaton property")
    s.add_argument("property", choices=["cycle-free", "snf", "restriction"])
    s.add_argument("automaton")
    s.add_argument("--k", type=int, help="bound for the restriction check")
    s.set_defaults(func=run_check)

    s = sub.add_parser("normalize", help="make an automaton cycle-free or put it in stack normal form")
    s.add_argument("form", choices=["cycle-free", "snf"])
    s.add_argument("automaton")
    s.set_defaults(func=run_normalize)

    s = sub.add_parser("equiv", parents=[common, budget, lengths, nodes],
                       help="compare bounded languages of a grammar and an automaton")
    s.add_argument("grammar")
    s.add_argument("automaton")
    s.set_defaults(func=run_equiv)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FormatError, GrammarError, PreconditionError, CycleRemovalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
