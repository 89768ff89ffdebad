"""Tree stack automata, multiple context-free grammars and conversions between them."""

from .a2g import automaton_to_grammar, automaton_to_run_grammar
from .automaton import SearchBudget, Transition, Tsa, explore, recognize, replay
from .formats import parse_automaton_file, parse_grammar_file, print_automaton, print_grammar
from .g2a import extract_derivation, grammar_to_automaton
from .grammar import CompositionFunction, Pmcfg, Rule, Variable, enumerate_bounded_language
from .normalform import is_cycle_free, remove_cycles, to_stack_normal_form
from .treestack import TreeStack

__all__ = [
    "CompositionFunction",
    "Pmcfg",
    "Rule",
    "SearchBudget",
    "Transition",
    "TreeStack",
    "Tsa",
    "Variable",
    "automaton_to_grammar",
    "automaton_to_run_grammar",
    "enumerate_bounded_language",
    "explore",
    "extract_derivation",
    "grammar_to_automaton",
    "is_cycle_free",
    "parse_automaton_file",
    "parse_grammar_file",
    "print_automaton",
    "print_grammar",
    "recognize",
    "remove_cycles",
    "replay",
    "to_stack_normal_form",
]
