"""Text formats for grammars and automata, with canonical printers.

Grammar files::

    initial: S
    r1: S -> [ x1.1 x2.1 x1.2 x2.2 ] ( A, B )
    A -> [ "a" x1.1 , "c" x1.2 ] ( A )
    A -> [ "" , "" ] ( )

Each character of a quoted string is one terminal and ``""`` is the empty
word.  Optional header lines ``nonterminals: S/1 A/2`` and
``terminals: "abcd"`` declare sorts and terminals not visible in the rules.
``#`` starts a comment outside quoted strings.

Automaton files::

    states: 1 2 3 4 5
    initial: 1
    final: 5
    stack: * #
    trans τ1: 1 -a-> 1 [true] push(1,*)
    trans: 2 -eps-> 2 [eq(#)] down

``terminals:`` and ``restriction:`` lines are optional.  Since ``#`` is a
common stack symbol, only lines whose first non-blank character is ``#``
are comments here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .automaton import Transition, Tsa, validate_automaton
from .grammar import CompositionFunction, Pmcfg, Rule, Variable, validate_grammar
from .treestack import BOTTOM, DOWN, ID, ROOT, TRUE, Always, Bottom, Down, Equals, Id, Push, Set, Up


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


# grammar files

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#.*)
  | (?P<arrow>->)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>[\[\](),:/])
  | (?P<word>⟨(?:[^⟨⟩]|⟨[^⟨⟩]*⟩)*⟩|[^\s\[\](),:/"\#]+)
    """,
    re.VERBOSE,
)
_VARIABLE = re.compile(r"x(\d+)\.(\d+)")
_HEADERS = ("initial", "nonterminals", "terminals")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise FormatError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            text = m.group()
            if kind == "punct":
                kind = text
            out.append(_Tok(kind, text, pos + 1))
        pos = m.end()
    return out


def _unquote(tok: _Tok, lineno: int) -> list[str]:
    body = tok.text[1:-1]
    chars, i = [], 0
    while i < len(body):
        if body[i] == "\\":
            if i + 1 >= len(body):
                raise FormatError("dangling escape", lineno, tok.col + i + 1)
            i += 1
        chars.append(body[i])
        i += 1
    return chars


class _Line:
    def __init__(self, toks: list[_Tok], lineno: int, length: int):
        self.toks, self.i, self.lineno, self.length = toks, 0, lineno, length

    def peek(self, offset=0) -> _Tok | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def fail(self, message: str, tok: _Tok | None = None):
        col = tok.col if tok else self.length + 1
        raise FormatError(message, self.lineno, col)

    def take(self, kind: str, what: str | None = None) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            found = "end of line" if tok is None else repr(tok.text)
            self.fail(f"expected {what or repr(kind)}, found {found}", tok)
        self.i += 1
        return tok

    def at(self, kind: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind

    def done(self):
        if self.i < len(self.toks):
            self.fail(f"unexpected {self.toks[self.i].text!r}", self.toks[self.i])


def _parse_rule(ln: _Line) -> Rule:
    label = None
    if ln.peek(1) is not None and ln.peek(1).kind == ":":
        label = ln.take("word", "rule label").text
        ln.take(":")
    lhs = ln.take("word", "nonterminal").text
    ln.take("arrow", "'->'")
    ln.take("[")
    comps: list[list] = [[]]
    while not ln.at("]"):
        tok = ln.peek()
        if tok is None:
            ln.fail("unterminated component list")
        if tok.kind == ",":
            comps.append([])
        elif tok.kind == "string":
            comps[-1].extend(_unquote(tok, ln.lineno))
        elif tok.kind == "word":
            m = _VARIABLE.fullmatch(tok.text)
            if not m:
                ln.fail(f"malformed variable token {tok.text!r}", tok)
            try:
                comps[-1].append(Variable(int(m.group(1)), int(m.group(2))))
            except ValueError as exc:
                ln.fail(str(exc), tok)
        else:
            ln.fail(f"unexpected {tok.text!r} in components", tok)
        ln.i += 1
    ln.take("]")
    ln.take("(")
    rhs = []
    if not ln.at(")"):
        rhs.append(ln.take("word", "nonterminal").text)
        while ln.at(","):
            ln.take(",")
            rhs.append(ln.take("word", "nonterminal").text)
    ln.take(")")
    ln.done()
    sorts = [0] * len(rhs)
    for comp in comps:
        for v in comp:
            if isinstance(v, Variable) and v.arg_index <= len(rhs):
                sorts[v.arg_index - 1] = max(sorts[v.arg_index - 1], v.comp_index)
    # an argument none of whose components is used still has sort >= 1
    return Rule(lhs, CompositionFunction(tuple(max(s, 1) for s in sorts), comps), tuple(rhs), label)


def parse_grammar_file(text: str, *, validate: bool = True) -> Pmcfg:
    """Parse the grammar format; sorts of arguments come from rule heads or the header."""
    initials: list[str] = []
    declared: dict[str, int] = {}
    terminals: list[str] | None = None
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokenize(raw, lineno)
        if not toks:
            continue
        ln = _Line(toks, lineno, len(raw))
        is_header = (
            toks[0].kind == "word"
            and toks[0].text in _HEADERS
            and len(toks) > 1
            and toks[1].kind == ":"
            and not any(t.kind == "arrow" for t in toks)
        )
        if not is_header:
            rules.append(_parse_rule(ln))
            continue
        key = toks[0].text
        ln.i = 2
        if key == "initial":
            while ln.peek():
                initials.append(ln.take("word", "nonterminal").text)
        elif key == "nonterminals":
            while ln.peek():
                name = ln.take("word", "nonterminal").text
                ln.take("/")
                tok = ln.take("word", "sort")
                if not tok.text.isdigit():
                    ln.fail(f"sort must be a number, got {tok.text!r}", tok)
                declared[name] = int(tok.text)
        else:
            terminals = terminals or []
            while ln.peek():
                terminals.extend(_unquote(ln.take("string", "quoted terminals"), lineno))
    if not initials:
        raise FormatError("missing 'initial:' line")
    # argument sorts come from the nonterminal's own rules when it has any
    heads = dict(declared)
    for r in rules:
        heads.setdefault(r.lhs, r.comp.fan_out)
    fixed = []
    for r in rules:
        sorts = tuple(heads.get(a, s) for a, s in zip(r.rhs, r.comp.arg_sorts))
        fixed.append(Rule(r.lhs, CompositionFunction(sorts, r.comp.components), r.rhs, r.label))
    g = Pmcfg.build(fixed, initials, declared, terminals)
    if validate:
        problems = validate_grammar(g)
        if problems:
            raise FormatError("invalid grammar: " + "; ".join(problems))
    return g


def _quote(chars) -> str:
    out = []
    for c in chars:
        if not isinstance(c, str) or len(c) != 1:
            raise ValueError(f"terminal {c!r} is not a single character; the text format cannot hold it")
        out.append("\\" + c if c in '"\\' else c)
    return '"' + "".join(out) + '"'


def _render_component(comp) -> str:
    if not comp:
        return '""'
    parts, run = [], []
    for item in comp:
        if isinstance(item, Variable):
            if run:
                parts.append(_quote(run))
                run = []
            parts.append(str(item))
        else:
            run.append(item)
    if run:
        parts.append(_quote(run))
    return " ".join(parts)


def print_grammar(g: Pmcfg) -> str:
    """Canonical text; parsing it gives back an equal grammar."""
    lines = ["initial: " + " ".join(sorted(g.initials))]
    inferred = Pmcfg.build(g.rules, g.initials)
    if inferred.nonterminals != g.nonterminals:
        lines.append("nonterminals: " + " ".join(f"{n}/{s}" for n, s in sorted(g.nonterminals.items())))
    if inferred.terminals != g.terminals:
        lines.append("terminals: " + _quote(sorted(g.terminals)))
    for r in g.rules:
        comps = " , ".join(_render_component(c) for c in r.comp.components)
        head = f"{r.label}: " if r.label else ""
        rhs = "( " + ", ".join(r.rhs) + " )" if r.rhs else "( )"
        lines.append(f"{head}{r.lhs} -> [ {comps} ] {rhs}")
    return "\n".join(lines) + "\n"


# automaton files

_TRANS = re.compile(
    r"trans(?:\s+(?P<name>[^\s:]+))?\s*:\s*(?P<src>\S+)\s+-(?P<read>\S+?)->\s+(?P<tgt>\S+)"
    r"\s+\[(?P<pred>[^\]]*)\]\s+(?P<instr>\S+)\s*"
)
_SYM = r"(⟨(?:[^⟨⟩]|⟨[^⟨⟩]*⟩)*⟩|[^\s(),\[\]]+)"
_INSTR = [
    (re.compile(r"id"), lambda m: ID),
    (re.compile(r"down"), lambda m: DOWN),
    (re.compile(r"push\((\d+)," + _SYM + r"\)"), lambda m: Push(int(m.group(1)), m.group(2))),
    (re.compile(r"up\((\d+)\)"), lambda m: Up(int(m.group(1)))),
    (re.compile(r"set\(" + _SYM + r"\)"), lambda m: Set(m.group(1))),
]
_EPS = "eps"


def _parse_predicate(text: str, lineno: int, col: int):
    text = text.strip()
    if text == "true":
        return TRUE
    if text == "bottom":
        return BOTTOM
    m = re.fullmatch(r"eq\(" + _SYM + r"\)", text)
    if m:
        return Equals(m.group(1))
    raise FormatError(f"unknown predicate {text!r}", lineno, col)


def _parse_instruction(text: str, lineno: int, col: int):
    for pattern, make in _INSTR:
        m = pattern.fullmatch(text)
        if m:
            try:
                return make(m)
            except ValueError as exc:
                raise FormatError(str(exc), lineno, col) from None
    raise FormatError(f"unknown instruction {text!r}", lineno, col)


def parse_automaton_file(text: str) -> Tsa:
    """Parse the automaton format; every reference must be declared."""
    header: dict[str, tuple[list[str], int]] = {}
    trans: list[tuple[Transition, int, re.Match]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("trans"):
            m = _TRANS.fullmatch(line)
            if not m:
                raise FormatError("malformed transition, expected 'trans [name]: q -a-> p [pred] instr'", lineno, 1)
            off = len(raw) - len(raw.lstrip())
            read = None if m.group("read") == _EPS else m.group("read")
            pred = _parse_predicate(m.group("pred"), lineno, off + m.start("pred") + 1)
            instr = _parse_instruction(m.group("instr"), lineno, off + m.start("instr") + 1)
            t = Transition(m.group("src"), read, pred, instr, m.group("tgt"), m.group("name"))
            trans.append((t, lineno, m, off))
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("states", "initial", "final", "stack", "terminals", "restriction"):
            raise FormatError(f"unknown line {line!r}", lineno, 1)
        if key in header:
            raise FormatError(f"duplicate '{key}:' line", lineno, 1)
        header[key] = (rest.split(), lineno)
    for key in ("states", "initial", "final"):
        if key not in header:
            raise FormatError(f"missing '{key}:' line")
    states = header["states"][0]
    stack = header.get("stack", ([], None))[0]
    init, init_line = header["initial"]
    if len(init) != 1:
        raise FormatError("'initial:' takes exactly one state", init_line, 1)
    state_set, sym_set = set(states), set(stack) | {ROOT}
    for q in init + header["final"][0]:
        if q not in state_set:
            raise FormatError(f"undeclared state {q}", header["initial" if q in init else "final"][1], 1)
    restriction = None
    if "restriction" in header:
        vals, ln = header["restriction"]
        if len(vals) != 1 or not vals[0].isdigit():
            raise FormatError("'restriction:' takes one number", ln, 1)
        restriction = int(vals[0])
    declared_terms = header.get("terminals", (None, None))[0]
    reads = []
    for t, lineno, m, off in trans:
        for grp in ("src", "tgt"):
            if m.group(grp) not in state_set:
                raise FormatError(f"undeclared state {m.group(grp)}", lineno, off + m.start(grp) + 1)
        for sym in _symbols_of(t):
            if sym not in sym_set:
                raise FormatError(f"undeclared stack symbol {sym}", lineno, off + m.start("pred") + 1)
        if t.read is not None:
            if declared_terms is not None and t.read not in declared_terms:
                raise FormatError(f"undeclared terminal {t.read}", lineno, off + m.start("read") + 1)
            if t.read not in reads:
                reads.append(t.read)
    terminals = declared_terms if declared_terms is not None else sorted(reads)
    m = Tsa(
        tuple(states),
        tuple(stack),
        tuple(terminals),
        init[0],
        tuple(t for t, *_ in trans),
        tuple(header["final"][0]),
        restriction,
    )
    problems = validate_automaton(m)
    if problems:
        raise FormatError("invalid automaton: " + "; ".join(problems))
    return m


def _symbols_of(t: Transition):
    if isinstance(t.predicate, Equals):
        yield t.predicate.symbol
    if isinstance(t.instruction, (Push, Set)):
        yield t.instruction.symbol


def _render_predicate(p) -> str:
    if isinstance(p, Always):
        return "true"
    if isinstance(p, Bottom):
        return "bottom"
    return f"eq({p.symbol})"


def _render_instruction(f) -> str:
    if isinstance(f, Id):
        return "id"
    if isinstance(f, Down):
        return "down"
    if isinstance(f, Push):
        return f"push({f.child},{f.symbol})"
    if isinstance(f, Up):
        return f"up({f.child})"
    return f"set({f.symbol})"


def _token(x) -> str:
    s = str(x)
    if not s or any(c.isspace() for c in s):
        raise ValueError(f"{x!r} cannot be written as a single token")
    return s


def print_automaton(m: Tsa) -> str:
    """Canonical text for ``m``; states and symbols are written with ``str``."""
    lines = [
        "states: " + " ".join(map(_token, m.states)),
        "initial: " + _token(m.initial_state),
        "final: " + " ".join(map(_token, m.final_states)),
        "stack: " + " ".join(map(_token, m.stack_alphabet)),
    ]
    reads = sorted({str(t.read) for t in m.transitions if t.read is not None})
    if [str(a) for a in m.terminals] != reads:
        lines.append("terminals: " + " ".join(map(_token, m.terminals)))
    if m.restriction is not None:
        lines.append(f"restriction: {m.restriction}")
    for t in m.transitions:
        name = f" {_token(t.name)}" if t.name else ""
        read = _EPS if t.read is None else _token(t.read)
        lines.append(
            f"trans{name}: {_token(t.source)} -{read}-> {_token(t.target)} "
            f"[{_render_predicate(t.predicate)}] {_render_instruction(t.instruction)}"
        )
    return "\n".join(lines) + "\n"
