"""Tree stack storage.

A tree stack is a finite tree whose domain is a prefix-closed set of
positions (tuples of positive ints), with the root symbol ``@`` at the empty
position, together with a pointer into the tree.  Instructions are partial:
an inapplicable instruction yields ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Union

Position = tuple[int, ...]
Symbol = Hashable

ROOT = "@"


def render_position(pos: Position) -> str:
    if not pos:
        return "ε"
    if all(n < 10 for n in pos):
        return "".join(map(str, pos))
    return ".".join(map(str, pos))


class TreeStack:
    """Immutable tree stack; nodes map positions to symbols."""

    __slots__ = ("_nodes", "pointer", "_hash")

    def __init__(self, nodes: Mapping[Position, Symbol], pointer: Position = ()):
        self._nodes = dict(nodes)
        self.pointer = tuple(pointer)
        self._hash = None

    @classmethod
    def _shared(cls, nodes: dict, pointer: Position) -> "TreeStack":
        # nodes is never mutated after construction, so moves may share it
        ts = cls.__new__(cls)
        ts._nodes = nodes
        ts.pointer = pointer
        ts._hash = None
        return ts

    @property
    def nodes(self) -> Mapping[Position, Symbol]:
        return self._nodes

    def __getitem__(self, pos: Position) -> Symbol:
        return self._nodes[pos]

    def __contains__(self, pos: Position) -> bool:
        return pos in self._nodes

    def current(self) -> Symbol:
        return self._nodes[self.pointer]

    def __eq__(self, other):
        if not isinstance(other, TreeStack):
            return NotImplemented
        return self.pointer == other.pointer and self._nodes == other._nodes

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.pointer, frozenset(self._nodes.items())))
        return self._hash

    def __repr__(self):
        return f"TreeStack({self.render()})"

    def violations(self) -> list[str]:
        out = []
        if self._nodes.get(()) != ROOT:
            out.append("root is not labelled @")
        for pos, sym in self._nodes.items():
            if pos and sym == ROOT:
                out.append(f"@ at non-root position {render_position(pos)}")
            if pos and pos[:-1] not in self._nodes:
                out.append(f"domain not prefix-closed at {render_position(pos)}")
            if any(n < 1 for n in pos):
                out.append(f"non-positive index in {pos}")
        if self.pointer not in self._nodes:
            out.append("pointer outside the tree")
        return out

    def render(self) -> str:
        """Set notation with the pointer entry wrapped in angle brackets."""
        parts = []
        for pos in sorted(self._nodes):
            entry = f"({render_position(pos)},{self._nodes[pos]})"
            parts.append(f"<{entry}>" if pos == self.pointer else entry)
        return "{" + ", ".join(parts) + "}"


def initial_tree_stack() -> TreeStack:
    return TreeStack({(): ROOT}, ())


# -- predicates ---------------------------------------------------------------


@dataclass(frozen=True)
class Always:
    """The trivial predicate (every tree stack)."""

    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Bottom:
    def __str__(self):
        return "bottom"


@dataclass(frozen=True)
class Equals:
    symbol: Symbol

    def __post_init__(self):
        if self.symbol == ROOT:
            raise ValueError("equals(@) is not a predicate")

    def __str__(self):
        return f"eq({self.symbol})"


Predicate = Union[Always, Bottom, Equals]

TRUE = Always()
BOTTOM = Bottom()


def check_predicate(ts: TreeStack, p: Predicate) -> bool:
    if isinstance(p, Always):
        return True
    if isinstance(p, Bottom):
        return ts.pointer == ()
    return ts.current() == p.symbol


def admits(p: Predicate, symbol: Symbol) -> bool:
    """Whether ``p`` can hold when ``symbol`` is under the pointer."""
    if isinstance(p, Always):
        return True
    if isinstance(p, Bottom):
        return symbol == ROOT
    return symbol == p.symbol


# -- instructions -------------------------------------------------------------


@dataclass(frozen=True)
class Id:
    def __str__(self):
        return "id"


@dataclass(frozen=True)
class Push:
    child: int
    symbol: Symbol

    def __post_init__(self):
        if self.child < 1:
            raise ValueError("push child index must be positive")
        if self.symbol == ROOT:
            raise ValueError("cannot push @")

    def __str__(self):
        return f"push({self.child},{self.symbol})"


@dataclass(frozen=True)
class Up:
    child: int

    def __post_init__(self):
        if self.child < 1:
            raise ValueError("up child index must be positive")

    def __str__(self):
        return f"up({self.child})"


@dataclass(frozen=True)
class Down:
    def __str__(self):
        return "down"


@dataclass(frozen=True)
class Set:
    symbol: Symbol

    def __post_init__(self):
        if self.symbol == ROOT:
            raise ValueError("cannot set @")

    def __str__(self):
        return f"set({self.symbol})"


Instruction = Union[Id, Push, Up, Down, Set]

ID = Id()
DOWN = Down()


def apply_instruction(ts: TreeStack, f: Instruction) -> TreeStack | None:
    """Apply ``f``; ``None`` means the instruction is undefined here."""
    if isinstance(f, Id):
        return ts
    if isinstance(f, Push):
        target = ts.pointer + (f.child,)
        if target in ts.nodes:
            return None
        nodes = dict(ts.nodes)
        nodes[target] = f.symbol
        return TreeStack._shared(nodes, target)
    if isinstance(f, Up):
        target = ts.pointer + (f.child,)
        if target not in ts.nodes:
            return None
        return TreeStack._shared(ts._nodes, target)
    if isinstance(f, Down):
        if not ts.pointer:
            return None
        return TreeStack._shared(ts._nodes, ts.pointer[:-1])
    if isinstance(f, Set):
        if not ts.pointer:
            return None
        nodes = dict(ts.nodes)
        nodes[ts.pointer] = f.symbol
        return TreeStack._shared(nodes, ts.pointer)
    raise TypeError(f"not an instruction: {f!r}")


def moves_up(f: Instruction) -> bool:
    return isinstance(f, (Push, Up))


def is_stay(f: Instruction) -> bool:
    return isinstance(f, (Id, Set))


def from_entries(entries: Iterable[tuple[Position, Symbol]], pointer: Position) -> TreeStack:
    return TreeStack(dict(entries), pointer)
