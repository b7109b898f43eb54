"""Flat prefix-notation encoding of first-order expressions.

An expression such as ``f(a, X, g(b), Y, Y)`` is stored as a run of cells
in an :class:`Arena`::

    0 CONS  f/5
    1 CONS  a/0
    2 NOVAR nil
    3 CONS  g/1
    4 CONS  b/0
    5 NOVAR nil
    6 OFVAR 1

The first occurrence of a variable is a ``NOVAR`` cell holding either ``None``
(unbound) or a :class:`CellRef` (bound by destructive application).  Every
later occurrence is an ``OFVAR`` cell holding the backward distance to its
``NOVAR``.  Variable names are not stored; a variable is its base cell.
"""

from __future__ import annotations

import itertools
import re
from enum import IntEnum
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple, Union


class Tag(IntEnum):
    CONS = 0
    NOVAR = 1
    OFVAR = 2


CONS, NOVAR, OFVAR = Tag.CONS, Tag.NOVAR, Tag.OFVAR


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


class ExprError(ValueError):
    """Malformed cell encoding."""


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.message = message
        self.pos = pos
        self.text = text
        super().__init__(f"column {pos + 1}: {message}")


# ---------------------------------------------------------------------------
# symbols

class Symbol(NamedTuple):
    name: str
    id: int

    def __str__(self):
        return self.name


_symbols: List[Symbol] = []
_symbol_ids: Dict[str, int] = {}
_SYMBOL_RE = re.compile(r"[a-z0-9][A-Za-z0-9_]*\Z")


def intern(name: str) -> Symbol:
    """Return the unique :class:`Symbol` for ``name``."""
    sid = _symbol_ids.get(name)
    if sid is None:
        if not _SYMBOL_RE.match(name):
            raise ValueError(f"invalid symbol name {name!r}")
        sid = len(_symbols)
        _symbols.append(Symbol(name, sid))
        _symbol_ids[name] = sid
    return _symbols[sid]


def symbol(sid: int) -> Symbol:
    return _symbols[sid]


class Functor(NamedTuple):
    symbol: Symbol
    arity: int

    def __str__(self):
        return f"{self.symbol.name}/{self.arity}"


# ---------------------------------------------------------------------------
# arena and references

_arena_ids = itertools.count()


class Arena:
    """Append-only cell store.

    Cells live in three parallel lists so that hot loops can index them
    directly: ``tags[i]``, ``values[i]`` and ``arities[i]``.  ``values``
    holds the symbol id of a ``CONS``, the binding (``None`` or
    :class:`CellRef`) of a ``NOVAR`` and the back offset of an ``OFVAR``.
    """

    __slots__ = ("id", "tags", "values", "arities", "__weakref__")

    def __init__(self):
        self.id = next(_arena_ids)
        self.tags: List[int] = []
        self.values: list = []
        self.arities: List[int] = []

    def __len__(self):
        return len(self.tags)

    def __repr__(self):
        return f"<Arena {self.id}: {len(self.tags)} cells>"

    def push(self, tag: int, value, arity: int = 0) -> int:
        self.tags.append(tag)
        self.values.append(value)
        self.arities.append(arity)
        return len(self.tags) - 1

    def cell(self, index: int) -> "Cell":
        tag = Tag(self.tags[index])
        value = self.values[index]
        if tag is CONS:
            value = Functor(_symbols[value], self.arities[index])
        return Cell(tag, value)

    def cells(self, start: int = 0, stop: Optional[int] = None) -> List["Cell"]:
        stop = len(self.tags) if stop is None else stop
        return [self.cell(i) for i in range(start, stop)]


class Cell(NamedTuple):
    """Read-only view of one arena slot."""

    tag: Tag
    value: object

    @property
    def arity(self) -> int:
        return self.value.arity if self.tag is CONS else 0

    def __str__(self):
        if self.tag is NOVAR:
            return "NOVAR nil" if self.value is None else f"NOVAR ->{self.value.index}"
        return f"{self.tag.name} {self.value}"


class CellRef(NamedTuple):
    arena: Arena
    index: int

    def __repr__(self):
        return f"CellRef({self.arena.id}:{self.index})"


class ExprRef(NamedTuple):
    arena: Arena
    start: int

    def __repr__(self):
        return f"ExprRef({self.arena.id}:{self.start})"

    @property
    def cell(self) -> CellRef:
        return CellRef(self.arena, self.start)

    def cells(self) -> List[Cell]:
        return self.arena.cells(self.start, self.start + span(self))

    def __str__(self):
        return render(self)


# ---------------------------------------------------------------------------
# cell accessors

def cell_type(c: CellRef) -> Tag:
    return Tag(c.arena.tags[c.index])


def cell_value(c: CellRef):
    """Payload of a cell: a :class:`Functor`, a binding, or a back offset."""
    return c.arena.cell(c.index).value


def cell_arity(c: CellRef) -> int:
    return c.arena.arities[c.index]


def base_var(c: CellRef) -> CellRef:
    """Resolve an ``OFVAR`` to the ``NOVAR`` it refers to."""
    tags = c.arena.tags
    if tags[c.index] == OFVAR:
        c = CellRef(c.arena, c.index - c.arena.values[c.index])
        if tags[c.index] != NOVAR:
            raise ExprError(f"offset variable does not reach a base variable at {c.index}")
    return c


def span(e: Union[ExprRef, CellRef]) -> int:
    """Number of cells of the expression starting at ``e``."""
    arena, start = e
    arities = arena.arities
    end = len(arities)
    remaining = 1
    i = start
    while remaining:
        if i >= end:
            raise ExprError(f"expression at {start} runs past the arena end")
        remaining += arities[i] - 1
        i += 1
    return i - start


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:([A-Z_][A-Za-z0-9_]*)|([a-z0-9][A-Za-z0-9_]*)|(\S))")


def _tokens(text: str) -> Iterator[Tuple[str, str, int]]:
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break   # trailing whitespace
        kind = ("var", "sym", "punct")[m.lastindex - 1]
        yield kind, m.group(m.lastindex), m.start(m.lastindex)
        pos = m.end()
    yield "end", "", n


def parse(text: str, arena: Optional[Arena] = None) -> ExprRef:
    """Encode ``text`` into ``arena`` (a new one by default)."""
    if arena is None:
        arena = Arena()
    toks = _tokens(text)
    tok = next(toks)
    start = len(arena)
    first_seen: Dict[str, int] = {}

    def fail(message, pos):
        del arena.tags[start:], arena.values[start:], arena.arities[start:]
        raise ParseError(message, pos, text)

    # Explicit stack of open argument lists: [arity cell index, args seen].
    stack: List[List[int]] = []
    while True:
        kind, val, pos = tok
        if kind == "var":
            base = first_seen.get(val)
            if base is None:
                first_seen[val] = arena.push(NOVAR, None)
            else:
                arena.push(OFVAR, len(arena) - base)
            tok = next(toks)
        elif kind == "sym":
            cell = arena.push(CONS, intern(val).id, 0)
            tok = next(toks)
            if tok[1] == "(" and tok[0] == "punct":
                stack.append([cell, 0])
                tok = next(toks)
                continue
        elif kind == "end":
            fail("unexpected end of input" if stack or len(arena) > start
                 else "empty expression", pos)
        else:
            fail(f"unexpected {val!r}", pos)

        # an expression just finished
        while stack:
            kind, val, pos = tok
            frame = stack[-1]
            frame[1] += 1
            if val == "," and kind == "punct":
                tok = next(toks)
                break
            if val == ")" and kind == "punct":
                arena.arities[frame[0]] = frame[1]
                stack.pop()
                tok = next(toks)
                continue
            fail("expected ',' or ')'" if kind != "end" else "unexpected end of input", pos)
        else:
            if tok[0] != "end":
                fail(f"unexpected {tok[1]!r} after expression", tok[2])
            return ExprRef(arena, start)


def copy_fresh(e: ExprRef, target: Optional[Arena] = None) -> ExprRef:
    """Copy the encoding of ``e`` to ``target`` with all variables unbound."""
    if target is None:
        target = Arena()
    src, start = e
    n = span(e)
    new_start = len(target)
    tags = src.tags[start:start + n]
    values = src.values[start:start + n]
    for i, t in enumerate(tags):
        if t == NOVAR:
            values[i] = None
    target.tags.extend(tags)
    target.values.extend(values)
    target.arities.extend(src.arities[start:start + n])
    return ExprRef(target, new_start)


# ---------------------------------------------------------------------------
# ordering

def sort_key(e: ExprRef) -> tuple:
    """Key whose tuple order is the total expression order.

    Variables become ``(0, rank)`` with ``rank`` the first-occurrence number
    inside ``e``; constructors become ``(1, name, arity)``.  Variants have
    equal keys.
    """
    arena, start = e
    tags, values, arities = arena.tags, arena.values, arena.arities
    n = span(e)
    ranks: Dict[int, int] = {}
    key = []
    for i in range(start, start + n):
        t = tags[i]
        if t == CONS:
            key.append((1, _symbols[values[i]].name, arities[i]))
        else:
            base = i if t == NOVAR else i - values[i]
            r = ranks.get(base)
            if r is None:
                r = ranks[base] = len(ranks)
            key.append((0, r))
    return tuple(key)


def _order(a, b) -> Ordering:
    return Ordering.LT if a < b else Ordering.GT if a > b else Ordering.EQ


def compare_constructors(a: Union[int, Tuple[Symbol, int]], b: Union[int, Tuple[Symbol, int]]) -> Ordering:
    """Order single prefix items.

    A variable is given as its integer rank, a constructor as a
    ``(symbol, arity)`` pair.  Variables precede constructors; constructors
    are ordered by name (byte order) and then by arity.
    """
    def key(x):
        if isinstance(x, int):
            return (0, x)
        sym, arity = x
        return (1, sym.name, arity)
    return _order(key(a), key(b))


def compare_expressions(e1: ExprRef, e2: ExprRef) -> Ordering:
    return _order(sort_key(e1), sort_key(e2))


# ---------------------------------------------------------------------------
# rendering

class VarNames:
    """Assigns ``V0, V1, ...`` to base variable cells in order of request."""

    def __init__(self):
        self.names: Dict[CellRef, str] = {}

    def __call__(self, var: CellRef) -> str:
        name = self.names.get(var)
        if name is None:
            name = self.names[var] = f"V{len(self.names)}"
        return name


def walk(c: CellRef, substitutions=()) -> CellRef:
    """Follow offsets and bindings from ``c``.

    Returns a ``CONS`` cell or an unbound ``NOVAR``.  Bindings are taken from
    the cells themselves (destructive application) and from any of the
    given substitutions.
    """
    seen = set()
    while True:
        arena, i = c
        t = arena.tags[i]
        if t == CONS:
            return c
        if t == OFVAR:
            c = base_var(c)
            i = c.index
        target = arena.values[i]
        if target is None:
            for s in substitutions:
                target = s.lookup(c)
                if target is not None:
                    break
            else:
                return c
        if c in seen:
            raise ExprError("cyclic binding chain")
        seen.add(c)
        c = target


def render(e: Union[ExprRef, CellRef], *substitutions, names: Optional[VarNames] = None) -> str:
    """Canonical text for ``e`` with bindings resolved inline."""
    if names is None:
        names = VarNames()
    out: List[str] = []
    active = set()

    def emit(c: CellRef):
        arena = c.arena
        i = c.index
        remaining = 1
        closers = []    # per open constructor: arguments still to print
        while remaining:
            t = arena.tags[i]
            if t == CONS:
                out.append(_symbols[arena.values[i]].name)
                n = arena.arities[i]
                if n:
                    out.append("(")
                    closers.append(n)
                    remaining += n - 1
                    i += 1
                    continue
            else:
                r = walk(CellRef(arena, i), substitutions)
                if r.arena.tags[r.index] == CONS:
                    if r in active:
                        raise ExprError("cyclic binding chain")
                    active.add(r)
                    emit(r)
                    active.discard(r)
                else:
                    out.append(names(r))
            remaining -= 1
            i += 1
            while closers:
                closers[-1] -= 1
                if closers[-1]:
                    out.append(", ")
                    break
                closers.pop()
                out.append(")")

    emit(e.cell if isinstance(e, ExprRef) else e)
    return "".join(out)


def variables(e: ExprRef) -> List[CellRef]:
    """Base cells of the variables of ``e`` in first-occurrence order."""
    arena, start = e
    return [CellRef(arena, i) for i in range(start, start + span(e))
            if arena.tags[i] == NOVAR]


def has_bindings(e: ExprRef) -> bool:
    arena, start = e
    tags, values = arena.tags, arena.values
    return any(tags[i] == NOVAR and values[i] is not None
               for i in range(start, start + span(e)))


def cell_table(e: ExprRef) -> List[Tuple[int, str, str]]:
    """Rows ``(index, tag, payload)`` describing the encoding of ``e``."""
    rows = []
    for i, c in enumerate(e.cells(), start=e.start):
        if c.tag is NOVAR:
            payload = "nil" if c.value is None else f"-> {c.value.index}"
        else:
            payload = str(c.value)
        rows.append((i, c.tag.name, payload))
    return rows
