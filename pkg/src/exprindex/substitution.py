"""Substitutions over variable cells.

A binding is a pair of cell addresses: the base cell of a variable and the
first cell of the expression it stands for.  A :class:`Substitution` is an
ordered, immutable collection of such pairs.  Applying one never touches the
arena; :func:`materialize` writes a new encoding instead.
:func:`apply_destructive` is the one operation that writes a binding into a
variable cell.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, NamedTuple, Optional

from .expr_core import (
    CONS, NOVAR, OFVAR, Arena, CellRef, ExprError, ExprRef, VarNames,
    base_var, render, walk,
)


class Binding(NamedTuple):
    var: CellRef
    target: CellRef


class Substitution:
    __slots__ = ("_map",)

    def __init__(self, bindings=()):
        self._map: Dict[CellRef, CellRef] = {}
        for var, target in bindings:
            if var in self._map:
                raise ValueError(f"variable {var} bound twice")
            self._map[var] = target

    @classmethod
    def _from_dict(cls, mapping: Dict[CellRef, CellRef]) -> "Substitution":
        s = cls.__new__(cls)
        s._map = mapping
        return s

    @property
    def bindings(self) -> List[Binding]:
        return [Binding(v, t) for v, t in self._map.items()]

    def __len__(self):
        return len(self._map)

    def __iter__(self) -> Iterator[Binding]:
        return iter(self.bindings)

    def __contains__(self, var: CellRef):
        return var in self._map

    def __eq__(self, other):
        if not isinstance(other, Substitution):
            return NotImplemented
        return self.bindings == other.bindings

    def __repr__(self):
        pairs = ", ".join(f"({v.index}, {t.index})" for v, t in self._map.items())
        return f"Substitution([{pairs}])"

    def lookup(self, var: CellRef) -> Optional[CellRef]:
        return self._map.get(var)

    def bind(self, var: CellRef, target: CellRef) -> "Substitution":
        """Return a copy extended by ``var -> target``."""
        var = base_var(var)
        if var.arena.tags[var.index] != NOVAR:
            raise ValueError("only variable cells can be bound")
        if var in self._map:
            raise ValueError(f"variable {var} is already bound")
        mapping = dict(self._map)
        mapping[var] = base_var(target)
        return Substitution._from_dict(mapping)


def empty() -> Substitution:
    return Substitution()


def bind(s: Substitution, var: CellRef, target: CellRef) -> Substitution:
    return s.bind(var, target)


def deref(c: CellRef, s: Substitution, *others: Substitution) -> Optional[CellRef]:
    """Resolve ``c`` to the constructor cell it stands for.

    Offsets are followed to base variables and bound variables to their
    targets, in whichever substitution holds them.  Returns ``None`` when the
    chain ends in an unbound variable.
    """
    r = walk(c, (s,) + others)
    return r if r.arena.tags[r.index] == CONS else None


def occurs_in(var: CellRef, e: CellRef, s1: Substitution = None, s2: Substitution = None) -> bool:
    """Is ``var`` reachable from the expression at ``e``?"""
    subs = tuple(s for s in (s1, s2) if s is not None)
    var = walk(var, subs)
    if var.arena.tags[var.index] == CONS:
        raise ValueError("occurs_in needs an unbound variable")
    todo = [e]
    seen = set()
    while todo:
        c = todo.pop()
        arena = c.arena
        i = c.index
        remaining = 1
        while remaining:
            if arena.tags[i] != CONS:
                r = walk(CellRef(arena, i), subs)
                if r == var:
                    return True
                if r.arena.tags[r.index] == CONS and r not in seen:
                    seen.add(r)
                    todo.append(r)
            remaining += arena.arities[i] - 1
            i += 1
    return False


def materialize(e: ExprRef, s: Substitution = None, s_other: Substitution = None,
                target: Optional[Arena] = None) -> ExprRef:
    """Write ``e`` with all bindings applied as a fresh encoding.

    Unbound variables keep their sharing: the first occurrence becomes a
    ``NOVAR`` and later ones ``OFVAR`` cells pointing back at it.
    """
    if target is None:
        target = Arena()
    subs = tuple(x for x in (s, s_other) if x is not None)
    start = len(target)
    placed: Dict[CellRef, int] = {}
    active = set()

    def emit(c: CellRef):
        arena = c.arena
        i = c.index
        remaining = 1
        while remaining:
            t = arena.tags[i]
            if t == CONS:
                target.push(CONS, arena.values[i], arena.arities[i])
            else:
                r = walk(CellRef(arena, i), subs)
                if r.arena.tags[r.index] == CONS:
                    if r in active:
                        raise ExprError("cyclic binding chain")
                    active.add(r)
                    emit(r)
                    active.discard(r)
                else:
                    first = placed.get(r)
                    if first is None:
                        placed[r] = target.push(NOVAR, None)
                    else:
                        target.push(OFVAR, len(target) - first)
            remaining += arena.arities[i] - 1
            i += 1

    emit(e.cell if isinstance(e, ExprRef) else e)
    return ExprRef(target, start)


def apply_destructive(var: CellRef, target: CellRef) -> None:
    """Store ``target`` in the cell of ``var``.

    An offset variable is redirected to its base cell; the offset cell itself
    is left as it is.
    """
    var = base_var(var)
    arena = var.arena
    if arena.tags[var.index] != NOVAR:
        raise ValueError("only variable cells can be bound")
    if arena.values[var.index] is not None:
        raise ValueError(f"variable at {var.index} is already bound")
    arena.values[var.index] = base_var(target)


def render_substitution(s: Substitution, names: Optional[VarNames] = None) -> str:
    """``{V0 -> h(a, V1), ...}``; targets are shown as stored, not resolved."""
    if names is None:
        names = VarNames()
    parts = [f"{names(v)} -> {render(t, names=names)}" for v, t in s.bindings]
    return "{" + ", ".join(parts) + "}"
