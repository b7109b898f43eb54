"""Matching-unification over prefix cell encodings.

Both expressions are read left to right in lockstep.  Each side keeps a
count of cells still to read (starting at 1, plus the arity of every
constructor read, minus one per item consumed) and the walk ends when both
counts reach zero.  Alongside the most general unifier it reports how the
two expressions relate:

    VR  variants of each other
    SG  the left one is strictly more general
    SI  the left one is a strict instance
    OU  unifiable, but neither is an instance of the other
    NU  not unifiable

Working addresses
-----------------
The machine copies the two cell spans into one local buffer: the left
expression occupies ``0 .. n1-1`` and the right one ``n1 ..``.  Which side a
variable belongs to is then a single comparison with ``n1``.  Results are
translated back to :class:`CellRef` values at the end.

How the mode is tracked
-----------------------
Variables joined by variable-variable bindings form classes.  For each
class the machine counts members from the left and from the right side.
The left expression stops being a renaming of the right one as soon as a
class holding a left variable is bound to a constructor, or a class gains
a second left variable; symmetrically for the right side.  Those two facts
are exactly the ``BIND_*`` events fed to :func:`mode_transition`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional

from .expr_core import (
    CONS, NOVAR, OFVAR, Arena, CellRef, ExprRef, copy_fresh, has_bindings, span,
)
from .substitution import Substitution


class Mode(Enum):
    VR = "VR"
    SG = "SG"
    SI = "SI"
    OU = "OU"
    NU = "NU"

    def __str__(self):
        return self.value

    def flip(self) -> "Mode":
        """The mode of the swapped pair."""
        return _FLIP[self]


VR, SG, SI, OU, NU = Mode.VR, Mode.SG, Mode.SI, Mode.OU, Mode.NU
_FLIP = {VR: VR, SG: SI, SI: SG, OU: OU, NU: NU}


class Event(Enum):
    BIND_LEFT_NONVAR = "bind-left-nonvar"
    BIND_RIGHT_NONVAR = "bind-right-nonvar"
    BIND_VAR_VAR_BIJECTIVE = "bind-var-var-bijective"
    BIND_VAR_VAR_NONINJECTIVE_LEFT = "bind-var-var-noninjective-left"
    BIND_VAR_VAR_NONINJECTIVE_RIGHT = "bind-var-var-noninjective-right"
    CONFLICT = "conflict"
    OCCURS_FAIL = "occurs-fail"


_LEFT = {VR: SG, SG: SG, SI: OU, OU: OU, NU: NU}
_RIGHT = {VR: SI, SI: SI, SG: OU, OU: OU, NU: NU}
_TRANSITIONS = {
    Event.BIND_LEFT_NONVAR: _LEFT,
    Event.BIND_VAR_VAR_NONINJECTIVE_LEFT: _LEFT,
    Event.BIND_RIGHT_NONVAR: _RIGHT,
    Event.BIND_VAR_VAR_NONINJECTIVE_RIGHT: _RIGHT,
    Event.BIND_VAR_VAR_BIJECTIVE: {m: m for m in Mode},
    Event.CONFLICT: {m: NU for m in Mode},
    Event.OCCURS_FAIL: {m: NU for m in Mode},
}


def mode_transition(mode: Mode, event: Event) -> Mode:
    return _TRANSITIONS[event][mode]


class UnifyError(RuntimeError):
    """The cell encoding broke an invariant during unification."""


@dataclass
class UnifyStats:
    """Counters accumulated over any number of :func:`unify` calls."""

    calls: int = 0
    steps: int = 0
    occurs_checks: int = 0


@dataclass
class UnifyState:
    """One traversal frame.

    ``c1``/``c2`` are cursors and ``r1``/``r2`` the cells still to read.
    ``bindings``, ``classes`` and ``stats`` are shared between a frame and
    the frames it starts for dereferenced subexpressions; ``mode`` is copied
    back when such a frame returns.
    """

    c1: int
    c2: int
    r1: int = 1
    r2: int = 1
    mode: Mode = VR
    bindings: Dict[int, int] = field(default_factory=dict)
    # base cell of a class representative -> [left members, right members]
    classes: Dict[int, List[int]] = field(default_factory=dict)
    stats: UnifyStats = field(default_factory=UnifyStats)

    def done(self) -> bool:
        return self.r1 == 0 and self.r2 == 0


def step_advance(state: UnifyState, skip1: int = 1, skip2: int = 1,
                 grow1: int = 0, grow2: int = 0) -> UnifyState:
    """Consume one item on each side.

    ``grow`` is the arity of a constructor just matched; ``skip`` is how many
    cells the item occupied (1, or the span of a subexpression taken whole).
    """
    state.r1 += grow1 - 1
    state.r2 += grow2 - 1
    if state.r1 < 0 or state.r2 < 0:
        raise UnifyError("cell counter underflow")
    state.c1 += skip1
    state.c2 += skip2
    return state


class _Machine:
    __slots__ = ("tags", "vals", "arities", "n1", "stats")

    def __init__(self, tags, vals, arities, n1, stats):
        self.tags = tags
        self.vals = vals
        self.arities = arities
        self.n1 = n1
        self.stats = stats

    def resolve(self, a: int, bindings: Dict[int, int]) -> int:
        """Constructor cell or unbound base variable reached from ``a``."""
        tags = self.tags
        while True:
            t = tags[a]
            if t == CONS:
                return a
            if t == OFVAR:
                a -= self.vals[a]
            b = bindings.get(a)
            if b is None:
                return a
            a = b

    def span(self, a: int) -> int:
        arities = self.arities
        remaining = 1
        i = a
        while remaining:
            remaining += arities[i] - 1
            i += 1
        return i - a

    def occurs(self, var: int, a: int, bindings: Dict[int, int]) -> bool:
        self.stats.occurs_checks += 1
        tags, arities = self.tags, self.arities
        todo = [a]
        seen = set()
        while todo:
            i = todo.pop()
            remaining = 1
            while remaining:
                if tags[i] != CONS:
                    r = self.resolve(i, bindings)
                    if r == var:
                        return True
                    if tags[r] == CONS and r not in seen:
                        seen.add(r)
                        todo.append(r)
                remaining += arities[i] - 1
                i += 1
        return False

    def bind_structure(self, state: UnifyState, var: int, target: int) -> None:
        state.bindings[var] = target
        cls = state.classes.pop(var, None)
        if cls is None:
            left, right = (1, 0) if var < self.n1 else (0, 1)
        else:
            left, right = cls
        if left:
            state.mode = mode_transition(state.mode, Event.BIND_LEFT_NONVAR)
        if right:
            state.mode = mode_transition(state.mode, Event.BIND_RIGHT_NONVAR)

    def bind_vars(self, state: UnifyState, keep: int, var: int) -> None:
        """Bind ``var`` to ``keep``; both are unbound and distinct."""
        n1 = self.n1
        classes = state.classes
        state.bindings[var] = keep
        a = classes.pop(var, None) or ((1, 0) if var < n1 else (0, 1))
        b = classes.get(keep) or ((1, 0) if keep < n1 else (0, 1))
        merged = classes[keep] = [a[0] + b[0], a[1] + b[1]]
        event = Event.BIND_VAR_VAR_BIJECTIVE
        if merged[0] > 1:
            event = Event.BIND_VAR_VAR_NONINJECTIVE_LEFT
            state.mode = mode_transition(state.mode, event)
        if merged[1] > 1:
            event = Event.BIND_VAR_VAR_NONINJECTIVE_RIGHT
            state.mode = mode_transition(state.mode, event)
        if event is Event.BIND_VAR_VAR_BIJECTIVE:
            state.mode = mode_transition(state.mode, event)

    def run(self, state: UnifyState, top: bool) -> UnifyState:
        """Walk the frame to completion; ``state.mode`` is NU on failure.

        ``top`` marks the frame that walks the two input expressions.  There a
        ``NOVAR`` under the cursor is a first occurrence nobody has reached
        yet, so it cannot occur in what it gets bound to.  Frames started for
        dereferenced subexpressions revisit cells whose offset occurrences may
        already be bound, so they check every variable-to-structure binding.
        """
        tags, vals, arities = self.tags, self.vals, self.arities
        bindings = state.bindings
        stats = self.stats
        while not state.done():
            stats.steps += 1
            c1, c2 = state.c1, state.c2
            t1, t2 = tags[c1], tags[c2]
            if t1 == CONS and t2 == CONS:
                if vals[c1] != vals[c2] or arities[c1] != arities[c2]:
                    state.mode = mode_transition(state.mode, Event.CONFLICT)
                    return state
                step_advance(state, grow1=arities[c1], grow2=arities[c2])
                continue

            x1 = c1 if t1 == CONS else self.resolve(c1, bindings)
            x2 = c2 if t2 == CONS else self.resolve(c2, bindings)
            k1, k2 = tags[x1] == CONS, tags[x2] == CONS
            # a constructor under the cursor is consumed as a whole subexpression
            skip1 = self.span(c1) if t1 == CONS else 1
            skip2 = self.span(c2) if t2 == CONS else 1

            if k1 and k2:
                if x1 != x2:
                    sub = UnifyState(x1, x2, mode=state.mode, bindings=bindings,
                                     classes=state.classes, stats=stats)
                    self.run(sub, False)
                    state.mode = sub.mode
                    if state.mode is NU:
                        return state
            elif k1 or k2:
                var, target, var_cell = (x2, x1, t2) if k1 else (x1, x2, t1)
                fresh = top and var_cell == NOVAR
                if not fresh and self.occurs(var, target, bindings):
                    state.mode = mode_transition(state.mode, Event.OCCURS_FAIL)
                    return state
                self.bind_structure(state, var, target)
            elif x1 != x2:
                self.bind_vars(state, x1, x2)
            step_advance(state, skip1, skip2)
        return state


class UnifyResult(NamedTuple):
    mode: Mode
    s1: Substitution
    s2: Substitution


def solve(tags: list, vals: list, arities: list, n1: int,
          stats: Optional[UnifyStats] = None) -> UnifyState:
    """Unify the expressions at ``0`` and ``n1`` of one local cell buffer.

    The buffer must hold no in-cell bindings.  This is the raw entry used by
    the index, which keeps its expressions pre-sliced.
    """
    if stats is None:
        stats = UnifyStats()
    stats.calls += 1
    machine = _Machine(tags, vals, arities, n1, stats)
    state = UnifyState(0, n1, stats=stats)
    return machine.run(state, True)


def _slice(e: ExprRef):
    arena, start = e
    n = span(e)
    return (arena.tags[start:start + n], arena.values[start:start + n],
            arena.arities[start:start + n])


def unify(e1: ExprRef, e2: ExprRef, stats: Optional[UnifyStats] = None) -> UnifyResult:
    """Classify the pair and compute its most general unifier.

    ``s1`` binds variables of ``e1`` and ``s2`` those of ``e2``; targets may
    lie in either expression, so apply them together.  If the two
    references overlap in one arena, ``e2`` is first copied to a scratch
    arena and ``s2`` refers to that copy.
    """
    if has_bindings(e1) or has_bindings(e2):
        raise ValueError("unify works on unbound encodings; materialize destructively bound expressions first")
    if e1.arena is e2.arena:
        lo1, hi1 = e1.start, e1.start + span(e1)
        lo2, hi2 = e2.start, e2.start + span(e2)
        if lo1 < hi2 and lo2 < hi1:
            e2 = copy_fresh(e2, Arena())
    tags1, vals1, ar1 = _slice(e1)
    tags2, vals2, ar2 = _slice(e2)
    n1 = len(tags1)
    state = solve(tags1 + tags2, vals1 + vals2, ar1 + ar2, n1, stats)
    if state.mode is NU:
        return UnifyResult(NU, Substitution(), Substitution())

    def ref(a: int) -> CellRef:
        return CellRef(e1.arena, e1.start + a) if a < n1 else CellRef(e2.arena, e2.start + a - n1)

    s1: Dict[CellRef, CellRef] = {}
    s2: Dict[CellRef, CellRef] = {}
    for var, target in state.bindings.items():
        (s1 if var < n1 else s2)[ref(var)] = ref(target)
    return UnifyResult(state.mode, Substitution._from_dict(s1), Substitution._from_dict(s2))


def classify(e1: ExprRef, e2: ExprRef) -> Mode:
    return unify(e1, e2).mode
