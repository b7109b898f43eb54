"""Reference implementations on ordinary trees.

Nothing here reads cells except the two bridge functions at the bottom.
Unification is textbook Robinson with an occurs check on every binding, and
the mode of a pair is decided from the definitions: one-sided matching in
each direction, then unification.  Use it to check the cell machinery, not
to run it.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .expr_core import CONS, NOVAR, OFVAR, Arena, ExprError, ExprRef, intern, symbol
from .unify import Mode

VR, SG, SI, OU, NU = Mode.VR, Mode.SG, Mode.SI, Mode.OU, Mode.NU


class Var(NamedTuple):
    rank: int

    def __str__(self):
        return f"V{self.rank}"


class App(NamedTuple):
    name: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(map(str, self.args))})"


TreeExpr = Union[Var, App]
Unifier = Dict[int, TreeExpr]


def variables(t: TreeExpr) -> List[int]:
    """Ranks in first-occurrence order."""
    out: List[int] = []
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            if x.rank not in out:
                out.append(x.rank)
        else:
            stack.extend(reversed(x.args))
    return out


def canonical(t: TreeExpr) -> TreeExpr:
    """Renumber variables 0, 1, ... by first occurrence."""
    ranks = {r: i for i, r in enumerate(variables(t))}
    return rename(t, ranks)


def rename(t: TreeExpr, ranks: Dict[int, int]) -> TreeExpr:
    if isinstance(t, Var):
        return Var(ranks.get(t.rank, t.rank))
    return App(t.name, tuple(rename(a, ranks) for a in t.args))


def shift(t: TreeExpr, offset: int) -> TreeExpr:
    if isinstance(t, Var):
        return Var(t.rank + offset)
    return App(t.name, tuple(shift(a, offset) for a in t.args))


def apart(a: TreeExpr, b: TreeExpr) -> Tuple[TreeExpr, TreeExpr]:
    """Rename ``b`` so that it shares no variable with ``a``."""
    va = variables(a)
    return a, shift(b, max(va) + 1) if va else b


def substitute(t: TreeExpr, sigma: Dict[int, TreeExpr]) -> TreeExpr:
    """Simultaneous application."""
    if isinstance(t, Var):
        return sigma.get(t.rank, t)
    return App(t.name, tuple(substitute(a, sigma) for a in t.args))


def occurs(rank: int, t: TreeExpr) -> bool:
    if isinstance(t, Var):
        return t.rank == rank
    return any(occurs(rank, a) for a in t.args)


def oracle_unify(a: TreeExpr, b: TreeExpr) -> Optional[Unifier]:
    """Robinson unification; returns an idempotent MGU or ``None``.

    The arguments must not share variables.
    """
    sigma: Unifier = {}
    todo = [(a, b)]
    while todo:
        x, y = todo.pop()
        x = substitute(x, sigma)
        y = substitute(y, sigma)
        if x == y:
            continue
        if isinstance(y, Var) and not isinstance(x, Var):
            x, y = y, x
        if isinstance(x, Var):
            if occurs(x.rank, y):
                return None
            step = {x.rank: y}
            sigma = {v: substitute(t, step) for v, t in sigma.items()}
            sigma[x.rank] = y
            continue
        if x.name != y.name or len(x.args) != len(y.args):
            return None
        todo.extend(zip(x.args, y.args))
    return sigma


def match(pattern: TreeExpr, target: TreeExpr) -> Optional[Unifier]:
    """Substitution ``s`` with ``substitute(pattern, s) == target``, if any."""
    s: Unifier = {}
    todo = [(pattern, target)]
    while todo:
        p, t = todo.pop()
        if isinstance(p, Var):
            seen = s.get(p.rank)
            if seen is None:
                s[p.rank] = t
            elif seen != t:
                return None
        elif isinstance(t, Var) or p.name != t.name or len(p.args) != len(t.args):
            return None
        else:
            todo.extend(zip(p.args, t.args))
    return s


def is_renaming(s: Unifier) -> bool:
    images = list(s.values())
    return all(isinstance(x, Var) for x in images) and len(set(images)) == len(images)


def oracle_classify(a: TreeExpr, b: TreeExpr) -> Mode:
    """Mode of the pair, decided from the definitions."""
    a, b = apart(a, b)
    down = match(a, b)
    up = match(b, a)
    branches = [
        (VR, down is not None and is_renaming(down)),
        (SG, down is not None and not is_renaming(down)),
        (SI, up is not None and not is_renaming(up)),
    ]
    fired = [m for m, hit in branches if hit]
    if len(fired) > 1:
        raise AssertionError(f"mode branches overlap: {fired}")
    if fired:
        return fired[0]
    return OU if oracle_unify(a, b) is not None else NU


# the acceptance sets of the four query modes, keyed by mode name
ACCEPT = {
    "VARIANT": {VR},
    "INSTANCE": {VR, SI},
    "GENERALIZATION": {VR, SG},
    "UNIFIABLE": {VR, SG, SI, OU},
}


def oracle_retrieve(corpus: Sequence[TreeExpr], q: TreeExpr, mode) -> Dict[TreeExpr, Mode]:
    """Linear scan: canonical stored expression -> its mode against ``q``.

    Variants in the corpus collapse to one entry, as they do in an index.
    ``mode`` is a query mode or its name.
    """
    accept = ACCEPT[getattr(mode, "name", mode)]
    out: Dict[TreeExpr, Mode] = {}
    for t in corpus:
        key = canonical(t)
        if key in out:
            continue
        m = oracle_classify(t, q)
        if m in accept:
            out[key] = m
    return out


def classify_all(corpus: Iterable[TreeExpr], q: TreeExpr) -> Dict[TreeExpr, Mode]:
    """Mode of every distinct stored expression against ``q``."""
    out: Dict[TreeExpr, Mode] = {}
    for t in corpus:
        key = canonical(t)
        if key not in out:
            out[key] = oracle_classify(t, q)
    return out


# ---------------------------------------------------------------------------
# bridge to the cell encoding

def tree_of_cells(e: ExprRef) -> TreeExpr:
    """Read the encoding structurally; in-cell bindings are ignored."""
    arena, start = e
    tags, values, arities = arena.tags, arena.values, arena.arities
    end = len(tags)
    ranks: Dict[int, int] = {}
    pos = start

    def read() -> TreeExpr:
        nonlocal pos
        if pos >= end:
            raise ExprError(f"expression at {start} runs past the arena end")
        i = pos
        pos += 1
        t = tags[i]
        if t == CONS:
            args = tuple(read() for _ in range(arities[i]))
            return App(symbol(values[i]).name, args)
        base = i if t == NOVAR else i - values[i]
        if base < start or tags[base] != NOVAR:
            raise ExprError(f"offset variable at {i} leaves its expression")
        if base not in ranks:
            ranks[base] = len(ranks)
        return Var(ranks[base])

    return read()


def cells_of_tree(t: TreeExpr, arena: Optional[Arena] = None) -> ExprRef:
    if arena is None:
        arena = Arena()
    start = len(arena)
    first: Dict[int, int] = {}

    def write(x: TreeExpr):
        if isinstance(x, Var):
            at = first.get(x.rank)
            if at is None:
                first[x.rank] = arena.push(NOVAR, None)
            else:
                arena.push(OFVAR, len(arena) - at)
        else:
            arena.push(CONS, intern(x.name).id, len(x.args))
            for a in x.args:
                write(a)

    write(t)
    return ExprRef(arena, start)
