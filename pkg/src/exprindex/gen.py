"""Seeded random expressions and corpora."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Tuple

from .oracle import App, TreeExpr, Var, canonical, shift, substitute, variables

DEFAULT_SIGNATURE: Tuple[Tuple[str, int], ...] = (
    ("a", 0), ("b", 0), ("c", 0), ("f", 1), ("g", 2), ("h", 2), ("k", 3), ("p", 4),
)


@dataclass(frozen=True)
class Shape:
    max_depth: int = 6
    max_vars: int = 5
    var_prob: float = 0.3
    # chance of stopping early at depth d is leaf_bias * d
    leaf_bias: float = 0.12
    signature: Tuple[Tuple[str, int], ...] = DEFAULT_SIGNATURE

    def __post_init__(self):
        if not 1 <= len(self.signature) <= 8 or max(n for _, n in self.signature) > 4:
            raise ValueError("signature must have 1..8 symbols of arity <= 4")


def random_tree(rng: random.Random, shape: Shape = Shape(), depth: int = 0) -> TreeExpr:
    constants = [s for s in shape.signature if s[1] == 0]
    leaf = depth >= shape.max_depth or rng.random() < shape.leaf_bias * depth
    var_prob = shape.var_prob if depth else shape.var_prob / 6
    if rng.random() < var_prob or (leaf and not constants):
        return Var(rng.randrange(shape.max_vars))
    if leaf or (depth == 0 and rng.random() < 0.05):
        name, _ = rng.choice(constants)
        return App(name)
    compound = [x for x in shape.signature if x[1]] or shape.signature
    name, arity = rng.choice(compound if depth == 0 else shape.signature)
    return App(name, tuple(random_tree(rng, shape, depth + 1) for _ in range(arity)))


def depth(t: TreeExpr) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def _instantiate(rng: random.Random, t: TreeExpr, shape: Shape) -> TreeExpr:
    """Bind some variables of ``t`` to small random terms."""
    vs = variables(t)
    sigma = {}
    for v in vs:
        if rng.random() < 0.5:
            sigma[v] = random_tree(rng, shape, depth=max(shape.max_depth - 2, 0))
    return substitute(t, sigma)


def _generalize(rng: random.Random, t: TreeExpr, shape: Shape) -> TreeExpr:
    """Replace some subterms by variables."""
    if isinstance(t, Var):
        return t
    if rng.random() < 0.25:
        return Var(rng.randrange(shape.max_vars))
    return App(t.name, tuple(_generalize(rng, a, shape) for a in t.args))


def _clip(t: TreeExpr, shape: Shape, d: int = 0) -> TreeExpr:
    if isinstance(t, Var):
        return t
    if d >= shape.max_depth and t.args:
        return Var(0)
    return App(t.name, tuple(_clip(a, shape, d + 1) for a in t.args))


def _cap_vars(t: TreeExpr, shape: Shape) -> TreeExpr:
    t = canonical(t)
    return substitute(t, {r: Var(r % shape.max_vars) for r in variables(t)})


def random_pair(rng: random.Random, shape: Shape = Shape()) -> Tuple[TreeExpr, TreeExpr]:
    """Two expressions drawn to cover all five modes.

    Most of the time the two are related: a renaming, an instance and/or
    generalization of one another, or two instances of a common ancestor.
    The rest are drawn independently, usually with a shared top symbol.
    """
    a = random_tree(rng, shape)
    kind = rng.random()
    if kind < 0.08:
        b = shift(a, 3)
    elif kind < 0.35:
        b = a
        if rng.random() < 0.6:
            b = _instantiate(rng, b, shape)
        if rng.random() < 0.6:
            b = _generalize(rng, b, shape)
    elif kind < 0.6:
        # two specializations of a common ancestor
        root = _generalize(rng, a, shape)
        a = _instantiate(rng, root, shape)
        b = _instantiate(rng, root, shape)
    else:
        b = random_tree(rng, shape)
        if isinstance(a, App) and isinstance(b, App) and rng.random() < 0.7:
            b = random_tree(rng, shape)
            if isinstance(b, App) and b.arity == a.arity:
                b = App(a.name, b.args)
    a = _cap_vars(_clip(a, shape), shape)
    b = _cap_vars(_clip(b, shape), shape)
    return (b, a) if rng.random() < 0.5 else (a, b)


def random_corpus(rng: random.Random, size: int, shape: Shape = Shape()) -> List[TreeExpr]:
    """Expressions with plenty of instance relations among them."""
    out: List[TreeExpr] = []
    for _ in range(size):
        if out and rng.random() < 0.5:
            t = rng.choice(out)
            t = _instantiate(rng, t, shape) if rng.random() < 0.6 else _generalize(rng, t, shape)
            t = _cap_vars(_clip(t, shape), shape)
        else:
            t = _cap_vars(random_tree(rng, shape), shape)
        out.append(t)
    return out


def gen_corpus(seed: int, size: int, shape: Shape = Shape()) -> str:
    """Corpus file text: one canonical expression per line."""
    if size < 0:
        raise ValueError("size must be non-negative")
    rng = random.Random(seed)
    return "".join(f"{t}\n" for t in random_corpus(rng, size, shape))
