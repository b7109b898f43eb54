"""Instance tries.

Every node below the root stores an expression, every child is a strict
instance of its parent, and siblings are sorted by the expression order.
For a stored set ``S`` the shape is fixed as follows:

* the children of a node are the elements of its set that have no strictly
  more general element in that set;
* every other element belongs to the subtree of the *first* child (in
  sibling order) that is more general than it.

Insertion and removal maintain exactly this shape, so the trie depends on
the stored set only, never on the order of updates.

Siblings sorted by the expression order also group by top symbol: the one
possible single-variable child comes first, and the children headed by a
given ``f/n`` are contiguous.  Lookups bisect to that block and treat every
other sibling as not unifiable without running the unifier on it.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from .expr_core import Arena, CellRef, ExprRef, copy_fresh, render, sort_key, span
from .substitution import Substitution
from .unify import NU, OU, SG, SI, VR, Mode, UnifyStats, solve


class QueryMode(Enum):
    VARIANT = "variant"
    INSTANCE = "instance"
    GENERALIZATION = "generalization"
    UNIFIABLE = "unifiable"


ACCEPT = {
    QueryMode.VARIANT: frozenset({VR}),
    QueryMode.INSTANCE: frozenset({VR, SI}),
    QueryMode.GENERALIZATION: frozenset({VR, SG}),
    QueryMode.UNIFIABLE: frozenset({VR, SG, SI, OU}),
}


class InsertResult(Enum):
    INSERTED = "inserted"
    VARIANT_PRESENT = "variant-present"


class RemoveResult(Enum):
    REMOVED = "removed"
    NOT_FOUND = "not-found"


class _Item:
    """An expression with its cells pre-sliced for the unifier."""

    __slots__ = ("expr", "key", "tags", "vals", "arities")

    def __init__(self, expr: ExprRef):
        arena, start = expr
        n = span(expr)
        self.expr = expr
        self.key = sort_key(expr)
        self.tags = arena.tags[start:start + n]
        self.vals = arena.values[start:start + n]
        self.arities = arena.arities[start:start + n]


class TrieNode:
    __slots__ = ("item", "children")

    def __init__(self, item: Optional[_Item]):
        self.item = item
        self.children: List[TrieNode] = []

    @property
    def expr(self) -> Optional[ExprRef]:
        return self.item.expr if self.item else None

    @property
    def key(self):
        return self.item.key

    def __repr__(self):
        return f"TrieNode({render(self.item.expr) if self.item else '(root)'})"

    def walk(self) -> Iterator["TrieNode"]:
        """This node's strict descendants in preorder."""
        stack = list(reversed(self.children))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


class Match(NamedTuple):
    """A stored expression answering a query.

    The substitutions come from unifying the stored expression with the
    query.  Nodes reported as part of a whole subtree were never unified;
    their substitutions are ``None`` and their mode is implied.
    """

    expr: ExprRef
    mode: Mode
    s_query: Optional[Substitution] = None
    s_stored: Optional[Substitution] = None

    def __str__(self):
        return f"{render(self.expr)}\t{self.mode}"


class Retrieval(NamedTuple):
    matches: List[Match]
    visited: int


@dataclass
class TrieStats:
    size: int
    depth: int
    node_visits_last_query: int


def _block(children: List[TrieNode], key0) -> Tuple[int, int]:
    """Index range of the siblings whose first prefix item is ``key0``."""
    lo = bisect.bisect_left(children, (key0,), key=lambda n: n.item.key)
    hi = bisect.bisect_left(children, (key0 + (0,),), key=lambda n: n.item.key)
    return lo, hi


def _candidates(children: List[TrieNode], key0) -> List[TrieNode]:
    """Siblings that may unify with an expression starting with ``key0``."""
    if key0[0] == 0 or not children:
        return children
    lo, hi = _block(children, key0)
    head = children[:1] if children[0].item.key[0][0] == 0 else []
    return head + children[lo:hi]


class InstanceTrie:
    def __init__(self):
        self.root = TrieNode(None)
        self.arena = Arena()
        self.stats_ = UnifyStats()
        self._size = 0
        self._last_visits = 0

    # -- basic protocol ---------------------------------------------------

    def __len__(self):
        return self._size

    def __iter__(self) -> Iterator[ExprRef]:
        return (node.item.expr for node in self.root.walk())

    def __contains__(self, e: ExprRef) -> bool:
        return self._find(self._probe(e))[1] is not None

    def _mode(self, stored: _Item, other: _Item) -> Mode:
        """Mode of the stored expression relative to ``other``."""
        return solve(stored.tags + other.tags, stored.vals + other.vals,
                     stored.arities + other.arities, len(stored.tags), self.stats_).mode

    def _probe(self, e: ExprRef) -> _Item:
        return _Item(copy_fresh(e, Arena()))

    # -- insertion ----------------------------------------------------------

    def insert(self, e: ExprRef) -> InsertResult:
        item = _Item(copy_fresh(e, self.arena))
        result = self._insert_at(self.root, item)
        if result is InsertResult.INSERTED:
            self._size += 1
        return result

    def _insert_at(self, node: TrieNode, item: _Item) -> InsertResult:
        while True:
            children = node.children
            modes: Dict[int, Mode] = {}
            for child in _candidates(children, item.key[0]):
                m = modes[id(child)] = self._mode(child.item, item)
                if m is VR:
                    return InsertResult.VARIANT_PRESENT
                if m is SG:
                    break
            else:
                break
            node = child

        # ``item`` becomes a child of ``node``.  Siblings it generalizes move
        # below it, and so does anything in a later sibling's subtree that it
        # generalizes (it precedes that sibling, so it is the first
        # generalizer).  Everything moved is re-inserted one element at a time.
        pending: List[_Item] = []
        kept: List[TrieNode] = []
        for child in children:
            m = modes.get(id(child))     # unset means a different top symbol
            if m is SI:
                pending.append(child.item)
                pending.extend(n.item for n in child.walk())
                continue
            kept.append(child)
            if m is OU and child.item.key > item.key:
                self._extract(child, item, pending)
        new = TrieNode(item)
        at = bisect.bisect_left(kept, item.key, key=lambda n: n.item.key)
        kept.insert(at, new)
        node.children = kept
        for p in pending:
            self._insert_at(node, p)
        return InsertResult.INSERTED

    def _extract(self, parent: TrieNode, item: _Item, out: List[_Item]) -> None:
        """Cut out of ``parent``'s subtree every node that ``item`` generalizes.

        What is generalized by ``item`` is closed under taking instances, so
        whole subtrees go and the rest keeps its shape.
        """
        cands = {id(c) for c in _candidates(parent.children, item.key[0])}
        kept = []
        for child in parent.children:
            if id(child) not in cands:
                kept.append(child)
                continue
            m = self._mode(child.item, item)
            if m is SI:
                out.append(child.item)
                out.extend(n.item for n in child.walk())
                continue
            kept.append(child)
            if m is OU:
                self._extract(child, item, out)
        parent.children = kept

    # -- lookup and removal -------------------------------------------------

    def _find(self, item: _Item, counter: Optional[List[int]] = None
              ) -> Tuple[Optional[TrieNode], Optional[TrieNode], Optional[Tuple]]:
        """Locate the node holding a variant of ``item``.

        Returns ``(parent, node, unifier state)``; ``node`` is ``None`` when no
        variant is stored.  A variant can only sit below the first sibling
        that is more general than ``item``, so one path is followed.
        """
        node = self.root
        while True:
            for child in _candidates(node.children, item.key[0]):
                if counter is not None:
                    counter[0] += 1
                state = solve(child.item.tags + item.tags, child.item.vals + item.vals,
                              child.item.arities + item.arities, len(child.item.tags),
                              self.stats_)
                if state.mode is VR:
                    return node, child, state
                if state.mode is SG:
                    node = child
                    break
            else:
                return node, None, None

    def remove(self, e: ExprRef) -> RemoveResult:
        parent, node, _ = self._find(self._probe(e))
        if node is None:
            return RemoveResult.NOT_FOUND
        parent.children = [c for c in parent.children if c is not node]
        for d in list(node.walk()):
            self._insert_at(parent, d.item)
        self._size -= 1
        return RemoveResult.REMOVED

    # -- retrieval ----------------------------------------------------------

    def retrieve(self, q: ExprRef, mode: QueryMode) -> Retrieval:
        """Stored expressions whose mode against ``q`` is accepted by ``mode``.

        Traversal is top-down, left to right.  Subtrees under a node that
        does not unify with ``q`` are skipped in every mode: an instance of
        that node unifying with ``q`` would make the node unify with it too.
        """
        mode = QueryMode(mode)
        query = self._probe(q)
        counter = [0]
        out: List[Match] = []

        def match(node: TrieNode, state) -> Match:
            stored = node.item
            n1 = len(stored.tags)
            s_stored: Dict[CellRef, CellRef] = {}
            s_query: Dict[CellRef, CellRef] = {}

            def ref(a):
                if a < n1:
                    return CellRef(stored.expr.arena, stored.expr.start + a)
                return CellRef(query.expr.arena, query.expr.start + a - n1)

            for var, target in state.bindings.items():
                (s_stored if var < n1 else s_query)[ref(var)] = ref(target)
            return Match(stored.expr, state.mode,
                         Substitution._from_dict(s_query), Substitution._from_dict(s_stored))

        def whole(node: TrieNode, state) -> None:
            out.append(match(node, state))
            out.extend(Match(d.item.expr, SI) for d in node.walk())

        if mode is QueryMode.VARIANT:
            _, node, state = self._find(query, counter)
            if node is not None:
                out.append(match(node, state))
            self._last_visits = counter[0]
            return Retrieval(out, counter[0])

        key0 = query.key[0]
        stack = list(reversed(_candidates(self.root.children, key0)))
        while stack:
            node = stack.pop()
            stored = node.item
            state = solve(stored.tags + query.tags, stored.vals + query.vals,
                          stored.arities + query.arities, len(stored.tags), self.stats_)
            counter[0] += 1
            m = state.mode
            if m is NU:
                continue
            descend = False
            if mode is QueryMode.INSTANCE:
                if m is VR or m is SI:
                    whole(node, state)
                else:
                    descend = True
            elif mode is QueryMode.GENERALIZATION:
                if m is VR or m is SG:
                    out.append(match(node, state))
                descend = m is SG
            else:
                if m is VR or m is SI:
                    whole(node, state)
                else:
                    out.append(match(node, state))
                    descend = True
            if descend:
                stack.extend(reversed(_candidates(node.children, key0)))
        self._last_visits = counter[0]
        return Retrieval(out, counter[0])

    # -- inspection -----------------------------------------------------------

    def depth(self) -> int:
        best = 0
        stack = [(c, 1) for c in self.root.children]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in node.children)
        return best

    def stats(self) -> TrieStats:
        return TrieStats(self._size, self.depth(), self._last_visits)

    def dump(self, format: str = "text") -> str:
        format = format.lower()
        if format == "text":
            lines = ["(root)"]

            def rec(node, d):
                for c in node.children:
                    lines.append("  " * d + render(c.item.expr))
                    rec(c, d + 1)

            rec(self.root, 1)
            return "\n".join(lines) + "\n"
        if format == "dot":
            lines = ["digraph trie {", '  n0 [label="(root)"];']
            edges = []
            counter = [0]

            def rec(node, name):
                for c in node.children:
                    counter[0] += 1
                    cname = f"n{counter[0]}"
                    lines.append(f'  {cname} [label="{render(c.item.expr)}"];')
                    edges.append(f"  {name} -> {cname};")
                    rec(c, cname)

            rec(self.root, "n0")
            return "\n".join(lines + edges + ["}"]) + "\n"
        raise ValueError(f"unknown dump format {format!r}")


def trie_new() -> InstanceTrie:
    return InstanceTrie()
