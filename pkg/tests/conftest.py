import random

import pytest
from hypothesis import strategies as st

from exprindex.expr_core import parse
from exprindex.oracle import App, Var, canonical

SIGNATURE = [("a", 0), ("b", 0), ("c", 0), ("f", 1), ("g", 2), ("h", 2), ("k", 3), ("p", 4)]


def trees(max_vars=5, max_leaves=30):
    leaves = st.one_of(
        st.integers(0, max_vars - 1).map(Var),
        st.sampled_from([n for n, a in SIGNATURE if a == 0]).map(App),
    )

    def extend(children):
        return st.sampled_from([s for s in SIGNATURE if s[1]]).flatmap(
            lambda s: st.lists(children, min_size=s[1], max_size=s[1]).map(
                lambda args: App(s[0], tuple(args))))

    return st.recursive(leaves, extend, max_leaves=max_leaves)


canonical_trees = trees().map(canonical)


def cells(t):
    """Cell encoding of a tree, through the text syntax."""
    return parse(str(t))


@pytest.fixture
def rng():
    return random.Random(1234)


def trie_violations(trie, classify=None):
    """Parent-child pairs that are not strict generalizations and sibling runs
    that are not strictly increasing, checked with the tree oracle."""
    from exprindex.expr_core import compare_expressions
    from exprindex.oracle import oracle_classify, tree_of_cells

    classify = classify or oracle_classify
    out = []
    stack = [trie.root]
    while stack:
        node = stack.pop()
        kids = node.children
        for a, b in zip(kids, kids[1:]):
            if compare_expressions(a.expr, b.expr) >= 0:
                out.append(("order", a, b))
        if node.item is not None:
            p = tree_of_cells(node.expr)
            for c in kids:
                if classify(p, tree_of_cells(c.expr)).name != "SG":
                    out.append(("parent", node, c))
        stack.extend(kids)
    return out


def expected_dump(ts):
    """Text dump of the canonical trie over a set of trees, from the oracle."""
    import functools

    from exprindex.expr_core import compare_expressions
    from exprindex.oracle import oracle_classify

    uniq = list({canonical(t): None for t in ts})
    enc = {t: parse(str(t)) for t in uniq}
    order = functools.cmp_to_key(lambda a, b: int(compare_expressions(enc[a], enc[b])))
    lines = ["(root)"]

    def build(members, d):
        tops = sorted((m for m in members
                       if not any(oracle_classify(o, m).name == "SG" for o in members)), key=order)
        groups = {t: [] for t in tops}
        for m in members:
            if m in groups:
                continue
            for t in tops:
                if oracle_classify(t, m).name == "SG":
                    groups[t].append(m)
                    break
        for t in tops:
            lines.append("  " * d + str(t))
            build(groups[t], d + 1)

    build(uniq, 1)
    return "\n".join(lines) + "\n"


# -- acceptance reporting -------------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    The test stores its measurement in ``record["detail"]``; the line is
    written whether or not the test's assertions hold.
    """
    record = {"detail": ""}
    yield record
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    line = f"{'PASS' if ok else 'FAIL'}  {request.node.name}: {record['detail']}"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
