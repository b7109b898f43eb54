import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from exprindex.expr_core import Arena, CellRef, Ordering, VarNames, compare_expressions, parse, render
from exprindex.gen import Shape, random_pair
from exprindex.oracle import (
    App, Var, apart, canonical, cells_of_tree, oracle_classify, oracle_unify, substitute,
    tree_of_cells,
)
from exprindex.substitution import apply_destructive, materialize
from exprindex.unify import (
    NU, OU, SG, SI, VR, Event, Mode, UnifyState, UnifyStats, classify, mode_transition,
    solve, step_advance, unify,
)

from conftest import cells, trees


def worked_example_memory():
    """f(V1, V1) at cell 0 and f(a, a) at cell 5."""
    arena = Arena()
    e1 = parse("f(V1, V1)", arena)
    parse("c", arena)
    parse("c", arena)
    e2 = parse("f(a, a)", arena)
    return arena, e1, e2


class TestWorkedExample:
    def test_mode_and_bindings(self):
        arena, e1, e2 = worked_example_memory()
        r = unify(e1, e2)
        assert r.mode is SG
        assert [(b.var.index, b.target.index) for b in r.s1] == [(1, 6)]
        assert len(r.s2) == 0

    def test_no_occurs_check(self):
        arena, e1, e2 = worked_example_memory()
        stats = UnifyStats()
        unify(e1, e2, stats)
        assert stats.occurs_checks == 0 and stats.calls == 1

    def test_counter_trace(self):
        # counters after each of the three steps of the walk
        state = UnifyState(0, 3)
        assert (state.r1, state.r2) == (1, 1)
        # arity added before the per-item decrement: 1 + 2 = 3, then 2
        assert state.r1 + 2 == 3
        step_advance(state, grow1=2, grow2=2)
        assert (state.r1, state.r2, state.c1, state.c2) == (2, 2, 1, 4)
        step_advance(state)
        assert (state.r1, state.r2) == (1, 1)
        step_advance(state)
        assert (state.r1, state.r2) == (0, 0) and state.done()

    def test_underflow(self):
        state = UnifyState(0, 1, r1=0)
        with pytest.raises(Exception):
            step_advance(state)

    def test_fast(self):
        arena, e1, e2 = worked_example_memory()
        t = time.perf_counter()
        unify(e1, e2)
        assert time.perf_counter() - t < 1e-3


class TestModeTransition:
    @pytest.mark.parametrize("mode, event, expected", [
        (VR, Event.BIND_LEFT_NONVAR, SG),
        (VR, Event.BIND_RIGHT_NONVAR, SI),
        (SG, Event.BIND_LEFT_NONVAR, SG),
        (SG, Event.BIND_RIGHT_NONVAR, OU),
        (SI, Event.BIND_LEFT_NONVAR, OU),
        (SI, Event.BIND_RIGHT_NONVAR, SI),
        (VR, Event.BIND_VAR_VAR_NONINJECTIVE_LEFT, SG),
        (VR, Event.BIND_VAR_VAR_NONINJECTIVE_RIGHT, SI),
        (SI, Event.BIND_VAR_VAR_NONINJECTIVE_LEFT, OU),
        (OU, Event.BIND_LEFT_NONVAR, OU),
    ])
    def test_table(self, mode, event, expected):
        assert mode_transition(mode, event) is expected

    @pytest.mark.parametrize("mode", list(Mode))
    def test_bijective_keeps_mode(self, mode):
        assert mode_transition(mode, Event.BIND_VAR_VAR_BIJECTIVE) is mode

    @pytest.mark.parametrize("mode", list(Mode))
    @pytest.mark.parametrize("event", [Event.CONFLICT, Event.OCCURS_FAIL])
    def test_failure_is_absorbing(self, mode, event):
        assert mode_transition(mode, event) is NU

    @pytest.mark.parametrize("event", list(Event))
    def test_nu_is_absorbing(self, event):
        assert mode_transition(NU, event) is NU

    def test_flip(self):
        assert [m.flip() for m in (VR, SG, SI, OU, NU)] == [VR, SI, SG, OU, NU]


@pytest.mark.parametrize("a, b, mode", [
    ("f(X, X)", "f(a, a)", SG),
    ("f(a, a)", "f(X, X)", SI),
    ("f(X, Y)", "f(A, B)", VR),
    ("f(X, Y)", "f(A, A)", SG),
    ("f(X, X)", "f(Y, a)", OU),
    ("f(X, b)", "f(a, Y)", OU),
    ("a", "b", NU),
    ("f(a)", "f(a, a)", NU),
    ("X", "Y", VR),
    ("X", "g(a, Y)", SG),
    ("f(X, X)", "f(Y, g(Y, a))", NU),
    ("f(V, V)", "f(k(Y), k(j(Y)))", NU),
    ("g(X, g(X, Y))", "g(Z, Z)", NU),
    ("h(X, Y, X)", "h(Z, W, W)", OU),
    ("h(X, Y, X)", "h(Z, Z, Z)", SG),
])
def test_examples(a, b, mode):
    assert classify(parse(a), parse(b)) is mode
    assert oracle_classify(canonical_tree(a), canonical_tree(b)) is mode


def canonical_tree(text):
    return tree_of_cells(parse(text))


def test_same_expression():
    e = parse("f(X, g(Y, X))")
    assert unify(e, e).mode is VR


def test_nu_has_empty_substitutions():
    r = unify(parse("f(a)"), parse("f(b)"))
    assert r.mode is NU and len(r.s1) == len(r.s2) == 0


def test_rejects_bound_encodings():
    arena = Arena()
    e = parse("f(X)", arena)
    a = parse("a", arena)
    apply_destructive(CellRef(arena, 1), a.cell)
    with pytest.raises(ValueError):
        unify(e, parse("f(Y)"))


def joint(e1, e2, r):
    names = VarNames()
    return render(e1, r.s1, r.s2, names=names), render(e2, r.s1, r.s2, names=names)


def seeded_pairs(n, seed):
    rng = random.Random(seed)
    shape = Shape()
    return [random_pair(rng, shape) for _ in range(n)]


class TestAgainstOracle:
    @settings(max_examples=400)
    @given(trees(), trees())
    def test_mode_hypothesis(self, a, b):
        assert classify(cells(a), cells(b)) is oracle_classify(a, b)

    def test_mode_generated(self):
        for a, b in seeded_pairs(3000, 7):
            assert classify(cells(a), cells(b)) is oracle_classify(a, b), (a, b)

    @settings(max_examples=300)
    @given(st.integers(0, 2**32))
    def test_unifier_is_sound(self, seed):
        (a, b), = seeded_pairs(1, seed)
        arena = Arena()
        e1, e2 = cells_of_tree(a, arena), cells_of_tree(b, arena)
        r = unify(e1, e2)
        if r.mode is NU:
            return
        left, right = joint(e1, e2, r)
        assert left == right

    @settings(max_examples=300)
    @given(st.integers(0, 2**32))
    def test_unifier_is_most_general(self, seed):
        (a, b), = seeded_pairs(1, seed)
        e1, e2 = cells(a), cells(b)
        r = unify(e1, e2)
        x, y = apart(a, b)
        sigma = oracle_unify(x, y)
        assert (r.mode is NU) == (sigma is None)
        if sigma is None:
            return
        ours = materialize(e1, r.s1, r.s2)
        theirs = cells_of_tree(canonical(substitute(x, sigma)))
        # two most general unifiers give variant instances
        assert compare_expressions(ours, theirs) is Ordering.EQ

    @settings(max_examples=300)
    @given(trees(), trees())
    def test_symmetric(self, a, b):
        assert classify(cells(b), cells(a)) is classify(cells(a), cells(b)).flip()

    @given(trees())
    def test_variant_of_self(self, t):
        assert classify(cells(t), cells(t)) is VR


def linear(rng, depth=0):
    """Random tree where no variable repeats."""
    counter = iter(range(1000))

    def build(d):
        if d >= 4 or rng.random() < 0.3:
            return Var(next(counter)) if rng.random() < 0.5 else App(rng.choice("abc"))
        name, k = rng.choice([("f", 1), ("g", 2), ("h", 2), ("k", 3)])
        return App(name, tuple(build(d + 1) for _ in range(k)))
    return build(depth)


def test_linear_pairs_need_no_occurs_check():
    rng = random.Random(3)
    stats = UnifyStats()
    for _ in range(2000):
        unify(cells(linear(rng)), cells(linear(rng)), stats)
    assert stats.calls == 2000 and stats.occurs_checks == 0


def test_repeated_variables_do_check():
    stats = UnifyStats()
    unify(parse("f(X, X)"), parse("f(Y, g(Y, a))"), stats)
    assert stats.occurs_checks > 0


@settings(max_examples=200)
@given(trees(), trees())
def test_inputs_untouched(a, b):
    arena = Arena()
    e1, e2 = cells_of_tree(a, arena), cells_of_tree(b, arena)
    before = (list(arena.tags), list(arena.values), list(arena.arities))
    unify(e1, e2)
    assert (arena.tags, arena.values, arena.arities) == before


def test_solve_on_local_buffer():
    e = parse("g(X, a)")
    f = parse("g(b, Y)")
    tags = e.arena.tags + f.arena.tags
    vals = e.arena.values + f.arena.values
    ar = e.arena.arities + f.arena.arities
    state = solve(tags, vals, ar, 3)
    assert state.mode is OU
    assert state.bindings == {1: 4, 5: 2}
