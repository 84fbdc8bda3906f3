import itertools

import pytest
from hypothesis import given, strategies as st

from popcert import corpus
from popcert.orders import Certificate, Variant, parse_certificate
from popcert.predicative import (BOT, BULLET, NIL, SFun, Seq, SequenceOrder, check_embedding, degree_bound,
                                 degree_d, ell_for, gppv, gpopv, homo, interp_N, interp_S, is_ground, length,
                                 norm, normalise_bot, render, seq, slow_capped, tally, tolst, universe, width)
from popcert.rewrite import Rewriter, Strategy
from popcert.terms import App, Precedence, Var, depth, safe_mapping, size, substitute, variables
from popcert.tpdb import Family, parse_trs

from conftest import term, terms, values
from oracles import degree_constants, mul_xy


def f_(*args):
    return SFun("f", args)


def h_(*args):
    return SFun("h", args)


# -- interpretations -------------------------------------------------------------

def test_interpretations(trs):
    r = trs("garbage")
    sm = safe_mapping(f=[2], g=[2], h=[])
    assert interp_S(term("s(s(0))", r), sm) == NIL
    assert interp_N(term("s(s(0))", r), sm) == tally(3)
    assert interp_S(term("f(0, y)", r), sm) == f_(tally(1))
    assert interp_N(Var("x"), sm) == tally(1)


def test_norm(trs):
    r = trs("mul")
    sm = safe_mapping(times=[])
    assert norm(Var("x"), sm) == 1
    assert norm(term("times(s(s(0)), s(0))", r), sm) == 1


@given(values())
def test_norm_is_depth_on_values(v):
    assert norm(v, safe_mapping()) == depth(v)


def test_measures():
    assert tally(0) == NIL and width(NIL) == 0
    assert length(f_(BULLET)) == 1
    for n in range(6):
        assert width(tally(n)) == n == length(tally(n))
    assert render(seq(f_(tally(2)), BULLET)) == "[f_n([# #]) #]"


def seq_terms(max_leaves=4):
    leaf = st.just(BULLET)
    return st.recursive(leaf, lambda k: st.one_of(
        k.map(lambda a: f_(a)),
        st.tuples(k, k).map(lambda p: SFun("g", p)),
        k.map(lambda a: h_(a)),
        st.lists(k, min_size=0, max_size=3).map(lambda xs: seq(*xs))), max_leaves=max_leaves)


@given(seq_terms(), seq_terms())
def test_width_is_additive(a, b):
    assert width(seq(a, b)) == width(a) + width(b)
    assert length(a) <= width(a) or a == NIL


@given(terms(max_leaves=5), st.lists(values(max_leaves=3), min_size=3, max_size=3))
def test_interpretation_length_bounded_by_size(t, vals):
    sm = safe_mapping(f=[2], g=[], h=[1])
    sigma = dict(zip(("x", "y", "z"), vals))
    assert length(interp_S(substitute(t, sigma), sm)) <= size(t)


# -- sequence orders -------------------------------------------------------------------

PREC = Precedence({"f": 3, "g": 2, "h": 1})


def test_tally_decrease():
    for n in range(4):
        for m in range(1, 4):
            for l in (2, 3):
                assert gppv(tally(n + m), tally(n), 1, l, PREC)


def test_symbol_decrease_example():
    for d in range(3):
        assert gppv(f_(tally(d + 1)), h_(tally(d)), 12, 8, PREC)
        assert gpopv(f_(tally(d + 1)), f_(tally(d)), 12, 9, PREC)


def test_depth_budget_one():
    assert not gppv(f_(tally(2)), h_(BULLET), 3, 1, PREC)


def test_empty_left_side():
    for b in (NIL, BULLET, f_(BULLET)):
        assert not gpopv(NIL, b, 3, 3, PREC)


def test_collapse_to_empty():
    for k in (1, 2, 5):
        assert gpopv(f_(tally(1)), NIL, k, k, PREC)


ground_pairs = st.tuples(seq_terms(3), seq_terms(3))


@given(ground_pairs, st.integers(1, 2), st.integers(1, 3), st.integers(0, 1), st.integers(0, 1))
def test_monotone_in_indices(pair, k, l, dk, dl):
    a, b = pair
    if gpopv(a, b, k, l, PREC):
        assert gpopv(a, b, k + dk, l + dl, PREC)
    if gppv(a, b, k, l, PREC):
        assert gppv(a, b, k + dk, l + dl, PREC)


@given(ground_pairs, seq_terms(2), seq_terms(2), st.integers(1, 2))
def test_closed_under_context(pair, c1, c2, k):
    a, b = pair
    if gpopv(a, b, k, k, PREC):
        assert gpopv(seq(c1, a, c2), seq(c1, b, c2), k, k, PREC)


def shuffled(a, rnd):
    if isinstance(a, Seq):
        items = [shuffled(x, rnd) for x in a.items]
        rnd.shuffle(items)
        return Seq(tuple(items))
    if a.args:
        args = [shuffled(x, rnd) for x in a.args]
        rnd.shuffle(args)
        return SFun(a.sym, args)
    return a


@given(ground_pairs, st.integers(1, 2), st.randoms(use_true_random=False))
def test_invariant_under_equivalence(pair, k, rnd):
    a, b = pair
    a2, b2 = shuffled(a, rnd), shuffled(b, rnd)
    order = SequenceOrder(PREC, k)
    assert order.eqv(a, a2) and order.eqv(b, b2)
    assert gpopv(a2, b2, k, k, PREC) == gpopv(a, b, k, k, PREC)


@given(ground_pairs, st.integers(1, 2), st.integers(1, 3))
def test_strict_part_included(pair, k, l):
    a, b = pair
    if gppv(a, b, k, l, PREC):
        assert gpopv(a, b, k, l, PREC)


# -- embedding -----------------------------------------------------------------------------

def test_ell_for(trs):
    assert ell_for(trs("mul")) == 10
    assert ell_for(parse_trs("(VAR x)(RULES f(x) -> x)")) >= 2
    assert ell_for(parse_trs("(RULES )")) == 2


def test_normalise_bot(trs):
    r = trs("garbage")
    v = term("s(s(0))", r)
    assert normalise_bot(v, r) == v
    redex = term("f(0, 0)", r)
    assert normalise_bot(redex, r) == redex
    bot = App(BOT, ())
    assert normalise_bot(term("h(0)", r), r) == bot
    assert normalise_bot(term("g(h(0), f(0, 0))", r), r) == App(r.signature["g"], [bot, redex])


def mul_cert():
    return parse_certificate(corpus.path("mul").with_suffix(".cert").read_text(), corpus.load("mul"))


def garbage_cert():
    return parse_certificate(corpus.path("garbage").with_suffix(".cert").read_text(), corpus.load("garbage"))


def test_embedding_mul(trs):
    r = trs("mul")
    rep = check_embedding(r, mul_cert(), [term("times(s(s(s(0))), s(s(0)))", r)])
    assert rep.ell == 10
    assert rep.steps and rep.ok


def test_embedding_garbage_shapes(trs):
    r = trs("garbage")
    rep = check_embedding(r, garbage_cert(), [term("f(s(0), 0)", r)])
    assert rep.ok
    first = rep.steps[0]
    s_link = next(x for x in first.links if x.interp == "S")
    # S(f(s(0); 0)) = [f_n(<2>)] and the right side collects g_n(...) and f_n(<1>)
    assert s_link.left == f_(tally(2))
    assert render(s_link.right) == "[g_n([h_n(#) #]) f_n(#)]"


def test_embedding_from_normal_form(trs):
    r = trs("mul")
    rep = check_embedding(r, mul_cert(), [term("s(0)", r)])
    assert rep.steps == [] and rep.ok


def basic_starts(name, fam_text, ns):
    r = corpus.load(name)
    fam = Family(fam_text, r)
    return r, [fam(n) for n in ns]


@pytest.mark.parametrize("name,cert_fn,template", [
    ("mul", mul_cert, "times(s^@n(0), s(s(0)))"),
    ("garbage", garbage_cert, "f(s^@n(0), s(0))"),
])
def test_simulation_of_innermost_steps(name, cert_fn, template):
    r, starts = basic_starts(name, template, range(4))
    rep = check_embedding(r, cert_fn(), starts)
    assert rep.steps
    for step in rep.steps:
        assert not [x for x in step.links if x.interp == "simulation"]
        # at least one rewrite link per step
        assert len(step.links) >= 2


# -- Slow on capped universes ----------------------------------------------------------------

def test_slow_of_empty_sequence():
    members = universe({"f": 1}, 2, 2, PREC)
    assert slow_capped(NIL, 1, members, PREC) == 0


def test_slow_respects_equivalence():
    prec = Precedence({"f": 1, "g": 1})
    members = universe({"f": 1, "g": 1}, 2, 2, prec)
    a = seq(f_(BULLET), BULLET)
    b = seq(BULLET, SFun("g", [BULLET]))
    assert slow_capped(a, 1, members, prec) == slow_capped(b, 1, members, prec)


def _slow_values(syms, k, D, W, prec, order):
    members = universe(syms, D, W, prec)
    return members, {order.key(a): slow_capped(a, k, members, prec, order) for a in members}


@pytest.mark.parametrize("syms,k,D,W", [
    ({}, 1, 2, 3), ({}, 2, 2, 3), ({"f": 1}, 1, 2, 2), ({"f": 1}, 1, 2, 3),
    ({"f": 1, "g": 1}, 1, 2, 2), ({"f": 2}, 1, 2, 2), ({"f": 1}, 2, 2, 2),
])
def test_slow_additive_on_stable_values(syms, k, D, W):
    # values that do not move when the universe grows in either direction are
    # treated as exact; sequences built from exact items must add up
    prec = Precedence({n: i + 1 for i, n in enumerate(sorted(syms))})
    order = SequenceOrder(prec, k)
    members, base = _slow_values(syms, k, D, W, prec, order)
    _, deeper = _slow_values(syms, k, D + 1, W, prec, order)
    _, wider = _slow_values(syms, k, D, W + 1, prec, order)
    stable = {key for key, v in base.items() if deeper.get(key) == v == wider.get(key)}
    checked = 0
    for a in members:
        if isinstance(a, Seq) and order.key(a) in stable and all(order.key(x) in stable for x in a.items):
            assert base[order.key(a)] == sum(base[order.key(x)] for x in a.items), render(a)
            checked += 1
    assert checked >= 2


# -- arithmetic ------------------------------------------------------------------------------

def test_homo_examples():
    assert homo([], 0, 3, 5) == 0
    for m in range(6):
        assert homo([m], 1, 1, 7) == m
    assert homo([1, 3], 2, 2, 10) == 31
    with pytest.raises(ValueError):
        homo([1, 2, 3], 3, 2, 10)


def strictly_greater(m, n):
    """Multiset extension of > on naturals, by X/Y decomposition."""
    return mul_xy(lambda a, b: a > b, lambda a, b: a == b, list(m), list(n))


def digit_cases():
    for c in range(2, 7):
        for k in range(1, 5):
            yield c, k


@pytest.mark.parametrize("c,k", list(digit_cases()))
def test_homo_bounded_by_power(c, k):
    for n in range(k + 1):
        for ds in itertools.product(range(c), repeat=n):
            assert c ** k > homo(list(ds), n, k, c)


@pytest.mark.parametrize("c,k", [(c, k) for c, k in digit_cases() if c ** k <= 1300])
def test_homo_strictly_monotone(c, k):
    tuples = [tuple(sorted(ds)) for n in range(k + 1)
              for ds in itertools.combinations_with_replacement(range(1, c), n)]
    checked = 0
    for m in tuples:
        for m2 in tuples:
            if strictly_greater(m, m2):
                assert homo(list(m), len(m), k, c) > homo(list(m2), len(m2), k, c)
                checked += 1
    assert checked > 0


def test_degree_bound_values():
    assert degree_bound(2, 0).d == 3 and degree_bound(2, 0).c == 4
    assert degree_bound(1, 0).d == 2 and degree_bound(1, 0).c == 1
    assert degree_bound(2, 1).d == 10
    assert degree_bound(2, 1).c == 8 ** 43
    for k, p in [(1, 0), (1, 3), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1)]:
        c, d = degree_constants(k, p)
        assert (degree_bound(k, p).c, degree_bound(k, p).d) == (c, d) and degree_d(k, p) == d
    with pytest.raises(ValueError):
        degree_bound(0, 1)
