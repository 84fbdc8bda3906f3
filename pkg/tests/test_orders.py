import random

import pytest
from hypothesis import assume, given, strategies as st

from popcert import corpus
from popcert.orders import (Certificate, CertificateError, InstanceTooLarge, OrderChecker, Variant,
                            brute_force_search, check_compat, format_certificate, gpop, gpopps, gsq,
                            mpo, ordered_partitions, parse_certificate, safe_equiv, safe_mappings,
                            terms_below)
from popcert.terms import (App, FunctionSymbol, Precedence, SafeMapping, TermError, Var, admissible_precedence,
                           is_value, make_trs, safe_mapping, subterms)
from popcert.tpdb import parse_trs

from conftest import CONSTRUCTORS, DEFINED, ranks, safe_maps, term, terms, values
from oracles import NaiveOrders

POP, PS, MPO = Variant.POPSTAR, Variant.POPSTAR_PS, Variant.MPO


def mul_cert(variant=POP, plus_safe=(2,)):
    prec = Precedence({"times": 2, "plus": 1, "s": 0, "0": 0})
    return Certificate(variant, prec, safe_mapping(plus=plus_safe, times=[]))


# -- equivalence ---------------------------------------------------------------

def test_safe_equiv_examples():
    c = FunctionSymbol("c", 2)
    c2 = FunctionSymbol("d", 2)
    a, b = App(FunctionSymbol("a", 0), []), App(FunctionSymbol("b", 0), [])
    cert = Certificate(POP, Precedence({}))
    assert safe_equiv(App(c, [a, b]), App(c2, [b, a]), cert)
    f = FunctionSymbol("f", 2, "defined")
    g = FunctionSymbol("g", 2, "defined")
    x, y = Var("x"), Var("y")
    cert = Certificate(POP, Precedence({"f": 1, "g": 1}), safe_mapping(f=[2], g=[2]))
    assert not safe_equiv(App(f, [x, y]), App(g, [y, x]), cert)
    assert safe_equiv(App(f, [x, y]), App(g, [x, y]), cert)


@given(terms())
def test_equivalence_is_reflexive(t):
    assert safe_equiv(t, t, Certificate(POP, Precedence({})))


# -- the orders on the multiplication example ------------------------------------

def test_gsq_examples(trs):
    r = trs("mul")
    s = term("times(s(x), y)", r)
    for plus_rank in (1, 2, 3):
        for times_rank in (1, 2, 3):
            prec = Precedence({"times": times_rank, "plus": plus_rank})
            cert = Certificate(POP, prec, safe_mapping(times=[]))
            assert gsq(s, term("y", r), cert)
            assert not gsq(s, term("times(x, y)", r), cert)
    assert not gsq(Var("x"), term("0", r), mul_cert())


def test_gpop_examples(trs):
    r = trs("mul")
    cert = mul_cert()
    assert gpop(term("plus(s(x), y)", r), term("s(plus(x, y))", r), cert)
    assert not gpop(term("times(s(x), y)", r), term("plus(times(x, y), y)", r), cert)
    assert gpop(term("s(x)", r), Var("x"), cert)
    assert not gpop(term("s(x)", r), term("s(x)", r), cert)


def test_rev_needs_parameter_substitution(trs):
    r = trs("rev")
    cert = Certificate(PS, Precedence({"rev": 2, "revt": 1}), safe_mapping(revt=[2], rev=[]))
    s, t = term("revt(cons(x, xs), ys)", r), term("revt(xs, cons(x, ys))", r)
    assert gpopps(s, t, cert)
    assert not gpop(s, t, cert)
    assert check_compat(r, cert).compatible


def test_mpo_examples(trs):
    r = trs("mul")
    prec = Precedence({})
    assert not mpo(term("s(x)", r), term("s(s(x))", r), prec)
    f = FunctionSymbol("f", 1, "defined")
    s = FunctionSymbol("s", 1)
    x = Var("x")
    for rank in (0, 1, 5):
        assert mpo(App(f, [App(s, [x])]), App(f, [x]), Precedence({"f": rank}))


def test_terms_below(trs):
    r = trs("mul")
    prec = Precedence({"plus": 1, "s": 0})
    plus = r.signature["plus"]
    assert terms_below(Var("x"), {plus}, prec)
    assert terms_below(term("s(x)", r), {plus}, prec)
    assert not terms_below(term("plus(x, y)", r), {plus}, prec)


# -- compatibility ------------------------------------------------------------------

def test_mul_compatible(trs):
    rep = check_compat(trs("mul"), mul_cert())
    assert rep.compatible and len(rep.results) == 4


def test_mul_fails_with_both_plus_arguments_safe(trs):
    rep = check_compat(trs("mul"), mul_cert(plus_safe=(1, 2)))
    assert not rep.compatible
    assert [str(f.rule) for f in rep.failures()] == ["plus(s(x), y) -> s(plus(x, y))"]
    assert all(f.trace for f in rep.failures())


def test_exp_rule_never_oriented_together_with_the_rest(trs):
    r = trs("mul_exp")
    tried = 0
    for levels in ordered_partitions([f.name for f in r.defined]):
        prec = admissible_precedence(r, levels)
        for sm in safe_mappings(list(r.defined)):
            chk = OrderChecker(Certificate(POP, prec, sm))
            if all(chk.gpop(x.lhs, x.rhs) for x in r.rules[:5]):
                tried += 1
                assert not chk.gpop(r.rules[5].lhs, r.rules[5].rhs)
    assert tried > 0


def test_empty_system_is_compatible():
    assert check_compat(parse_trs("(RULES )"), Certificate(POP, Precedence({}))).compatible


def test_non_constructor_system_rejected():
    r = parse_trs("(VAR x)(RULES f(g(x)) -> x g(x) -> x)")
    with pytest.raises(TermError):
        check_compat(r, Certificate(POP, Precedence({})))
    check_compat(r, Certificate(MPO, Precedence({"f": 2, "g": 1})))


def test_sat_with_example_precedence():
    r = corpus.load("sat")
    text = corpus.path("sat").with_suffix(".cert").read_text()
    cert = parse_certificate(text, r)
    assert check_compat(r, cert).compatible
    assert check_compat(r, Certificate(MPO, cert.precedence)).compatible


# -- brute force ----------------------------------------------------------------------

# verdicts computed by exhaustive enumeration
VERDICTS = {
    "mul": (True, True, True),
    "mul_exp": (False, False, True),
    "mul_swapped": (False, False, True),
    "bin": (False, False, True),
    "dup": (True, True, True),
    "rev": (False, True, False),
    "garbage": (True, True, True),
}


@pytest.mark.parametrize("name", sorted(VERDICTS))
def test_brute_force_verdicts(trs, name):
    r = trs(name)
    for variant, expected in zip((POP, PS, MPO), VERDICTS[name]):
        cert = brute_force_search(r, variant)
        assert (cert is not None) == expected
        if cert is not None:
            assert check_compat(r, cert).compatible


def test_brute_force_guard(trs):
    with pytest.raises(InstanceTooLarge):
        brute_force_search(trs("sat"), POP)


def test_ordered_partitions_count():
    # ordered Bell numbers
    assert [sum(1 for _ in ordered_partitions(list("abcd")[:n])) for n in range(5)] == [1, 1, 3, 13, 75]


# -- certificate files ------------------------------------------------------------------

def test_certificate_round_trip(trs):
    r = trs("mul")
    cert = mul_cert()
    again = parse_certificate(format_certificate(cert, r), r)
    assert again.safe.positions(r.signature["plus"]) == {2}
    assert again.precedence.gt("times", "plus")
    assert check_compat(r, again).compatible


@pytest.mark.parametrize("text,msg", [
    ("order: pop*\nprecedence:\n  times > plus\n  plus > times\n", "cycle"),
    ("order: pop*\nprecedence:\n  times > minus\n", "unknown symbol"),
    ("order: pop*\nprecedence:\n  s > plus\n", "constructor"),
    ("precedence:\n  times > plus\n", "order"),
    ("order: lpo\n", "unknown order"),
    ("order: pop*\nsafe:\n  plus: 3\n", "out of range"),
])
def test_certificate_errors(trs, text, msg):
    with pytest.raises((CertificateError, ValueError), match=msg):
        parse_certificate(text, trs("mul"))


def test_certificate_equivalence_lines(trs):
    r = trs("mul")
    cert = parse_certificate("order: mpo\nprecedence:\n  times = plus\n", r)
    assert cert.precedence.eq("times", "plus")


# -- properties ------------------------------------------------------------------------

def make_cert(variant, rk, sf):
    rank = {c.name: 0 for c in CONSTRUCTORS}
    rank.update(rk)
    return Certificate(variant, Precedence(rank), SafeMapping(sf))


@given(values(), values(), ranks, safe_maps)
def test_values_are_blind_spots(s, t, rk, sf):
    cert = make_cert(POP, rk, sf)
    if gpop(s, t, cert):
        assert is_value(t)
        assert any(safe_equiv(u, t, cert) for u in subterms(s) if u is not s)


@given(values(), ranks, safe_maps, st.randoms(use_true_random=False))
def test_equivalence_preserves_values(s, rk, sf, rnd):
    cert = make_cert(POP, rk, sf)
    t = shuffle_equivalent(s, cert, rnd)
    assert safe_equiv(s, t, cert) and is_value(t)


@given(terms(), terms(), ranks, safe_maps)
def test_pop_included_in_popps(s, t, rk, sf):
    if gpop(s, t, make_cert(POP, rk, sf)):
        assert gpopps(s, t, make_cert(PS, rk, sf))


@given(terms(), terms(), ranks, safe_maps)
def test_gsq_included_in_gpop(s, t, rk, sf):
    cert = make_cert(POP, rk, sf)
    if gsq(s, t, cert):
        assert gpop(s, t, cert)


@given(terms(max_leaves=6), ranks, safe_maps)
def test_irreflexive(t, rk, sf):
    for v in (POP, PS):
        assert not OrderChecker(make_cert(v, rk, sf)).orients(t, t)
    assert not mpo(t, t, make_cert(MPO, rk, sf).precedence)


def shuffle_equivalent(t, cert, rnd):
    """A randomly permuted copy of t that is safe-equivalent to it."""
    if isinstance(t, Var):
        return t
    args = [shuffle_equivalent(a, cert, rnd) for a in t.args]
    n = len(args)
    safe = [cert.safe.is_safe(t.sym, i + 1) for i in range(n)]
    for flag in (True, False):
        idx = [i for i in range(n) if safe[i] == flag]
        moved = idx[:]
        rnd.shuffle(moved)
        new = list(args)
        for i, j in zip(idx, moved):
            new[i] = args[j]
        args = new
    return App(t.sym, args)


@given(terms(), terms(), ranks, safe_maps, st.randoms(use_true_random=False))
def test_compatible_with_equivalence(s, t, rk, sf, rnd):
    cert = make_cert(POP, rk, sf)
    s2, t2 = shuffle_equivalent(s, cert, rnd), shuffle_equivalent(t, cert, rnd)
    assert safe_equiv(s, s2, cert) and safe_equiv(t, t2, cert)
    assert gpop(s, t, cert) == gpop(s2, t2, cert)


@given(terms(max_leaves=4), terms(max_leaves=4), ranks, safe_maps)
def test_decision_procedures_match_literal_definitions(s, t, rk, sf):
    cert = make_cert(POP, rk, sf)
    naive = NaiveOrders(cert.precedence.rank, sf)
    assert safe_equiv(s, t, cert) == naive.equiv(s, t)
    assert gsq(s, t, cert) == naive.gsq(s, t)
    assert gpop(s, t, cert) == naive.gpop(s, t)
    assert gpopps(s, t, make_cert(PS, rk, sf)) == naive.gpop(s, t, ps=True)
    assert mpo(s, t, cert.precedence) == naive.mpo(s, t)
