import pytest
from hypothesis import given, strategies as st

from popcert.rewrite import (CapExceeded, DerivationReport, ExponentialSuspect, Inconclusive,
                             NonTermination, PolynomialDegreeEstimate, Row, Strategy, dheight,
                             growth_classify, rc_table, successors)
from popcert.tpdb import Family, parse_trs

from conftest import term
from oracles import at, contractions, naive_dheight, naive_successors, positions, put

INN, OUT, ANY = Strategy.INNERMOST, Strategy.OUTERMOST, Strategy.UNRESTRICTED


def test_innermost_successor_of_times(trs):
    r = trs("mul")
    got = successors(term("times(s(0), s(0))", r), r, INN)
    assert got == {term("plus(s(0), times(0, s(0)))", r)}


def test_normal_form_has_no_successors(trs):
    r = trs("mul")
    assert successors(term("s(s(0))", r), r, ANY) == set()


def test_outermost_prefers_dup(trs):
    r = trs("dup")
    got = successors(term("dup(btree(0))", r), r, OUT)
    assert got == {term("node(btree(0), btree(0))", r)}


# heights below were computed by the unmemoised oracle in tests/oracles.py
@pytest.mark.parametrize("name,text,strat,height", [
    ("mul", "times(s(0), s(0))", INN, 4),
    ("dup", "btree(s(0))", INN, 3),
    ("dup", "btree(s(0))", ANY, 4),
    ("bin", "bin(s(s(0)), s(s(0)))", INN, 7),
])
def test_frozen_heights(trs, name, text, strat, height):
    r = trs(name)
    assert dheight(term(text, r), r, strat) == height


def test_frozen_heights_agree_with_oracle(trs):
    r = trs("mul")
    t = term("times(s(0), s(0))", r)
    assert naive_dheight(t, r.rules) == dheight(t, r, INN) == 4


def test_btree_innermost_closed_form(trs):
    r = trs("dup")
    rep = rc_table(r, Family("btree(s^@n(0))", r), range(11), INN)
    assert [row.height for row in rep.rows] == [2 * n + 1 for n in range(11)]


def test_btree_unrestricted_closed_form(trs):
    r = trs("dup")
    rep = rc_table(r, Family("btree(s^@n(0))", r), range(7), ANY)
    assert [row.height for row in rep.rows] == [3 * 2 ** n - 2 for n in range(7)]


def test_shortcuts_are_exact_on_small_instances(trs):
    r = trs("dup")
    fam = Family("btree(s^@n(0))", r)
    for n in range(4):
        assert dheight(fam(n), r, ANY, shortcuts=False) == dheight(fam(n), r, ANY)


def test_plus_family(trs):
    r = trs("mul")
    rep = rc_table(r, Family("plus(s^@n(0), 0)", r), range(8))
    assert [row.height for row in rep.rows] == [n + 1 for n in range(8)]


def test_bin_grows_exponentially(trs):
    r = trs("bin")
    rep = rc_table(r, Family("bin(s^@n(0), s^@n(0))", r), range(1, 9))
    hs = [row.height for row in rep.rows]
    assert hs == [2 ** (n + 1) - 1 for n in range(1, 9)]
    assert all(b / a >= 1.5 for a, b in zip(hs[3:], hs[4:]))
    assert isinstance(growth_classify(rep), ExponentialSuspect)


def test_caps(trs):
    r = trs("bin")
    fam = Family("bin(s^@n(0), s^@n(0))", r)
    with pytest.raises(CapExceeded) as e:
        dheight(fam(8), r, INN, state_cap=50)
    assert e.value.which == "state"
    with pytest.raises(CapExceeded) as e:
        dheight(fam(8), r, INN, step_cap=5)
    assert e.value.which == "step"
    rep = rc_table(r, fam, [2, 8], INN, state_cap=50)
    assert not rep.rows[0].capped
    assert rep.rows[1].capped and rep.rows[1].height is None


def test_cycle_is_reported():
    r = parse_trs("(VAR x)(RULES f(x) -> f(x))")
    with pytest.raises(NonTermination):
        dheight(term("f(c)", r), r)


def _report(pairs):
    return DerivationReport("synthetic", INN, [Row(n, n, h) for n, h in pairs])


def test_classify_synthetic():
    lin = growth_classify(_report([(n, 2 * n + 1) for n in range(1, 11)]))
    assert isinstance(lin, PolynomialDegreeEstimate) and abs(lin.degree - 1) <= 0.15
    assert isinstance(growth_classify(_report([(n, 3 * 2 ** n - 2) for n in range(1, 11)])), ExponentialSuspect)
    flat = growth_classify(_report([(n, 5) for n in range(1, 11)]))
    assert isinstance(flat, PolynomialDegreeEstimate) and abs(flat.degree) < 1e-9
    assert isinstance(growth_classify(_report([(1, 1), (2, 2)])), Inconclusive)


def test_report_formats(trs):
    r = trs("mul")
    rep = rc_table(r, Family("plus(s^@n(0), 0)", r), range(3))
    assert rep.to_csv().splitlines() == ["n,size,height,capped", "0,3,1,false", "1,4,2,false", "2,5,3,false"]
    assert "plus(s^@n(0), 0)" in rep.to_text()


# -- properties ----------------------------------------------------------------

def dup_terms():
    leaf = st.just("0")
    return st.recursive(leaf, lambda k: st.one_of(
        k.map(lambda a: f"s({a})"), k.map(lambda a: f"btree({a})"), k.map(lambda a: f"dup({a})"),
        st.tuples(k, k).map(lambda p: f"node({p[0]}, {p[1]})")), max_leaves=4)


@given(dup_terms())
def test_successor_properties(trs, text):
    r = trs("dup")
    t = term(text, r)
    inner = successors(t, r, INN)
    anyw = successors(t, r, ANY)
    assert inner <= anyw
    assert anyw == naive_successors(t, r.rules, "any")
    assert inner == naive_successors(t, r.rules, "innermost")
    assert successors(t, r, OUT) == naive_successors(t, r.rules, "outermost")
    for u in anyw:
        # u replaces exactly one subterm of t by a rule instance
        assert any(_rewritten_at(t, u, p, r.rules) for p in positions(t))


def _rewritten_at(t, u, p, rules):
    try:
        new = at(u, p)
    except (AttributeError, IndexError):
        return False
    return put(t, p, new) == u and new in contractions(at(t, p), rules)


@given(dup_terms())
def test_height_properties(trs, text):
    r = trs("dup")
    t = term(text, r)
    h_inn = dheight(t, r, INN, state_cap=20_000)
    h_any = dheight(t, r, ANY, state_cap=20_000)
    assert (h_inn == 0) == (not successors(t, r, INN))
    assert h_inn <= h_any
    assert dheight(t, r, INN, memo=False, state_cap=10_000) == h_inn
