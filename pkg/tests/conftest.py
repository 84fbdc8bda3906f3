import pytest
from hypothesis import settings, strategies as st

from popcert import corpus
from popcert.terms import App, FunctionSymbol, Var
from popcert.tpdb import parse_term

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def trs():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = corpus.load(name)
        return cache[name]

    return get


def term(text, system):
    return parse_term(text, system)


# a small fixed signature for random terms
F = FunctionSymbol("f", 2, "defined")
G = FunctionSymbol("g", 1, "defined")
H = FunctionSymbol("h", 2, "defined")
ZERO = FunctionSymbol("0", 0, "constructor")
S = FunctionSymbol("s", 1, "constructor")
CONS = FunctionSymbol("c", 2, "constructor")
DEFINED = (F, G, H)
CONSTRUCTORS = (ZERO, S, CONS)
VARS = ("x", "y", "z")


def values(max_leaves=4):
    leaf = st.one_of(st.sampled_from(VARS).map(Var), st.just(App(ZERO, [])))
    return st.recursive(leaf, lambda kids: st.one_of(
        kids.map(lambda a: App(S, [a])),
        st.tuples(kids, kids).map(lambda p: App(CONS, list(p)))), max_leaves=max_leaves)


def terms(max_leaves=4, allow_vars=True):
    leaves = [st.just(App(ZERO, []))]
    if allow_vars:
        leaves.append(st.sampled_from(VARS).map(Var))
    leaf = st.one_of(*leaves)

    def extend(kids):
        return st.one_of(
            kids.map(lambda a: App(S, [a])),
            kids.map(lambda a: App(G, [a])),
            st.tuples(kids, kids).map(lambda p: App(CONS, list(p))),
            st.tuples(kids, kids).map(lambda p: App(F, list(p))),
            st.tuples(kids, kids).map(lambda p: App(H, list(p))))

    return st.recursive(leaf, extend, max_leaves=max_leaves)


ranks = st.fixed_dictionaries({"f": st.integers(1, 3), "g": st.integers(1, 3), "h": st.integers(1, 3)})
safe_maps = st.fixed_dictionaries({
    "f": st.frozensets(st.sampled_from([1, 2])),
    "g": st.frozensets(st.just(1)),
    "h": st.frozensets(st.sampled_from([1, 2])),
})
