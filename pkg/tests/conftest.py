import pytest
from hypothesis import strategies as st

from bccsp.terms import Nil, Par, Prefix, Sum, Var, make_alphabet

VARS = ("x", "y", "z", "u", "v", "w")


@pytest.fixture(scope="session")
def ab():
    return make_alphabet(("a", "b"))


@pytest.fixture(scope="session")
def abc():
    return make_alphabet(("a", "b", "c"))


@pytest.fixture(scope="session")
def sync_ab():
    return make_alphabet(("a", "b"), sync=True)


def term_strategy(actions=("a", "b"), variables=(), max_leaves=6):
    """Random terms; leaves are 0 and variables, inner nodes prefix/+/||."""
    leaves = [st.just(Nil())]
    if variables:
        leaves.append(st.sampled_from([Var(v) for v in variables]))
    base = st.one_of(*leaves)

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from(actions), children).map(lambda p: Prefix(*p)),
            st.tuples(children, children).map(lambda p: Sum(*p)),
            st.tuples(children, children).map(lambda p: Par(*p)),
        )

    return st.recursive(base, extend, max_leaves=max_leaves)


closed_terms = term_strategy()
open_terms = term_strategy(variables=VARS)
