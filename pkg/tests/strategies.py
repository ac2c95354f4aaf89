"""Hypothesis strategies for types, terms and programs (syntax only)."""

from functools import lru_cache
from itertools import permutations

from hypothesis import strategies as st

from metricfuzz import syntax as S
from metricfuzz.extreal import INF, ExtReal
from metricfuzz.parser import Program

VAR_NAMES = ["x", "y", "z", "f", "g", "acc", "x1", "t'", "_tmp", "l"]
TYPE_NAMES = ["dlist", "tree", "t0"]

sens = st.one_of(
    st.sampled_from([ExtReal(0), ExtReal(0.5), ExtReal(1), ExtReal(2), ExtReal(3), INF]),
    st.floats(min_value=0, max_value=1e20, allow_nan=False, allow_infinity=False).map(ExtReal),
)
reals = st.floats(allow_nan=False, allow_infinity=False, width=64)
names = st.sampled_from(VAR_NAMES)
distinct_pairs = st.sampled_from(list(permutations(VAR_NAMES, 2)))


@lru_cache(maxsize=None)
def types(idents=()):
    leaves = [st.just(S.REAL), st.just(S.UNIT)]
    if idents:
        leaves.append(st.sampled_from(list(idents)).map(S.Ident))
    return st.recursive(
        st.one_of(leaves),
        lambda t: st.one_of(
            st.builds(S.Lolli, t, t),
            st.builds(S.Tensor, t, t),
            st.builds(S.With, t, t),
            st.builds(S.Sum, t, t),
            st.builds(S.Bang, sens, t),
        ),
        max_leaves=6,
    )


@lru_cache(maxsize=None)
def terms(idents=()):
    ty = types(idents)
    leaves = st.one_of(
        names.map(S.Var),
        reals.map(S.Const),
        st.just(S.UnitVal()),
    )

    def extend(e):
        ctors = [
            st.builds(S.Plus, e, e),
            st.builds(S.Lam, names, ty, e),
            st.builds(S.App, e, e),
            st.builds(S.TensorPair, e, e),
            st.builds(lambda xy, a, b: S.LetPair(xy[0], xy[1], a, b), distinct_pairs, e, e),
            st.builds(S.WithPair, e, e),
            st.builds(S.Proj, st.sampled_from([1, 2]), e),
            st.builds(S.Box, sens, e),
            st.builds(S.LetBox, names, e, e),
            st.builds(S.Inl, ty, e),
            st.builds(S.Inr, ty, e),
            st.builds(S.Case, e, names, e, names, e),
            st.builds(S.Unfold, e),
            st.builds(lambda r, fx, a, b, body: S.Fix(r, fx[0], fx[1], a, b, body),
                      sens, distinct_pairs, ty, ty, e),
        ]
        if idents:
            ctors.append(st.builds(S.Fold, st.sampled_from(list(idents)), e))
        return st.one_of(ctors)

    return st.recursive(leaves, extend, max_leaves=12)


@st.composite
def programs(draw):
    tnames = tuple(draw(st.lists(st.sampled_from(TYPE_NAMES), unique=True, max_size=2)))
    typedefs = {n: draw(types(tnames)) for n in tnames}
    vnames = draw(st.lists(names, unique=True, max_size=3))
    freevars = {n: draw(types(tnames)) for n in vnames}
    return Program(typedefs, freevars, draw(terms(tnames)))
