"""Hypothesis strategies shared by the property tests."""

from fractions import Fraction

from hypothesis import strategies as st

from gmdet.funcfield import FieldElem, FunctionField

K_XY = FunctionField.get(("x", "y"))

small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def polys(draw, K=K_XY, max_terms=3, max_deg=2):
    p = K.ctx.constant(0)
    gens = [K.ctx.gen(k) for k in range(len(K.names))]
    for _ in range(draw(st.integers(1, max_terms))):
        term = K.ctx.constant(draw(small_ints))
        for g in gens:
            term = term * g ** draw(st.integers(0, max_deg))
        p = p + term
    return p


@st.composite
def elems(draw, K=K_XY, nonzero=False):
    num = draw(polys(K))
    den = draw(polys(K).filter(lambda p: not p.is_zero()))
    f = FieldElem(K, num, den)
    if nonzero and not f:
        f = K.one
    return f


rationals = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 6))
