"""Exact-arithmetic layer: Laurent ring, fraction field, solver, series."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knothom.qring import (
    PoincareSeries,
    RationalScalar,
    ScaledLaurent,
    ScaleMismatch,
    kernel_basis,
    qfactorial,
    qnum,
    rank,
    rational_solve,
    rref,
)
from .oracles import lp_mul, lp_qint, lpoly


def SL(scale, *pairs):
    return ScaledLaurent(scale, pairs)


# ---------------------------------------------------------------- laurent


def test_qint_product_frozen():
    # [2][3] = q^3 + 2q + 2q^-1 + q^-3, frozen from the dict oracle
    got = qnum(1, 2) * qnum(1, 3)
    assert got == SL(1, (3, 1), (1, 2), (-1, 2), (-3, 1))
    oracle = lp_mul(lp_qint(2), lp_qint(3))
    assert {Fraction(e, got.scale): c for e, c in got.terms} == oracle


def test_qint_symmetry_and_bar():
    for n in range(1, 7):
        x = qnum(1, n)
        assert x.bar() == x
        assert x.at_one() == n
    y = SL(2, (3, 1), (-1, 2))
    assert y.bar() == SL(2, (-3, 1), (1, 2))
    assert y.bar().bar() == y


def test_qfactorial():
    assert qfactorial(1, 3) == qnum(1, 2) * qnum(1, 3)
    assert qfactorial(1, 0).is_one()
    # doubled exponents for a long root
    assert qnum(1, 2, d=2) == SL(1, (2, 1), (-2, 1))


def test_scale_mismatch_guard():
    with pytest.raises(ScaleMismatch):
        SL(1, (1, 1)) + SL(2, (1, 1))
    # rescale embeds exactly, refuses lossy conversion
    x = SL(1, (1, 1), (-1, 1))
    assert x.rescale(2) == SL(2, (2, 1), (-2, 1))
    with pytest.raises(ScaleMismatch):
        SL(2, (1, 1)).rescale(1)


def test_render_golden():
    assert SL(1, (-2, 1), (0, 1), (2, 1)).render() == "q^-2 + 1 + q^2"
    assert SL(2, (3, -1)).render() == "-q^{3/2}"
    assert SL(1, (2, 3), (0, -1)).render() == "-1 + 3*q^2"
    assert SL(1, (1, 1)).render() == "q"
    assert SL(1, (-1, -2)).render() == "-2*q^-1"
    assert ScaledLaurent.zero(1).render() == "0"
    assert ScaledLaurent.one(3).render() == "1"


def test_json_golden():
    x = SL(1, (-2, 1), (0, 1), (2, 1))
    assert x.to_json() == {
        "terms": [{"q": "-2", "c": 1}, {"q": "0", "c": 1}, {"q": "2", "c": 1}]
    }
    assert SL(2, (3, -1)).to_json() == {"terms": [{"q": "3/2", "c": -1}]}


small_laurents = st.builds(
    lambda pairs: ScaledLaurent(1, pairs),
    st.lists(
        st.tuples(st.integers(-4, 4), st.integers(-5, 5)), max_size=4
    ),
)


@given(small_laurents, small_laurents, small_laurents)
@settings(max_examples=150, deadline=None)
def test_laurent_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a + ScaledLaurent.zero(1) == a
    assert a * ScaledLaurent.one(1) == a
    assert (a - a).is_zero()


@given(small_laurents, small_laurents)
@settings(max_examples=100, deadline=None)
def test_bar_is_ring_involution(a, b):
    assert (a * b).bar() == a.bar() * b.bar()
    assert (a + b).bar() == a.bar() + b.bar()
    assert a.bar().bar() == a


@given(small_laurents, small_laurents)
@settings(max_examples=100, deadline=None)
def test_q_to_one_specialization_is_ring_hom(a, b):
    assert (a * b).at_one() == a.at_one() * b.at_one()
    assert (a + b).at_one() == a.at_one() + b.at_one()


@given(small_laurents)
@settings(max_examples=60, deadline=None)
def test_eval_fraction_agrees_with_dict_oracle(a):
    x = Fraction(3, 2)
    naive = sum(
        (Fraction(c) * x ** e if e >= 0 else Fraction(c) / x ** (-e))
        for e, c in a.terms
    )
    assert a.eval_fraction(x) == naive


def test_pow():
    x = SL(1, (1, 1), (-1, 1))
    assert x**2 == SL(1, (2, 1), (0, 2), (-2, 1))
    assert x**0 == ScaledLaurent.one(1)
    assert SL(1, (2, 1)) ** -3 == SL(1, (-6, 1))
    with pytest.raises(ValueError):
        (x**-1)  # not a unit monomial


# -------------------------------------------------------------- fractions


def RS(num, den=None):
    scale = num.scale if isinstance(num, ScaledLaurent) else 1
    if den is None:
        return RationalScalar.of(num if isinstance(num, ScaledLaurent) else SL(scale, (0, num)))
    return RationalScalar.of(num) / RationalScalar.of(den)


def test_fraction_reduction_cancels_gcd():
    # (q^2 - q^-2) / (q - q^-1) reduces to q + q^-1
    num = SL(1, (2, 1), (-2, -1))
    den = SL(1, (1, 1), (-1, -1))
    r = RS(num, den)
    assert r.is_laurent()
    assert r.as_laurent() == qnum(1, 2)


def test_fraction_denominator_normalization():
    # denominator is a genuine polynomial with nonzero constant term
    # and positive leading coefficient; Laurent shift moves to numerator
    r = RS(SL(1, (0, 1)), SL(1, (3, -2), (1, 4)))
    assert not r.is_laurent()
    s = r.render()
    assert s == "(-q^-1) / (-2 + q^2)" or "/" in s
    assert r * RS(SL(1, (3, -2), (1, 4))) == RS(SL(1, (0, 1)))


@st.composite
def nonzero_laurents(draw):
    x = draw(small_laurents)
    if x.is_zero():
        x = x + ScaledLaurent.one(1)
    return x


@given(small_laurents, nonzero_laurents(), nonzero_laurents())
@settings(max_examples=80, deadline=None)
def test_field_axioms(a, b, c):
    fa = RationalScalar.of(a) / RationalScalar.of(b)
    fb = RationalScalar.of(b) / RationalScalar.of(c)
    fc = RationalScalar.of(c) / RationalScalar.of(b)
    assert fa + fb == fb + fa
    assert fa * fb == fb * fa
    assert (fa + fb) * fc == fa * fc + fb * fc
    if not fb.is_zero():
        assert fb * fb.inv() == RationalScalar.one(1)
        assert (fa / fb) * fb == fa
    assert fa - fa == RationalScalar.zero(1)


@given(nonzero_laurents(), nonzero_laurents())
@settings(max_examples=60, deadline=None)
def test_fraction_bar(a, b):
    f = RationalScalar.of(a) / RationalScalar.of(b)
    assert f.bar().bar() == f
    g = RationalScalar.of(b) / RationalScalar.of(a)
    assert (f * g).bar() == f.bar() * g.bar()


# ----------------------------------------------------------- linear algebra


def test_rational_solve_identity():
    one = RationalScalar.one(1)
    zero = RationalScalar.zero(1)
    sol, ker = rational_solve([[one, zero], [zero, one]], [one, one])
    assert sol == [one, one]
    assert ker == []


def test_rational_solve_inverts_q_minus_qinv():
    a = RationalScalar.of(SL(1, (1, 1), (-1, -1)))
    rhs = RationalScalar.one(1)
    sol, ker = rational_solve([[a]], [rhs])
    assert ker == []
    assert sol[0] * a == rhs
    assert not sol[0].is_laurent()


def test_rational_solve_inconsistent():
    zero = RationalScalar.zero(1)
    one = RationalScalar.one(1)
    sol, ker = rational_solve([[zero]], [one])
    assert sol is None


def test_gram_rank_weight_zero_adjoint_column():
    # Gram matrix of the two spanning words of the zero-weight space for a
    # single doubled-weight axis: second word is already zero, so rank 1.
    one_plus_q2 = RationalScalar.of(SL(1, (0, 1), (2, 1)))
    zero = RationalScalar.zero(1)
    m = [[one_plus_q2, zero], [zero, zero]]
    assert rank(m) == 1
    ker = kernel_basis(m, 2)
    assert len(ker) == 1
    assert ker[0][0].is_zero() and not ker[0][1].is_zero()


def test_kernel_of_singular_q_matrix():
    # [[ [2]^2, [2] ], [ [2], 1 ]] has determinant zero
    two = RationalScalar.of(qnum(1, 2))
    m = [[two * two, two], [two, RationalScalar.one(1)]]
    assert rank(m) == 1
    ker = kernel_basis(m, 2)
    assert len(ker) == 1
    v = ker[0]
    for row in m:
        s = row[0] * v[0] + row[1] * v[1]
        assert s.is_zero()


def test_rref_prefers_laurent_pivots():
    red, pivots = rref([[RationalScalar.of(qnum(1, 2)), RationalScalar.one(1)]])
    assert pivots == [0]
    assert red[0][0] == RationalScalar.one(1)


# --------------------------------------------------------------- series


def test_poincare_euler_and_render():
    # H^0 = K (graded dim 1+q^2), H^1 = K(-1) (graded dim q)
    ps = PoincareSeries(
        1, {(0, 0): 1, (0, 2): 1, (1, 1): 1}, t_floor=None
    )
    assert ps.euler() == SL(1, (0, 1), (2, 1), (1, -1))
    assert ps.dim_q(0) == SL(1, (0, 1), (2, 1))
    assert ps.dim_q(1) == SL(1, (1, 1))
    assert ps.homological_range() == (0, 1)


def test_poincare_phi_terms_signs():
    ps = PoincareSeries(1, {(0, 0): 1, (-2, 4): 3}, t_floor=-2)
    # t-exponent is minus the homological degree, sign (-1)^i
    terms = ps.phi_terms()
    assert (0, 0, 1) in terms
    assert (2, 4, 3) in terms
    assert ps.t_ceiling() == 2


def test_poincare_render_golden():
    ps = PoincareSeries(1, {(0, -2): 1, (0, 0): 1, (0, 2): 1}, t_floor=None)
    assert ps.render() == "q^-2 + 1 + q^2"
    ps2 = PoincareSeries(1, {(-1, 2): 2, (0, 0): 1}, t_floor=-1)
    assert "t" in ps2.render()
    j = ps2.to_json()
    assert j["t_max"] == 1


def test_poincare_rejects_below_floor():
    with pytest.raises(ValueError):
        PoincareSeries(1, {(-3, 0): 1}, t_floor=-2)
