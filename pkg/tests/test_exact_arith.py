"""Unit and property tests for the exact arithmetic layers: rationals,
sparse multivariate polynomials, and rational functions."""

import pytest
from hypothesis import given, settings, strategies as st

from parconn.poly import ExactDivisionError, MPoly, VARS, const, var
from parconn.rat import as_rat, is_integer, rat_den, rat_num, rat_str
from parconn.ratfunc import RatFunc, as_ratfunc


# ----------------------------------------------------------------------
# Rationals
# ----------------------------------------------------------------------

def test_as_rat_parses_fraction_strings():
    assert as_rat("3/4") + as_rat("1/4") == 1
    assert as_rat(-2) == as_rat("-2/1")
    assert rat_str(as_rat("6/4")) == "3/2"


def test_rat_num_den_normalized():
    q = as_rat("-6/4")
    assert (rat_num(q), rat_den(q)) == (-3, 2)
    assert not is_integer(q)
    assert is_integer(as_rat("8/4"))


def test_as_rat_rejects_garbage():
    with pytest.raises(TypeError):
        as_rat(object())


# ----------------------------------------------------------------------
# Polynomials: construction and basic algebra
# ----------------------------------------------------------------------

def test_var_requires_known_name():
    with pytest.raises(KeyError):
        var("no_such_symbol")


def test_constructors_agree():
    x = var("x")
    assert MPoly.monomial(1, {"x": 1}) == x
    assert MPoly.monomial("3/2", {}) == const("3/2")
    assert (x + 1) - 1 == x


def test_ring_axioms_small():
    x, y = var("x"), var("t")
    left = (x + y) * (x - y)
    assert left == x * x - y * y
    assert (x * y).degree_in("x") == 1
    assert (x * y).total_degree() == 2


def test_pow_and_derivative():
    x = var("x")
    p = (x + 1) ** 3
    assert p.derivative("x") == 3 * (x + 1) ** 2
    assert p.degree_in("x") == 3
    assert (x ** 0) == const(1)


def test_subst_rat_partial_and_eval():
    x, t = var("x"), var("t")
    p = x * x * t + 2 * x + t
    q = p.subst_rat({"x": "1/2"})
    assert q == t * as_rat("1/4") + 1 + t
    assert p.eval_rat({"x": 2, "t": 3}) == 12 + 4 + 3


def test_eval_requires_all_variables():
    p = var("x") + var("t")
    with pytest.raises(ValueError):
        p.eval_rat({"x": 1})


def test_coeffs_in_reassembles():
    x, t = var("x"), var("t")
    p = (x + t) ** 3 + x
    parts = p.coeffs_in("x")
    rebuilt = MPoly.zero()
    for deg, coeff in parts.items():
        rebuilt = rebuilt + coeff * x ** deg
    assert rebuilt == p
    assert all("x" not in c.variables() for c in parts.values())


def test_content_and_primitive_part_signs():
    x = var("x")
    p = -4 * x * x + 6 * x
    assert p.content() == -2
    assert p.primitive_part() == 2 * x * x - 3 * x
    assert p.primitive_part().content() == 1


def test_exact_div_roundtrip_and_failure():
    x, t = var("x"), var("t")
    a = (x + t) * (x - 2 * t)
    assert a.exact_div(x + t) == x - 2 * t
    with pytest.raises(ExactDivisionError):
        a.exact_div(x + 1)
    assert (x + t).divides(a)
    assert not (x + 1).divides(a)


def test_division_by_zero_rejected():
    with pytest.raises((ExactDivisionError, ZeroDivisionError, ValueError)):
        var("x").exact_div(MPoly.zero())


# ----------------------------------------------------------------------
# Polynomials: property tests
# ----------------------------------------------------------------------

_small_rats = st.fractions(min_value=-30, max_value=30, max_denominator=12)
_poly_vars = ("x", "t", "lam")


@st.composite
def polys(draw, max_terms=5, max_deg=3):
    terms = draw(st.integers(0, max_terms))
    p = MPoly.zero()
    for _ in range(terms):
        coeff = draw(_small_rats)
        exps = {v: draw(st.integers(0, max_deg)) for v in _poly_vars}
        p = p + MPoly.monomial(str(coeff), exps)
    return p


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_mul_distributes_over_add(a, b, c):
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_mul_commutes(a, b):
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_product_then_exact_div_recovers(a, b):
    if b.is_zero():
        return
    assert (a * b).exact_div(b) == a


@settings(max_examples=60, deadline=None)
@given(polys())
def test_derivative_of_square(p):
    # (p^2)' = 2 p p'
    assert (p * p).derivative("x") == 2 * p * p.derivative("x")


@settings(max_examples=40, deadline=None)
@given(polys(), st.integers(-8, 8), st.integers(-8, 8), st.integers(-8, 8))
def test_eval_is_ring_homomorphism(p, a, b, c):
    point = {"x": a, "t": b, "lam": c}
    q = p * p + 3 * p
    assert q.eval_rat(point) == p.eval_rat(point) ** 2 + 3 * p.eval_rat(point)


# ----------------------------------------------------------------------
# Rational functions
# ----------------------------------------------------------------------

def test_ratfunc_normalizes_denominator():
    x = var("x")
    r = RatFunc(x, -2 * x + 2)
    # denominator is kept primitive with positive leading coefficient
    assert r.den.content() == 1
    _, lead = r.den.leading_term()
    assert lead > 0


def test_ratfunc_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError):
        RatFunc(var("x"), MPoly.zero())


def test_ratfunc_cross_multiplication_equality():
    x = var("x")
    a = RatFunc(x * x - 1, x - 1)
    b = RatFunc(x + 1)
    assert a == b  # equal as fractions without explicit reduction
    assert a != b + 1


def test_ratfunc_field_ops():
    x = as_ratfunc(var("x"))
    r = (x + 1) / (x - 1)
    s = 1 / r
    assert r * s == RatFunc.one()
    assert r - r == RatFunc.zero()
    assert (r + s) * (x - 1) * (x + 1) == (x + 1) ** 2 + (x - 1) ** 2


def test_ratfunc_pow_negative():
    x = as_ratfunc(var("x"))
    assert (x ** -2) * x * x == RatFunc.one()


def test_ratfunc_derivative_quotient_rule():
    x = var("x")
    r = RatFunc(x * x + 1, x - 2)
    d = r.derivative("x")
    num = 2 * x * (x - 2) - (x * x + 1)
    assert d == RatFunc(num, (x - 2) ** 2)


def test_ratfunc_subst_with_ratfunc_values():
    x, t = var("x"), var("t")
    r = RatFunc(x + 1, x - 1)
    image = r.subst({"x": RatFunc(t, t - 1)})
    # (t/(t-1) + 1) / (t/(t-1) - 1) = (2t - 1) / 1
    assert image == as_ratfunc(2 * t - 1)


def test_ratfunc_eval_and_pole_detection():
    x = var("x")
    r = RatFunc(x + 1, x - 1)
    assert r.eval_rat({"x": 3}) == 2
    with pytest.raises(ZeroDivisionError):
        r.eval_rat({"x": 1})


def test_ratfunc_to_str_stable():
    x = var("x")
    r = RatFunc(x + 1, 2 * x)
    assert r.to_str() == RatFunc(2 * (x + 1), 4 * x).to_str()


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys(), polys())
def test_ratfunc_addition_matches_cross_multiplied(a, b, c, d):
    if b.is_zero() or d.is_zero():
        return
    lhs = RatFunc(a, b) + RatFunc(c, d)
    assert lhs == RatFunc(a * d + c * b, b * d)


def test_universe_contains_every_needed_symbol():
    for name in ("x", "zeta", "ul", "ut", "c1", "c2", "lam", "t", "nu",
                 "z", "w", "k1", "k2"):
        assert name in VARS
