import threading
from fractions import Fraction

import pytest
from hypothesis import assume, given, reject
from hypothesis import strategies as st
from src.laurent import (
    ZERO,
    BinomialFactorization,
    ExpansionCancelledError,
    LaurentPoly,
    NonExactDivisionError,
    PoleError,
    VariableCountError,
    binomial,
    eval_rational,
    expand_onesided,
    factored_collapse,
    factored_expand,
    factored_invert_vars,
    factored_push,
    factored_resolve,
    factored_substitute_one,
    leading_coefficient,
    poly_add,
    poly_div,
    poly_div_exact,
    poly_mul,
    poly_pow,
    poly_scale_exponents,
    poly_sub,
    render_factored,
    render_poly,
    unit_normalize,
)

from tests.strategies import exact_quotients, factorizations, laurent_polys, nonzero_laurent_polys

T = LaurentPoly.monomial((1,))
ONE = LaurentPoly.one(1)


def test_terms_are_canonical() -> None:
    # given
    p = LaurentPoly.from_dict(2, {(0, 1): 2, (1, 0): 3, (5, 5): 0})
    q = LaurentPoly.from_dict(2, {(1, 0): 3, (0, 1): 2})
    # then
    assert p == q
    assert p.terms == (((1, 0), 3), ((0, 1), 2))


def test_from_dict_rejects_wrong_vector_length() -> None:
    with pytest.raises(VariableCountError):
        LaurentPoly.from_dict(2, {(1,): 1})


def test_mixing_rings_raises() -> None:
    with pytest.raises(VariableCountError):
        poly_add(LaurentPoly.one(1), LaurentPoly.one(2))


def test_binomial_of_zero_vector_is_zero() -> None:
    assert binomial((0, 0)).is_zero()


def test_poly_div_exact_quotient() -> None:
    # given (t^6 - t^-6) / (t^2 - t^-2)
    p = binomial((6,))
    # when
    quotient = poly_div_exact(p, (2,))
    # then
    assert quotient == LaurentPoly.from_dict(1, {(4,): 1, (0,): 1, (-4,): 1})


def test_poly_div_non_exact() -> None:
    # given t^2 + 1 is not a multiple of t - t^-1
    p = LaurentPoly.from_dict(1, {(2,): 1, (0,): 1})
    # when / then
    with pytest.raises(NonExactDivisionError):
        poly_div_exact(p, (1,))


def test_poly_div_by_zero_vector_binomial_is_rejected() -> None:
    with pytest.raises(ValueError):
        poly_div_exact(binomial((1, 1)), (0, 0))


def test_poly_div_by_zero_polynomial() -> None:
    with pytest.raises(ZeroDivisionError):
        poly_div(ONE, LaurentPoly.zero(1))


def test_poly_div_non_integer_quotient() -> None:
    with pytest.raises(NonExactDivisionError):
        poly_div(LaurentPoly.monomial((1,), 3), LaurentPoly.monomial((0,), 2))


@given(laurent_polys(), nonzero_laurent_polys())
def test_division_undoes_multiplication(p: LaurentPoly, d: LaurentPoly) -> None:
    assert poly_div(poly_mul(p, d), d) == p


@given(laurent_polys(), laurent_polys(), laurent_polys())
def test_multiplication_distributes(p: LaurentPoly, q: LaurentPoly, r: LaurentPoly) -> None:
    assert poly_mul(p, poly_add(q, r)) == poly_add(poly_mul(p, q), poly_mul(p, r))


@given(laurent_polys(), laurent_polys(), laurent_polys())
def test_multiplication_is_commutative_and_associative(p: LaurentPoly, q: LaurentPoly, r: LaurentPoly) -> None:
    assert poly_mul(p, q) == poly_mul(q, p)
    assert poly_mul(poly_mul(p, q), r) == poly_mul(p, poly_mul(q, r))


@given(laurent_polys())
def test_subtraction_of_self_is_zero(p: LaurentPoly) -> None:
    assert poly_sub(p, p).is_zero()


def test_poly_pow_rejects_negative_exponent() -> None:
    with pytest.raises(ValueError):
        poly_pow(T, -1)


def test_scale_exponents() -> None:
    # given t1^2 t2 - t2^-1
    p = LaurentPoly.from_dict(2, {(2, 1): 1, (0, -1): -1})
    # then
    assert poly_scale_exponents(p, 2) == LaurentPoly.from_dict(2, {(4, 2): 1, (0, -2): -1})


def test_unit_normalize() -> None:
    # given -t^3 + t^2 - t
    p = LaurentPoly.from_dict(1, {(3,): -1, (2,): 1, (1,): -1})
    # when
    normalized = unit_normalize(p)
    # then
    assert normalized == LaurentPoly.from_dict(1, {(2,): 1, (1,): -1, (0,): 1})
    assert leading_coefficient(normalized) == 1


@given(nonzero_laurent_polys(), st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.sampled_from([1, -1]))
def test_unit_normalize_ignores_units(p: LaurentPoly, shift: tuple[int, int], sign: int) -> None:
    unit = LaurentPoly.monomial(shift, sign)
    assert unit_normalize(poly_mul(p, unit)) == unit_normalize(p)


def test_factored_push_flips_sign_for_odd_multiplicity() -> None:
    # given
    f = BinomialFactorization.one(1)
    # when
    odd = factored_push(f, (-2,), 1)
    even = factored_push(f, (-2,), 2)
    # then
    assert odd.sign == -1
    assert odd.factors == (((2,), 1),)
    assert even.sign == 1


def test_factored_push_cancels_multiplicities() -> None:
    f = factored_push(factored_push(BinomialFactorization.one(2), (1, 2), 1), (-1, -2), -1)
    assert f.factors == ()
    assert f.sign == -1


def test_zero_vector_tracks_multiplicity() -> None:
    # given
    f = factored_push(BinomialFactorization.one(1), (0,), 2)
    # then
    assert f.zero_mult == 2
    assert factored_resolve(f) is ZERO
    assert factored_resolve(factored_push(f, (0,), -2)) == BinomialFactorization.one(1)
    with pytest.raises(PoleError):
        factored_resolve(factored_push(f, (0,), -3))


def test_factored_substitute_one_renormalizes() -> None:
    # given (t1 t2^-1 - t1^-1 t2); t1 = 1 leaves (t2^-1 - t2) = -(t2 - t2^-1)
    f = BinomialFactorization.from_factors(2, [((1, -1), 1)])
    # when
    g = factored_substitute_one(f, 1)
    # then
    assert g == BinomialFactorization.from_factors(1, [((1,), 1)], sign=-1)


def test_factored_substitute_one_creates_zero_vector() -> None:
    f = BinomialFactorization.from_factors(2, [((1, 0), 3)])
    assert factored_substitute_one(f, 1).zero_mult == 3


def test_factored_substitute_one_needs_two_variables() -> None:
    with pytest.raises(ValueError):
        factored_substitute_one(BinomialFactorization.one(1), 1)


@given(factorizations())
def test_inverting_twice_is_identity(f: BinomialFactorization) -> None:
    assert factored_invert_vars(factored_invert_vars(f)) == f
    assert factored_invert_vars(factored_invert_vars(f, 2), 2) == f


def test_trefoil_potential_expands() -> None:
    # given (t^6 - t^-6) / ((t^2 - t^-2)(t^3 - t^-3)) times (t - t^-1)
    f = BinomialFactorization.from_factors(1, [((6,), 1), ((2,), -1), ((3,), -1), ((1,), 1)])
    # when
    expanded = factored_expand(f)
    # then
    assert expanded == LaurentPoly.from_dict(1, {(2,): 1, (0,): -1, (-2,): 1})
    assert render_poly(expanded, ("t",)) == "t^2 - 1 + t^-2"


def test_factored_expand_non_exact() -> None:
    f = BinomialFactorization.from_factors(1, [((1,), -1)])
    with pytest.raises(NonExactDivisionError):
        factored_expand(f)


def test_factored_expand_zero_and_pole() -> None:
    assert factored_expand(BinomialFactorization(nvars=1, zero_mult=1)) is ZERO
    with pytest.raises(PoleError):
        factored_expand(BinomialFactorization(nvars=1, zero_mult=-1))


def test_expand_onesided_knot() -> None:
    # given the trefoil: (t^6 - 1)(t - 1) / ((t^2 - 1)(t^3 - 1))
    f = BinomialFactorization.from_factors(1, [((6,), 1), ((2,), -1), ((3,), -1)])
    # when
    alexander = expand_onesided(f, knot_extra=True)
    # then
    assert alexander == LaurentPoly.from_dict(1, {(2,): 1, (1,): -1, (0,): 1})


def test_expand_onesided_knot_factor_needs_one_variable() -> None:
    with pytest.raises(VariableCountError):
        expand_onesided(BinomialFactorization.one(2), knot_extra=True)


def test_expansion_can_be_cancelled() -> None:
    # given
    cancel = threading.Event()
    cancel.set()
    f = BinomialFactorization.from_factors(2, [((1, 2), 3), ((2, 1), 2)])
    # when / then
    with pytest.raises(ExpansionCancelledError):
        factored_expand(f, cancel=cancel)


def test_eval_rational_trefoil_potential() -> None:
    # given the trefoil potential (t^6 - t^-6) / ((t^2 - t^-2)(t^3 - t^-3))
    f = BinomialFactorization.from_factors(1, [((6,), 1), ((2,), -1), ((3,), -1)])
    # then
    assert eval_rational(f, [2]) == Fraction(13, 6)


def test_eval_rational_zero_and_pole() -> None:
    # given
    f = BinomialFactorization.from_factors(2, [((1, -1), 1)])
    g = BinomialFactorization.from_factors(2, [((1, -1), -1)])
    # then
    assert eval_rational(f, [3, 3]) == 0
    with pytest.raises(PoleError):
        eval_rational(g, [3, 3])
    with pytest.raises(ValueError):
        eval_rational(f, [0, 1])
    with pytest.raises(ValueError):
        eval_rational(f, [1])


# no monomial other than 1 takes the value ±1 at (x, 1/y)
points = st.tuples(st.sampled_from([2, 3, -2]), st.sampled_from([5, -7]))
signed_factorizations = st.one_of(factorizations(max_factors=3), exact_quotients())


def _expand_or_reject(f: BinomialFactorization) -> LaurentPoly:
    try:
        expanded = factored_expand(f)
    except NonExactDivisionError:
        reject()
    assert expanded is not ZERO
    return expanded


@given(signed_factorizations, st.lists(points, min_size=5, max_size=5))
def test_evaluation_agrees_with_expansion(f: BinomialFactorization, samples: list[tuple[int, int]]) -> None:
    assume(f.zero_mult == 0)
    # when
    expanded = _expand_or_reject(f)
    # then
    for x, y in samples:
        point = [Fraction(x), Fraction(1, y)]
        assert eval_rational(expanded, point) == eval_rational(f, point)


@given(signed_factorizations)
def test_expansion_times_denominators_is_the_numerator(f: BinomialFactorization) -> None:
    assume(f.zero_mult == 0)
    # when
    expanded = _expand_or_reject(f)
    # then
    numerator = LaurentPoly.monomial((0, 0), f.sign)
    denominator = LaurentPoly.one(2)
    for exponents, multiplicity in f.factors:
        if multiplicity > 0:
            numerator = poly_mul(numerator, poly_pow(binomial(exponents), multiplicity))
        else:
            denominator = poly_mul(denominator, poly_pow(binomial(exponents), -multiplicity))
    assert poly_mul(expanded, denominator) == numerator


@given(signed_factorizations, st.sampled_from([1, 2]), st.sampled_from([2, 3, -2]))
def test_substitution_commutes_with_expansion(f: BinomialFactorization, index: int, x: int) -> None:
    # given t_index = 1 leaves every factor with a nonzero vector
    assume(f.zero_mult == 0)
    assume(all(any(e[: index - 1] + e[index:]) for e, _ in f.factors))
    # when
    expanded = _expand_or_reject(f)
    substituted = factored_expand(factored_substitute_one(f, index))
    # then
    assert substituted is not ZERO
    point = [Fraction(x), Fraction(x)]
    point[index - 1] = Fraction(1)
    assert eval_rational(expanded, point) == eval_rational(substituted, [Fraction(x)])


def test_collapse_sums_coordinates() -> None:
    f = BinomialFactorization.from_factors(2, [((1, -1), 1), ((1, 2), -1)])
    assert factored_collapse(f) == BinomialFactorization.from_factors(1, [((3,), -1)], zero_mult=1)


def test_render() -> None:
    # given
    p = LaurentPoly.from_dict(2, {(2, 0): 3, (0, -1): -1, (0, 0): 1})
    f = BinomialFactorization.from_factors(2, [((1, 1), 2), ((0, 0), 1)], sign=-1)
    # then
    assert render_poly(p) == "3 t1^2 + 1 - t2^-1"
    assert render_poly(LaurentPoly.zero(2)) == "0"
    assert render_factored(f) == "(-1)^1 * (1 - 1)^1 (t1 t2 - t1^-1 t2^-1)^2"
    assert render_factored(BinomialFactorization.one(1, sign=-1)) == "-1"
