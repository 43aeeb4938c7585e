"""Exact sparse multivariate Laurent polynomials and factored binomial products.

Exponent vectors are plain tuples of ints, so Python's tuple comparison is the
lexicographic term order used for division and for leading coefficients.
"""

from __future__ import annotations

import enum
import heapq
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    import threading
    from collections.abc import Callable, Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

ExponentVector = tuple[int, ...]


class LaurentError(Exception):
    """Base class for errors raised by the algebra layer."""


class VariableCountError(LaurentError):
    """Raised when two operands live in rings with a different number of variables."""


class PoleError(LaurentError):
    """Raised when an expression has a net negative power of zero."""


class NonExactDivisionError(LaurentError):
    """Raised when a division leaves a nonzero remainder."""


class ExpansionCancelledError(LaurentError):
    """Raised when a caller-supplied cancellation token was set during an expansion."""


class Zero(enum.Enum):
    """The distinguished vanishing result of a factored expansion."""

    ZERO = "0"

    def __str__(self) -> str:
        return "0"


ZERO = Zero.ZERO


def _check_cancel(cancel: threading.Event | None) -> None:
    if cancel is not None and cancel.is_set():
        raise ExpansionCancelledError("Expansion cancelled")


def _add_vectors(a: ExponentVector, b: ExponentVector) -> ExponentVector:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def _sub_vectors(a: ExponentVector, b: ExponentVector) -> ExponentVector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def _negate_vector(a: ExponentVector) -> ExponentVector:
    return tuple(-x for x in a)


def is_zero_vector(a: ExponentVector) -> bool:
    return not any(a)


def normalize_vector(a: ExponentVector) -> tuple[ExponentVector, bool]:
    """Flip a vector so that its first nonzero coordinate is positive.

    :returns: The normalized vector and whether it was flipped.
    """
    for x in a:
        if x > 0:
            return a, False
        if x < 0:
            return _negate_vector(a), True
    return a, False


@dataclass(frozen=True)
class LaurentPoly:
    """Integer Laurent polynomial in `nvars` variables.

    `terms` is kept sorted by descending exponent vector with no zero coefficients,
    which makes dataclass equality the equality of polynomials.
    """

    nvars: int
    terms: tuple[tuple[ExponentVector, int], ...] = ()

    @classmethod
    def from_dict(cls, nvars: int, terms: Mapping[ExponentVector, int]) -> LaurentPoly:
        for exponents in terms:
            if len(exponents) != nvars:
                raise VariableCountError(f"Exponent vector {exponents} does not have {nvars} coordinates")
        items = sorted(((tuple(e), c) for e, c in terms.items() if c != 0), reverse=True)
        return cls(nvars=nvars, terms=tuple(items))

    @classmethod
    def zero(cls, nvars: int) -> LaurentPoly:
        return cls(nvars=nvars)

    @classmethod
    def one(cls, nvars: int) -> LaurentPoly:
        return cls.monomial((0,) * nvars)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: int = 1) -> LaurentPoly:
        return cls.from_dict(len(exponents), {tuple(exponents): coeff})

    def as_dict(self) -> dict[ExponentVector, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading_term(self) -> tuple[ExponentVector, int]:
        if not self.terms:
            raise ValueError("The zero polynomial has no leading term")
        return self.terms[0]

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        return poly_add(self, other)

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return poly_sub(self, other)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        return poly_mul(self, other)

    def __neg__(self) -> LaurentPoly:
        return poly_neg(self)

    def __str__(self) -> str:
        return render_poly(self)


def _require_same_ring(p: LaurentPoly, q: LaurentPoly) -> None:
    if p.nvars != q.nvars:
        raise VariableCountError(f"Cannot combine polynomials in {p.nvars} and {q.nvars} variables")


def poly_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    _require_same_ring(p, q)
    result = p.as_dict()
    for exponents, coeff in q.terms:
        result[exponents] = result.get(exponents, 0) + coeff
    return LaurentPoly.from_dict(p.nvars, result)


def poly_neg(p: LaurentPoly) -> LaurentPoly:
    return LaurentPoly(nvars=p.nvars, terms=tuple((e, -c) for e, c in p.terms))


def poly_sub(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return poly_add(p, poly_neg(q))


def poly_mul(p: LaurentPoly, q: LaurentPoly, cancel: threading.Event | None = None) -> LaurentPoly:
    """Multiply two Laurent polynomials exactly.

    :raises VariableCountError: If the operands have a different number of variables.
    :raises ExpansionCancelledError: If `cancel` is set while merging terms.
    """
    _require_same_ring(p, q)
    result: dict[ExponentVector, int] = {}
    for e1, c1 in p.terms:
        _check_cancel(cancel)
        for e2, c2 in q.terms:
            exponents = _add_vectors(e1, e2)
            result[exponents] = result.get(exponents, 0) + c1 * c2
    return LaurentPoly.from_dict(p.nvars, result)


def poly_pow(p: LaurentPoly, k: int, cancel: threading.Event | None = None) -> LaurentPoly:
    if k < 0:
        raise ValueError("Negative powers are not Laurent polynomials in general")
    result = LaurentPoly.one(p.nvars)
    for _ in range(k):
        result = poly_mul(result, p, cancel=cancel)
    return result


def binomial(exponents: Sequence[int]) -> LaurentPoly:
    """Return T^ℓ - T^(-ℓ); the zero polynomial when ℓ = 0."""
    ell = tuple(exponents)
    if is_zero_vector(ell):
        return LaurentPoly.zero(len(ell))
    return LaurentPoly.from_dict(len(ell), {ell: 1, _negate_vector(ell): -1})


def onesided_binomial(exponents: Sequence[int]) -> LaurentPoly:
    """Return T^ℓ - 1."""
    ell = tuple(exponents)
    zero = (0,) * len(ell)
    if ell == zero:
        return LaurentPoly.zero(len(ell))
    return LaurentPoly.from_dict(len(ell), {ell: 1, zero: -1})


def _degree_box(p: LaurentPoly) -> tuple[list[int], list[int]]:
    lows = [min(e[i] for e, _ in p.terms) for i in range(p.nvars)]
    highs = [max(e[i] for e, _ in p.terms) for i in range(p.nvars)]
    return lows, highs


def poly_div(p: LaurentPoly, d: LaurentPoly, cancel: threading.Event | None = None) -> LaurentPoly:
    """Divide `p` by `d` exactly, by long division under the lexicographic order.

    Degrees in each variable are additive for Laurent polynomials, so every term of
    an exact quotient lies in a finite box computed up front; a quotient term outside
    it proves the division is not exact and bounds the loop.

    :raises NonExactDivisionError: If `d` does not divide `p`.
    :raises ZeroDivisionError: If `d` is zero.
    """
    _require_same_ring(p, d)
    if d.is_zero():
        raise ZeroDivisionError("Division by the zero polynomial")
    if p.is_zero():
        return LaurentPoly.zero(p.nvars)

    p_low, p_high = _degree_box(p)
    d_low, d_high = _degree_box(d)
    q_low = [a - b for a, b in zip(p_low, d_low, strict=True)]
    q_high = [a - b for a, b in zip(p_high, d_high, strict=True)]
    if any(lo > hi for lo, hi in zip(q_low, q_high, strict=True)):
        raise NonExactDivisionError(f"{render_poly(d)} does not divide {render_poly(p)}")

    lead_exponents, lead_coeff = d.leading_term
    remainder = p.as_dict()
    # max-heap of remainder keys via negated vectors; stale entries are skipped
    pending = [_negate_vector(e) for e in remainder]
    heapq.heapify(pending)
    quotient: dict[ExponentVector, int] = {}
    while remainder:
        _check_cancel(cancel)
        r_exponents = _negate_vector(heapq.heappop(pending))
        if r_exponents not in remainder:
            continue
        q_coeff, rest = divmod(remainder[r_exponents], lead_coeff)
        q_exponents = _sub_vectors(r_exponents, lead_exponents)
        if rest or any(not lo <= x <= hi for x, lo, hi in zip(q_exponents, q_low, q_high, strict=True)):
            raise NonExactDivisionError(f"{render_poly(d)} does not divide {render_poly(p)}")
        quotient[q_exponents] = q_coeff
        for exponents, coeff in d.terms:
            key = _add_vectors(q_exponents, exponents)
            value = remainder.get(key, 0) - q_coeff * coeff
            if value:
                if key not in remainder:
                    heapq.heappush(pending, _negate_vector(key))
                remainder[key] = value
            else:
                remainder.pop(key, None)
    return LaurentPoly.from_dict(p.nvars, quotient)


def poly_div_exact(p: LaurentPoly, exponents: Sequence[int], cancel: threading.Event | None = None) -> LaurentPoly:
    """Divide `p` by the binomial T^ℓ - T^(-ℓ).

    :raises ValueError: If ℓ is the zero vector.
    :raises NonExactDivisionError: If the binomial does not divide `p`.
    """
    if is_zero_vector(tuple(exponents)):
        raise ValueError("Cannot divide by the binomial of the zero vector")
    return poly_div(p, binomial(exponents), cancel=cancel)


def poly_scale_exponents(p: LaurentPoly, factor: int) -> LaurentPoly:
    """Substitute t_i ↦ t_i^factor in every variable."""
    return LaurentPoly.from_dict(p.nvars, {tuple(factor * x for x in e): c for e, c in p.terms})


def leading_coefficient(p: LaurentPoly) -> int:
    return p.leading_term[1]


def unit_normalize(p: LaurentPoly) -> LaurentPoly:
    """Pick the representative of p up to ±t_1^ν_1⋯t_n^ν_n.

    Exponents are shifted so every variable's minimal exponent is 0, then the sign is
    chosen so that the lexicographically greatest term is positive.
    """
    if p.is_zero():
        return p
    lows, _ = _degree_box(p)
    shifted = {_sub_vectors(e, tuple(lows)): c for e, c in p.terms}
    normalized = LaurentPoly.from_dict(p.nvars, shifted)
    if leading_coefficient(normalized) < 0:
        normalized = poly_neg(normalized)
    return normalized


def _check_index(index: int, nvars: int) -> None:
    if not 1 <= index <= nvars:
        raise IndexError(f"Variable index {index} out of range 1..{nvars}")


def _invert(exponents: ExponentVector, which: int | None) -> ExponentVector:
    if which is None:
        return _negate_vector(exponents)
    return exponents[: which - 1] + (-exponents[which - 1],) + exponents[which:]


@dataclass(frozen=True)
class BinomialFactorization:
    """sign · (T^0 - T^0)^zero_mult · ∏ (T^ℓ - T^(-ℓ))^m.

    Keys ℓ are nonzero with positive first nonzero coordinate, multiplicities are
    nonzero and `factors` is sorted by descending ℓ, so equality is structural.
    Build values with `BinomialFactorization.one` and `factored_push`.
    """

    nvars: int
    sign: int = 1
    factors: tuple[tuple[ExponentVector, int], ...] = ()
    zero_mult: int = 0

    @classmethod
    def one(cls, nvars: int, sign: int = 1) -> BinomialFactorization:
        return cls(nvars=nvars, sign=sign)

    @classmethod
    def from_factors(
        cls, nvars: int, factors: Iterable[tuple[Sequence[int], int]], sign: int = 1, zero_mult: int = 0
    ) -> BinomialFactorization:
        """Accumulate arbitrary (ℓ, m) pairs through the normalization of `factored_push`."""
        result = cls(nvars=nvars, sign=sign, zero_mult=zero_mult)
        for exponents, multiplicity in factors:
            result = factored_push(result, exponents, multiplicity)
        return result

    def as_dict(self) -> dict[ExponentVector, int]:
        return dict(self.factors)

    def __str__(self) -> str:
        return render_factored(self)


def _rebuild(
    nvars: int, sign: int, factors: Mapping[ExponentVector, int], zero_mult: int
) -> BinomialFactorization:
    items = sorted(((e, m) for e, m in factors.items() if m != 0), reverse=True)
    return BinomialFactorization(nvars=nvars, sign=sign, factors=tuple(items), zero_mult=zero_mult)


def factored_push(f: BinomialFactorization, exponents: Sequence[int], multiplicity: int) -> BinomialFactorization:
    """Multiply `f` by (T^ℓ - T^(-ℓ))^m, keeping the canonical form.

    A negative first coordinate is flipped, contributing (-1)^m to the sign; the zero
    vector only changes `zero_mult`.
    """
    ell = tuple(exponents)
    if len(ell) != f.nvars:
        raise VariableCountError(f"Exponent vector {ell} does not have {f.nvars} coordinates")
    if multiplicity == 0:
        return f
    if is_zero_vector(ell):
        return replace(f, zero_mult=f.zero_mult + multiplicity)
    ell, flipped = normalize_vector(ell)
    sign = f.sign * (-1) ** (multiplicity % 2) if flipped else f.sign
    factors = f.as_dict()
    factors[ell] = factors.get(ell, 0) + multiplicity
    return _rebuild(f.nvars, sign, factors, f.zero_mult)


def factored_negate(f: BinomialFactorization) -> BinomialFactorization:
    return replace(f, sign=-f.sign)


def _remap(
    f: BinomialFactorization, nvars: int, transform: Callable[[ExponentVector], ExponentVector]
) -> BinomialFactorization:
    result = BinomialFactorization(nvars=nvars, sign=f.sign, zero_mult=f.zero_mult)
    for exponents, multiplicity in f.factors:
        result = factored_push(result, transform(exponents), multiplicity)
    return result


def factored_substitute_one(f: BinomialFactorization, index: int) -> BinomialFactorization:
    """Set t_index = 1 (1-based): drop that coordinate and renormalize every factor."""
    _check_index(index, f.nvars)
    if f.nvars < 2:
        raise ValueError("Cannot substitute the only variable of a factorization")
    return _remap(f, f.nvars - 1, lambda e: e[: index - 1] + e[index:])


def factored_collapse(f: BinomialFactorization) -> BinomialFactorization:
    """Set every variable equal to one variable t."""
    return _remap(f, 1, lambda e: (sum(e),))


def factored_invert_vars(f: BinomialFactorization, which: int | None = None) -> BinomialFactorization:
    """Invert all variables (`which=None`) or only the 1-based variable `which`."""
    if which is not None:
        _check_index(which, f.nvars)
    return _remap(f, f.nvars, lambda e: _invert(e, which))


def factored_resolve(f: BinomialFactorization) -> BinomialFactorization | Zero:
    """Apply formal cancellation of the zero-vector factors.

    :returns: ZERO if the net zero multiplicity is positive, otherwise `f`.
    :raises PoleError: If the net zero multiplicity is negative.
    """
    if f.zero_mult > 0:
        return ZERO
    if f.zero_mult < 0:
        raise PoleError(f"Net multiplicity {f.zero_mult} of (T^0 - T^0)")
    return f


def _expand(
    f: BinomialFactorization,
    factor: Callable[[ExponentVector], LaurentPoly],
    sign: int,
    extra: LaurentPoly | None,
    cancel: threading.Event | None,
) -> LaurentPoly | Zero:
    if factored_resolve(f) is ZERO:
        return ZERO
    numerator = LaurentPoly.monomial((0,) * f.nvars, sign)
    if extra is not None:
        numerator = poly_mul(numerator, extra, cancel=cancel)
    for exponents, multiplicity in f.factors:
        if multiplicity > 0:
            numerator = poly_mul(numerator, poly_pow(factor(exponents), multiplicity, cancel=cancel), cancel=cancel)
    for exponents, multiplicity in f.factors:
        for _ in range(-multiplicity):
            numerator = poly_div(numerator, factor(exponents), cancel=cancel)
    logger.debug(f"Expanded {len(f.factors)} factors into {len(numerator.terms)} terms")
    return numerator


def factored_expand(f: BinomialFactorization, cancel: threading.Event | None = None) -> LaurentPoly | Zero:
    """Expand sign · ∏(T^ℓ - T^(-ℓ))^m into a Laurent polynomial.

    :returns: The expansion, or ZERO when the zero-vector factors survive cancellation.
    :raises PoleError: If the net zero-vector multiplicity is negative.
    :raises NonExactDivisionError: If the result is not a Laurent polynomial.
    """
    return _expand(f, binomial, f.sign, None, cancel)


def expand_onesided(
    f: BinomialFactorization, knot_extra: bool = False, cancel: threading.Event | None = None
) -> LaurentPoly | Zero:
    """Expand ∏(T^ℓ - 1)^m, times (t - 1) when `knot_extra` is set, up to units.

    The sign of `f` is ignored and the result is unit-normalized.
    """
    extra = None
    if knot_extra:
        if f.nvars != 1:
            raise VariableCountError("The knot factor (t - 1) only applies to one variable")
        extra = onesided_binomial((1,))
    result = _expand(f, onesided_binomial, 1, extra, cancel)
    if result is ZERO:
        return ZERO
    return unit_normalize(result)


def _monomial_value(exponents: ExponentVector, point: Sequence[Fraction]) -> Fraction:
    return math.prod((x**e for x, e in zip(point, exponents, strict=True)), start=Fraction(1))


def eval_rational(x: LaurentPoly | BinomialFactorization, point: Sequence[Fraction | int]) -> Fraction:
    """Evaluate exactly at a point with nonzero rational coordinates.

    :raises PoleError: If a factored input divides by zero at the point.
    :raises ValueError: If the point has the wrong length or a zero coordinate.
    """
    values = [Fraction(v) for v in point]
    if len(values) != x.nvars:
        raise ValueError(f"Point {tuple(point)} does not have {x.nvars} coordinates")
    if any(v == 0 for v in values):
        raise ValueError("Laurent polynomials cannot be evaluated at a zero coordinate")

    if isinstance(x, LaurentPoly):
        return sum((c * _monomial_value(e, values) for e, c in x.terms), start=Fraction(0))

    if factored_resolve(x) is ZERO:
        return Fraction(0)
    numerator = Fraction(x.sign)
    denominator = Fraction(1)
    for exponents, multiplicity in x.factors:
        value = _monomial_value(exponents, values) - _monomial_value(_negate_vector(exponents), values)
        if multiplicity > 0:
            numerator *= value**multiplicity
        else:
            denominator *= value**-multiplicity
    if denominator == 0:
        raise PoleError(f"A denominator factor vanishes at {tuple(point)}")
    return numerator / denominator


def default_names(nvars: int) -> tuple[str, ...]:
    return tuple(f"t{i}" for i in range(1, nvars + 1))


def _render_monomial(exponents: ExponentVector, names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, exponents, strict=True):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return " ".join(parts)


def render_poly(p: LaurentPoly, names: Sequence[str] | None = None) -> str:
    """Render terms in descending lex order, e.g. `t1^2 - 1 + t1^-2`."""
    if p.is_zero():
        return "0"
    names = names or default_names(p.nvars)
    out = []
    for i, (exponents, coeff) in enumerate(p.terms):
        monomial = _render_monomial(exponents, names)
        magnitude = abs(coeff)
        if not monomial:
            body = str(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{magnitude} {monomial}"
        if i == 0:
            out.append(f"-{body}" if coeff < 0 else body)
        else:
            out.append(f"{'-' if coeff < 0 else '+'} {body}")
    return " ".join(out)


def render_factored(f: BinomialFactorization, names: Sequence[str] | None = None) -> str:
    """Render as `(-1)^s * prod (t1^a t2^b - t1^-a t2^-b)^m`."""
    names = names or default_names(f.nvars)
    parts = []
    if f.zero_mult:
        parts.append(f"(1 - 1)^{f.zero_mult}")
    for exponents, multiplicity in f.factors:
        binom = f"{_render_monomial(exponents, names)} - {_render_monomial(_negate_vector(exponents), names)}"
        parts.append(f"({binom})^{multiplicity}")
    if not parts:
        return "-1" if f.sign < 0 else "1"
    body = " ".join(parts)
    return f"(-1)^1 * {body}" if f.sign < 0 else body
