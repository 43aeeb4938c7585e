"""Link invariants of a graph link computed from its splice diagram.

The potential function is a signed product over the non-arrowhead vertices v of
(T^ℓ_v - T^-ℓ_v)^(δ_v - 2), where ℓ_v is the vector of linking numbers of the
components with the virtual component at v and δ_v its valency; the sign is
(-1)^k_- for k_- arrowheads of weight -1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

from src.laurent import (
    ZERO,
    BinomialFactorization,
    LaurentPoly,
    PoleError,
    Zero,
    expand_onesided,
    factored_collapse,
    factored_expand,
    factored_push,
    factored_resolve,
)
from src.linking import LinkingData, linking_table

if TYPE_CHECKING:
    import threading

    from src.diagram import SpliceDiagram

logger = logging.getLogger(__name__)


class NotFiberedError(Exception):
    """Raised when a statement that only holds for fibered links is applied to a non-fibered one."""


@dataclass(frozen=True)
class SignCounts:
    """k_minus: arrowheads of weight -1; j_minus: non-arrowhead v with ℓ_v < 0 and δ_v odd."""

    k_minus: int
    j_minus: int


def _k_minus(d: SpliceDiagram) -> int:
    return sum(1 for vertex in d.vertices if vertex.arrow == -1)


def potential_factors(d: SpliceDiagram, data: LinkingData | None = None) -> BinomialFactorization:
    """The potential function before formal cancellation; the zero-vector multiplicity is kept."""
    data = data or linking_table(d)
    result = BinomialFactorization.one(d.n_components, sign=(-1) ** _k_minus(d))
    for vertex in data.vertices:
        result = factored_push(result, data.vector(vertex), d.valency(vertex) - 2)
    return result


def conway_potential(d: SpliceDiagram, data: LinkingData | None = None) -> BinomialFactorization | Zero:
    """The Conway potential function in factored form.

    :returns: The factorization, or ZERO when the zero-vector factors survive cancellation.
    :raises PoleError: If the zero-vector factors cancel to a negative power.
    """
    raw = potential_factors(d, data)
    try:
        return factored_resolve(raw)
    except PoleError:
        logger.warning(f"Potential function has a pole: zero-vector multiplicity {raw.zero_mult}")
        raise


def alexander_polynomial(
    d: SpliceDiagram, data: LinkingData | None = None, cancel: threading.Event | None = None
) -> LaurentPoly | Zero:
    """The multivariable Alexander polynomial, unit-normalized.

    :raises PoleError: If the zero-vector factors cancel to a negative power.
    :raises NonExactDivisionError: If the product is not a Laurent polynomial.
    """
    return expand_onesided(potential_factors(d, data), knot_extra=d.n_components == 1, cancel=cancel)


def conway_factors(d: SpliceDiagram, data: LinkingData | None = None) -> BinomialFactorization:
    """Ω(t) = (t - t^-1)·∇(t, ..., t) in factored form, before cancellation."""
    return factored_push(factored_collapse(potential_factors(d, data)), (1,), 1)


def conway_polynomial(
    d: SpliceDiagram, data: LinkingData | None = None, cancel: threading.Event | None = None
) -> LaurentPoly | Zero:
    """The one-variable Conway polynomial Ω(t), expanded.

    :raises PoleError: If the collapsed zero-vector factors cancel to a negative power.
    :raises NonExactDivisionError: If the quotient is not a Laurent polynomial.
    """
    result = factored_expand(conway_factors(d, data), cancel=cancel)
    if result is ZERO:
        logger.info("Conway polynomial vanishes")
    return result


def is_fibered(d: SpliceDiagram, data: LinkingData | None = None) -> bool:
    """Fibered iff ℓ_v != 0 at every node (vertex of valency > 1)."""
    data = data or linking_table(d)
    return all(data.total(vertex) != 0 for vertex in data.vertices if d.is_node(vertex))


def sign_counts(d: SpliceDiagram, data: LinkingData | None = None) -> SignCounts:
    data = data or linking_table(d)
    j_minus = sum(1 for vertex in data.vertices if data.total(vertex) < 0 and d.valency(vertex) % 2 == 1)
    return SignCounts(k_minus=_k_minus(d), j_minus=j_minus)


def _fibered_counts(d: SpliceDiagram, data: LinkingData | None) -> SignCounts:
    data = data or linking_table(d)
    if not is_fibered(d, data):
        raise NotFiberedError("The determinant sign and Milnor parity only hold for fibered links")
    return sign_counts(d, data)


def seifert_determinant_sign(d: SpliceDiagram, data: LinkingData | None = None) -> int:
    """det(-A) for a Seifert matrix A of a fibered graph link: (-1)^(k_- + j_-).

    :raises NotFiberedError: If the diagram is not fibered.
    """
    counts = _fibered_counts(d, data)
    return (-1) ** (counts.k_minus + counts.j_minus)


def enhanced_milnor_parity(d: SpliceDiagram, data: LinkingData | None = None) -> int:
    """The enhanced Milnor number modulo 2.

    :raises NotFiberedError: If the diagram is not fibered.
    """
    counts = _fibered_counts(d, data)
    return (counts.k_minus + counts.j_minus) % 2
