"""Random splice diagrams and executable checks of the potential function identities."""

from __future__ import annotations

import enum
import logging
import math
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import TYPE_CHECKING

from pydantic import BaseModel, ConfigDict, Field

from src.diagram import Edge, SpliceDiagram, Vertex, delete_component, reverse_component, valency_sums, validate
from src.dsl import serialize
from src.invariants import (
    alexander_polynomial,
    conway_polynomial,
    is_fibered,
    potential_factors,
    seifert_determinant_sign,
)
from src.laurent import (
    ZERO,
    NonExactDivisionError,
    PoleError,
    factored_expand,
    factored_invert_vars,
    factored_negate,
    factored_push,
    factored_resolve,
    factored_substitute_one,
    leading_coefficient,
    poly_scale_exponents,
    unit_normalize,
)
from src.linking import is_algebraically_split, linking_table

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

logger = logging.getLogger(__name__)

MAX_WEIGHT_ATTEMPTS = 10_000


class GenerationExhaustedError(Exception):
    """Raised when no coprime weights were found within the attempt limit."""


class Outcome(enum.StrEnum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIP = "SKIP"
    INDET = "INDET"


class GeneratorConfig(BaseModel):
    """Bounds for random diagrams: vertex count, arrowhead count, weight magnitude, zero-weight probability."""

    max_vertices: int = Field(default=12, ge=2)
    max_components: int = Field(default=5, ge=1)
    max_weight: int = Field(default=7, ge=1)
    zero_prob: float = Field(default=0.1, ge=0, le=1)
    seed: int = 0

    model_config = ConfigDict(frozen=True)


class CheckReport(BaseModel):
    """Outcome of one identity check on one diagram."""

    identity: str
    outcome: Outcome
    component: int | None = None
    seed: int | None = None
    index: int | None = None
    witness: str | None = None
    expected: str | None = None
    actual: str | None = None
    note: str | None = None
    params: GeneratorConfig | None = None

    model_config = ConfigDict(frozen=True)

    def line(self) -> str:
        identity = self.identity if self.component is None else f"{self.identity}[{self.component}]"
        seed = "-" if self.seed is None else self.seed
        index = "-" if self.index is None else self.index
        return f"{identity} seed={seed} idx={index} {self.outcome}"


def _draw_node_weights(
    rng: random.Random, count: int, cfg: GeneratorConfig, zero_ends: Sequence[int] = ()
) -> list[int]:
    """Pairwise coprime weights for the `count` edge ends at one node.

    With probability `cfg.zero_prob` one of the positions in `zero_ends` gets weight 0.
    0 is only coprime to ±1, so the other ends then keep just the sign of their drawn weight.
    """
    candidates = [w for w in range(-cfg.max_weight, cfg.max_weight + 1) if w != 0]
    weights: list[int] = []
    attempts = 0
    while len(weights) < count:
        attempts += 1
        if attempts > MAX_WEIGHT_ATTEMPTS:
            raise GenerationExhaustedError(f"No coprime weights for a node of valency {count}")
        weight = rng.choice(candidates)
        if all(math.gcd(weight, other) == 1 for other in weights):
            weights.append(weight)
    if zero_ends and rng.random() < cfg.zero_prob:
        weights = [1 if w > 0 else -1 for w in weights]
        weights[rng.choice(zero_ends)] = 0
    return weights


def random_diagram(cfg: GeneratorConfig, index: int = 0) -> SpliceDiagram:
    """A valid random diagram, determined by `cfg.seed` and `index`.

    Weight 0 is only put on node ends whose far branch holds no arrowhead.

    :raises GenerationExhaustedError: If a node exhausts its weight attempts.
    """
    rng = random.Random(f"{cfg.seed}:{index}")
    size = rng.randint(2, cfg.max_vertices)
    names = [f"v{i}" for i in range(size)]
    neighbours: list[list[int]] = [[] for _ in range(size)]
    parents = [-1] * size
    for child in range(1, size):
        parent = rng.randrange(child)
        parents[child] = parent
        neighbours[parent].append(child)
        neighbours[child].append(parent)

    leaves = [i for i in range(size) if len(neighbours[i]) == 1]
    arrows = rng.sample(leaves, rng.randint(1, min(cfg.max_components, len(leaves))))
    signs = {i: rng.choice((1, -1)) for i in arrows}

    # arrowheads in the subtree hanging below each vertex, vertex 0 being the root
    below = [1 if i in signs else 0 for i in range(size)]
    for child in range(size - 1, 0, -1):
        below[parents[child]] += below[child]

    end_weights: dict[tuple[int, int], int] = {}
    for node in range(size):
        if len(neighbours[node]) > 1:
            zero_ends = [
                position
                for position, other in enumerate(neighbours[node])
                if (below[other] if parents[other] == node else len(arrows) - below[node]) == 0
            ]
            weights = _draw_node_weights(rng, len(neighbours[node]), cfg, zero_ends)
            for other, weight in zip(neighbours[node], weights, strict=True):
                end_weights[node, other] = weight

    vertices = [Vertex(name=names[i], arrow=signs.get(i)) for i in range(size)]
    edges = [
        Edge.between(names[u], names[v], end_weights.get((u, v), 1), end_weights.get((v, u), 1))
        for u in range(size)
        for v in neighbours[u]
        if u < v
    ]
    d = SpliceDiagram.create(vertices, edges, [names[i] for i in arrows])
    validate(d)
    return d


def _report(
    identity: str,
    outcome: Outcome,
    d: SpliceDiagram,
    component: int | None = None,
    expected: object = None,
    actual: object = None,
    note: str | None = None,
) -> CheckReport:
    if outcome is Outcome.FAIL:
        logger.error(f"Identity `{identity}` failed: expected {expected}, got {actual}")
    elif outcome is Outcome.INDET:
        logger.warning(f"Identity `{identity}` is indeterminate: {note}")
    return CheckReport(
        identity=identity,
        outcome=outcome,
        component=component,
        witness=serialize(d) if outcome in (Outcome.FAIL, Outcome.INDET) else None,
        expected=None if expected is None else str(expected),
        actual=None if actual is None else str(actual),
        note=note,
    )


def _compare(
    identity: str, d: SpliceDiagram, expected: object, actual: object, component: int | None = None
) -> CheckReport:
    outcome = Outcome.PASS if expected == actual else Outcome.FAIL
    return _report(identity, outcome, d, component, expected, actual)


def check_symmetry(d: SpliceDiagram) -> CheckReport:
    """∇(t^-1, ..., t^-1) = (-1)^n ∇(t)."""
    raw = potential_factors(d)
    try:
        actual = factored_resolve(factored_invert_vars(raw))
        expected = factored_resolve(raw if d.n_components % 2 == 0 else factored_negate(raw))
    except PoleError as e:
        return _report("symmetry", Outcome.INDET, d, note=str(e))
    return _compare("symmetry", d, expected, actual)


def check_reversal(d: SpliceDiagram, index: int) -> CheckReport:
    """Reversing component i gives -∇ with t_i inverted."""
    actual = potential_factors(reverse_component(d, index))
    expected = factored_negate(factored_invert_vars(potential_factors(d), index))
    return _compare("reversal", d, expected, actual, index)


def check_torres(d: SpliceDiagram, index: int) -> CheckReport:
    """∇_L at t_i = 1 equals (T^ℓ_i· - T^-ℓ_i·) times ∇ of L without component i."""
    if d.n_components < 2:
        return _report("torres", Outcome.SKIP, d, index, note="needs at least two components")
    data = linking_table(d)
    actual = factored_substitute_one(potential_factors(d, data), index)
    expected = factored_push(potential_factors(delete_component(d, index)), data.row(index), 1)
    if actual == expected:
        return _report("torres", Outcome.PASS, d, index)
    try:
        both_zero = factored_resolve(actual) is ZERO and factored_resolve(expected) is ZERO
    except PoleError as e:
        return _report("torres", Outcome.INDET, d, index, expected, actual, note=str(e))
    return _report("torres", Outcome.PASS if both_zero else Outcome.FAIL, d, index, expected, actual)


def check_split_vanishing(d: SpliceDiagram) -> CheckReport:
    """∇ = 0 exactly when the link is algebraically split."""
    if d.n_components < 2:
        return _report("split_vanishing", Outcome.SKIP, d, note="needs at least two components")
    raw = potential_factors(d)
    if raw.zero_mult < 0:
        return _report("split_vanishing", Outcome.INDET, d, note=f"zero-vector multiplicity {raw.zero_mult}")
    split = is_algebraically_split(d)
    return _compare("split_vanishing", d, f"split={split.split}", f"split={raw.zero_mult > 0}")


def check_alexander_consistency(d: SpliceDiagram) -> CheckReport:
    """∇ agrees with Δ(t^2) up to units; for knots Ω = (t - t^-1)∇ is compared instead."""
    try:
        if d.n_components == 1:
            potential = conway_polynomial(d)
        else:
            potential = factored_expand(potential_factors(d))
        alexander = alexander_polynomial(d)
    except PoleError as e:
        return _report("alexander_consistency", Outcome.INDET, d, note=str(e))
    except NonExactDivisionError as e:
        return _report("alexander_consistency", Outcome.FAIL, d, note=f"non-exact expansion: {e}")

    if potential is ZERO or alexander is ZERO:
        return _compare("alexander_consistency", d, alexander, potential)
    expected = unit_normalize(poly_scale_exponents(alexander, 2))
    return _compare("alexander_consistency", d, expected, unit_normalize(potential))


def check_leading_coefficient(d: SpliceDiagram) -> CheckReport:
    """For fibered links the leading coefficient of Ω is det(-A) = (-1)^(k_- + j_-)."""
    data = linking_table(d)
    if not is_fibered(d, data):
        return _report("leading_coefficient", Outcome.SKIP, d, note="not fibered")
    try:
        omega = conway_polynomial(d, data)
    except PoleError as e:
        return _report("leading_coefficient", Outcome.INDET, d, note=str(e))
    except NonExactDivisionError as e:
        return _report("leading_coefficient", Outcome.FAIL, d, note=f"non-exact expansion: {e}")
    expected = seifert_determinant_sign(d, data)
    actual = ZERO if omega is ZERO else leading_coefficient(omega)
    return _compare("leading_coefficient", d, expected, actual)


def check_valency_identity(d: SpliceDiagram) -> CheckReport:
    """Σ δ = 2(V - 1) over all vertices and Σ (δ_v - 2) = n - 2 over non-arrowheads."""
    total, excess = valency_sums(d)
    expected = (2 * (len(d.vertices) - 1), d.n_components - 2)
    return _compare("valency_identity", d, expected, (total, excess))


def check_conway_expansion(d: SpliceDiagram) -> CheckReport:
    """Ω always expands to a Laurent polynomial."""
    try:
        conway_polynomial(d)
    except PoleError as e:
        return _report("conway_expansion", Outcome.INDET, d, note=str(e))
    except NonExactDivisionError as e:
        return _report("conway_expansion", Outcome.FAIL, d, note=f"non-exact expansion: {e}")
    return _report("conway_expansion", Outcome.PASS, d)


def run_checks(d: SpliceDiagram) -> list[CheckReport]:
    """Every check, with reversal and Torres run once per component."""
    reports = [check_symmetry(d)]
    reports += [check_reversal(d, i) for i in range(1, d.n_components + 1)]
    if d.n_components < 2:
        reports.append(check_torres(d, 1))
    else:
        reports += [check_torres(d, i) for i in range(1, d.n_components + 1)]
    reports += [
        check_split_vanishing(d),
        check_alexander_consistency(d),
        check_leading_coefficient(d),
        check_valency_identity(d),
        check_conway_expansion(d),
    ]
    return reports


def _check_index(cfg: GeneratorConfig, index: int) -> list[CheckReport]:
    stamp = {"seed": cfg.seed, "index": index, "params": cfg}
    try:
        d = random_diagram(cfg, index)
    except GenerationExhaustedError as e:
        return [CheckReport(identity="generate", outcome=Outcome.SKIP, note=str(e), **stamp)]
    return [report.model_copy(update=stamp) for report in run_checks(d)]


def run_suite(cfg: GeneratorConfig, count: int, workers: int = 1) -> list[CheckReport]:
    """Generate `count` diagrams and run every check on each, in generation order."""
    logger.info(f"Running identity suite on {count} diagrams with seed {cfg.seed}")
    check = partial(_check_index, cfg)
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(check, range(count), chunksize=max(1, count // (4 * workers))))
    else:
        batches = [check(index) for index in range(count)]
    reports = [report for batch in batches for report in batch]
    logger.info(f"Identity suite finished: {dict(summarize(reports))}")
    return reports


def summarize(reports: Iterable[CheckReport]) -> Counter[Outcome]:
    counts: Counter[Outcome] = Counter({outcome: 0 for outcome in Outcome})
    counts.update(report.outcome for report in reports)
    return counts
