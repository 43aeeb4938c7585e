import networkx as nx
import pydantic
import pytest
from hypothesis import given, settings
from src.diagram import SpliceDiagram, validate
from src.dsl import parse
from src.laurent import NonExactDivisionError
from src.verify import (
    CheckReport,
    GeneratorConfig,
    Outcome,
    check_alexander_consistency,
    check_conway_expansion,
    check_leading_coefficient,
    check_reversal,
    check_split_vanishing,
    check_symmetry,
    check_torres,
    check_valency_identity,
    random_diagram,
    run_checks,
    run_suite,
    summarize,
)

from tests.strategies import diagrams, small_configs


def test_random_diagram_is_deterministic() -> None:
    # given
    cfg = GeneratorConfig(seed=7)
    # then
    assert random_diagram(cfg, 3) == random_diagram(cfg, 3)
    assert [random_diagram(cfg, i) for i in range(20)] != [random_diagram(cfg, 0)] * 20


@pytest.mark.parametrize("seed", [0, 1, 7, 42])
def test_random_diagrams_respect_bounds(seed: int) -> None:
    # given
    cfg = GeneratorConfig(max_vertices=6, max_components=2, max_weight=3, zero_prob=0.5, seed=seed)
    for index in range(50):
        # when
        d = random_diagram(cfg, index)
        # then
        validate(d)
        assert 2 <= len(d.vertices) <= 6
        assert 1 <= d.n_components <= 2
        assert all(abs(w) <= 3 for e in d.edges for w in (e.weight_u, e.weight_v))


@pytest.mark.parametrize(
    "params",
    [{"max_vertices": 1}, {"max_components": 0}, {"max_weight": 0}, {"zero_prob": 1.5}, {"zero_prob": -0.1}],
)
def test_generator_config_bounds(params: dict) -> None:
    with pytest.raises(pydantic.ValidationError):
        GeneratorConfig(**params)


@given(diagrams())
def test_zero_weights_face_branches_without_arrowheads(d: SpliceDiagram) -> None:
    arrowheads = set(d.arrowheads())
    for edge in d.edges:
        for near, far in ((edge.u, edge.v), (edge.v, edge.u)):
            if edge.weight_at(near) == 0:
                rest = nx.Graph(d.graph)
                rest.remove_edge(near, far)
                assert not arrowheads & nx.node_connected_component(rest, far)


def test_zero_weights_are_injected() -> None:
    # given
    cfg = GeneratorConfig(max_vertices=8, max_weight=5, zero_prob=1.0, seed=5)
    # when
    diagrams_with_zero = [
        index
        for index in range(50)
        if any(0 in (e.weight_u, e.weight_v) for e in random_diagram(cfg, index).edges)
    ]
    # then
    assert diagrams_with_zero


def test_trefoil_passes_every_check(trefoil: SpliceDiagram) -> None:
    # when
    reports = run_checks(trefoil)
    # then
    outcomes = {report.identity: report.outcome for report in reports}
    assert outcomes == {
        "symmetry": Outcome.PASS,
        "reversal": Outcome.PASS,
        "torres": Outcome.SKIP,
        "split_vanishing": Outcome.SKIP,
        "alexander_consistency": Outcome.PASS,
        "leading_coefficient": Outcome.PASS,
        "valency_identity": Outcome.PASS,
        "conway_expansion": Outcome.PASS,
    }


def test_hopf_checks(hopf: SpliceDiagram) -> None:
    # when
    reports = run_checks(hopf)
    # then
    assert [r.component for r in reports if r.identity == "torres"] == [1, 2]
    assert all(report.outcome is Outcome.PASS for report in reports)


def test_hopf_node_torres(hopf_node: SpliceDiagram) -> None:
    # given deleting a1 leaves the unknot with ∇ = (t - t^-1)^-1 and ℓ_12 = 1
    reports = [check_torres(hopf_node, index) for index in (1, 2)]
    # then
    assert [report.outcome for report in reports] == [Outcome.PASS, Outcome.PASS]
    assert all(report.outcome is Outcome.PASS for report in run_checks(hopf_node))


def test_split_link_checks(split_link: SpliceDiagram) -> None:
    # then
    assert check_split_vanishing(split_link).outcome is Outcome.PASS
    assert check_symmetry(split_link).outcome is Outcome.PASS
    assert check_torres(split_link, 1).outcome is Outcome.PASS
    assert check_torres(split_link, 2).outcome is Outcome.PASS
    assert check_leading_coefficient(split_link).outcome is Outcome.SKIP


def test_three_component_torres() -> None:
    # given a node with three arrowheads and a leaf
    d = parse(
        "vertex c\narrow a1 +1\narrow a2 -1\narrow a3 +1\nvertex l\n"
        "edge c a1 2\nedge c a2 3\nedge c a3 5\nedge c l 7\n"
    )
    validate(d)
    # then
    for index in (1, 2, 3):
        assert check_torres(d, index).outcome is Outcome.PASS
        assert check_reversal(d, index).outcome is Outcome.PASS


def test_non_exact_link_expansion_fails(hopf: SpliceDiagram, monkeypatch: pytest.MonkeyPatch) -> None:
    # given an expansion that does not divide exactly
    def non_exact(*args: object, **kwargs: object) -> None:
        raise NonExactDivisionError("t - t^-1 does not divide 1")

    monkeypatch.setattr("src.verify.factored_expand", non_exact)
    # when
    report = check_alexander_consistency(hopf)
    # then
    assert report.outcome is Outcome.FAIL
    assert report.witness is not None


def test_failed_check_carries_witness(trefoil: SpliceDiagram) -> None:
    # given a report built from mismatching values
    from src.verify import _compare

    # when
    report = _compare("symmetry", trefoil, 1, 2)
    # then
    assert report.outcome is Outcome.FAIL
    assert report.witness is not None
    assert parse(report.witness) == trefoil


@settings(max_examples=300, deadline=None)
@given(diagrams(small_configs))
def test_no_identity_fails_on_random_diagrams(d: SpliceDiagram) -> None:
    reports = run_checks(d)
    assert not [report.line() for report in reports if report.outcome is Outcome.FAIL]


@given(diagrams(small_configs))
def test_always_applicable_checks_pass(d: SpliceDiagram) -> None:
    assert check_valency_identity(d).outcome is Outcome.PASS
    assert check_conway_expansion(d).outcome in (Outcome.PASS, Outcome.INDET)
    assert check_alexander_consistency(d).outcome in (Outcome.PASS, Outcome.INDET)


def test_run_suite_is_reproducible() -> None:
    # given
    cfg = GeneratorConfig(seed=7, max_vertices=8, max_weight=4)
    # when
    first = run_suite(cfg, 40)
    second = run_suite(cfg, 40)
    # then
    assert first == second
    assert {report.index for report in first} == set(range(40))
    assert all(report.seed == 7 for report in first)
    assert summarize(first)[Outcome.FAIL] == 0


def test_run_suite_with_workers_keeps_order() -> None:
    cfg = GeneratorConfig(seed=3, max_vertices=6, max_weight=4)
    assert run_suite(cfg, 12, workers=2) == run_suite(cfg, 12)


def test_default_suite_has_no_failures() -> None:
    # given the default generator bounds
    cfg = GeneratorConfig(max_vertices=12, max_components=5, max_weight=7, zero_prob=0.1, seed=0)
    # when
    reports = run_suite(cfg, 1000)
    # then
    assert [report.line() for report in reports if report.outcome is Outcome.FAIL] == []


def test_run_suite_empty() -> None:
    # when
    reports = run_suite(GeneratorConfig(), 0)
    # then
    assert reports == []
    assert summarize(reports) == {outcome: 0 for outcome in Outcome}


def test_report_line() -> None:
    report = CheckReport(identity="torres", outcome=Outcome.PASS, component=2, seed=7, index=11)
    assert report.line() == "torres[2] seed=7 idx=11 PASS"
    assert CheckReport(identity="symmetry", outcome=Outcome.SKIP).line() == "symmetry seed=- idx=- SKIP"


def test_report_json_round_trip() -> None:
    # given
    report = CheckReport(identity="symmetry", outcome=Outcome.INDET, seed=1, index=2, params=GeneratorConfig(seed=1))
    # when
    parsed = CheckReport.model_validate_json(report.model_dump_json())
    # then
    assert parsed == report
