from pathlib import Path

import pytest
from src.diagram import SpliceDiagram, validate
from src.dsl import parse
from src.options import Options

FIXTURES = Path(__file__).parent / "fixtures" / "diagrams"


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.splice"


def load_diagram(name: str) -> SpliceDiagram:
    d = parse(fixture_path(name).read_text())
    validate(d)
    return d


@pytest.fixture(autouse=True)
def clear_options_cache() -> None:
    """Reset the options so that each test can set its own environment variables."""
    Options.clear()


@pytest.fixture
def trefoil() -> SpliceDiagram:
    return load_diagram("trefoil")


@pytest.fixture
def hopf() -> SpliceDiagram:
    return load_diagram("hopf")


@pytest.fixture
def hopf_node() -> SpliceDiagram:
    return load_diagram("hopf_node")


@pytest.fixture
def split_link() -> SpliceDiagram:
    return load_diagram("split")


@pytest.fixture
def unknot() -> SpliceDiagram:
    return load_diagram("unknot")
