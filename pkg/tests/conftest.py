from __future__ import annotations

from pathlib import Path

import pytest

from degenkit.schema import load_document

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "degenkit" / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def load_fixture(name: str):
    return load_document(fixture_path(name))


@pytest.fixture
def example_3_4():
    return load_fixture("example_3_4")


@pytest.fixture
def tate_u1u2():
    return load_fixture("tate_u1u2")


@pytest.fixture
def product_tate():
    return load_fixture("product_tate")


@pytest.fixture
def genus2_graph():
    return load_fixture("genus2_graph")
