from pathlib import Path

import pytest

from vabepi.words import parse_presentation

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_pres(name: str):
    return parse_presentation((FIXTURES / f"{name}.pres").read_text())


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def pres():
    return {n: load_pres(n) for n in ("z", "z2", "klein", "dinf", "f2")}
