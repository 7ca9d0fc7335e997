import math

import numpy as np
import pytest
from hypothesis import strategies as st

from minkres.cli import fixture_dir
from minkres.norms import NormSpec, load_norm

HEXAGON = [[1, 0], [-1, 0], [0.5, 1], [-0.5, -1], [-0.5, 1], [0.5, -1]]


def fixture_norm(name: str) -> NormSpec:
    return load_norm(fixture_dir() / f"{name}.json")


def norm_fixture_names() -> list[str]:
    names = sorted(p.stem for p in fixture_dir().glob("*.json"))
    return [n for n in names if n not in ("linf2_ambiguous", "triangle")]


ALL_NORMS = norm_fixture_names()


def sample_norms(dim=None):
    out = [
        NormSpec.euclidean(2),
        NormSpec.euclidean(3),
        NormSpec.ellipsoidal([[2.0, 0.5], [0.5, 1.0]]),
        NormSpec.ellipsoidal(np.diag([1.0, 2.0, 3.0])),
        NormSpec.polyhedral(HEXAGON),
    ]
    out += [NormSpec.p_norm(p, d) for p in (1, 1.5, 3, 4, math.inf) for d in (2, 3)]
    return [n for n in out if dim is None or n.dim == dim]


@st.composite
def vectors(draw, dim, lo=-10.0, hi=10.0):
    return np.array(draw(st.lists(st.floats(lo, hi, allow_nan=False), min_size=dim, max_size=dim)))


@pytest.fixture(scope="session")
def linf2():
    return NormSpec.p_norm(math.inf, 2)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
