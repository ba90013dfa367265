import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture
def mutag_dir():
    return DATA / "MUTAG"


@pytest.fixture(scope="session")
def mutag():
    from toper.graph import parse_tu_dataset

    return parse_tu_dataset(DATA / "MUTAG")


def external_dataset(name):
    """Directory of a TU dataset under $TOPER_DATA, or None."""
    root = os.environ.get("TOPER_DATA")
    if root and (Path(root) / name).is_dir():
        return Path(root) / name
    if (DATA / name).is_dir():
        return DATA / name
    return None


def random_graph(rng, n_min=1, n_max=20, density=None):
    from toper.graph import Graph

    n = int(rng.integers(n_min, n_max + 1))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    p = rng.uniform(0.05, 0.6) if density is None else density
    edges = [e for e in pairs if rng.random() < p]
    return Graph(n, edges)


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, ok, detail)``."""

    def record(number, ok, detail, blocked=()):
        status = "PASS" if ok else "FAIL"
        if blocked:
            detail += f" [blocked: {', '.join(blocked)} not available; set TOPER_DATA]"
        line = f"criterion {number}: {status}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
