import numpy as np
import pytest

from hexflow.fixtures import star_variants, tetra_sphere
from hexflow.schemes import make_scheme


def scheme_zoo():
    """One configuration per scheme on the tetra-sphere, keyed by a short name."""
    tri = tetra_sphere()
    star = star_variants(tri)
    return tri, {
        "DCS3-a0": make_scheme("DCS3", tri, 2.0, alpha=0),
        "DCS3-a1": make_scheme("DCS3", tri, 2.0, alpha=1),
        "DCS3-mixed-alpha": make_scheme("DCS3", tri, 1.5, alpha=[0, 1, 0, 1]),
        "DCS1": make_scheme("DCS1", tri, 3.0),
        "NEW1": make_scheme("NEW1", tri, 0.5),
        "NEW1-neg": make_scheme("NEW1", tri, -0.5),
        "MIXED1": make_scheme("MIXED1", tri, 2.0, variant=star),
        "MIXED2": make_scheme("MIXED2", tri, 1.0, variant=star),
        "MIXED3": make_scheme("MIXED3", tri, 1.0, variant=star),
    }


@pytest.fixture(scope="session")
def zoo():
    return scheme_zoo()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
