import sys

import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from conescale import cones
from conescale.selftest import random_polyhedral

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def cone_st(draw, families=("orthant", "lorentz", "polyhedral")):
    fam = draw(st.sampled_from(families))
    dim = draw(st.integers(2, 6))
    if fam == "orthant":
        return cones.orthant(dim)
    if fam == "lorentz":
        return cones.lorentz(dim)
    seed = draw(st.integers(0, 2**32 - 1))
    return random_polyhedral(dim, np.random.default_rng(seed))


@st.composite
def cone_and_rng(draw, families=("orthant", "lorentz", "polyhedral")):
    cone = draw(cone_st(families))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return cone, rng


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
