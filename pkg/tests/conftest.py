import math

import numpy as np
import pytest
from hypothesis import strategies as st

from qtorus import charvar, lifting

EX1_A0 = complex(-0.75, -0.1)
EX3_A0 = complex(1, 1)


def complex_annulus(lo=0.3, hi=3.0):
    """Nonzero complex numbers with modulus in [lo, hi]."""
    return st.builds(
        lambda r, t: r * complex(math.cos(t), math.sin(t)),
        st.floats(lo, hi),
        st.floats(-math.pi, math.pi),
    )


def llr_sweep(a0=EX1_A0, family=1, branch="-"):
    word = charvar.MonodromyWord("LLR")
    return charvar.sweep(word, charvar.solve_periodic_llr(a0, branch, family))


@pytest.fixture(scope="session")
def llr():
    return charvar.MonodromyWord("LLR")


@pytest.fixture(scope="session")
def ex1_sweep():
    return llr_sweep()


@pytest.fixture(scope="session")
def ex1_lift(ex1_sweep):
    return lifting.lift(ex1_sweep)


@pytest.fixture(scope="session")
def ex2_lift(ex1_sweep):
    return lifting.lift(ex1_sweep, eta=1)


@pytest.fixture(scope="session")
def ex3_lift():
    return lifting.lift(llr_sweep(EX3_A0, family=2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[num])
