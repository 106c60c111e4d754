from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from opertools.corners import Corner

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

small_int = st.integers(min_value=-9, max_value=9)
small_frac = st.builds(Fraction, small_int, st.integers(min_value=1, max_value=5))


def distinct(elements, n):
    return st.lists(elements, min_size=n, max_size=n, unique=True)


def random_corner(rng, kind, exact=True):
    if kind == "q":
        return Corner.q(Fraction(int(rng.integers(2, 6)), int(rng.integers(1, 4))) if exact
                        else complex(1.3, 0.4))
    if kind == "eps":
        return Corner.eps(Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 3))) if exact else 0.7)
    if kind == "rational":
        return Corner.rational()
    return Corner.trig()


def random_fracs(rng, n, lo=-12, hi=12, nonzero=True):
    while True:
        vals = [Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, 5))) for _ in range(n)]
        if len(set(vals)) == n and (not nonzero or 0 not in vals):
            return vals


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion lines recorded by test_acceptance, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
