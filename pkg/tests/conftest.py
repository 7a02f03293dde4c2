import math

import numpy as np
import pytest

from halfpoincare.groups import complete_row


def random_gamma0(rng, level=4, c_max=40, d_max=60):
    """A random integer matrix in Gamma_0(level) with c != 0."""
    while True:
        c = level * int(rng.integers(1, c_max // level + 1)) * int(rng.choice([-1, 1]))
        d = int(rng.integers(-d_max, d_max + 1))
        if math.gcd(c, d) == 1:
            a, b, c, d = complete_row(c, d)
            # shift by a random translation to vary a and b
            k = int(rng.integers(-3, 4))
            return np.array([[a + k * c, b + k * d], [c, d]], dtype=np.int64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    reports = [r for key in ("passed", "failed") for r in terminalreporter.stats.get(key, [])
               if getattr(r, "when", "") == "call" and "test_acceptance.py::test_criterion_" in r.nodeid]
    if not reports:
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(reports, key=lambda r: r.nodeid):
        props = dict(r.user_properties)
        status = "PASS" if r.passed else "FAIL"
        terminalreporter.write_line(f"criterion {props.get('criterion', '?'):>2}  {status}  "
                                    f"{props.get('title', '')}  |  {props.get('detail', '')}")
