import json
from pathlib import Path

import numpy as np
import pytest

from cpwl.funcs import FunctionSpec

GOLDEN = json.loads((Path(__file__).parent / "golden.json").read_text())


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


def polynomial_spec(coeffs, name="poly"):
    """FunctionSpec for a polynomial given lowest-degree-first coefficients."""
    p = np.polynomial.Polynomial(coeffs)
    d2 = p.deriv(2)
    return FunctionSpec(name, lambda x: p(np.asarray(x, dtype=float)),
                        lambda x: d2(np.asarray(x, dtype=float)) + 0.0 * np.asarray(x, dtype=float))


@pytest.fixture
def square():
    return polynomial_spec([0.0, 0.0, 1.0], "x^2")


@pytest.fixture
def affine():
    return polynomial_spec([0.5, -2.0], "affine")


# One line per acceptance criterion, printed after the run.
_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = marker.args[0]
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    prev = _acceptance.get(key, (True, marker.args[1]))
    _acceptance[key] = (prev[0] and not failed, marker.args[1])


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance):
        ok, title = _acceptance[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {title}")
