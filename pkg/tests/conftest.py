import numpy as np
import pytest

from causalweb.core import AnalysisSpec, Dataset, parse_drivers
from causalweb.decomposition import full_decomposition


@pytest.fixture(scope="session")
def small_result():
    """Three-driver decomposition on a short nonlinear system."""
    rng = np.random.default_rng(11)
    n = 1200
    a, b, c = rng.standard_normal((3, n))
    x = np.zeros(n)
    x[1:] = a[:-1] + 0.5 * b[:-1] * c[:-1] + 0.3 * rng.standard_normal(n - 1)
    data = Dataset.from_dict({"x": x, "a": a, "b": b, "c": c})
    return full_decomposition(data, AnalysisSpec("x", tuple(parse_drivers("a;b;c"))), seed=5)


# one PASS/FAIL line per acceptance criterion, printed at the end of the run
_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    passed = call.excinfo is None
    detail = "" if passed else str(call.excinfo.value).strip().splitlines()[0][:160]
    _criteria[number] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed, detail = _criteria[number]
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  -- {detail}"
        terminalreporter.write_line(line)
