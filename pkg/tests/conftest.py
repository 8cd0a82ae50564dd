import numpy as np
import pytest

from onlinecover.bench import bundled_suite
from onlinecover.functions import ExplicitTable, WeightedCoverage
from onlinecover.instances import ORACLE_FAMILIES, appendix_b_function, random_oracle

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = "PASS" if rep.outcome == "passed" else "FAIL"
        prev = _criteria.get(num)
        if prev is None or prev[1] == "PASS":
            _criteria[num] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, status = _criteria[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}  {title}")


@pytest.fixture(scope="session")
def suite_runs():
    return list(bundled_suite())


@pytest.fixture
def appendix_b():
    return appendix_b_function()


@pytest.fixture
def two_sets():
    # element 0 covers {p}, element 1 covers {p, q}
    return WeightedCoverage([[0], [0, 1]], [1, 1])


def oracle_corpus(count, seed, n_max=8, families=ORACLE_FAMILIES):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(2, n_max + 1))
        out.append(random_oracle(rng, n, families[i % len(families)]))
    return out


def zero_function(n):
    return ExplicitTable(np.zeros(1 << n), n)
