import pytest

from evbc.problem import DomainSpec, ProblemSpec, affine, constant

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = getattr(report, "_criterion", None)
    if crit is None:
        return
    number, title = crit
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report._criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def ref_domain():
    return DomainSpec(a=-1.0, m_L=1.0, m_R=3.0)


@pytest.fixture
def ref_affine(ref_domain):
    return affine(ref_domain, 2.5, 1.0)


@pytest.fixture
def ref_spec(ref_domain, ref_affine):
    return ProblemSpec(ref_domain, ref_affine, k=2.0)


@pytest.fixture
def constant_spec(ref_domain):
    return ProblemSpec(ref_domain, constant(ref_domain, 2.0), k=2.0)
