import pytest

from dtgraph.synthetic import fixture_taxonomy, two_warehouse_graph, warehouse_graph

_acceptance: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): end-to-end acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            item.user_properties.append(("acceptance", m.args[0]))


def pytest_runtest_logreport(report):
    names = [v for k, v in report.user_properties if k == "acceptance"]
    if not names:
        return
    if report.when == "call" or report.outcome == "failed":
        _acceptance[names[0]] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance.items():
        terminalreporter.write_line(f"ACCEPTANCE {status}: {name}")


@pytest.fixture
def taxonomy():
    return fixture_taxonomy()


@pytest.fixture
def warehouse():
    return warehouse_graph()


@pytest.fixture
def two_warehouses():
    return two_warehouse_graph()
