import importlib.resources

import pytest

from mlagg import parse_instance


def data_text(name: str) -> str:
    return (importlib.resources.files("mlagg") / "data" / name).read_text()


@pytest.fixture
def example():
    return parse_instance(data_text("worked_example.inst"))


@pytest.fixture
def dim_two():
    return parse_instance(data_text("dimension_two.inst"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
