import pytest

from kmcf.rootsys import RootSystem

_ACCEPTANCE: dict[int, list[tuple[str, str]]] = {}
_TITLES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            n = mark.args[0]
            _TITLES.setdefault(n, mark.kwargs.get("title", ""))
            _ACCEPTANCE.setdefault(n, [])


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for n in _ACCEPTANCE:
        if f"criterion_{n}_" in report.nodeid:
            status = "xfailed" if hasattr(report, "wasxfail") else report.outcome
            _ACCEPTANCE[n].append((report.nodeid.split("::")[-1], status))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        results = _ACCEPTANCE[n]
        if not results:
            tr.write_line(f"criterion {n}: NOT RUN  {_TITLES[n]}")
            continue
        bad = [name for name, status in results if status != "passed"]
        verdict = "PASS" if not bad else "FAIL"
        line = f"criterion {n}: {verdict}  {_TITLES[n]}"
        if bad:
            line += "  [" + ", ".join(f"{name}={dict(results)[name]}" for name in bad) + "]"
        tr.write_line(line)


@pytest.fixture(scope="session")
def h3():
    return RootSystem.preset("h3")


@pytest.fixture(scope="session")
def a2():
    return RootSystem.preset("a2")


@pytest.fixture(scope="session")
def a1():
    return RootSystem.preset("a1")


@pytest.fixture(scope="session")
def u3():
    return RootSystem.preset("universal3")
