import pytest

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and item.name.startswith("test_criterion_"):
        if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
            doc = (item.function.__doc__ or "").strip().splitlines()
            _CRITERIA[item.name] = (rep.outcome, doc[0] if doc else item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split("_")[2])):
        outcome, title = _CRITERIA[name]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {int(name.split('_')[2]):>2}: {title}")
