import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion: ``criterion(id, passed, detail)``."""

    def record(cid, passed, detail):
        request.config.stash[_RESULTS][cid] = (bool(passed), detail)
        line = f"[acceptance {cid}] {'PASS' if passed else 'FAIL'}: {detail}"
        print(line)
        return passed

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" or not rep.failed:
        return
    results = item.config.stash[_RESULTS]
    for cid in mark.args:
        results.setdefault(cid, (False, f"error: {call.excinfo.typename}: {call.excinfo.value}"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")

    def key(cid):
        num = "".join(ch for ch in cid if ch.isdigit())
        return int(num), cid

    for cid in sorted(results, key=key):
        passed, detail = results[cid]
        terminalreporter.write_line(f"{cid:>4} {'PASS' if passed else 'FAIL'}  {detail}")
