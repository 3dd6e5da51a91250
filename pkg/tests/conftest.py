_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion id")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    name = mark.args[0]
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        ok = call.excinfo is None
        _results[name] = _results.get(name, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance")
    for name in sorted(_results, key=lambda s: (int(s.rstrip("abc")), s)):
        terminalreporter.write_line(f"criterion {name:<3} {'PASS' if _results[name] else 'FAIL'}")
