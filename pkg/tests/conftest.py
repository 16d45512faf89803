import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Record ``(number, checks)``; every check is ``(label, ok, detail)``.

    The suite prints one PASS/FAIL line per criterion at the end of the run.
    """
    results = request.config.stash[_RESULTS]

    def record(number, title, checks):
        ok = all(c[1] for c in checks)
        failed = [f"{label} ({detail})" for label, good, detail in checks if not good]
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if failed:
            line += "  -- failing: " + "; ".join(failed)
        results[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
