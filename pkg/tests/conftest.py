from contextlib import contextmanager

import pytest

from mpdeclare.eventlog import make_trace

MIN = 60_000
HOUR = 3_600_000


def mk(*events, case_id="t", case=None):
    """Trace from ``(activity, ms[, attrs])`` tuples or bare activity strings (1 ms apart)."""
    rows = []
    for i, e in enumerate(events):
        if isinstance(e, str):
            rows.append((e, i))
        else:
            rows.append(e)
    return make_trace(case_id, rows, case)


def seq(letters, step=1):
    """``"abac"`` -> trace a@0, b@step, a@2*step, c@3*step."""
    return make_trace("t", [(ch, i * step) for i, ch in enumerate(letters)])


@pytest.fixture
def tmp_file(tmp_path):
    def write(name, content):
        p = tmp_path / name
        p.write_bytes(content if isinstance(content, bytes) else content.encode("utf-8"))
        return str(p)
    return write


# -- acceptance reporting -----------------------------------------------------

_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """``with criterion(n, title) as info:`` records one PASS/FAIL line for criterion n."""
    results = request.config.stash.setdefault(_CRITERIA, {})

    @contextmanager
    def run(number, title):
        info = {"detail": ""}
        try:
            yield info
        except BaseException as exc:
            first = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
            results[number] = f"criterion {number} FAIL  {title}: {first[:160]}"
            print(results[number])
            raise
        results[number] = f"criterion {number} PASS  {title}" + (f" ({info['detail']})" if info["detail"] else "")
        print(results[number])
    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_CRITERIA, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
