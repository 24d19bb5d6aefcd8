import time
from contextlib import contextmanager

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_CRITERIA: dict[int, str] = {}


@contextmanager
def _criterion(number: int, title: str):
    notes = []
    start = time.perf_counter()
    try:
        yield notes.append
    except BaseException as exc:
        _CRITERIA[number] = f"[{number:2d}] FAIL  {title}: {type(exc).__name__}: {str(exc)[:200]}"
        raise
    took = time.perf_counter() - start
    detail = "; ".join(notes)
    _CRITERIA[number] = f"[{number:2d}] PASS  {title} ({took:.1f}s){': ' + detail if detail else ''}"


@pytest.fixture
def criterion():
    """``with criterion(3, "title") as note:`` records one pass/fail line."""
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[k])
