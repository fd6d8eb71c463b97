import contextlib
import time

import pytest

_RESULTS = []


class CriterionLog:
    @contextlib.contextmanager
    def check(self, label, limit_s=None):
        """Record PASS/FAIL for ``label``; the body's exceptions still propagate."""
        info = {}
        start = time.perf_counter()
        try:
            yield info
            elapsed = time.perf_counter() - start
            if limit_s is not None:
                assert elapsed < limit_s, f"took {elapsed:.2f}s, limit {limit_s}s"
        except BaseException as exc:
            _RESULTS.append((label, "FAIL", f"{type(exc).__name__}: {exc}".splitlines()[0]))
            raise
        detail = info.get("detail", "")
        _RESULTS.append((label, "PASS", f"{time.perf_counter() - start:.2f}s {detail}".strip()))


@pytest.fixture
def criterion():
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, detail in _RESULTS:
        terminalreporter.write_line(f"{status} {label}: {detail}")
