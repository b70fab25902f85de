import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("fast", deadline=None, max_examples=15,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import time
from contextlib import contextmanager

import pytest

ACCEPTANCE_LINES: list = []


class _Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.notes = []

    def note(self, text):
        self.notes.append(text)


@pytest.fixture
def criterion():
    """Context manager timing one acceptance criterion and logging a pass/fail line."""

    @contextmanager
    def run(number, title, limit=None):
        c = _Criterion(number, title, limit)
        start = time.perf_counter()
        ok = False
        try:
            yield c
            ok = True
        finally:
            took = time.perf_counter() - start
            if ok and limit is not None and took >= limit:
                ok = False
                c.note(f"time limit {limit}s exceeded")
            extra = f" [{'; '.join(c.notes)}]" if c.notes else ""
            line = f"{'PASS' if ok else 'FAIL'} {number:>2}. {title} ({took:.2f}s){extra}"
            ACCEPTANCE_LINES.append(line)
            print(line)
        if limit is not None:
            assert took < limit, f"criterion {number} took {took:.1f}s, limit {limit}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip("."))):
            terminalreporter.write_line(line)
