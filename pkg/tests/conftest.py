from __future__ import annotations

import pytest

#: criterion number -> (title, passed, details) merged over parametrized cases
ACCEPTANCE: dict[int, tuple[str, bool, list[str]]] = {}


def _line(number: int) -> str:
    title, passed, details = ACCEPTANCE[number]
    line = f"{'PASS' if passed else 'FAIL'} criterion {number:2d}: {title}"
    return f"{line} ({' | '.join(details)})" if details else line


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion.

    Use as ``with criterion(n, "summary") as note:`` and append details to
    ``note``; the outcome is taken from whether the block raised.
    """
    class Recorder:
        def __init__(self, number: int, title: str):
            self.number = number
            self.title = title
            self.details: list[str] = []

        def __call__(self, text: str) -> None:
            self.details.append(text)

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            detail = "; ".join(self.details)
            if exc is not None and str(exc):
                first = str(exc).splitlines()[0]
                detail = f"{detail}; {first}" if detail else first
            _, passed, details = ACCEPTANCE.get(self.number, (self.title, True, []))
            ACCEPTANCE[self.number] = (self.title, passed and exc_type is None,
                                       details + ([detail] if detail else []))
            print(_line(self.number))
            return False

    return Recorder


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(_line(number))
