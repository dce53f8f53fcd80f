from __future__ import annotations

from pathlib import Path

import pytest

from zetachi import zeros as zmod

# zeros up to here cover every (T, 2T] window used at desk scale (T <= 10^4)
DESK_TMAX = 21000.0


def _cached_table(config, t_max: float) -> zmod.ZeroTable:
    cache_dir = Path(config.cache.mkdir("zetachi"))
    path = cache_dir / f"zeros_{int(t_max)}.ztbl"
    if path.is_file():
        table = zmod.load_table(path)
        if table.t_max >= t_max:
            return table
    table = zmod.find_zeros(t_max)
    zmod.save_table(table, path)
    return table


@pytest.fixture(scope="session")
def desk_table(request) -> zmod.ZeroTable:
    return _cached_table(request.config, DESK_TMAX)


@pytest.fixture(scope="session")
def small_table() -> zmod.ZeroTable:
    return zmod.find_zeros(1000.0)



# one line per acceptance criterion, filled in by tests/test_acceptance.py
_LINES = pytest.StashKey[dict]()


class Criterion:
    """Records PASS/FAIL for one (sub-)case; parametrized cases share a line."""

    def __init__(self, lines: dict, number: int, title: str):
        self.lines, self.number, self.title = lines, number, title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        part = self.detail
        if exc_type is not None:
            why = str(exc).splitlines()[0] if exc is not None and str(exc) else exc_type.__name__
            part = f"{part} -- {why}" if part else why
        title, parts = self.lines.setdefault(self.number, (self.title, []))
        parts.append((exc_type is None, part))
        print(render(self.number, title, parts))
        return False


def render(number: int, title: str, parts: list) -> str:
    status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
    details = "; ".join(d for _, d in parts if d)
    return f"criterion {number:2d} {status}: {title}" + (f" [{details}]" if details else "")


@pytest.fixture
def criterion(request):
    lines = request.config.stash.setdefault(_LINES, {})
    return lambda number, title: Criterion(lines, number, title)


def pytest_terminal_summary(terminalreporter):
    lines = terminalreporter.config.stash.get(_LINES, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(render(n, *lines[n]))
