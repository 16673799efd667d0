import pytest

from fiopt.sleeve import Sleeve, sleeve_durations


def make_sleeve(name="S", T=5.0, y=0.04, s=0.0, rating="AAA", floating=False, sectors=(), limit=1.0,
                z=0.0, m=2, c=None):
    c = y if c is None else c
    d_ir, d_cr = sleeve_durations(T, c, m, y, floating)
    return Sleeve(name, T, c, m, y, s, rating, d_ir, d_cr, floating, frozenset(sectors), limit, z)


@pytest.fixture
def sleeve_factory():
    return make_sleeve


ACCEPTANCE = {}


def record(number, name, passed, detail=""):
    """Store one acceptance outcome, echo it, and fail the test if it did not pass."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name} {detail}".rstrip()
    ACCEPTANCE[number] = line
    print(line)
    assert passed, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
