import pytest

ACCEPTANCE: dict[str, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; the test body runs inside ``with record(n, name) as note``."""
    from contextlib import contextmanager

    @contextmanager
    def record(number: str, name: str):
        notes: list[str] = []
        try:
            yield notes
        except BaseException:
            ACCEPTANCE[number] = (name, False, "; ".join(notes))
            raise
        ACCEPTANCE[number] = (name, True, "; ".join(notes))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE, key=lambda k: (int(k.split()[0]), k)):
        name, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {name}" + (f" ({detail})" if detail else ""))
