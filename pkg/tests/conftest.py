import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion: ``criterion(ok, detail)``."""
    name = request.node.name

    def record(ok: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((name, bool(ok), detail))
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip())
