"""Shared pytest plumbing: acceptance verdict lines in the summary."""

_ACCEPTANCE_LINES = []


def record_verdict(ok: bool, name: str, detail: str) -> None:
    """Register one acceptance verdict for the terminal summary."""
    _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
