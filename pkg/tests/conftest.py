"""Shared pytest plumbing: acceptance criteria reporting."""

_acceptance_results: list[tuple[str, bool]] = []


def record_criterion(name: str, ok: bool) -> None:
    _acceptance_results.append((name, ok))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, ok in _acceptance_results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
