"""Shared pytest plumbing for the acceptance suite's verdict lines."""

ACCEPTANCE_VERDICTS = []


def record_verdict(name, ok, elapsed, budget):
    """Remember one criterion's outcome for the end-of-run summary."""
    ACCEPTANCE_VERDICTS.append((name, ok, elapsed, budget))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, elapsed, budget in ACCEPTANCE_VERDICTS:
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"{name}: {verdict} [{elapsed:.2f}s / budget {budget:.0f}s]"
        )
