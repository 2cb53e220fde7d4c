import acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ident, status, elapsed in acceptance_log.RESULTS:
        terminalreporter.write_line(f"ACCEPTANCE {ident}: {status} ({elapsed:.1f}s)")
