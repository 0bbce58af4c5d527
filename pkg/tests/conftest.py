"""Shared pytest hooks: always show the acceptance-criteria verdicts."""

verdicts = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(verdicts):
        terminalreporter.write_line(line)
