import re

CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    outcomes: dict[int, str] = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance.py" not in report.nodeid:
                continue
            match = CRITERION.search(report.nodeid)
            if not match:
                continue
            number = int(match.group(1))
            if status == "passed" and getattr(report, "when", "call") != "call":
                continue
            # any failure stage (setup/call/teardown) marks the criterion failed
            if outcomes.get(number) != "FAIL":
                outcomes[number] = "pass" if status == "passed" else "FAIL"
    if outcomes:
        terminalreporter.write_sep("-", "acceptance criteria")
        for number in sorted(outcomes):
            terminalreporter.write_line(f"criterion {number}: {outcomes[number]}")
