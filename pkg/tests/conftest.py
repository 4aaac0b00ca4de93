import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in order."""
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m and (rep.when == "call" or outcome == "error"):
                lines[int(m.group(1))] = f"criterion {int(m.group(1)):2d} {m.group(2).replace('_', ' ')}: " \
                                         f"{'PASS' if outcome == 'passed' else 'FAIL'}"
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
