import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # passing tests have their stdout captured, so echo the acceptance
    # lines once more where they are always visible
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", []) if module else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
