def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
    missing = [n for n in range(1, 9) if n not in results]
    if missing:
        terminalreporter.write_line(f"not run: criteria {missing}")
