CRITERIA = {}


def record(number, title, ok, detail=""):
    CRITERIA[number] = (title, bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        title, ok, detail = CRITERIA[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
