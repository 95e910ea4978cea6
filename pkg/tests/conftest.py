import pytest

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


@pytest.fixture
def note(request):
    """Attach a measured detail to the acceptance summary line."""

    def add(text):
        request.node.user_properties.append(("note", text))

    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    n, title = marker.args
    entry = _criteria.setdefault(n, {"title": title, "ok": True, "notes": [], "seen": False})
    entry["seen"] = True
    if report.failed:
        entry["ok"] = False
        entry["notes"].append(f"{item.name} failed")
    if report.when == "call":
        entry["notes"].extend(text for key, text in item.user_properties if key == "note")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        entry = _criteria[n]
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"criterion {n:>2}: {status}  {entry['title']}"
        notes = list(dict.fromkeys(entry["notes"]))
        if notes:
            line += "  [" + "; ".join(notes) + "]"
        terminalreporter.write_line(line)
