"""Collect acceptance outcomes and print one line per criterion at the end of the run."""

from collections import OrderedDict

_OUTCOMES = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    props = dict(report.user_properties)
    cid = props.get("criterion")
    if cid is None:
        return
    entry = _OUTCOMES.setdefault(cid, {"title": props.get("title", ""), "ok": True,
                                       "notes": []})
    entry["ok"] = entry["ok"] and report.passed
    if props.get("measured"):
        entry["notes"].append(props["measured"])


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            cid, title = mark.args
            item.user_properties.append(("criterion", cid))
            item.user_properties.append(("title", title))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, entry in sorted(_OUTCOMES.items(), key=lambda kv: str(kv[0])):
        status = "PASS" if entry["ok"] else "FAIL"
        notes = "; ".join(entry["notes"])
        line = f"criterion {cid}: {status}  {entry['title']}"
        terminalreporter.write_line(line + (f"  [{notes}]" if notes else ""))
