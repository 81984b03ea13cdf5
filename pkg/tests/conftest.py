from collections import defaultdict

_outcomes = defaultdict(list)


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            outcome = "xfail" if report.skipped else "xpass"
        else:
            outcome = report.outcome
        _outcomes[crit].append(outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_outcomes):
        res = _outcomes[crit]
        n_pass = res.count("passed")
        n_xfail = res.count("xfail")
        bad = len(res) - n_pass - n_xfail
        status = "PASS" if bad == 0 and n_xfail == 0 else "FAIL"
        extra = f", {n_xfail} known-unattainable" if n_xfail else ""
        tr.write_line(f"criterion {crit:2d}: {status}  ({n_pass}/{len(res)} cases passed{extra})")
