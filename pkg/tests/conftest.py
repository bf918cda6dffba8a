import re

import pytest

# criterion id -> short label, matching test names in test_acceptance.py
_CRITERIA = {
    1: "ellipse benchmark: closed form vs grid vs Monte Carlo",
    2: "unit disk: Euler and walk-on-spheres cross-check",
    3: "parabola exhaustion: monotone approach to the closed form",
    4: "angular sector: finite case agrees, right angle diverges",
    5: "hyperbola regions: convex and concave sides",
    6: "hyperbolic suite: disk, horodisk, geodesic tube",
    7: "discrete metric Laplacian of every closed form",
    8: "conformal maps land on the boundary curves",
    9: "torsional rigidity",
    10: "reproducibility: byte-identical simulate output",
}


def _criterion_of(nodeid):
    m = re.search(r"test_acceptance\.py::test_c(\d+)", nodeid)
    return int(m.group(1)) if m else None


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = {}
    for outcome in ("passed", "failed", "error", "xfailed", "xpassed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            num = _criterion_of(getattr(rep, "nodeid", ""))
            if num is None:
                continue
            order = {"failed": 3, "error": 3, "xpassed": 2, "xfailed": 1,
                     "skipped": 1, "passed": 0}[outcome]
            prev = results.get(num)
            if prev is None or order > prev[0]:
                results[num] = (order, outcome)
    if not results:
        return
    tw = terminalreporter
    tw.section("acceptance summary")
    for num in sorted(results):
        order, outcome = results[num]
        if order == 0:
            verdict = "PASS"
        elif order >= 3:
            verdict = "FAIL"
        elif outcome == "xpassed":
            verdict = "XPASS"
        else:
            verdict = "XFAIL" if outcome == "xfailed" else "SKIP"
        tw.write_line(f"ACCEPTANCE {num}: {verdict}  ({_CRITERIA[num]})")
