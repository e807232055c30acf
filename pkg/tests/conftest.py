"""Shared pytest plumbing.

Prints a verdict table for the acceptance gates after the run so the
outcome of each gate is visible at a glance, one line per gate.
"""

ACCEPTANCE_GATES = [
    ("test_c01_objective_monotone_during_refinement", "clustering objective never increases during refinement"),
    ("test_c02_small_instances_reach_global_optimum", "small instances reach the exhaustive global optimum"),
    ("test_c03_refinement_steps_match_plain_oracles", "assignment and centroid steps match plain oracles"),
    ("test_c04_tags_rank_clusters_by_mean_rssi", "strength tags rank clusters by mean raw RSSI"),
    ("test_c05_simulated_towers_recovered", "clustering recovers simulated tower regions"),
    ("test_c06_nearest_stronger_matches_exhaustive_scan", "nearest-stronger search matches the exhaustive scan"),
    ("test_c07_dedup_window_boundaries", "duplicate suppression honors the window boundaries"),
    ("test_c08_scheduler_retrains_atomically", "scheduler retrains on interval with atomic model swaps"),
    ("test_c09_end_to_end_service_flow", "simulator to service flow serves consistent tags and routes"),
    ("test_c10_geometry_matches_independent_formulas", "geodesic math matches independently coded formulas"),
]

_VERDICTS = {"passed": "PASS", "failed": "FAIL", "error": "FAIL", "skipped": "SKIP"}
_SEVERITY = {"passed": 0, "skipped": 1, "error": 2, "failed": 3}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for outcome in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            name = nodeid.split("::")[-1]
            known = any(name == gate for gate, _ in ACCEPTANCE_GATES)
            if not known:
                continue
            # keep the worst phase outcome (setup errors beat call passes)
            prev = outcomes.get(name)
            if prev is None or _SEVERITY[outcome] > _SEVERITY[prev]:
                outcomes[name] = outcome
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance gates")
    for number, (name, label) in enumerate(ACCEPTANCE_GATES, start=1):
        outcome = outcomes.get(name)
        if outcome is None:
            continue
        terminalreporter.write_line(f"{_VERDICTS[outcome]:<4} {number:02d} {label}")
