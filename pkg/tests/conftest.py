import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))  # make tests/oracles.py importable

# Criterion number and title for every test in test_acceptance.py, used to
# print one uncaptured PASS/FAIL line per criterion after the run.
ACCEPTANCE_TESTS = {
    "test_c01_case_6_2_golden_values": "golden table for lambda=6, mu=2, K=10",
    "test_c02_case_8_3_golden_values": "golden table for lambda=8, mu=3, K=10",
    "test_c03_normalization_constant_exact": "exact integer normalization constant 88573",
    "test_c04_brute_force_oracle_equivalence": "product form matches direct elimination (200 specs)",
    "test_c05_simulation_convergence": "1e6-arrival simulation matches both golden tables",
    "test_c06_littles_law": "Little's law, analytic and empirical (100 specs)",
    "test_c07_balanced_rate_uniform_limit": "uniform distribution and L = K/2 at equal rates",
    "test_c08_policy_decision_fidelity": "authorization decision and the four denial mutations",
    "test_c09_replay_conservation": "event-log replay record conservation",
    "test_c10_cli_golden_files": "CLI fixed-point output is byte-stable",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            path, _, name = report.location
            if not path.replace("\\", "/").endswith("tests/test_acceptance.py"):
                continue
            base = name.split("[")[0]
            if base in ACCEPTANCE_TESTS:
                outcomes[base] = "PASS" if status == "passed" else "FAIL"
    if not outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for index, (test_name, title) in enumerate(ACCEPTANCE_TESTS.items(), start=1):
        status = outcomes.get(test_name)
        if status is None:
            continue
        terminalreporter.write_line(f"ACCEPTANCE {index:>2}: {status} - {title}")
