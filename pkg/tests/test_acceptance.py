"""One test per acceptance criterion, run against every builtin model.

Each test prints a ``CRITERION Cn: PASS|FAIL`` line; the lines are also
collected into the terminal summary.
"""
import pytest

from schmidt_thermo.verification import CRITERIA

from conftest import ACCEPTANCE_LINES, BUILTINS, builtin_report

# checks that must actually run (not skip) on the named model
REQUIRED = {
    "C1": [("TQ1", "C1.rabi_oracle")],
    "C3": [("TQ1", "C3.convergence"), ("QUTRIT1", "C3.convergence")],
    "C10": [("TQ1", "C10.coupling_monotonicity"), ("QUTRIT1", "C10.coupling_monotonicity")],
}


def _fmt(model, c):
    if c.residual is None:
        return f"{model}:{c.id}=skip"
    return f"{model}:{c.id}={c.status}({c.residual:.2e}{c.comparison}{c.tolerance:.1e})"


@pytest.mark.slow
@pytest.mark.parametrize("criterion", list(CRITERIA))
def test_criterion(criterion):
    problems, parts = [], []
    by_id = {}
    for model in BUILTINS:
        checks = [c for c in builtin_report(model).checks if c.criterion == criterion]
        for c in checks:
            by_id[(model, c.id)] = c
            parts.append(_fmt(model, c))
            if c.status == "fail":
                problems.append(f"{model}:{c.id} failed: {c.detail}")
    for key in REQUIRED.get(criterion, []):
        c = by_id.get(key)
        if c is None or c.status != "pass":
            problems.append(f"{key[0]}:{key[1]} did not pass")
    if not by_id:
        problems.append("no checks ran")
    status = "FAIL" if problems else "PASS"
    line = f"CRITERION {criterion}: {status}  {CRITERIA[criterion]}  [{'; '.join(parts)}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not problems, problems
