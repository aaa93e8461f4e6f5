from functools import lru_cache

import pytest

from schmidt_thermo.model import Scenario, builtin_model, random_system
from schmidt_thermo.verification import simulate, verify

BUILTINS = ("TQ1", "QUTRIT1", "JC_TRUNC")


@lru_cache(maxsize=None)
def builtin_sim(name: str, dt: float = 1e-3, t_max: float = 10.0, lam: float | None = None):
    spec = builtin_model(name)
    if lam is not None:
        spec = spec.with_coupling(lam)
    return simulate(spec, t_max, dt)


@lru_cache(maxsize=None)
def random_sim(n1: int, n2: int, seed: int, dt: float, t_max: float = 2.0, lam: float = 0.4):
    return simulate(random_system(n1, n2, lam=lam, seed=seed), t_max, dt)


@lru_cache(maxsize=None)
def builtin_report(name: str):
    return verify(Scenario(builtin_model(name), name=name), sim=builtin_sim(name))


@pytest.fixture(scope="session")
def tq1():
    return builtin_sim("TQ1")


@pytest.fixture(scope="session")
def qutrit1():
    return builtin_sim("QUTRIT1")


@pytest.fixture(scope="session")
def jc():
    return builtin_sim("JC_TRUNC")


@pytest.fixture(scope="session")
def tq1_free():
    return builtin_sim("TQ1", t_max=3.0, lam=0.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
