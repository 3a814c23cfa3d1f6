import math

import numpy as np

import pytest

from hotelling.econ import CostSpec, RevenueSpec, ScenarioSpec
from hotelling.scenarios import BENCHMARK

E = math.e

# Frozen from mpmath (30 digits) on the closed-form benchmark path
# Q(t) = 1 - exp(t - 1) on [0, 1]:
#   value = quad((Q - Q^2/2) e^{-t}, [0, 1])       = 0.5 (1 - 1/e)^2
#   t50   = findroot(t - e^{t-1} + 1/e = 1/(2e))
#   iso   = x^2 with x^3 + x/2 - 1/2 = 0
BENCH_VALUE = 0.199788200446864024351475977325
BENCH_T50 = 0.325441586037866306660873084016
ISO_RATE_AT_HALF = 0.347810384779931028708183550059


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")
    config._acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        n, title = marker.args
        item.config._acceptance.append((n, title, report.outcome))


def pytest_terminal_summary(terminalreporter, config):
    rows = sorted(getattr(config, "_acceptance", []))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, outcome in rows:
        terminalreporter.write_line(f"[{'PASS' if outcome == 'passed' else 'FAIL'}] {n}. {title}")


@pytest.fixture
def benchmark():
    return BENCHMARK


@pytest.fixture
def iso_half():
    return ScenarioSpec(RevenueSpec.iso_elastic(1.0, 0.5), CostSpec.quadratic(0.0, 1.0), 1.0, 1.0)


def trapezoid_value(path, rates):
    """Discounted objective of ``rates`` on the path's grid (trapezoid rule)."""
    from hotelling.econ import cost_value, revenue_value

    s = path.scenario
    t = path.times
    flow = (revenue_value(s.revenue, rates, t) - cost_value(s.cost, rates)) * np.exp(-s.rho * t)
    return float(np.sum(trapezoid_weights(t) * flow))


def trapezoid_weights(t):
    w = np.zeros_like(t)
    h = np.diff(t)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def mass_shifts(path, n, rng, delta):
    """Yield ``n`` perturbed rate vectors: mass ``delta`` moved from one grid
    node to another, keeping the trapezoid total unchanged."""
    w = trapezoid_weights(path.times)
    donors = np.flatnonzero(path.rates * w >= delta)
    count = 0
    while count < n:
        j = int(rng.choice(donors))
        i = int(rng.integers(len(path.times)))
        if i == j:
            continue
        q = path.rates.copy()
        q[i] += delta / w[i]
        q[j] -= delta / w[j]
        count += 1
        yield q
