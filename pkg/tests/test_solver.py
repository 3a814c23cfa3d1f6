import math
import time

import mpmath
import numpy as np
import pytest
from conftest import BENCH_T50, BENCH_VALUE, ISO_RATE_AT_HALF, mass_shifts, trapezoid_value
from hypothesis import given, settings
from hypothesis import strategies as st

from hotelling.econ import CostSpec, RevenueSpec, ScenarioSpec, marginal_cost, net_marginal_profit
from hotelling.errors import DomainError
from hotelling.oracle import solve_discrete
from hotelling.scenarios import BENCHMARK, SUITE
from hotelling.solver import (
    GridSpec,
    cumulative_extraction,
    exhaustion_time,
    extraction_rate_at,
    present_value,
    solve_path,
    solve_shadow_price,
)

E = math.e


def price_taker_stock(p0, c, d, rho, lam):
    """Closed form of the integral of (p0 - c - lam e^{rho t})/d up to T."""
    m0 = p0 - c
    if lam >= m0:
        return 0.0
    return (m0 * math.log(m0 / lam) - (m0 - lam)) / (rho * d)


def bisect(f, lo, hi, n=200):
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_closed_form_stock_matches_high_precision_quadrature():
    lam = mpmath.mpf("0.2")
    exact = mpmath.quad(lambda t: 1 - lam * mpmath.exp(t), [0, mpmath.log(1 / lam)])
    assert price_taker_stock(2, 1, 1, 1, 0.2) == pytest.approx(float(exact), rel=1e-14)


def test_rate_examples(benchmark):
    assert extraction_rate_at(benchmark, 1 / E, 0.0) == pytest.approx(1 - 1 / E, abs=1e-15)
    assert extraction_rate_at(benchmark, 1 / E, 1.0) == 0.0
    assert extraction_rate_at(benchmark, 1 / E, 3.0) == 0.0


def test_iso_rate_matches_brute_force_bisection(iso_half):
    brute = bisect(lambda q: 0.5 * q**-0.5 - q - 0.5, 1e-12, 10.0)
    assert brute == pytest.approx(ISO_RATE_AT_HALF, rel=1e-12)
    q = extraction_rate_at(iso_half, 0.5, 0.0)
    assert q == pytest.approx(ISO_RATE_AT_HALF, rel=1e-12)
    assert abs(float(net_marginal_profit(iso_half, q)) - 0.5) <= 1e-12


@pytest.mark.parametrize("name", sorted(SUITE))
def test_rate_solves_foc(name):
    s = SUITE[name]
    lam = solve_shadow_price(s)
    for t in np.linspace(0.0, 3.0, 13):
        q = extraction_rate_at(s, lam, t)
        shadow = lam * math.exp(s.rho * t)
        if q > 0:
            assert abs(float(net_marginal_profit(s, q, t)) - shadow) <= 1e-12 * max(1.0, shadow)


def test_exhaustion_examples(benchmark, iso_half):
    assert exhaustion_time(benchmark, 1 / E) == pytest.approx(1.0, abs=1e-15)
    assert exhaustion_time(benchmark, 1.0) == 0.0
    assert exhaustion_time(benchmark, 5.0) == 0.0
    assert exhaustion_time(iso_half, 0.3) == math.inf


def test_drift_exhaustion_solves_zero_rate_condition():
    s = ScenarioSpec(RevenueSpec.drift(2, 0.3), CostSpec.quadratic(1, 1), 1.0, 1.0)
    lam = 0.4
    T = exhaustion_time(s, lam)
    assert 2 * math.exp(0.3 * T) - 1 == pytest.approx(lam * math.exp(T), rel=1e-13)


def test_delayed_onset_drift():
    s = SUITE["drift delayed onset"]
    path = solve_path(s, GridSpec(points=201))
    assert path.onset > 0
    before = path.times < path.onset
    assert np.all(path.rates[before] == 0)
    assert np.any(path.rates > 0)
    assert path.cumulative[-1] == pytest.approx(s.stock, rel=1e-9)


def test_cumulative_examples(benchmark):
    assert cumulative_extraction(benchmark, 1 / E) == pytest.approx(1 / E, rel=1e-11)
    assert cumulative_extraction(benchmark, 1.0) == 0.0


@pytest.mark.parametrize("lam", [0.01, 0.05, 0.2, 0.5, 0.9, 0.999])
def test_cumulative_matches_closed_form(benchmark, lam):
    assert cumulative_extraction(benchmark, lam) == pytest.approx(price_taker_stock(2, 1, 1, 1, lam), rel=1e-10)


def test_cumulative_decreasing_in_lambda(benchmark, iso_half):
    for s in (benchmark, iso_half):
        lams = np.geomspace(0.01, 0.99, 10)
        cums = [cumulative_extraction(s, lam) for lam in lams]
        assert all(a > b for a, b in zip(cums, cums[1:]))


def test_iso_tail_truncation_bounded(iso_half):
    # tighter truncation changes the total by less than the looser bound
    loose = cumulative_extraction(iso_half, 0.1, tail_mass_tol=1e-6)
    tight = cumulative_extraction(iso_half, 0.1, tail_mass_tol=1e-12)
    assert 0 <= tight - loose <= 1e-6 * tight


def test_shadow_price_benchmark(benchmark):
    lam = solve_shadow_price(benchmark)
    assert lam == pytest.approx(1 / E, abs=1e-8)
    # cross-check by inverting the closed form
    brute = bisect(lambda x: price_taker_stock(2, 1, 1, 1, x) - 1 / E, 1e-6, 1.0)
    assert lam == pytest.approx(brute, abs=1e-9)


def test_shadow_price_zero_stock(benchmark):
    s = ScenarioSpec(benchmark.revenue, benchmark.cost, 1.0, 0.0)
    assert solve_shadow_price(s) == 1.0
    path = solve_path(s)
    assert np.all(path.rates == 0) and path.value == 0


def test_shadow_price_iso_agrees_with_discrete_multiplier(iso_half):
    lam = solve_shadow_price(iso_half)
    path = solve_path(iso_half)
    disc = solve_discrete(iso_half, 2000, path.horizon)
    assert lam == pytest.approx(disc.multiplier, abs=1e-3)


def test_shadow_price_rejects_infinite_stock(benchmark):
    with pytest.raises(DomainError):
        solve_shadow_price(ScenarioSpec(benchmark.revenue, benchmark.cost, 1.0, math.inf))


@settings(max_examples=25, deadline=None)
@given(
    st.floats(1.5, 10.0),
    st.floats(0.0, 1.0),
    st.floats(0.2, 5.0),
    st.floats(0.05, 2.0),
    st.floats(0.01, 20.0),
)
def test_shadow_price_inverts_closed_form(p0, c, d, rho, stock):
    s = ScenarioSpec(RevenueSpec.price_taker(p0), CostSpec.quadratic(c, d), rho, stock)
    lam = solve_shadow_price(s)
    assert price_taker_stock(p0, c, d, rho, lam) == pytest.approx(stock, rel=1e-9)


def test_solve_path_benchmark(benchmark):
    path = solve_path(benchmark, GridSpec(points=101))
    assert path.rates[0] == pytest.approx(1 - 1 / E, abs=1e-8)
    assert path.rates[-1] == 0.0
    assert path.shadow_price == pytest.approx(1 / E, abs=1e-8)
    assert path.exhaustion == pytest.approx(1.0, abs=1e-8)
    assert path.times[-1] == path.exhaustion
    assert path.value == pytest.approx(BENCH_VALUE, abs=1e-8)
    exact_cum = path.times - np.exp(path.times - 1) + 1 / E
    np.testing.assert_allclose(path.cumulative, exact_cum, atol=1e-10)


def test_present_value_zero_path(benchmark):
    path = solve_path(ScenarioSpec(benchmark.revenue, benchmark.cost, 1.0, 0.0), GridSpec(points=2))
    assert present_value(path) == 0.0


@pytest.mark.parametrize("name", sorted(SUITE))
def test_path_invariants(name):
    s = SUITE[name]
    path = solve_path(s, GridSpec(points=201))
    assert np.all(path.rates >= 0)
    assert np.all(np.diff(path.cumulative) >= 0)
    assert abs(path.cumulative[-1] - s.stock) <= 1e-9 * max(s.stock, 1.0)
    assert path.shadow_price > 0
    if math.isfinite(path.exhaustion):
        assert np.all(path.rates[path.times >= path.exhaustion] == 0)
    live = path.rates > 0
    t, q = path.times[live], path.rates[live]
    shadow = path.shadow_price * np.exp(s.rho * t)
    resid = np.abs(net_marginal_profit(s, q, t) - shadow)
    assert np.all(resid <= 1e-8 * np.maximum(1.0, shadow))


def test_hotelling_rule_on_price_taker_paths():
    for name in ("benchmark", "price_taker power", "price_taker steep"):
        s = SUITE[name]
        path = solve_path(s, GridSpec(points=201))
        live = path.rates > 0
        growth = np.log(s.revenue.p0 - marginal_cost(s.cost, path.rates[live])) - s.rho * path.times[live]
        assert np.ptp(growth) <= 1e-6
        assert growth[0] == pytest.approx(math.log(path.shadow_price), abs=1e-6)
        assert np.all(np.diff(path.rates) <= 0)


def test_scale_invariance():
    for s in (BENCHMARK, SUITE["iso eps=0.8 power"], SUITE["drift g=0.3"]):
        base = solve_path(s)
        scaled = solve_path(s.scaled(2.0))
        np.testing.assert_allclose(scaled.rates, base.rates, rtol=0, atol=1e-10)
        assert scaled.shadow_price / base.shadow_price == pytest.approx(2.0, abs=1e-10)
        assert scaled.value / base.value == pytest.approx(2.0, abs=1e-10)


@pytest.mark.parametrize("name", ["benchmark", "drift g=0.3", "iso eps=0.5", "linear_demand power"])
def test_mass_shift_never_improves_value(name):
    path = solve_path(SUITE[name], GridSpec(points=201))
    base = trapezoid_value(path, path.rates)
    rng = np.random.default_rng(7)
    for delta in (1e-4 * path.scenario.stock, 1e-3 * path.scenario.stock):
        for q in mass_shifts(path, 10, rng, delta):
            assert trapezoid_value(path, q) <= base


def test_fixed_grid_runs_past_exhaustion(benchmark):
    path = solve_path(benchmark, GridSpec.fixed(3.0, points=31))
    assert path.times[-1] == 3.0
    assert np.all(path.rates[path.times >= path.exhaustion] == 0)
    assert path.cumulative[-1] == pytest.approx(1 / E, rel=1e-10)


def test_t50_reference_value():
    # analytic cumulative of the benchmark reaches half the stock at BENCH_T50
    t = BENCH_T50
    assert t - math.exp(t - 1) + 1 / E == pytest.approx(0.5 / E, abs=1e-15)


@pytest.mark.parametrize(
    "kwargs",
    [dict(points=1), dict(points=10, horizon="fixed"), dict(horizon="sideways"), dict(tail_mass_tol=0.0)],
)
def test_grid_validation(kwargs):
    with pytest.raises(DomainError):
        GridSpec(**kwargs)


def test_input_guards(benchmark):
    with pytest.raises(DomainError):
        extraction_rate_at(benchmark, 0.0, 0.0)
    with pytest.raises(DomainError):
        extraction_rate_at(benchmark, 0.5, -1.0)
    with pytest.raises(DomainError):
        cumulative_extraction(benchmark, -1.0)


def test_benchmark_is_fast(benchmark):
    solve_path(benchmark)
    start = time.perf_counter()
    solve_path(benchmark)
    assert time.perf_counter() - start < 0.1
