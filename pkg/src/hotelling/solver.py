"""Continuous-time depletion solver.

The optimal rate at time t solves ``MR(Q, t) - MC(Q) = lam * exp(rho t)``,
clamped at zero. The shadow price ``lam`` is then chosen by bisection so that
cumulative extraction equals the stock.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import econ
from .errors import DomainError, SolverError

QUAD_RTOL = 1e-12
LAMBDA_RTOL = 1e-10
TAIL_MASS_TOL = 1e-9
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class GridSpec:
    """Output grid for :func:`solve_path`.

    ``horizon`` is ``"to_exhaustion"`` (uniform on [0, T], or on the
    truncation horizon when T is infinite) or ``"fixed"`` with ``t_max``.
    """

    points: int = 101
    horizon: str = "to_exhaustion"
    t_max: float | None = None
    tail_mass_tol: float = TAIL_MASS_TOL

    def __post_init__(self):
        if isinstance(self.points, bool) or not isinstance(self.points, int) or self.points < 2:
            raise DomainError(f"grid needs at least 2 integer points, got {self.points!r}")
        if self.horizon == "fixed":
            if self.t_max is None or not math.isfinite(self.t_max) or self.t_max <= 0:
                raise DomainError(f"fixed horizon needs t_max > 0, got {self.t_max!r}")
        elif self.horizon == "to_exhaustion":
            if self.t_max is not None:
                raise DomainError("t_max only applies to a fixed horizon")
        else:
            raise DomainError(f"unknown horizon policy {self.horizon!r}")
        if not 0 < self.tail_mass_tol < 1:
            raise DomainError(f"tail_mass_tol must lie in (0, 1), got {self.tail_mass_tol}")

    @classmethod
    def fixed(cls, t_max, points=101, tail_mass_tol=TAIL_MASS_TOL):
        return cls(points=points, horizon="fixed", t_max=t_max, tail_mass_tol=tail_mass_tol)


@dataclass(frozen=True, eq=False)
class ExtractionPath:
    """Solved depletion path sampled on a uniform grid.

    ``exhaustion`` is ``math.inf`` when extraction never stops (iso-elastic
    revenue). ``onset`` is the first time with positive extraction (nonzero
    only for some drift scenarios). ``horizon`` is the end of the support used
    for the integrals: T, or the truncation point of an infinite tail.
    """

    times: np.ndarray
    rates: np.ndarray
    shadow_price: float
    exhaustion: float
    cumulative: np.ndarray
    value: float
    scenario: econ.ScenarioSpec
    onset: float = 0.0
    horizon: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def is_zero(self):
        return not np.any(self.rates > 0)


def _quad(f, a, b):
    if b <= a:
        return 0.0
    with warnings.catch_warnings():
        # roundoff warnings near 1e-16 relative are expected at QUAD_RTOL
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=400)
    return val


def _iso_rate(s, m):
    """Root of p0*eps*q**(eps-1) - C'(q) = m, solved in log q."""
    p0e = s.revenue.p0 * s.revenue.epsilon
    em1 = s.revenue.epsilon - 1.0
    cost = s.cost
    # p0*eps*q**(eps-1) = m at q_env, so the residual there is -C'(q_env) <= 0
    x_hi = math.log(m / p0e) / em1
    mc_hi = econ.marginal_cost(cost, math.exp(x_hi))
    x_lo = math.log((m + mc_hi) / p0e) / em1

    def f(x):
        q = math.exp(x)
        return p0e * math.exp(em1 * x) - econ.marginal_cost(cost, q) - m

    if x_lo >= x_hi or f(x_lo) <= 0.0:
        return math.exp(x_lo)
    try:
        x = optimize.brentq(f, x_lo, x_hi, xtol=1e-15, rtol=4 * _EPS, maxiter=200)
    except ValueError as exc:  # pragma: no cover - bracket is analytic
        raise SolverError(f"iso-elastic rate bracket failed for m={m}") from exc
    return math.exp(x)


def _linear_demand_rate(s, m):
    r, cost = s.revenue, s.cost
    if cost.kind == "quadratic":
        return max((r.a - cost.c - m) / (2.0 * r.b + cost.d), 0.0)
    if r.a - m <= 0:
        return 0.0
    q_hi = econ.inverse_marginal_cost(cost, r.a - m)

    def f(q):
        return r.a - 2.0 * r.b * q - econ.marginal_cost(cost, q) - m

    if f(q_hi) >= 0.0:
        return q_hi
    try:
        return optimize.brentq(f, 0.0, q_hi, xtol=1e-300, rtol=4 * _EPS, maxiter=200)
    except ValueError as exc:  # pragma: no cover
        raise SolverError(f"linear-demand rate bracket failed for m={m}") from exc


def _rate(s, lam, t):
    """Unvalidated rate Q(t) for shadow price lam."""
    m = lam * math.exp(s.rho * t)
    r = s.revenue
    if r.kind == "price_taker":
        return econ.inverse_marginal_cost(s.cost, r.p0 - m)
    if r.kind == "drift":
        return econ.inverse_marginal_cost(s.cost, r.p0 * math.exp(r.g * t) - m)
    if r.kind == "iso_elastic":
        if r.epsilon == 1.0:
            return econ.inverse_marginal_cost(s.cost, r.p0 - m)
        if math.isinf(m):
            return 0.0
        return _iso_rate(s, m)
    return _linear_demand_rate(s, m)


def _iso_rates(s, m):
    """Vectorized counterpart of _iso_rate: bisection in log q."""
    p0e = s.revenue.p0 * s.revenue.epsilon
    em1 = s.revenue.epsilon - 1.0
    hi = np.log(m / p0e) / em1
    lo = np.log((m + econ.marginal_cost(s.cost, np.exp(hi))) / p0e) / em1
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        pos = p0e * np.exp(em1 * mid) - econ.marginal_cost(s.cost, np.exp(mid)) - m > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
        if np.all(hi - lo <= 4 * _EPS * np.maximum(1.0, np.abs(hi))):
            break
    return np.exp(0.5 * (lo + hi))


def _linear_demand_rates(s, m):
    r, cost = s.revenue, s.cost
    if cost.kind == "quadratic":
        return np.maximum((r.a - cost.c - m) / (2.0 * r.b + cost.d), 0.0)
    lo = np.zeros_like(m)
    hi = econ.inverse_marginal_cost(cost, r.a - m)
    for _ in range(1100):
        mid = 0.5 * (lo + hi)
        pos = r.a - 2.0 * r.b * mid - econ.marginal_cost(cost, mid) - m > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
        if np.all(hi - lo <= 4 * _EPS * hi):
            break
    return 0.5 * (lo + hi)


def _rates(s, lam, t, t_on, t_off):
    """Vectorized Q(t), exactly zero outside [t_on, t_off)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    live = (t >= t_on) & (t < t_off)
    if not np.any(live):
        return out
    tl = t[live]
    m = lam * np.exp(s.rho * tl)
    r = s.revenue
    if r.kind == "price_taker":
        q = econ.inverse_marginal_cost(s.cost, r.p0 - m)
    elif r.kind == "drift":
        q = econ.inverse_marginal_cost(s.cost, r.p0 * np.exp(r.g * tl) - m)
    elif r.kind == "iso_elastic":
        q = _iso_rates(s, m)
    else:
        q = _linear_demand_rates(s, m)
    out[live] = q
    return out


_GL10 = np.polynomial.legendre.leggauss(10)
_GL20 = np.polynomial.legendre.leggauss(20)


def _segment_masses(s, lam, a, b, t_on, t_off):
    """Integral of Q over each [a_i, b_i].

    Composite Gauss-Legendre of orders 10 and 20; segments where the two
    disagree, or that touch a kink of the path, fall back to adaptive quad.
    """
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)

    def gl(rule):
        x, w = rule
        nodes = centre[:, None] + half[:, None] * x[None, :]
        q = _rates(s, lam, nodes.ravel(), t_on, t_off).reshape(nodes.shape)
        return half * (q @ w)

    v10, v20 = gl(_GL10), gl(_GL20)
    kink = (a <= t_on) & (t_on > 0) | (b >= t_off)
    bad = kink | (np.abs(v20 - v10) > 1e-13 * np.maximum(np.abs(v20), 1e-300))
    bad &= b > a
    for i in np.flatnonzero(bad):
        v20[i] = _quad(lambda t: _rate(s, lam, t), a[i], b[i])
    return v20


def _check_lambda(lam):
    if not lam > 0:
        raise DomainError(f"shadow price must be > 0, got {lam}")


def extraction_rate_at(s, lam, t):
    """Optimal extraction rate at time ``t`` for shadow price ``lam``."""
    s = econ.validate_scenario(s)
    _check_lambda(lam)
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    t_on, t_off = _window(s, lam)
    if t >= t_off or t < t_on:
        return 0.0
    return _rate(s, lam, t)


def _window(s, lam):
    """(onset, exhaustion) interval where the rate is positive."""
    if math.isinf(lam):
        return 0.0, 0.0
    r = s.revenue
    if r.kind == "iso_elastic" and r.epsilon < 1:
        return 0.0, math.inf
    if r.kind != "drift":
        phi0 = econ.profit_at_zero(s)
        if lam >= phi0:
            return 0.0, 0.0
        return 0.0, math.log(phi0 / lam) / s.rho

    t_star, peak = econ.peak_discounted_profit_at_zero(s)
    if lam >= peak:
        return 0.0, 0.0
    p0, g, rho, c0 = r.p0, r.g, s.rho, s.cost.mc0

    def h(t):
        return p0 * math.exp((g - rho) * t) - c0 * math.exp(-rho * t) - lam

    t_on = 0.0
    if h(0.0) < 0:
        t_on = optimize.brentq(h, 0.0, t_star, xtol=1e-15, rtol=4 * _EPS)
    if c0 == 0 and g <= 0:
        t_off = math.log(p0 / lam) / (rho - g)
    else:
        # h(t) <= p0 e^{(g-rho)t} - lam < 0 past this point
        t_hi = max(t_star, math.log(p0 / lam) / (rho - g)) + 1.0
        t_off = optimize.brentq(h, t_star, t_hi, xtol=1e-15, rtol=4 * _EPS)
    return t_on, t_off


def exhaustion_time(s, lam):
    """First time after which extraction is zero; ``math.inf`` if never.

    A shadow price at or above the peak discounted marginal profit gives the
    zero path and T = 0.
    """
    s = econ.validate_scenario(s)
    _check_lambda(lam)
    t_on, t_off = _window(s, lam)
    return 0.0 if t_off <= t_on else t_off


def _iso_envelope(s, lam):
    """(log A, k) with Q(t) <= A exp(-k t) for iso-elastic revenue."""
    eps = s.revenue.epsilon
    log_a = -math.log(lam / (s.revenue.p0 * eps)) / (1.0 - eps)
    return log_a, s.rho / (1.0 - eps)


def _integrate_tail(f, log_bound0, k, rel_tol):
    """Integrate f over [0, tau] where the tail bound exp(log_bound0 - k*tau)/k
    falls below rel_tol times the accumulated integral. Returns (value, tau)."""
    tau = 1.0 / k
    total = _quad(f, 0.0, tau)
    for _ in range(60):
        if total <= 0:
            tau *= 2.0
            total = _quad(f, 0.0, tau)
            continue
        tau_need = (log_bound0 - math.log(k * rel_tol * total)) / k
        if tau >= tau_need:
            return total, tau
        total += _quad(f, tau, tau_need)
        tau = tau_need
    raise SolverError("tail truncation did not settle")


def _support(s, lam, tail_mass_tol):
    """(total mass, onset, end of support)."""
    t_on, t_off = _window(s, lam)
    if t_off <= t_on:
        return 0.0, 0.0, 0.0
    if math.isfinite(t_off):
        return _quad(lambda t: _rate(s, lam, t), t_on, t_off), t_on, t_off
    log_a, k = _iso_envelope(s, lam)
    total, tau = _integrate_tail(lambda t: _rate(s, lam, t), log_a, k, tail_mass_tol)
    return total, t_on, tau


def cumulative_extraction(s, lam, tail_mass_tol=TAIL_MASS_TOL):
    """Total extraction implied by shadow price ``lam``.

    Infinite tails are truncated once the analytic envelope bounds the
    remaining mass below ``tail_mass_tol`` times the running total.
    """
    s = econ.validate_scenario(s)
    _check_lambda(lam)
    return _support(s, lam, tail_mass_tol)[0]


def solve_shadow_price(s, tol=LAMBDA_RTOL, tail_mass_tol=TAIL_MASS_TOL):
    """Shadow price that makes cumulative extraction equal the stock.

    Geometric bisection on a bracket found by doubling/halving; valid because
    cumulative extraction is strictly decreasing in the shadow price. Stops
    once ``|cum - S| <= tol * S``. Zero stock returns the smallest shadow price
    giving the zero path (``math.inf`` under iso-elastic revenue).
    """
    if isinstance(s.stock, (int, float)) and (math.isinf(s.stock) or s.stock < 0):
        raise DomainError(f"stock must be finite and >= 0, got {s.stock}")
    s = econ.validate_scenario(s)
    stock = s.stock
    _, lam_max = econ.peak_discounted_profit_at_zero(s)
    if stock == 0:
        return lam_max

    def cum(lam):
        return _support(s, lam, tail_mass_tol)[0]

    if math.isfinite(lam_max):
        hi = lam_max
    else:
        hi = s.revenue.p0 * s.revenue.epsilon
        for _ in range(2000):
            if cum(hi) < stock:
                break
            hi *= 2.0
        else:
            raise SolverError("could not bracket the shadow price from above")
    lo = hi
    for _ in range(4000):
        lo *= 0.5
        if cum(lo) > stock:
            break
        hi = lo
    else:
        raise SolverError("could not bracket the shadow price from below")

    mid = math.sqrt(lo * hi)
    for _ in range(400):
        mid = math.sqrt(lo * hi)
        c = cum(mid)
        if abs(c - stock) <= tol * stock:
            return mid
        if c > stock:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 <= 4 * _EPS:
            return mid
    raise SolverError("shadow-price bisection did not converge")


def _profit_flow(s, lam):
    rho = s.rho

    def f(t):
        q = _rate(s, lam, t)
        if q <= 0:
            return 0.0
        return (econ.revenue_value(s.revenue, q, t) - econ.cost_value(s.cost, q)) * math.exp(-rho * t)

    return f


def present_value(path):
    """Discounted objective of a solved path, by quadrature on the
    continuous rate implied by its shadow price."""
    s = path.scenario
    lam = path.shadow_price
    if math.isinf(lam) or path.exhaustion == 0:
        return 0.0
    t_on, t_off = _window(s, lam)
    f = _profit_flow(s, lam)
    if math.isfinite(t_off):
        return _quad(f, t_on, t_off)
    # profit flow <= p0 * Q**eps * e^{-rho t} shares the envelope decay rate
    log_a, k = _iso_envelope(s, lam)
    log_bound = math.log(s.revenue.p0) + s.revenue.epsilon * log_a
    return _integrate_tail(f, log_bound, k, 1e-12)[0]


def solve_path(s, grid=None, tol=LAMBDA_RTOL):
    """Solve the scenario end to end and sample the path on ``grid``."""
    grid = grid or GridSpec()
    s = econ.validate_scenario(s)
    lam = solve_shadow_price(s, tol=tol, tail_mass_tol=grid.tail_mass_tol)
    _, t_on, t_end = _support(s, lam, grid.tail_mass_tol)
    t_off = 0.0 if t_end == 0.0 else _window(s, lam)[1]

    if grid.horizon == "fixed":
        span = grid.t_max
    else:
        # zero path: T = 0 leaves nothing to sample, fall back to a unit window
        span = t_end if t_end > 0 else 1.0
    times = np.linspace(0.0, span, grid.points)

    rates = _rates(s, lam, times, t_on, t_off)
    cumulative = np.zeros(grid.points)
    if t_end > 0:
        stop = min(t_off, span)
        a = np.clip(times[:-1], t_on, stop)
        b = np.clip(times[1:], t_on, stop)
        cumulative[1:] = np.cumsum(_segment_masses(s, lam, a, b, t_on, t_off))

    path = ExtractionPath(
        times=times,
        rates=rates,
        shadow_price=lam,
        exhaustion=0.0 if t_end == 0 else t_off,
        cumulative=cumulative,
        value=0.0,
        scenario=s,
        onset=t_on,
        horizon=t_end,
    )
    return dataclasses.replace(path, value=present_value(path))
