"""Discrete-time transcription of the depletion problem.

Time is cut into equal bins evaluated at their midpoints. The discounted sum
of per-bin profits is maximized subject to ``sum(q_k * dt) = S`` by dualizing
the stock constraint: for a trial multiplier ``mu`` every bin solves its own
concave scalar problem, and ``mu`` is bisected until the constraint binds.

Nothing here calls the continuous solver; only the econ primitives are shared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import econ
from .errors import DomainError, InfeasibleHorizonError, SolverError

_EPS = np.finfo(float).eps
_CONSTRAINT_RTOL = 1e-11


@dataclass(frozen=True, eq=False)
class DiscretePath:
    bin_edges: np.ndarray
    rates: np.ndarray
    multiplier: float
    objective: float
    scenario: econ.ScenarioSpec

    @property
    def midpoints(self):
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def dt(self):
        return float(self.bin_edges[1] - self.bin_edges[0])


@dataclass(frozen=True)
class DeviationReport:
    sup_rate_deviation: float
    at_time: float
    objective_gap: float
    continuous_value: float
    discrete_value: float


def _bin_gradient(s, q, t, disc, mu):
    """d/dq of [R(q, t) - C(q)] * disc - mu * q."""
    return (econ.marginal_revenue(s.revenue, q, t) - econ.marginal_cost(s.cost, q)) * disc - mu


def _gradient_at_zero(s, t, disc, mu):
    r = s.revenue
    if r.kind == "iso_elastic" and r.epsilon < 1:
        return np.full_like(t, np.inf)
    if r.kind == "linear_demand":
        mr0 = np.full_like(t, r.a)
    elif r.kind == "drift":
        mr0 = r.p0 * np.exp(r.g * t)
    else:
        mr0 = np.full_like(t, r.p0)
    return (mr0 - s.cost.mc0) * disc - mu


def bin_rates(s, t, disc, mu):
    """Per-bin maximizers for multiplier ``mu`` (vectorized over bins).

    Each bin's objective is concave in q, so its gradient is decreasing;
    the maximizer is q = 0 when the gradient at 0+ is nonpositive, and
    otherwise the gradient root, found by bisection in log q.
    """
    q = np.zeros_like(t)
    active = _gradient_at_zero(s, t, disc, mu) > 0
    if not np.any(active):
        return q
    ta, da = t[active], disc[active]

    hi = np.ones_like(ta)
    for _ in range(2100):
        up = _bin_gradient(s, hi, ta, da, mu) > 0
        if not np.any(up):
            break
        hi[up] *= 2.0
    else:
        raise SolverError("per-bin upper bracket not found")
    lo = hi.copy()
    for _ in range(2100):
        down = _bin_gradient(s, lo, ta, da, mu) <= 0
        if not np.any(down):
            break
        lo[down] *= 0.5
    else:
        raise SolverError("per-bin lower bracket not found")

    for _ in range(200):
        mid = np.sqrt(lo * hi)
        pos = _bin_gradient(s, mid, ta, da, mu) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
        if np.all(hi - lo <= 4 * _EPS * hi):
            break
    q[active] = np.sqrt(lo * hi)
    return q


def _objective(s, q, t, disc, dt):
    profit = econ.revenue_value(s.revenue, q, t) - econ.cost_value(s.cost, q)
    return float(np.sum(np.where(q > 0, profit, 0.0) * disc) * dt)


def solve_discrete(s, n_bins, horizon):
    """Maximize the midpoint-rule discounted profit sum on ``n_bins`` bins
    over ``[0, horizon]`` subject to the stock constraint."""
    s = econ.validate_scenario(s)
    if isinstance(n_bins, bool) or not isinstance(n_bins, int) or n_bins < 2:
        raise DomainError(f"n_bins must be an integer >= 2, got {n_bins!r}")
    if not horizon > 0 or not math.isfinite(horizon):
        raise DomainError(f"horizon must be finite and > 0, got {horizon}")

    edges = np.linspace(0.0, horizon, n_bins + 1)
    t = 0.5 * (edges[:-1] + edges[1:])
    dt = horizon / n_bins
    disc = np.exp(-s.rho * t)
    stock = s.stock

    def total(mu):
        return float(np.sum(bin_rates(s, t, disc, mu)) * dt)

    if stock == 0:
        mu = float(np.max(_gradient_at_zero(s, t, disc, 0.0)))
        return DiscretePath(edges, np.zeros(n_bins), mu, 0.0, s)

    unconstrained = total(0.0)
    if unconstrained < stock:
        raise InfeasibleHorizonError(
            f"horizon {horizon} is too short: even with a zero multiplier only "
            f"{unconstrained:.6g} of the stock {stock:.6g} can be placed"
        )

    mu_cap = float(np.max(_gradient_at_zero(s, t, disc, 0.0)))
    if math.isfinite(mu_cap):
        hi = mu_cap
    else:
        hi = s.revenue.p0 * s.revenue.epsilon
        while total(hi) >= stock:
            hi *= 2.0
    lo = hi
    for _ in range(2100):
        lo *= 0.5
        if total(lo) > stock:
            break
        hi = lo
    else:
        raise InfeasibleHorizonError(f"horizon {horizon} cannot hold the stock {stock:.6g}")

    target = _CONSTRAINT_RTOL * max(stock, 1.0)
    for _ in range(400):
        mu = math.sqrt(lo * hi)
        placed = total(mu)
        if abs(placed - stock) <= target or hi / lo - 1.0 <= 4 * _EPS:
            break
        if placed > stock:
            lo = mu
        else:
            hi = mu
    else:
        raise SolverError("multiplier bisection did not converge")

    q = bin_rates(s, t, disc, mu)
    return DiscretePath(edges, q, mu, _objective(s, q, t, disc, dt), s)


def compare_paths(cont, disc):
    """Sup-norm rate gap at bin midpoints and objective gap.

    The continuous path is interpolated linearly and taken as zero beyond
    its last grid point.
    """
    if econ.validate_scenario(cont.scenario) != econ.validate_scenario(disc.scenario):
        raise DomainError("paths belong to different scenarios")
    mid = disc.midpoints
    cont_rates = np.interp(mid, cont.times, cont.rates, right=0.0)
    gaps = np.abs(cont_rates - disc.rates)
    k = int(np.argmax(gaps))
    return DeviationReport(
        sup_rate_deviation=float(gaps[k]),
        at_time=float(mid[k]),
        objective_gap=abs(cont.value - disc.objective),
        continuous_value=cont.value,
        discrete_value=disc.objective,
    )
