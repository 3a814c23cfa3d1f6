"""Comparative statics and checks of the qualitative claims.

"Over-utilization" is measured by the front-load time t50: the time by which
half of a fixed stock has been extracted. Smaller t50 means earlier use.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from . import econ
from .errors import DomainError, HotellingError, IntegrityError, UndefinedMetricError
from .solver import ExtractionPath, GridSpec, exhaustion_time, solve_path, solve_shadow_price

SWEEP_PARAMETERS = ("rho", "epsilon", "g")

# direction in which t50 is claimed to move as the parameter rises
CLAIMS = {
    "epsilon": ("decreasing", "higher demand elasticity front-loads extraction (over-utilization)"),
    "g": ("increasing", "faster price drift postpones extraction (conservation)"),
    "rho": ("decreasing", "heavier discounting front-loads extraction"),
}


def front_load_time(path, fraction=0.5):
    """Smallest t with cumulative(t) >= fraction * S, by linear interpolation
    of the cumulative series. Returns the last grid time if the target is
    never reached on the grid (truncated tails)."""
    if not 0 < fraction < 1:
        raise DomainError(f"fraction must lie in (0, 1), got {fraction}")
    stock = path.scenario.stock
    if stock <= 0:
        raise UndefinedMetricError("front-load time is undefined for a zero stock")
    target = fraction * stock
    cum = np.asarray(path.cumulative)
    times = np.asarray(path.times)
    i = int(np.searchsorted(cum, target, side="left"))
    if i >= len(cum):
        return float(times[-1])
    if i == 0:
        return float(times[0])
    c0, c1 = cum[i - 1], cum[i]
    w = (target - c0) / (c1 - c0)
    return float(times[i - 1] + w * (times[i] - times[i - 1]))


def hotelling_residual(path):
    """Max over positive-rate grid points of |ln(MR - MC) - ln(lam) - rho t|."""
    s = path.scenario
    live = np.asarray(path.rates) > 0
    if not np.any(live):
        raise DomainError("path has no positive extraction rate")
    q = np.asarray(path.rates)[live]
    t = np.asarray(path.times)[live]
    profit = econ.net_marginal_profit(s, q, t)
    if np.any(profit <= 0):
        bad = float(t[np.argmax(profit <= 0)])
        raise IntegrityError(f"nonpositive marginal profit at a positive rate (t={bad:g})")
    return float(np.max(np.abs(np.log(profit) - math.log(path.shadow_price) - s.rho * t)))


@dataclass(frozen=True)
class SweepRow:
    value: float
    shadow_price: float = math.nan
    exhaustion: float = math.nan
    t50: float = math.nan
    present_value: float = math.nan
    error: str | None = None
    path: ExtractionPath | None = field(default=None, compare=False, repr=False)

    @property
    def ok(self):
        return self.error is None


@dataclass(frozen=True)
class Verdict:
    parameter: str
    expected: str
    status: str  # PASS, FAIL or INCONCLUSIVE
    claim: str
    witnesses: tuple = ()
    violation: tuple | None = None

    def line(self):
        text = f"{self.status:<12} t50 {self.expected} in {self.parameter}: {self.claim}"
        if self.violation:
            (v1, t1), (v2, t2) = self.violation
            text += f" [violated: {self.parameter}={v1:g} t50={t1:.6g} vs {self.parameter}={v2:g} t50={t2:.6g}]"
        return text


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    rows: tuple
    verdicts: tuple = ()
    base: econ.ScenarioSpec | None = None


def substitute(base, parameter, value):
    """Scenario with one parameter replaced.

    ``epsilon`` turns a price-taker base into iso-elastic revenue and ``g``
    turns it into drift revenue; other kinds are rejected.
    """
    if parameter == "rho":
        return dataclasses.replace(base, rho=value)
    r = base.revenue
    if parameter == "epsilon":
        if r.kind not in ("price_taker", "iso_elastic"):
            raise DomainError(f"cannot vary epsilon on {r.kind} revenue")
        return dataclasses.replace(base, revenue=econ.RevenueSpec.iso_elastic(r.p0, value))
    if parameter == "g":
        if r.kind not in ("price_taker", "drift"):
            raise DomainError(f"cannot vary g on {r.kind} revenue")
        return dataclasses.replace(base, revenue=econ.RevenueSpec.drift(r.p0, value))
    raise DomainError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}")


def _solve_row(base, parameter, value, grid, tol):
    try:
        s = econ.validate_scenario(substitute(base, parameter, value))
        path = solve_path(s, grid, tol)
        t50 = front_load_time(path, 0.5) if s.stock > 0 else math.nan
    except HotellingError as exc:
        return SweepRow(value=value, error=f"{type(exc).__name__}: {exc}")
    return SweepRow(value, path.shadow_price, path.exhaustion, t50, path.value, path=path)


def sweep(base, parameter, values, grid=None, tol=1e-10):
    """One full solve per parameter value; per-row failures are recorded and
    the sweep carries on."""
    if parameter not in SWEEP_PARAMETERS:
        raise DomainError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}")
    grid = grid or GridSpec(points=401)
    rows = tuple(_solve_row(base, parameter, float(v), grid, tol) for v in sorted(values))
    result = SweepResult(parameter, rows, base=base)
    return dataclasses.replace(result, verdicts=(judge(result),))


def judge(result):
    """Verdict on the claimed t50 direction for one sweep."""
    expected, claim = CLAIMS[result.parameter]
    rows = sorted((r for r in result.rows if r.ok and math.isfinite(r.t50)), key=lambda r: r.value)
    witnesses = tuple((r.value, r.t50) for r in rows)
    if len(rows) < 2:
        return Verdict(result.parameter, expected, "INCONCLUSIVE", claim, witnesses)
    for a, b in zip(rows, rows[1:]):
        ok = b.t50 < a.t50 if expected == "decreasing" else b.t50 > a.t50
        if not ok:
            return Verdict(
                result.parameter, expected, "FAIL", claim, witnesses, ((a.value, a.t50), (b.value, b.t50))
            )
    return Verdict(result.parameter, expected, "PASS", claim, witnesses)


def qualitative_checks(sweeps):
    """Re-judge every sweep (rows re-sorted first) and return the verdicts."""
    if not sweeps:
        raise DomainError("no sweeps to check")
    return [judge(s) for s in sweeps]


@dataclass(frozen=True)
class CountrySpec:
    label: str
    stock: float
    cost: econ.CostSpec

    def __post_init__(self):
        if not self.stock >= 0:
            raise DomainError(f"country {self.label!r} needs stock >= 0, got {self.stock}")


@dataclass(frozen=True, eq=False)
class MultiCountryResult:
    times: np.ndarray
    paths: dict
    aggregate_rates: np.ndarray
    aggregate_cumulative: np.ndarray

    @property
    def shadow_prices(self):
        return {k: p.shadow_price for k, p in self.paths.items()}


def multi_country_solve(countries, p0, rho, grid=None, tol=1e-10):
    """Solve each country's price-taking problem on its own shadow price and
    sum the rates on a common grid spanning the latest exhaustion time."""
    if not countries:
        raise DomainError("need at least one country")
    labels = [c.label for c in countries]
    if len(set(labels)) != len(labels):
        raise DomainError("country labels must be unique")
    grid = grid or GridSpec()
    scenarios = [
        econ.validate_scenario(
            econ.ScenarioSpec(econ.RevenueSpec.price_taker(p0), c.cost, rho, c.stock, label=c.label)
        )
        for c in countries
    ]
    if grid.horizon == "fixed":
        common = grid
    else:
        ends = [exhaustion_time(s, solve_shadow_price(s, tol, grid.tail_mass_tol)) for s in scenarios if s.stock > 0]
        span = max(ends, default=0.0)
        common = GridSpec.fixed(span if span > 0 else 1.0, grid.points, grid.tail_mass_tol)
    paths = {s.label: solve_path(s, common, tol) for s in scenarios}
    first = next(iter(paths.values()))
    return MultiCountryResult(
        times=first.times,
        paths=paths,
        aggregate_rates=np.sum([p.rates for p in paths.values()], axis=0),
        aggregate_cumulative=np.sum([p.cumulative for p in paths.values()], axis=0),
    )
