"""Cost and revenue primitives for the depletion problem.

Everything here is a pure function of frozen specs. Evaluators accept Python
floats or numpy arrays so the discrete oracle can work on whole grids.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceSignal, DomainError, NonConvexCostError, UnboundedObjectiveError

COST_KINDS = ("quadratic", "power")
REVENUE_KINDS = ("price_taker", "iso_elastic", "drift", "linear_demand")


def _finite(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite number, got {value!r}")


@dataclass(frozen=True)
class CostSpec:
    """Development cost C(Q) with C(0) = 0.

    ``quadratic``: C(Q) = c*Q + d*Q**2/2, so C'(Q) = c + d*Q.
    ``power``: C(Q) = a*Q**beta.
    """

    kind: str
    c: float = 0.0
    d: float = 0.0
    a: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.kind == "quadratic":
            _finite("c", self.c)
            _finite("d", self.d)
            if self.d <= 0:
                raise NonConvexCostError(
                    f"quadratic cost needs slope d > 0, got d={self.d}; a linear cost makes "
                    "the first-order condition hold at a single instant only (bang-bang)"
                )
            if self.c < 0:
                raise DomainError(f"marginal cost at zero must be >= 0, got c={self.c}")
        elif self.kind == "power":
            _finite("a", self.a)
            _finite("beta", self.beta)
            if self.a <= 0:
                raise DomainError(f"power cost scale must be > 0, got a={self.a}")
            if self.beta <= 1:
                raise NonConvexCostError(
                    f"power cost exponent must be > 1, got beta={self.beta}; "
                    "beta <= 1 is not strictly convex"
                )
        else:
            raise DomainError(f"unknown cost kind {self.kind!r}; expected one of {COST_KINDS}")

    @classmethod
    def quadratic(cls, c, d):
        return cls("quadratic", c=c, d=d)

    @classmethod
    def power(cls, a, beta):
        return cls("power", a=a, beta=beta)

    @property
    def mc0(self):
        """Marginal cost at zero extraction."""
        return self.c if self.kind == "quadratic" else 0.0

    def scaled(self, k):
        """Cost multiplied by a positive constant."""
        if self.kind == "quadratic":
            return CostSpec.quadratic(self.c * k, self.d * k)
        return CostSpec.power(self.a * k, self.beta)


@dataclass(frozen=True)
class RevenueSpec:
    """Gross revenue flow R(Q, t).

    price_taker   p0*Q
    iso_elastic   p0*Q**epsilon, epsilon in (0, 1]
    drift         p0*Q*exp(g*t)
    linear_demand (a - b*Q)*Q
    """

    kind: str
    p0: float = 0.0
    epsilon: float = 1.0
    g: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in REVENUE_KINDS:
            raise DomainError(f"unknown revenue kind {self.kind!r}; expected one of {REVENUE_KINDS}")
        if self.kind == "linear_demand":
            _finite("a", self.a)
            _finite("b", self.b)
            if self.a <= 0:
                raise DomainError(f"linear demand intercept must be > 0, got a={self.a}")
            if self.b < 0:
                raise DomainError(f"linear demand slope must be >= 0, got b={self.b}")
            return
        _finite("p0", self.p0)
        if self.p0 <= 0:
            raise DomainError(f"base price must be > 0, got p0={self.p0}")
        if self.kind == "iso_elastic":
            _finite("epsilon", self.epsilon)
            if not 0 < self.epsilon <= 1:
                raise DomainError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.kind == "drift":
            _finite("g", self.g)

    @classmethod
    def price_taker(cls, p0):
        return cls("price_taker", p0=p0)

    @classmethod
    def iso_elastic(cls, p0, epsilon):
        return cls("iso_elastic", p0=p0, epsilon=epsilon)

    @classmethod
    def drift(cls, p0, g):
        return cls("drift", p0=p0, g=g)

    @classmethod
    def linear_demand(cls, a, b):
        return cls("linear_demand", a=a, b=b)

    def scaled(self, k):
        """Revenue multiplied by a positive constant."""
        if self.kind == "linear_demand":
            return dataclasses.replace(self, a=self.a * k, b=self.b * k)
        return dataclasses.replace(self, p0=self.p0 * k)


@dataclass(frozen=True)
class ScenarioSpec:
    revenue: RevenueSpec
    cost: CostSpec
    rho: float
    stock: float
    label: str = ""

    def describe(self):
        if self.label:
            return self.label
        r = self.revenue
        head = {
            "price_taker": f"price_taker p0={r.p0:g}",
            "iso_elastic": f"iso_elastic p0={r.p0:g} eps={r.epsilon:g}",
            "drift": f"drift p0={r.p0:g} g={r.g:g}",
            "linear_demand": f"linear_demand a={r.a:g} b={r.b:g}",
        }[r.kind]
        return f"{head} rho={self.rho:g} S={self.stock:g}"

    def scaled(self, k):
        """Scenario with revenue and cost both multiplied by k."""
        return dataclasses.replace(self, revenue=self.revenue.scaled(k), cost=self.cost.scaled(k))


def marginal_cost(cost, q):
    """C'(q) for q >= 0."""
    if np.any(np.asarray(q) < 0):
        raise DomainError(f"extraction rate must be >= 0, got {q}")
    if cost.kind == "quadratic":
        return cost.c + cost.d * q
    return cost.a * cost.beta * q ** (cost.beta - 1.0)


def cost_value(cost, q):
    if cost.kind == "quadratic":
        return cost.c * q + 0.5 * cost.d * q * q
    return cost.a * q**cost.beta


def inverse_marginal_cost(cost, m):
    """Unique q >= 0 with C'(q) = m, clamped to 0 when m <= C'(0)."""
    if cost.kind == "quadratic":
        return np.maximum((m - cost.c) / cost.d, 0.0) if np.ndim(m) else max((m - cost.c) / cost.d, 0.0)
    base = np.maximum(m, 0.0) / (cost.a * cost.beta) if np.ndim(m) else max(m, 0.0) / (cost.a * cost.beta)
    return base ** (1.0 / (cost.beta - 1.0))


def marginal_revenue(revenue, q, t=0.0):
    """dR/dQ at rate q and time t.

    Raises DivergenceSignal for iso-elastic revenue (epsilon < 1) at q = 0.
    """
    if np.any(np.asarray(q) < 0):
        raise DomainError(f"extraction rate must be >= 0, got {q}")
    kind = revenue.kind
    if kind == "price_taker":
        return revenue.p0 + 0.0 * q
    if kind == "iso_elastic":
        if revenue.epsilon == 1.0:
            return revenue.p0 + 0.0 * q
        if np.any(np.asarray(q) == 0):
            raise DivergenceSignal("iso-elastic marginal revenue diverges at q = 0")
        return revenue.p0 * revenue.epsilon * q ** (revenue.epsilon - 1.0)
    if kind == "drift":
        return revenue.p0 * np.exp(revenue.g * t) + 0.0 * q
    return revenue.a - 2.0 * revenue.b * q


def revenue_value(revenue, q, t=0.0):
    kind = revenue.kind
    if kind == "price_taker":
        return revenue.p0 * q
    if kind == "iso_elastic":
        return revenue.p0 * q**revenue.epsilon
    if kind == "drift":
        return revenue.p0 * q * np.exp(revenue.g * t)
    return (revenue.a - revenue.b * q) * q


def net_marginal_profit(s, q, t=0.0):
    """MR(q, t) - MC(q)."""
    return marginal_revenue(s.revenue, q, t) - marginal_cost(s.cost, q)


def profit_at_zero(s, t=0.0):
    """Limit of the net marginal profit as q -> 0+ (inf for iso-elastic, epsilon < 1)."""
    r = s.revenue
    mc0 = s.cost.mc0
    if r.kind == "price_taker":
        return r.p0 - mc0
    if r.kind == "iso_elastic":
        return math.inf if r.epsilon < 1 else r.p0 - mc0
    if r.kind == "drift":
        return r.p0 * math.exp(r.g * t) - mc0
    return r.a - mc0


def peak_discounted_profit_at_zero(s):
    """(t*, v*) maximizing profit_at_zero(t) * exp(-rho*t) over t >= 0.

    Any shadow price at or above v* yields the zero path.
    """
    r = s.revenue
    if r.kind == "iso_elastic" and r.epsilon < 1:
        return 0.0, math.inf
    if r.kind != "drift":
        return 0.0, profit_at_zero(s)
    c0, rho, g = s.cost.mc0, s.rho, r.g
    # d/dt [p0 e^{(g-rho)t} - c0 e^{-rho t}] changes sign once, at t* below
    t_star = 0.0
    if g > 0 and c0 > 0 and rho * c0 > (rho - g) * r.p0:
        t_star = math.log(rho * c0 / ((rho - g) * r.p0)) / g
    return t_star, r.p0 * math.exp((g - rho) * t_star) - c0 * math.exp(-rho * t_star)


def validate_scenario(s):
    """Check well-posedness and return the (possibly normalized) scenario.

    Iso-elastic revenue with epsilon == 1 is returned as the equivalent
    price-taker scenario.
    """
    if not isinstance(s.revenue, RevenueSpec) or not isinstance(s.cost, CostSpec):
        raise DomainError("scenario needs a RevenueSpec and a CostSpec")
    _finite("rho", s.rho)
    if s.rho <= 0:
        raise DomainError(f"discount rate must be > 0, got rho={s.rho}")
    if isinstance(s.stock, bool) or not isinstance(s.stock, (int, float)) or math.isnan(s.stock):
        raise DomainError(f"stock must be a number, got {s.stock!r}")
    if s.stock < 0 or math.isinf(s.stock):
        raise DomainError(f"stock must be finite and >= 0, got {s.stock}")
    if s.revenue.kind == "drift" and s.revenue.g >= s.rho:
        raise UnboundedObjectiveError(
            f"drift rate g={s.revenue.g} must be below the discount rate rho={s.rho}; "
            "otherwise exp((g - rho) t) does not decay and the objective is unbounded"
        )
    if s.revenue.kind == "iso_elastic" and s.revenue.epsilon == 1.0:
        s = dataclasses.replace(s, revenue=RevenueSpec.price_taker(s.revenue.p0))
    if s.stock > 0 and peak_discounted_profit_at_zero(s)[1] <= 0:
        raise DomainError(
            "marginal profit at zero extraction is never positive; "
            "a positive stock can never be extracted profitably"
        )
    return s
