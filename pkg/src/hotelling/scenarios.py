"""Bundled scenario suite used by the tests, the acceptance run and the docs."""

import math

from .econ import CostSpec, RevenueSpec, ScenarioSpec

BENCHMARK = ScenarioSpec(
    RevenueSpec.price_taker(2.0), CostSpec.quadratic(1.0, 1.0), rho=1.0, stock=math.exp(-1), label="benchmark"
)
DRIFT = ScenarioSpec(RevenueSpec.drift(2.0, 0.3), CostSpec.quadratic(1.0, 1.0), 1.0, math.exp(-1), "drift g=0.3")
ISO = ScenarioSpec(RevenueSpec.iso_elastic(1.0, 0.5), CostSpec.quadratic(0.0, 1.0), 1.0, 1.0, "iso eps=0.5")


def _s(label, revenue, cost, rho, stock):
    return ScenarioSpec(revenue, cost, rho, stock, label)


SUITE = {
    s.label: s
    for s in [
        BENCHMARK,
        _s("price_taker power", RevenueSpec.price_taker(3.0), CostSpec.power(1.0, 3.5), 0.5, 2.0),
        _s("price_taker steep", RevenueSpec.price_taker(5.0), CostSpec.quadratic(0.5, 4.0), 0.05, 10.0),
        DRIFT,
        _s("drift negative g", RevenueSpec.drift(1.5, -0.2), CostSpec.quadratic(0.2, 0.5), 0.8, 1.0),
        _s("drift delayed onset", RevenueSpec.drift(1.0, 0.5), CostSpec.quadratic(0.9, 1.0), 1.0, 0.1),
        _s("drift power", RevenueSpec.drift(1.0, 0.1), CostSpec.power(0.5, 2.0), 0.3, 3.0),
        ISO,
        _s("iso eps=0.8 power", RevenueSpec.iso_elastic(2.0, 0.8), CostSpec.power(1.0, 3.0), 1.0, 1.0),
        _s("iso eps=0.3", RevenueSpec.iso_elastic(1.0, 0.3), CostSpec.quadratic(0.5, 2.0), 0.5, 2.0),
        _s("linear_demand quadratic", RevenueSpec.linear_demand(3.0, 0.5), CostSpec.quadratic(1.0, 1.0), 1.0, 1.0),
        _s("linear_demand power", RevenueSpec.linear_demand(3.0, 0.5), CostSpec.power(1.0, 2.5), 1.0, 1.0),
        _s("linear_demand flat", RevenueSpec.linear_demand(4.0, 0.0), CostSpec.power(2.0, 1.5), 0.2, 5.0),
    ]
}

# sweeps over the three claimed directions, stock held fixed within each sweep
CLAIM_SWEEPS = (
    (ISO, "epsilon", (0.5, 0.7, 0.9)),
    (BENCHMARK, "g", (0.0, 0.2, 0.4)),
    (BENCHMARK, "rho", (0.5, 1.0, 2.0)),
)
