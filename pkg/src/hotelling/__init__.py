"""Optimal depletion of an exhaustible stock under Hotelling-type models."""

from .econ import (
    CostSpec,
    RevenueSpec,
    ScenarioSpec,
    inverse_marginal_cost,
    marginal_cost,
    marginal_revenue,
    validate_scenario,
)
from .lab import (
    CountrySpec,
    SweepResult,
    front_load_time,
    hotelling_residual,
    multi_country_solve,
    qualitative_checks,
    sweep,
)
from .oracle import DiscretePath, compare_paths, solve_discrete
from .solver import (
    ExtractionPath,
    GridSpec,
    cumulative_extraction,
    exhaustion_time,
    extraction_rate_at,
    present_value,
    solve_path,
    solve_shadow_price,
)

__version__ = "0.1.0"
