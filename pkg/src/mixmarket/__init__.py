"""Revenue-optimal pricing for a monopolist facing a free, capacity-limited public option."""

from .distributions import (
    FAMILIES,
    LinearDensity,
    PiecewiseLinear,
    Power,
    RegularDistribution,
    RegularityReport,
    TruncatedExponential,
    TruncatedNormal,
    Uniform,
    check_regularity,
    g_function,
    g_slope,
    hazard_rate,
    make_distribution,
    standard_monopoly_price,
    tail_virtual_surplus,
    virtual_value,
    virtual_value_slope,
)
from .errors import (
    ConvergenceError,
    DegenerateSlopeError,
    DomainError,
    MixMarketError,
    NotRegularError,
    ParameterError,
)
from .general import (
    ComplementOutcome,
    GeneralSolution,
    bertrand_limit_cutoff,
    complement_outcome,
    op_objective,
    solve_general,
)
from .solver import (
    MarketParams,
    MechanismSolution,
    effective_cost,
    foc_residual,
    full_capacity,
    monopoly_only,
    revenue_at_cutoff,
    solve_cutoff,
    solve_mechanism,
)
from .welfare import (
    ConditionReport,
    SweepResult,
    WelfareReport,
    aggregate_consumer_surplus,
    check_condition,
    condition_lhs,
    consumer_surplus,
    ifr_bottom_price_check,
    cutoff_sensitivity,
    entry_gain,
    price_sensitivity,
    producer_surplus_sensitivity,
    rationing_sensitivity,
    sweep,
    welfare_report,
)

__version__ = "0.1.0"
