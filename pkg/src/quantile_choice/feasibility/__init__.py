from .flow import flow_feasible
from .problem import (
    COL,
    ROW,
    FeasibilityProblem,
    MassConstraint,
    MatchingLottery,
    PrefixBound,
    cross_check_feasibility,
    lp_feasible,
    lp_feasible_voting,
    min_rank_for_agent,
    rank_bound,
    solve_constraints,
)
from .simplex import LinearProgram, LPResult, solve

__all__ = [
    "COL",
    "ROW",
    "FeasibilityProblem",
    "LPResult",
    "LinearProgram",
    "MassConstraint",
    "MatchingLottery",
    "PrefixBound",
    "cross_check_feasibility",
    "flow_feasible",
    "lp_feasible",
    "lp_feasible_voting",
    "min_rank_for_agent",
    "rank_bound",
    "solve",
    "solve_constraints",
]
