from .branch_bound import BUDGET_ENV, DEFAULT_BUDGET, NO_INCUMBENT, default_budget, round_up, solve_ilp
from .builders import (
    CellModel,
    NothingToHide,
    build_cell_model,
    build_transaction_model,
    hideable,
    solve_cell_model,
)
from .model import (
    FEAS_TOL,
    INFEASIBLE,
    INT_TOL,
    OPTIMAL,
    TIMEOUT,
    Constraint,
    LinearModel,
    LPTimeout,
    ModelError,
    Solution,
    UnboundedError,
)
from .simplex import dense_simplex, solve_lp

__all__ = [
    "BUDGET_ENV",
    "CellModel",
    "Constraint",
    "DEFAULT_BUDGET",
    "FEAS_TOL",
    "INFEASIBLE",
    "INT_TOL",
    "LinearModel",
    "LPTimeout",
    "ModelError",
    "NO_INCUMBENT",
    "NothingToHide",
    "OPTIMAL",
    "Solution",
    "TIMEOUT",
    "UnboundedError",
    "build_cell_model",
    "build_transaction_model",
    "default_budget",
    "dense_simplex",
    "hideable",
    "round_up",
    "solve_cell_model",
    "solve_ilp",
    "solve_lp",
]
