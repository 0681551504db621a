"""Built-in hiding algorithms, plan handling and the external-plugin protocol."""

from .context import CoverTracker, HidingContext
from .external import EXTENSIONS_DIR, run_plugin
from .plan import apply_plan, greedy_victims, plan_positions, read_plan, sanitize_transactions, write_plan
from .registry import (
    BUILTIN_IDS,
    algorithm_ids,
    hide,
    lookup,
    register,
    register_external,
    scan_extensions,
    unregister,
)
from .types import (
    AlgorithmDescriptor,
    ExternalAlgorithmError,
    HidingError,
    HidingResult,
    PlanError,
    RegistryError,
    SanitizationPlan,
)

__all__ = [
    "AlgorithmDescriptor",
    "BUILTIN_IDS",
    "CoverTracker",
    "EXTENSIONS_DIR",
    "ExternalAlgorithmError",
    "HidingContext",
    "HidingError",
    "HidingResult",
    "PlanError",
    "RegistryError",
    "SanitizationPlan",
    "algorithm_ids",
    "apply_plan",
    "greedy_victims",
    "hide",
    "lookup",
    "plan_positions",
    "read_plan",
    "register",
    "register_external",
    "run_plugin",
    "sanitize_transactions",
    "scan_extensions",
    "unregister",
    "write_plan",
]
