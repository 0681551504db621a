"""Algorithm registry and the ``hide`` entry point."""

from __future__ import annotations

import functools
import logging
import time
from pathlib import Path
from typing import Callable

from ..miner import support_map
from .context import HidingContext
from .external import EXTENSIONS_DIR, discover_plugins, run_plugin
from .heuristics import maxmin1, maxmin2, wba
from .ilp_based import coeff_max_accuracy, heuristic_coeff, inline, max_accuracy
from .plan import apply_plan
from .types import (
    AlgorithmDescriptor,
    ExternalAlgorithmError,
    HidingError,
    HidingResult,
    RegistryError,
    SanitizationPlan,
)

log = logging.getLogger(__name__)

_REGISTRY: dict = {}


def register(desc: AlgorithmDescriptor, fn: Callable, replace: bool = False) -> AlgorithmDescriptor:
    if desc.id in _REGISTRY and not replace:
        raise RegistryError(f"algorithm id {desc.id!r} already registered")
    _REGISTRY[desc.id] = (desc, fn)
    return desc


def unregister(algorithm_id: str) -> None:
    _REGISTRY.pop(algorithm_id, None)


def lookup(algorithm) -> tuple:
    key = algorithm.id if isinstance(algorithm, AlgorithmDescriptor) else str(algorithm)
    try:
        return _REGISTRY[key]
    except KeyError:
        raise RegistryError(f"unknown algorithm {key!r}; known: {', '.join(algorithm_ids())}") from None


def algorithm_ids(kind: str | None = None) -> list:
    return [k for k, (d, _) in _REGISTRY.items() if kind is None or d.kind == kind]


BUILTIN_IDS = ("maxmin1", "maxmin2", "wba", "max-accuracy", "coeff-max-accuracy", "heuristic-coeff", "inline")

for _id, _kind, _fn in (
    ("maxmin1", "border-heuristic", maxmin1),
    ("maxmin2", "border-heuristic", maxmin2),
    ("wba", "border-heuristic", wba),
    ("max-accuracy", "ilp", max_accuracy),
    ("coeff-max-accuracy", "ilp", coeff_max_accuracy),
    ("heuristic-coeff", "ilp", heuristic_coeff),
    ("inline", "hybrid", inline),
):
    register(AlgorithmDescriptor(_id, _kind), _fn)


def register_external(path, algorithm_id: str | None = None, replace: bool = False, **params) -> AlgorithmDescriptor:
    """Register an executable (or ``.py`` script) speaking the plugin protocol."""
    path = Path(path).resolve()
    if not path.is_file():
        raise FileNotFoundError(f"plugin not found: {path}")
    algorithm_id = algorithm_id or path.stem
    desc = AlgorithmDescriptor(algorithm_id, "external", {"path": str(path), **params})
    return register(desc, functools.partial(run_plugin, path), replace=replace)


def scan_extensions(directory=None) -> list:
    """Register every plugin in ``directory`` (default ``./Extensions``); returns descriptors."""
    directory = Path(directory) if directory is not None else Path.cwd() / EXTENSIONS_DIR
    out = []
    for path in discover_plugins(directory):
        if path.stem in BUILTIN_IDS:
            log.warning("skipping plugin %s: id collides with a built-in algorithm", path.name)
            continue
        out.append(register_external(path, replace=True))
    return out


def hide(algorithm, db, sensitive, sigma_min: int, frequent=None, **params) -> HidingResult:
    """Run one algorithm and return its plan and the sanitized database.

    Timing (monotonic wall clock) covers everything the algorithm needs,
    border computation and model building included. Mining is included too
    unless a shared ``frequent`` set is passed. The result is checked for
    hiding completeness.
    """
    if sigma_min < 1:
        raise ValueError(f"sigma_min must be >= 1, got {sigma_min}")
    desc, fn = lookup(algorithm)
    options = {**desc.options, **params}
    options.pop("path", None)
    wall0 = time.perf_counter()
    ctx = HidingContext(db, sensitive, sigma_min, frequent)
    notes = [f"already hidden: {s}" for s in ctx.already_hidden]
    if not ctx.sensitive.itemsets:
        notes.append("no sensitive itemsets; nothing to hide")
    if ctx.targets:
        try:
            plan, extra = fn(ctx, **options)
        except (HidingError, RegistryError):
            raise
        except Exception as exc:
            raise HidingError(f"{desc.id}: {type(exc).__name__}: {exc}") from exc
        notes.extend(extra)
    else:
        plan = SanitizationPlan()
    sanitized = apply_plan(db, plan)
    wall = time.perf_counter() - wall0
    plan.algorithm_id = desc.id
    plan.wall_time = wall
    leaks = {s: c for s, c in support_map(sanitized, ctx.targets).items() if c >= sigma_min}
    if leaks:
        err = ExternalAlgorithmError if desc.kind == "external" else HidingError
        exc = err(f"{desc.id}: sensitive itemsets still frequent: {sorted(leaks.items())[:5]}")
        exc.result = HidingResult(plan, sanitized, notes)  # still worth evaluating
        raise exc
    return HidingResult(plan, sanitized, notes)
