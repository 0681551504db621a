"""Out-of-process algorithms speaking the file-based plugin protocol.

A plugin is invoked as ``<exe> <db-path> <sensitive-path> <sigma-min> <out-plan-path>``
and must write ``tid item`` lines to the plan path and exit 0.
Files ending in ``.py`` are run with the current interpreter.
"""

from __future__ import annotations

import os
import subprocess
import sys
import tempfile
from pathlib import Path

from ..dataset import write_database, write_itemsets
from .context import HidingContext
from .plan import plan_positions, read_plan
from .types import ExternalAlgorithmError, PlanError, SanitizationPlan

EXTENSIONS_DIR = "Extensions"


def plugin_command(path: Path) -> list:
    path = Path(path)
    if path.suffix == ".py":
        return [sys.executable, str(path)]
    return [str(path)]


def is_plugin(path: Path) -> bool:
    path = Path(path)
    if not path.is_file() or path.name.startswith((".", "_")):
        return False
    return path.suffix == ".py" or os.access(path, os.X_OK)


def run_plugin(path, ctx: HidingContext, timeout: float | None = None, **_):
    """Run one plugin on ``ctx`` and return its validated plan."""
    path = Path(path)
    with tempfile.TemporaryDirectory(prefix="fihkit-ext-") as tmp:
        tmp = Path(tmp)
        db_path, sens_path, out_path = tmp / "database.dat", tmp / "sensitive.dat", tmp / "plan.txt"
        write_database(ctx.db, db_path)
        write_itemsets(ctx.sensitive.itemsets, sens_path)
        cmd = plugin_command(path) + [str(db_path), str(sens_path), str(ctx.sigma_min), str(out_path)]
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired as exc:
            raise ExternalAlgorithmError(f"{path.name}: timed out after {timeout}s") from exc
        except OSError as exc:
            raise ExternalAlgorithmError(f"{path.name}: cannot execute ({exc})") from exc
        if proc.returncode != 0:
            tail = proc.stderr.strip()[-500:].replace(str(tmp), "<tmp>")
            raise ExternalAlgorithmError(
                f"{path.name}: exited with status {proc.returncode}: {tail}",
                proc.stdout, proc.stderr, proc.returncode,
            )
        if not out_path.exists():
            raise ExternalAlgorithmError(f"{path.name}: no plan file written", proc.stdout, proc.stderr, 0)
        try:
            pairs = read_plan(out_path)
            plan_positions(ctx.db, pairs)
        except PlanError as exc:
            msg = str(exc).replace(str(out_path), "plan")
            raise ExternalAlgorithmError(f"{path.name}: invalid plan: {msg}", proc.stdout, proc.stderr, 0) from exc
    notes = [f"{path.name}: {line}".replace(str(tmp), "<tmp>") for line in proc.stderr.strip().splitlines()[-5:]]
    return SanitizationPlan(pairs), notes


def discover_plugins(directory) -> list:
    directory = Path(directory)
    if not directory.is_dir():
        return []
    return sorted(p for p in directory.iterdir() if is_plugin(p))
