"""Scenario discovery, experiment runs, reports and plot data."""

from __future__ import annotations

import csv
import io
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .borders import expand_sensitive, revised_frequent
from .dataset import _atomic_write, parse_database, parse_itemset_file, write_database, write_itemsets
from .hiding import AlgorithmDescriptor, HidingError, hide, lookup, register_external
from .metrics import MetricsReport, evaluate
from .miner import FrequentSet, itemset_order, mine_frequent, resolve_sigma

log = logging.getLogger(__name__)

AXES = ("changes", "side-effects", "cpu-time", "information-loss")
X_MODES = ("auto", "sigma", "size", "scenario")


# ------------------------------------------------------------- scenarios
@dataclass(frozen=True)
class Scenario:
    dataset_path: Path
    sensitive_path: Path
    sigma_min: int | Fraction
    id: str

    @property
    def sigma_label(self) -> str:
        return self.id.split("/")[1]


def parse_sigma_dir(name: str) -> int | Fraction:
    """A directory name as a threshold: fraction if it has a ``.``, else a count."""
    if "." in name:
        frac = Fraction(name)
        if not 0 < frac <= 1:
            raise ValueError(f"fractional threshold {name!r} outside (0, 1]")
        return frac
    if not re.fullmatch(r"\d+", name) or int(name) < 1:
        raise ValueError(f"threshold directory {name!r} is neither a count nor a fraction")
    return int(name)


def discover_scenarios(root) -> list[Scenario]:
    """Walk ``Datasets/<name>/<sigma>/<hiding-file>`` under ``root``.

    ``root`` may be the ``Datasets`` directory itself or its parent. The
    dataset file is ``<name>.<ext>`` directly inside ``<name>``. Broken
    entries are skipped with a warning.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"scenario root not found: {root}")
    base = root / "Datasets" if (root / "Datasets").is_dir() else root
    out = []
    for ddir in sorted(p for p in base.iterdir() if p.is_dir()):
        data = sorted(p for p in ddir.iterdir() if p.is_file() and p.stem == ddir.name)
        if not data:
            log.warning("skipping %s: no dataset file named %s.<ext>", ddir, ddir.name)
            continue
        if len(data) > 1:
            log.warning("%s: several dataset files, using %s", ddir, data[0].name)
        for sdir in sorted(p for p in ddir.iterdir() if p.is_dir()):
            try:
                sigma = parse_sigma_dir(sdir.name)
            except ValueError as exc:
                log.warning("skipping %s: %s", sdir, exc)
                continue
            for hs in sorted(p for p in sdir.iterdir() if p.is_file()):
                out.append(Scenario(data[0], hs, sigma, f"{ddir.name}/{sdir.name}/{hs.stem}"))
    return out


def sample_sensitive(db, sigma_min: int, k: int, seed: int, frequent: FrequentSet | None = None) -> list:
    """``k`` frequent itemsets of length >= 2, drawn uniformly without replacement."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return []
    frequent = frequent if frequent is not None else mine_frequent(db, sigma_min)
    eligible = [x for x in frequent if len(x) >= 2]
    if len(eligible) < k:
        raise ValueError(f"only {len(eligible)} frequent itemsets of length >= 2 at sigma_min={sigma_min}; {k} requested")
    picks = np.random.default_rng(seed).choice(len(eligible), size=k, replace=False)
    return sorted((eligible[i] for i in picks.tolist()), key=itemset_order)


# ------------------------------------------------------------- running
@dataclass(frozen=True)
class Failure:
    algorithm_id: str
    scenario_id: str
    error: str


@dataclass
class RunOptions:
    output_dir: Path | None = None
    write_sanitized: bool = False
    workers: int = 1
    solver_budget: float | None = None
    items_only: bool = False


@dataclass
class ReportBundle:
    reports: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    sanitized_outputs: dict = field(default_factory=dict)
    run_config: dict = field(default_factory=dict)
    sizes: dict = field(default_factory=dict)  # scenario id -> number of sensitive itemsets
    sigmas: dict = field(default_factory=dict)  # scenario id -> resolved count

    @property
    def all_hidden(self) -> bool:
        return not self.failures and all(r.hidden_ok for r in self.reports)


@dataclass
class _Job:
    desc: AlgorithmDescriptor
    db: object
    sensitive: list
    sigma: int
    frequent: FrequentSet
    revised: FrequentSet
    scenario_id: str
    budget: float | None
    items_only: bool
    sanitized_path: Path | None


def _run_job(job: _Job):
    desc = job.desc
    if desc.kind == "external":
        try:
            lookup(desc)
        except KeyError:
            register_external(desc.options["path"], desc.id)
    params = {} if job.budget is None else {"budget": job.budget}
    try:
        result = hide(desc, job.db, job.sensitive, job.sigma, frequent=job.frequent, **params)
        failure = None
    except HidingError as exc:
        result = getattr(exc, "result", None)
        failure = Failure(desc.id, job.scenario_id, one_line(exc))
        if result is None:
            return None, failure, None
    except Exception as exc:  # isolation: nothing escapes a single run
        return None, Failure(desc.id, job.scenario_id, one_line(exc)), None
    report = evaluate(job.db, result, job.frequent, job.revised, job.sigma, job.scenario_id, job.items_only)
    written = None
    if job.sanitized_path is not None:
        job.sanitized_path.parent.mkdir(parents=True, exist_ok=True)
        write_database(result.sanitized, job.sanitized_path)
        written = job.sanitized_path
    return report, failure, written


def one_line(exc) -> str:
    text = f"{type(exc).__name__}: {exc}"
    return " ".join(text.split())


def _descriptors(algorithms: Sequence) -> list:
    return [a if isinstance(a, AlgorithmDescriptor) else lookup(a)[0] for a in algorithms]


def run_experiment(scenarios: Sequence[Scenario], algorithms: Sequence, options: RunOptions | None = None) -> ReportBundle:
    """Run every algorithm on every scenario and evaluate the results.

    Per scenario, the database is parsed and mined once and the revised
    frequent set derived once; those are shared by all runs. One failing
    run never affects the others. Reports come out in scenario order, then
    in the order ``algorithms`` were given, whatever the worker count.
    """
    options = options or RunOptions()
    descs = _descriptors(algorithms)
    bundle = ReportBundle(run_config={
        "algorithms": [d.id for d in descs],
        "scenarios": [s.id for s in scenarios],
        "solver_budget": options.solver_budget,
        "workers": options.workers,
        "items_only": options.items_only,
    })
    if not descs:
        return bundle
    jobs = []
    for sc in scenarios:
        try:
            db = parse_database(sc.dataset_path)
            sensitive = parse_itemset_file(sc.sensitive_path)
            sigma = resolve_sigma(sc.sigma_min, db.n_transactions)
            frequent = mine_frequent(db, sigma)
            revised = revised_frequent(frequent, expand_sensitive(frequent, sensitive))
        except Exception as exc:
            bundle.failures.append(Failure("*", sc.id, one_line(exc)))
            continue
        bundle.sizes[sc.id] = len(sensitive)
        bundle.sigmas[sc.id] = sigma
        for d in descs:
            out = None
            if options.write_sanitized and options.output_dir is not None:
                out = Path(options.output_dir) / "sanitized" / sc.id.replace("/", "_") / f"{d.id}{sc.dataset_path.suffix or '.dat'}"
            jobs.append(_Job(d, db, sensitive, sigma, frequent, revised, sc.id, options.solver_budget, options.items_only, out))

    if options.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=options.workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]
    for job, (report, failure, written) in zip(jobs, results):
        if report is not None:
            bundle.reports.append(report)
        if failure is not None:
            bundle.failures.append(failure)
        if written is not None:
            bundle.sanitized_outputs[(job.scenario_id, job.desc.id)] = written
    if options.output_dir is not None:
        write_reports(bundle, options.output_dir)
    return bundle


# ------------------------------------------------------------- reports
REPORT_COLUMNS = (
    "scenario_id", "algorithm_id", "sigma_min", "sensitive", "status",
    "raw_changes", "side_effects", "information_loss", "hidden_ok", "error", "cpu_time",
)


def _il_text(il) -> str:
    return f"{float(il):.6f}"


def report_rows(bundle: ReportBundle) -> list:
    rows = []
    for r in bundle.reports:
        failed = next((f for f in bundle.failures if f.algorithm_id == r.algorithm_id and f.scenario_id == r.scenario_id), None)
        rows.append({
            "scenario_id": r.scenario_id,
            "algorithm_id": r.algorithm_id,
            "sigma_min": bundle.sigmas.get(r.scenario_id, ""),
            "sensitive": bundle.sizes.get(r.scenario_id, ""),
            "status": "failed" if failed else "ok",
            "raw_changes": r.raw_changes,
            "side_effects": r.side_effects,
            "information_loss": _il_text(r.information_loss),
            "hidden_ok": str(r.hidden_ok).lower(),
            "error": failed.error if failed else "",
            "cpu_time": f"{r.cpu_time:.3f}",
        })
    reported = {(r.scenario_id, r.algorithm_id) for r in bundle.reports}
    for f in bundle.failures:
        if (f.scenario_id, f.algorithm_id) in reported:
            continue
        rows.append({
            "scenario_id": f.scenario_id, "algorithm_id": f.algorithm_id,
            "sigma_min": bundle.sigmas.get(f.scenario_id, ""), "sensitive": bundle.sizes.get(f.scenario_id, ""),
            "status": "failed", "raw_changes": "", "side_effects": "", "information_loss": "",
            "hidden_ok": "false", "error": f.error, "cpu_time": "",
        })
    order = {sid: k for k, sid in enumerate(bundle.run_config.get("scenarios", []))}
    algs = {a: k for k, a in enumerate(bundle.run_config.get("algorithms", []))}
    rows.sort(key=lambda r: (order.get(r["scenario_id"], len(order)), algs.get(r["algorithm_id"], -1)))
    return rows


def format_csv(bundle: ReportBundle) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(report_rows(bundle))
    return buf.getvalue()


def format_text(bundle: ReportBundle) -> str:
    rows = report_rows(bundle)
    cols = [c for c in REPORT_COLUMNS if c != "error"]
    heads = {c: c.replace("_", " ") for c in cols}
    width = {c: max([len(heads[c])] + [len(str(r[c])) for r in rows]) for c in cols}
    lines = ["Frequent itemset hiding report", ""]
    lines.append("  ".join(heads[c].ljust(width[c]) for c in cols).rstrip())
    lines.append("  ".join("-" * width[c] for c in cols))
    for r in rows:
        lines.append("  ".join(str(r[c]).ljust(width[c]) for c in cols).rstrip())
    errs = [r for r in rows if r["error"]]
    if errs:
        lines += ["", "Failures"]
        lines += [f"  {r['scenario_id']} {r['algorithm_id']}: {r['error']}" for r in errs]
    return "\n".join(lines) + "\n"


def write_reports(bundle: ReportBundle, output_dir) -> tuple[Path, Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    txt, csv_path = out / "report.txt", out / "report.csv"
    _atomic_write(txt, format_text(bundle))
    _atomic_write(csv_path, format_csv(bundle))
    return txt, csv_path


# ------------------------------------------------------------- plot data
def _metric(report: MetricsReport, axis: str) -> str:
    if axis == "changes":
        return str(report.raw_changes)
    if axis == "side-effects":
        return str(report.side_effects)
    if axis == "cpu-time":
        return f"{report.cpu_time:.3f}"
    return f"{float(report.information_loss) * 100:.2f}"


def _x_mode(bundle: ReportBundle, mode: str) -> str:
    if mode != "auto":
        return mode
    ids = bundle.run_config.get("scenarios", [])
    ids = [s for s in ids if s in bundle.sizes]
    sizes = [bundle.sizes[s] for s in ids]
    sigmas = [bundle.sigmas[s] for s in ids]
    if len(set(sigmas)) == len(ids) and len(set(sizes)) <= 1:
        return "sigma"
    if len(set(sizes)) == len(ids) and len(set(sigmas)) <= 1:
        return "size"
    return "scenario"


def plot_table(bundle: ReportBundle, axis: str, x: str = "auto") -> str:
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {', '.join(AXES)}")
    if x not in X_MODES:
        raise ValueError(f"unknown x grouping {x!r}; expected one of {', '.join(X_MODES)}")
    mode = _x_mode(bundle, x)
    algs = [a for a in bundle.run_config.get("algorithms", [])]
    label = {"sigma": "sigma_min", "size": "sensitive_itemsets", "scenario": "scenario"}[mode]
    by_key = {(r.scenario_id, r.algorithm_id): r for r in bundle.reports}
    scen = [s for s in bundle.run_config.get("scenarios", []) if s in bundle.sizes]
    if mode == "sigma":
        scen.sort(key=lambda s: bundle.sigmas[s])
    elif mode == "size":
        scen.sort(key=lambda s: bundle.sizes[s])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([label] + algs)
    for s in scen:
        xval = {"sigma": bundle.sigmas[s], "size": bundle.sizes[s], "scenario": s}[mode]
        w.writerow([xval] + [_metric(by_key[(s, a)], axis) if (s, a) in by_key else "" for a in algs])
    return buf.getvalue()


def emit_plot_data(bundle: ReportBundle, axis: str, output_dir, x: str = "auto") -> Path:
    """Write ``plot-<axis>.csv``: one row per scenario, one column per algorithm."""
    text = plot_table(bundle, axis, x)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"plot-{axis}.csv"
    _atomic_write(path, text)
    return path


def write_sensitive(itemsets, path) -> None:
    write_itemsets(itemsets, path)
