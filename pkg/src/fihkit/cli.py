"""``fihkit`` command line: mine, sample, hide, eval and run."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .borders import expand_sensitive, revised_frequent
from .dataset import DatasetError, _atomic_write, parse_database, parse_itemset_file, write_database
from .harness import (
    AXES,
    X_MODES,
    Failure,
    ReportBundle,
    RunOptions,
    discover_scenarios,
    emit_plot_data,
    format_text,
    one_line,
    run_experiment,
    sample_sensitive,
    write_reports,
    write_sensitive,
)
from .hiding import (
    EXTENSIONS_DIR,
    HidingError,
    HidingResult,
    SanitizationPlan,
    algorithm_ids,
    apply_plan,
    hide,
    read_plan,
    scan_extensions,
    write_plan,
)
from .metrics import evaluate
from .miner import mine_frequent, resolve_sigma

log = logging.getLogger("fihkit")


def _add_common(p, *, sensitive=False, sigma=True):
    p.add_argument("--input", required=True, help="transaction file (or scenario root for run)")
    if sensitive:
        p.add_argument("--sensitive", required=True, help="file of sensitive itemsets, one per line")
    if sigma:
        p.add_argument("--min-support", required=True, help="absolute count, or a fraction in (0, 1]")


def _algorithms(text: str) -> list:
    if text.strip() == "all":
        return algorithm_ids()
    ids = [a.strip() for a in text.split(",") if a.strip()]
    known = set(algorithm_ids())
    unknown = [a for a in ids if a not in known]
    if unknown:
        raise SystemExit(f"fihkit: unknown algorithm(s): {', '.join(unknown)}; known: {', '.join(sorted(known))}")
    return ids


def _axes(text: str) -> list:
    if text.strip() == "all":
        return list(AXES)
    axes = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in axes if a not in AXES]
    if bad:
        raise SystemExit(f"fihkit: unknown plot axis {', '.join(bad)}; expected {', '.join(AXES)} or all")
    return axes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fihkit", description="Frequent itemset hiding toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--extensions", type=Path, default=None,
                        help=f"plugin directory to scan (default ./{EXTENSIONS_DIR})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="list frequent itemsets")
    _add_common(p)
    p.add_argument("--output-dir", type=Path, help="write frequent.txt here instead of stdout")

    p = sub.add_parser("sample", help="draw random sensitive itemsets")
    _add_common(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, help="sensitive file to write (default stdout)")

    p = sub.add_parser("hide", help="sanitize one database with one or more algorithms")
    _add_common(p, sensitive=True)
    p.add_argument("--algorithms", default="all")
    p.add_argument("--output-dir", type=Path, required=True)
    p.add_argument("--solver-budget", type=float, default=None, help="seconds per integer program")
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry; hiding is deterministic")

    p = sub.add_parser("eval", help="score a deletion plan")
    _add_common(p, sensitive=True)
    p.add_argument("--plan", type=Path, required=True, help="file of 'tid item' lines")
    p.add_argument("--output-dir", type=Path)
    p.add_argument("--items-only", action="store_true", help="information loss over single items")

    p = sub.add_parser("run", help="run algorithms over a Datasets/<name>/<sigma>/<file> tree")
    p.add_argument("--input", required=True, type=Path, help="scenario root")
    p.add_argument("--algorithms", default="all")
    p.add_argument("--output-dir", type=Path, required=True)
    p.add_argument("--solver-budget", type=float, default=None)
    p.add_argument("--plot", default=None, help=f"comma list of {', '.join(AXES)} or all")
    p.add_argument("--x", default="auto", choices=X_MODES, help="x axis of plot files")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--write-sanitized", action="store_true")
    p.add_argument("--items-only", action="store_true")
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry; runs are deterministic")
    return parser


def _load(args):
    db = parse_database(args.input)
    sigma = resolve_sigma(args.min_support, db.n_transactions)
    return db, sigma


def cmd_mine(args) -> int:
    db, sigma = _load(args)
    freq = mine_frequent(db, sigma)
    text = "".join(" ".join(map(str, x)) + f" #SUP: {c}\n" for x, c in freq.items())
    if args.output_dir:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write(args.output_dir / "frequent.txt", text)
        print(f"{len(freq)} frequent itemsets at sigma_min={sigma}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_sample(args) -> int:
    db, sigma = _load(args)
    picked = sample_sensitive(db, sigma, args.count, args.seed)
    if args.output:
        write_sensitive(picked, args.output)
    else:
        sys.stdout.write("".join(" ".join(map(str, x)) + "\n" for x in picked))
    return 0


def _prework(db, sensitive, sigma):
    freq = mine_frequent(db, sigma)
    return freq, revised_frequent(freq, expand_sensitive(freq, sensitive))


def cmd_hide(args) -> int:
    db, sigma = _load(args)
    sensitive = parse_itemset_file(args.sensitive)
    algs = _algorithms(args.algorithms)
    freq, revised = _prework(db, sensitive, sigma)
    bundle = ReportBundle(run_config={"algorithms": algs, "scenarios": ["cli"]}, sizes={"cli": len(sensitive)}, sigmas={"cli": sigma})
    out = args.output_dir
    out.mkdir(parents=True, exist_ok=True)
    params = {} if args.solver_budget is None else {"budget": args.solver_budget}
    suffix = Path(args.input).suffix or ".dat"
    for a in algs:
        try:
            result = hide(a, db, sensitive, sigma, frequent=freq, **params)
        except HidingError as exc:
            log.error("%s", exc)
            bundle.failures.append(Failure(a, "cli", one_line(exc)))
            result = getattr(exc, "result", None)
            if result is None:
                continue
        write_database(result.sanitized, out / f"{a}{suffix}")
        write_plan(result.plan, out / f"{a}.plan")
        for note in result.notes:
            log.info("%s: %s", a, note)
        bundle.reports.append(evaluate(db, result, freq, revised, sigma, "cli"))
    write_reports(bundle, out)
    sys.stdout.write((out / "report.txt").read_text(encoding="utf-8"))
    return 0 if bundle.all_hidden else 1


def cmd_eval(args) -> int:
    db, sigma = _load(args)
    sensitive = parse_itemset_file(args.sensitive)
    pairs = read_plan(args.plan)
    plan = SanitizationPlan(pairs, algorithm_id=args.plan.stem)
    result = HidingResult(plan, apply_plan(db, plan))
    freq, revised = _prework(db, sensitive, sigma)
    report = evaluate(db, result, freq, revised, sigma, "cli", args.items_only)
    bundle = ReportBundle([report], run_config={"algorithms": [plan.algorithm_id], "scenarios": ["cli"]},
                          sizes={"cli": len(sensitive)}, sigmas={"cli": sigma})
    if args.output_dir:
        write_reports(bundle, args.output_dir)
    sys.stdout.write(format_text(bundle))
    return 0 if report.hidden_ok else 1


def cmd_run(args) -> int:
    scenarios = discover_scenarios(args.input)
    algs = _algorithms(args.algorithms)
    axes = _axes(args.plot) if args.plot else []
    opts = RunOptions(args.output_dir, args.write_sanitized, args.workers, args.solver_budget, args.items_only)
    bundle = run_experiment(scenarios, algs, opts)
    for axis in axes:
        emit_plot_data(bundle, axis, args.output_dir, args.x)
    sys.stdout.write((args.output_dir / "report.txt").read_text(encoding="utf-8"))
    if not scenarios:
        log.warning("no scenarios found under %s", args.input)
    return 0 if bundle.all_hidden else 1


COMMANDS = {"mine": cmd_mine, "sample": cmd_sample, "hide": cmd_hide, "eval": cmd_eval, "run": cmd_run}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    scan_extensions(args.extensions)
    try:
        return COMMANDS[args.command](args)
    except (DatasetError, OSError, ValueError) as exc:
        print(f"fihkit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
