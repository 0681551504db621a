"""Compare the numba kernels with their numpy twins.

Two views: kernel calls on inputs taken from a real dataset, and the
end-to-end miner run in a subprocess with and without FIHKIT_DISABLE_NUMBA.

    python benchmarks/bench_kernels.py --dataset data/mushroom.dat --min-support 1625
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from fihkit import mine_frequent, parse_database, resolve_sigma
from fihkit.dataset import encode_itemsets, pack_bitsets
from fihkit.kernels import load_backend


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(db, frequent):
    ptr, rows = db._item_major
    bits = pack_bitsets(ptr, rows, db.n_transactions)
    itemsets = list(frequent)
    iptr, icodes = encode_itemsets(db, itemsets)
    pairs = [x for x in itemsets if len(x) == 1]
    level = np.arange(len(pairs), dtype=np.int32).reshape(-1, 1)
    n = db.n_transactions
    return {
        "bitset_supports": lambda k: k.bitset_supports(bits, iptr, icodes),
        "tidlist_supports": lambda k: k.tidlist_supports(ptr, rows, iptr, icodes),
        "bitset_cover_hist": lambda k: k.bitset_cover_hist(bits, iptr, icodes, n),
        "tidlist_cover_hist": lambda k: k.tidlist_cover_hist(ptr, rows, iptr, icodes, n),
        "join_level(k=1)": lambda k: k.join_level(level),
    }


def end_to_end(path, sigma, disable):
    env = dict(os.environ)
    env.pop("FIHKIT_DISABLE_NUMBA", None)
    if disable:
        env["FIHKIT_DISABLE_NUMBA"] = "1"
    code = (
        "import time; from fihkit import parse_database, mine_frequent;"
        f"db = parse_database({str(path)!r}); mine_frequent(db, {sigma});"
        f"t = time.perf_counter(); f = mine_frequent(db, {sigma}); print(time.perf_counter() - t, len(f))"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    took, count = out.stdout.split()
    return float(took), int(count)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dataset", default="data/mushroom.dat")
    ap.add_argument("--min-support", default="0.2")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-mining", action="store_true", help="kernel timings only")
    args = ap.parse_args(argv)

    db = parse_database(args.dataset)
    sigma = resolve_sigma(args.min_support, db.n_transactions)
    frequent = mine_frequent(db, sigma)
    print(f"{args.dataset}: {db.n_transactions} transactions, sigma_min={sigma}, {len(frequent)} frequent itemsets")

    fast, slow = load_backend("numba"), load_backend("numpy")
    print(f"{'kernel':<22}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, call in kernel_cases(db, frequent).items():
        call(fast)  # compile outside the timing
        a = best_of(lambda: call(fast), args.repeat)
        b = best_of(lambda: call(slow), args.repeat)
        print(f"{name:<22}{a:>10.4f}{b:>10.4f}{b / a if a else float('inf'):>8.1f}x")

    if not args.skip_mining:
        a, n1 = end_to_end(args.dataset, sigma, disable=False)
        b, n2 = end_to_end(args.dataset, sigma, disable=True)
        assert n1 == n2, "backends disagree on the frequent itemset count"
        print(f"{'mine_frequent':<22}{a:>10.4f}{b:>10.4f}{b / a if a else float('inf'):>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
