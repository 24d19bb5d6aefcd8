"""Generate a seeded corpus, run the bench harness on it and summarise ratios
and Remnants running time against n.

    python scripts/bench_scaling.py --out-dir runs/bench --count 60
"""

import argparse
import csv
import statistics
import time
from fractions import Fraction
from pathlib import Path

from asymsched.cli import GeneratorSpec, bench_csv, bench_rows, dump_json, generate
from asymsched.remnants import remnants_schedule
from asymsched.taskmodel import instance_from_json


def build_corpus(out_dir: Path, count: int, seed: int) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in range(count):
        n = 4 + k % 9
        s = 2 + k % 3
        m = 2 + k % 3
        spec = GeneratorSpec("chains", n=n, r=1 + (k * 7) % n, seed=seed + k,
                             speeds=(str(s),) + ("1",) * (m - 1))
        path = out_dir / f"chains_{k:03d}.json"
        dump_json(generate(spec), path)
        paths.append(path)
    return paths


def remnants_timing(sizes, seed: int, reps: int = 3):
    rows = []
    for n in sizes:
        spec = GeneratorSpec("chains", n=n, r=max(1, n // 8), seed=seed, speeds=("4", "1", "1", "1"))
        inst = instance_from_json(generate(spec))
        best = min(_timed(remnants_schedule, inst) for _ in range(reps))
        rows.append((n, best))
    return rows


def _timed(fn, *args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", default="runs/bench")
    ap.add_argument("--count", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()

    out = Path(args.out_dir)
    paths = build_corpus(out / "corpus", args.count, args.seed)
    rows = bench_rows(paths, ["remnants", "lp-round", "list", "oracle"], seed=args.seed, trials=args.trials)
    (out / "bench.csv").write_text(bench_csv(rows), encoding="utf-8")

    print(f"{'algo':<10} {'mean ratio':>10} {'max ratio':>10}")
    for algo in ("remnants", "lp-round", "list"):
        ratios = [Fraction(r["ratio_oracle"]) for r in rows if r.get("algo") == algo and r.get("ratio_oracle")]
        if ratios:
            print(f"{algo:<10} {float(statistics.mean(ratios)):>10.4f} {float(max(ratios)):>10.4f}")

    timing = remnants_timing([250, 500, 1000, 2000, 4000], args.seed)
    with open(out / "remnants_timing.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "seconds"])
        w.writerows(timing)
    print("remnants running time")
    for n, sec in timing:
        print(f"  n={n:<6} {sec:.4f}s")


if __name__ == "__main__":
    main()
