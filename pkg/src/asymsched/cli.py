"""Command-line front end.

Exit codes: 0 ok, 1 validation failure, 2 usage or input error, 3 size guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import bounds as bnd
from .errors import InvalidInstance, InvalidSegment, ScheduleError, SchedulingError, SizeLimitExceeded
from .lprelax import RoundingConfig, build_mip, greedy_list_schedule, rounding_pipeline, solve_lp
from .oracle import asymmetrize, exact_optimal_schedule
from .remnants import remnants_schedule
from .save_energy import save_energy
from .schedule import energy, gantt, load_schedule, makespan, validate
from .taskmodel import (
    EnergyParams,
    Instance,
    MachineConfig,
    instance_from_json,
    load_instance,
    parse_rational,
    validate_dag,
)

ALGOS = ("remnants", "lp-round", "list", "oracle")
BENCH_COLUMNS = [
    "instance", "algo", "n", "m", "makespan", "max_lower", "oracle", "ratio_lower", "ratio_oracle",
    "alpha", "energy_before", "energy_after", "n_s", "D_bar", "C_Ds_D1", "wall_time", "error",
]
TRIAL_COLUMNS = ["trial", "makespan", "n_s", "C", "D_s", "D_1"]


def fmt(q, as_float=False):
    if q is None:
        return ""
    if isinstance(q, Fraction):
        return repr(float(q)) if as_float else str(q)
    return str(q)


# ---------------------------------------------------------------------------
# instance generation


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int = 0
    r: int = 1
    widths: tuple[int, ...] = ()
    p: float = 0.3
    seed: int = 0
    speeds: tuple[str, ...] = ("2", "1")


def random_composition(rng: random.Random, n: int, r: int) -> list[int]:
    """``n`` split into ``r`` positive parts, sorted non-increasing."""
    cuts = sorted(rng.sample(range(1, n), r - 1)) if r > 1 else []
    return sorted((b - a for a, b in zip([0] + cuts, cuts + [n])), reverse=True)


def generate(spec: GeneratorSpec) -> dict:
    rng = random.Random(spec.seed)
    speeds = [str(parse_rational(c)) for c in spec.speeds]
    if spec.kind == "chains":
        if spec.n < 0 or not 1 <= spec.r <= max(spec.n, 1) or (spec.n == 0 and spec.r != 1):
            raise InvalidInstance(f"cannot split n={spec.n} into r={spec.r} chains")
        lengths = random_composition(rng, spec.n, spec.r) if spec.n else []
        chains, nxt = [], 0
        for length in lengths:
            chains.append(list(range(nxt, nxt + length)))
            nxt += length
        edges = [[a, b] for c in chains for a, b in zip(c, c[1:])]
        return {"n": spec.n, "edges": edges, "speeds": speeds, "chains": chains}
    if spec.kind == "layered-dag":
        if any(w <= 0 for w in spec.widths):
            raise InvalidInstance("layer widths must be positive")
        layers, nxt = [], 0
        for w in spec.widths:
            layers.append(list(range(nxt, nxt + w)))
            nxt += w
        edges = []
        for upper, lower in zip(layers, layers[1:]):
            for v in lower:
                preds = [u for u in upper if rng.random() < spec.p] or [rng.choice(upper)]
                edges.extend([u, v] for u in preds)
        return {"n": nxt, "edges": sorted(edges), "speeds": speeds}
    if spec.kind == "random-dag":
        if spec.n < 0:
            raise InvalidInstance("n must be non-negative")
        edges = [[a, b] for a in range(spec.n) for b in range(a + 1, spec.n) if rng.random() < spec.p]
        return {"n": spec.n, "edges": edges, "speeds": speeds}
    raise InvalidInstance(f"unknown generator kind {spec.kind!r}")


def dump_json(data, path=None):
    text = json.dumps(data, indent=1, sort_keys=True) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# solving


def run_algorithm(instance: Instance, algo: str, seed=0, trials=None, a2=False):
    """Return ``(schedule, extras)`` for one algorithm."""
    extras = {}
    if algo == "remnants":
        sched, trace = remnants_schedule(instance)
        extras["trace"] = [t.to_json() for t in trace]
    elif algo == "lp-round":
        out = rounding_pipeline(instance, RoundingConfig(seed=seed, trials=trials, a2_threshold_enabled=a2))
        sched = out.schedule
        best = out.trials[out.trial].bounds
        extras.update(trials=out.trials, n_s=best.n_s, D_bar=out.lp.D, bound=best.total,
                      trial_count=len(out.trials))
    elif algo == "list":
        sched = greedy_list_schedule(instance)
    elif algo == "oracle":
        _, sched = exact_optimal_schedule(instance)
    else:
        raise InvalidInstance(f"unknown algorithm {algo!r}")
    validate(sched)
    return sched, extras


def trials_csv(records, as_float=False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRIAL_COLUMNS)
    for r in records:
        w.writerow([fmt(v, as_float) for v in r.row()])
    return buf.getvalue()


def cmd_gen(args):
    spec = GeneratorSpec(args.kind, args.n, args.r, tuple(int(w) for w in args.widths.split(",")) if args.widths else (),
                         args.p, args.seed, tuple(args.speeds.split(",")))
    data = generate(spec)
    instance_from_json(data)  # generated instances must validate
    dump_json(data, args.out)
    return 0


def cmd_solve(args):
    inst = load_instance(args.instance)
    t0 = time.perf_counter()
    sched, extras = run_algorithm(inst, args.algo, args.seed, args.trials, args.a2)
    wall = time.perf_counter() - t0
    if args.out:
        Path(args.out).write_text(sched.dumps(), encoding="utf-8")
    if args.trace and "trace" in extras:
        dump_json(extras["trace"], args.trace)
    if args.trials_csv and "trials" in extras:
        Path(args.trials_csv).write_text(trials_csv(extras["trials"], args.float), encoding="utf-8")
    report = {
        "instance": inst.digest(),
        "algorithm": args.algo,
        "makespan": fmt(makespan(sched), args.float),
        "bounds": {k: fmt(v, args.float) for k, v in bnd.bound_report(inst).__dict__.items()},
    }
    if args.alpha:
        params = EnergyParams(parse_rational(args.alpha), exact=not args.approx)
        report["alpha"] = args.alpha
        report["energy"] = fmt(energy(sched, params), args.float)
    if args.algo == "lp-round":
        report.update(seed=args.seed, trials=extras["trial_count"], n_s=extras["n_s"],
                      D_bar=fmt(extras["D_bar"], args.float), C_Ds_D1=fmt(extras["bound"], args.float))
    if not args.no_timing:
        report["wall_time"] = round(wall, 6)
    if args.report or not args.out:
        dump_json(report)
    if args.gantt:
        print(gantt(sched), file=sys.stderr)
    return 0


def cmd_validate(args):
    inst = load_instance(args.instance)
    sched = load_schedule(inst, args.schedule)
    try:
        validate(sched)
    except ScheduleError as exc:
        print(f"invalid: {type(exc).__name__}: {exc}")
        return 1
    print(f"valid: makespan {makespan(sched)}")
    return 0


def cmd_bounds(args):
    inst = load_instance(args.instance)
    rep = bnd.bound_report(inst)
    data = {k: fmt(v, args.float) or None for k, v in rep.__dict__.items()}
    if args.format in ("json", "both"):
        dump_json(data)
    if args.format in ("table", "both"):
        width = max(len(k) for k in data)
        for k, v in data.items():
            print(f"{k:<{width}}  {v if v is not None else '-'}")
    return 0


def cmd_optimize_energy(args):
    inst = load_instance(args.instance)
    sched = load_schedule(inst, args.schedule)
    validate(sched)
    params = EnergyParams(parse_rational(args.alpha), exact=not args.approx)
    out = save_energy(sched, params)
    validate(out)
    if args.out:
        Path(args.out).write_text(out.dumps(), encoding="utf-8")
    if args.report or not args.out:
        dump_json({
            "alpha": args.alpha,
            "energy_before": fmt(energy(sched, params), args.float),
            "energy_after": fmt(energy(out, params), args.float),
            "makespan_before": fmt(makespan(sched), args.float),
            "makespan_after": fmt(makespan(out), args.float),
        })
    return 0


def cmd_transform_sym(args):
    inst = load_instance(args.instance)
    target = MachineConfig(json.loads(Path(args.target).read_text(encoding="utf-8")))
    if args.schedule:
        sym_sched = load_schedule(inst, args.schedule)
        validate(sym_sched)
    else:
        _, sym_sched = exact_optimal_schedule(inst)
    out = asymmetrize(sym_sched, target)
    validate(out)
    if args.out:
        Path(args.out).write_text(out.dumps(), encoding="utf-8")
    dump_json({"symmetric_makespan": fmt(makespan(sym_sched), args.float),
               "asymmetric_makespan": fmt(makespan(out), args.float)})
    return 0


def bench_rows(paths, algos, seed=0, trials=None, alpha="2", timing=True, as_float=False):
    params = EnergyParams(parse_rational(alpha))
    rows = []
    for path in sorted(paths, key=str):
        try:
            inst = load_instance(path)
        except (SchedulingError, OSError, ValueError) as exc:
            rows.append({"instance": Path(path).name, "algo": "", "error": f"{type(exc).__name__}: {exc}"})
            continue
        rep = bnd.bound_report(inst)
        try:
            opt = exact_optimal_schedule(inst)[0]
        except SizeLimitExceeded:
            opt = None
        for algo in algos:
            row = {"instance": Path(path).name, "algo": algo, "n": inst.n, "m": inst.config.m,
                   "max_lower": fmt(rep.max_lower, as_float), "oracle": fmt(opt, as_float), "alpha": alpha}
            t0 = time.perf_counter()
            try:
                sched, extras = run_algorithm(inst, algo, seed, trials)
                after = save_energy(sched, params)
                span = makespan(sched)
                row.update(
                    makespan=fmt(span, as_float),
                    ratio_lower=fmt(span / rep.max_lower if rep.max_lower else None, as_float),
                    ratio_oracle=fmt(span / opt if opt else None, as_float),
                    energy_before=fmt(energy(sched, params), as_float),
                    energy_after=fmt(energy(after, params), as_float),
                    n_s=extras.get("n_s", ""),
                    D_bar=fmt(extras.get("D_bar"), as_float),
                    C_Ds_D1=fmt(extras.get("bound"), as_float),
                )
            except SchedulingError as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
            if timing:
                row["wall_time"] = f"{time.perf_counter() - t0:.6f}"
            rows.append(row)
    return rows


def bench_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n", restval="")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_bench(args):
    corpus = Path(args.corpus)
    paths = sorted(corpus.glob("*.json")) if corpus.is_dir() else []
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGOS:
            raise InvalidInstance(f"unknown algorithm {a!r}")
    rows = bench_rows(paths, algos, args.seed, args.trials, args.alpha, not args.no_timing, args.float)
    text = bench_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asymsched", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--float", action="store_true", help="render rationals as decimals")

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--kind", choices=["chains", "layered-dag", "random-dag"], default="chains")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--widths", default="")
    p.add_argument("--p", type=float, default=0.3, help="edge probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--speeds", default="2,1")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="schedule an instance")
    p.add_argument("instance")
    p.add_argument("--algo", choices=ALGOS, default="remnants")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int)
    p.add_argument("--a2", action="store_true", help="enable the A2 threshold step")
    p.add_argument("--trace", help="write the Remnants round trace here")
    p.add_argument("--trials-csv", help="write per-trial rows of lp-round here")
    p.add_argument("--alpha", help="report energy for this exponent")
    p.add_argument("--approx", action="store_true", help="allow 64-bit rounding of irrational powers")
    p.add_argument("--report", action="store_true")
    p.add_argument("--gantt", action="store_true", help="text Gantt chart on stderr")
    p.add_argument("--no-timing", action="store_true")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a schedule against an instance")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bounds", help="lower bounds on the optimal makespan")
    p.add_argument("instance")
    p.add_argument("--format", choices=["table", "json", "both"], default="table")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("optimize-energy", help="run Save-Energy on a schedule")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.add_argument("--alpha", required=True)
    p.add_argument("--approx", action="store_true")
    p.add_argument("--report", action="store_true")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_optimize_energy)

    p = sub.add_parser("transform-sym", help="asymmetrize a symmetric schedule")
    p.add_argument("instance", help="instance whose speeds are all equal")
    p.add_argument("--target", required=True, help="JSON list of target speeds")
    p.add_argument("--schedule", help="symmetric schedule; default: the exact optimum")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_transform_sym)

    p = sub.add_parser("bench", help="run algorithms over a corpus directory")
    p.add_argument("corpus")
    p.add_argument("--algos", default="remnants,oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int)
    p.add_argument("--alpha", default="2")
    p.add_argument("--no-timing", action="store_true", help="leave wall_time empty for byte-stable output")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ScheduleError as exc:
        if isinstance(exc, InvalidSegment):
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"invalid: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (InvalidInstance, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SchedulingError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
