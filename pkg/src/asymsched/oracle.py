"""Desk-scale ground truth.

* :func:`exact_optimal_makespan` -- branch and bound over non-preemptive schedules.
* :func:`exhaustive_min_energy` -- exact minimum preemptive energy for tiny
  instances, one linear program per completion order.
* :func:`grid_min_energy` -- slot-by-slot dynamic program, a coarser cross-check.
* :func:`asymmetrize` -- turns a schedule on ``m`` equal machines into one on
  ``m`` machines with the same average speed, never later.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations

from .errors import (
    AverageSpeedMismatch,
    DominanceViolated,
    Infeasible,
    MachineCountMismatch,
    SizeLimitExceeded,
)
from .simplex import EQ, LE, LinearProgram, solve
from .schedule import Schedule, Segment, build_timeline, makespan, merge_abutting, power
from .taskmodel import EnergyParams, Instance, MachineConfig

MAX_TASKS = 14
MAX_MACHINES = 4


def _lcm(values):
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


class _Search:
    """Branch and bound on integer-scaled time.

    Every optimal schedule can be listed in order of (start, task id) such that
    each task starts as soon as its machine and predecessors allow. The search
    enumerates exactly such lists, so it is exact. Symmetries removed: machines
    with equal speed and free time, and available tasks whose remaining futures
    are identical chains with equal release time.
    """

    def __init__(self, instance: Instance, upper=None):
        g = instance.graph
        speeds = instance.config.speeds
        self.n, self.m = g.n, len(speeds)
        self.scale = _lcm(c.numerator for c in speeds)
        self.dur = [int(Fraction(self.scale) / c) for c in speeds]
        self.preds = g.preds
        self.succs = g.succs
        self.topo = g.topo_order
        dmin = min(self.dur)
        self.dmin = dmin
        # longest path (in tasks) from j to a sink, inclusive
        depth = [0] * self.n
        for j in reversed(self.topo):
            depth[j] = 1 + max((depth[k] for k in self.succs[j]), default=0)
        self.tail = [d * dmin for d in depth]
        # length of j's future when it is a private chain, else None
        shape = [None] * self.n
        for j in reversed(self.topo):
            s = self.succs[j]
            if not s:
                shape[j] = 1
            elif len(s) == 1 and len(self.preds[s[0]]) == 1 and shape[s[0]] is not None:
                shape[j] = 1 + shape[s[0]]
        self.shape = shape
        self.best = upper
        self.best_plan = None

    # -- bounds -------------------------------------------------------------
    def lower_bound(self, end, free, floor, remaining, cmax):
        lb = cmax
        est = {}
        for j in self.topo:
            if end[j] is not None:
                continue
            e = floor
            for p in self.preds[j]:
                pe = end[p] if end[p] is not None else est[p] + self.dmin
                if pe > e:
                    e = pe
            est[j] = e
            v = e + self.tail[j]
            if v > lb:
                lb = v
        if remaining:
            heap = [(max(f, floor) + d, d) for f, d in zip(free, self.dur)]
            heapq.heapify(heap)
            t = 0
            for _ in range(remaining):
                t, d = heapq.heappop(heap)
                heapq.heappush(heap, (t + d, d))
            if t > lb:
                lb = t
        return lb

    def greedy(self):
        """Earliest-finish list schedule, to seed the incumbent."""
        end = [None] * self.n
        free = [0] * self.m
        plan = []
        left = set(range(self.n))
        while left:
            avail = [j for j in left if all(end[p] is not None for p in self.preds[j])]
            best = None
            for j in avail:
                ready = max((end[p] for p in self.preds[j]), default=0)
                for k in range(self.m):
                    st = max(ready, free[k])
                    key = (st + self.dur[k], -self.tail[j], j, k)
                    if best is None or key < best[0]:
                        best = (key, j, k, st)
            _, j, k, st = best
            end[j] = st + self.dur[k]
            free[k] = end[j]
            plan.append((j, k, st))
            left.discard(j)
        return max(end, default=0), plan

    # -- search -------------------------------------------------------------
    def run(self):
        span, plan = self.greedy()
        if self.best is None or span < self.best:
            self.best, self.best_plan = span, plan
        end = [None] * self.n
        free = [0] * self.m
        self._dfs(end, free, 0, -1, self.n, 0, [])
        return self.best, self.best_plan

    def _dfs(self, end, free, last_start, last_task, remaining, cmax, plan):
        if remaining == 0:
            if cmax < self.best:
                self.best, self.best_plan = cmax, list(plan)
            return
        if self.lower_bound(end, free, last_start, remaining, cmax) >= self.best:
            return
        moves = []
        seen_tasks = set()
        for j in range(self.n):
            if end[j] is not None:
                continue
            ready = 0
            ok = True
            for p in self.preds[j]:
                if end[p] is None:
                    ok = False
                    break
                if end[p] > ready:
                    ready = end[p]
            if not ok:
                continue
            shape = self.shape[j]
            seen_machines = set()
            for k in range(self.m):
                mk = (self.dur[k], free[k])
                if mk in seen_machines:
                    continue
                seen_machines.add(mk)
                st = ready if ready > free[k] else free[k]
                if st < last_start or (st == last_start and j < last_task):
                    continue
                if shape is not None:
                    key = (ready, shape, mk)
                    if key in seen_tasks:
                        continue
                    seen_tasks.add(key)
                fin = st + self.dur[k]
                if max(cmax, fin + self.tail[j] - self.dmin) >= self.best:
                    continue
                moves.append((fin, -self.tail[j], j, k, st))
        moves.sort()
        for fin, _, j, k, st in moves:
            if fin >= self.best:
                break
            old = free[k]
            end[j] = fin
            free[k] = fin
            plan.append((j, k, st))
            self._dfs(end, free, st, j, remaining - 1, max(cmax, fin), plan)
            plan.pop()
            free[k] = old
            end[j] = None


def exact_optimal_schedule(instance: Instance, max_tasks=MAX_TASKS, max_machines=MAX_MACHINES):
    """Optimal non-preemptive schedule and its makespan."""
    if instance.n > max_tasks or instance.config.m > max_machines:
        raise SizeLimitExceeded(
            f"exact search is limited to n <= {max_tasks}, m <= {max_machines} "
            f"(got n={instance.n}, m={instance.config.m})"
        )
    if instance.n == 0:
        return Fraction(0), Schedule(instance, [])
    search = _Search(instance)
    best, plan = search.run()
    scale = search.scale
    segments = [
        Segment(Fraction(st, scale), Fraction(st + search.dur[k], scale), k, j) for j, k, st in plan
    ]
    return Fraction(best, scale), Schedule(instance, segments)


def exact_optimal_makespan(instance: Instance, **limits) -> Fraction:
    return exact_optimal_schedule(instance, **limits)[0]


# ---------------------------------------------------------------------------
# minimum energy


def _linear_extensions(preds, n):
    """Every completion order compatible with the precedence relation."""
    order, done = [], [False] * n

    def rec():
        if len(order) == n:
            yield tuple(order)
            return
        for j in range(n):
            if not done[j] and all(done[p] for p in preds[j]):
                done[j] = True
                order.append(j)
                yield from rec()
                order.pop()
                done[j] = False

    yield from rec()


def _order_program(instance: Instance, params: EnergyParams, cap: Fraction, order) -> LinearProgram:
    """Minimum energy when tasks complete in ``order``.

    Interval ``i`` ends when ``order[i]`` completes; its length ``L_i`` is free.
    Task ``j`` may run in interval ``i`` once every predecessor completed in an
    earlier interval and until its own interval. Amounts ``p[j,k,i]`` (time of
    ``j`` on machine ``k``) are realisable inside the interval iff no machine and
    no task exceeds ``L_i`` (preemptive open shop), so the program is exact.
    """
    n, speeds = instance.n, instance.config.speeds
    preds = instance.graph.preds
    where = {j: i for i, j in enumerate(order)}
    lengths = [f"L{i}" for i in range(n)]
    cols, objective = list(lengths), {}
    window = {}
    for j in range(n):
        first = max((where[p] + 1 for p in preds[j]), default=0)
        window[j] = range(first, where[j] + 1)
        for i in window[j]:
            for k, c in enumerate(speeds):
                v = f"p{j}_{k}_{i}"
                cols.append(v)
                objective[v] = power(c, params)
    lp = LinearProgram(cols, objective)
    lp.add("cap", "cap", {L: 1 for L in lengths}, LE, cap)
    for j in range(n):
        lp.add(f"work[{j}]", "work", {f"p{j}_{k}_{i}": c for i in window[j] for k, c in enumerate(speeds)}, EQ, 1)
    for i in range(n):
        alive = [j for j in range(n) if i in window[j]]
        for k in range(len(speeds)):
            row = {f"p{j}_{k}_{i}": 1 for j in alive}
            if row:
                row[lengths[i]] = -1
                lp.add(f"machine[{k},{i}]", "machine", row, LE, 0)
        for j in alive:
            row = {f"p{j}_{k}_{i}": 1 for k in range(len(speeds))}
            row[lengths[i]] = -1
            lp.add(f"task[{j},{i}]", "task", row, LE, 0)
    return lp


def exhaustive_min_energy(instance: Instance, params: EnergyParams, cap, max_tasks=5,
                          max_machines=3) -> Fraction | None:
    """Exact minimum energy over all preemptive schedules with makespan ``<= cap``.

    One linear program per precedence-compatible completion order; ``None``
    when no schedule meets the cap.
    """
    n, config = instance.n, instance.config
    if n > max_tasks or config.m > max_machines:
        raise SizeLimitExceeded(f"energy search is limited to n <= {max_tasks}, m <= {max_machines}")
    if n == 0:
        return Fraction(0)
    cap = Fraction(cap)
    best = None
    for order in _linear_extensions(instance.graph.preds, n):
        try:
            value = solve(_order_program(instance, params, cap, order)).value
        except Infeasible:
            continue
        if best is None or value < best:
            best = value
    return best


def default_resolution(config: MachineConfig, cap: Fraction) -> Fraction:
    """Grid step ``1/(S*L)``: ``S`` the LCM of the speed numerators (``s`` on a
    two-speed machine set), ``L`` the LCM of every denominator in the speeds and
    the cap. Every whole-task duration ``1/c`` is then a whole number of steps."""
    dens = [c.denominator for c in config.speeds] + [Fraction(cap).denominator]
    return Fraction(1, _lcm([c.numerator for c in config.speeds]) * _lcm(dens))


def grid_min_energy(instance: Instance, params: EnergyParams, cap, resolution=None,
                    max_tasks=4, max_machines=3) -> Fraction | None:
    """Minimum energy when each machine runs one task per whole grid slot.

    A restriction of :func:`exhaustive_min_energy`, so never below it; kept as
    an independent cross-check. ``None`` when nothing fits under ``cap``.
    """
    n, config = instance.n, instance.config
    if n > max_tasks or config.m > max_machines:
        raise SizeLimitExceeded(f"energy search is limited to n <= {max_tasks}, m <= {max_machines}")
    cap = Fraction(cap)
    step = Fraction(resolution) if resolution is not None else default_resolution(config, cap)
    slots = cap / step
    if slots.denominator != 1:
        raise ValueError(f"grid step {step} does not divide the cap {cap}")
    slots = int(slots)
    works = [c * step for c in config.speeds]
    unit = Fraction(reduce(math.gcd, [w.numerator for w in works] + [1]),
                    _lcm([w.denominator for w in works]))
    need = int(1 / unit)
    w_units = [int(w / unit) for w in works]
    costs = [power(c, params) * step for c in config.speeds]
    preds = instance.graph.preds

    groups = []
    for k, c in enumerate(config.speeds):
        if groups and groups[-1][0] == c:
            groups[-1][1] += 1
        else:
            groups.append([c, 1, w_units[k], costs[k]])

    def moves(state):
        avail = [j for j in range(n) if state[j] > 0 and all(state[p] == 0 for p in preds[j])]
        out = []

        # equal-speed machines are interchangeable: choose a task subset per group
        def rec(g, free, cur, cost):
            if g == len(groups):
                out.append((tuple(cur), cost))
                return
            _, size, w, c = groups[g]
            fits = [j for j in free if cur[j] >= w]
            for count in range(min(size, len(fits)) + 1):
                for pick in combinations(fits, count):
                    for j in pick:
                        cur[j] -= w
                    rec(g + 1, [j for j in free if j not in pick], cur, cost + count * c)
                    for j in pick:
                        cur[j] += w

        rec(0, avail, list(state), Fraction(0))
        return out

    max_rate = sum(w_units)
    layer = {tuple([need] * n): Fraction(0)}
    best = None
    for t in range(slots):
        left = slots - t
        nxt = {}
        for state, e in layer.items():
            if sum(state) > left * max_rate:
                continue
            for new, cost in moves(state):
                val = e + cost
                if not any(new):
                    if best is None or val < best:
                        best = val
                    continue
                if nxt.get(new, val + 1) > val:
                    nxt[new] = val
        layer = nxt
    if n == 0:
        return Fraction(0)
    return best


# ---------------------------------------------------------------------------
# symmetric -> asymmetric transformation


@dataclass(frozen=True)
class SymmetricConfig:
    m: int
    speed: Fraction

    def machines(self) -> MachineConfig:
        return MachineConfig([self.speed] * self.m)


def symmetric_twin(target: MachineConfig) -> SymmetricConfig:
    """The equal-speed machine set with the same count and average speed."""
    return SymmetricConfig(target.m, target.capability / target.m)


def asymmetrize(schedule: Schedule, target: MachineConfig) -> Schedule:
    """Rotate every event-free interval of a symmetric schedule over ``target``.

    With ``lam`` tasks active in an interval, each task is run on each of the
    ``lam`` fastest target machines for an equal share of time, so it receives
    exactly the work it got originally. The interval shrinks unless ``lam = m``;
    later intervals are shifted left by the gain.
    """
    src = schedule.instance.config
    if src.m != target.m:
        raise MachineCountMismatch(f"{src.m} symmetric machines vs {target.m} target machines")
    if not src.is_symmetric():
        raise AverageSpeedMismatch("source schedule must run on equal-speed machines")
    s_avg = src.speeds[0]
    if target.capability != s_avg * target.m:
        raise AverageSpeedMismatch(f"target average {target.capability / target.m} != {s_avg}")
    out_instance = schedule.instance.with_config(target)
    timeline = build_timeline(schedule)
    segments = []
    clock = Fraction(0)
    for a, b, occ in timeline.intervals():
        active = [occ[k] for k in sorted(occ)]
        lam = len(active)
        if lam == 0:
            continue
        work = s_avg * (b - a)
        slice_len = work / sum(target.speeds[:lam], Fraction(0))
        for q in range(lam):
            lo = clock + q * slice_len
            for r, task in enumerate(active):
                segments.append(Segment(lo, lo + slice_len, (r + q) % lam, task))
        clock += lam * slice_len
    return Schedule(out_instance, merge_abutting(segments))


@dataclass(frozen=True)
class DominanceResult:
    symmetric_optimum: Fraction
    asymmetric_makespan: Fraction
    symmetric_schedule: Schedule
    asymmetric_schedule: Schedule

    @property
    def has_idle_interval(self) -> bool:
        m = self.symmetric_schedule.instance.config.m
        return any(len(occ) < m for _, _, occ in build_timeline(self.symmetric_schedule).intervals())


def check_asym_dominance(instance: Instance, target: MachineConfig | None = None) -> DominanceResult:
    """Asymmetrize the symmetric optimum and check it is no later.

    ``instance.config`` is used as the target when ``target`` is omitted.
    """
    target = target or instance.config
    sym = symmetric_twin(target)
    sym_opt, sym_sched = exact_optimal_schedule(instance.with_config(sym.machines()))
    asym = asymmetrize(sym_sched, target)
    span = makespan(asym)
    if span > sym_opt:
        raise DominanceViolated(sym_opt, span)
    return DominanceResult(sym_opt, span, sym_sched, asym)
