"""Speed assignment by LP relaxation and randomized rounding.

Pipeline: build the assignment program, solve its relaxation exactly, draw each
task fast with probability ``x_j`` (A1), optionally move each chain's fast draws
to its prefix (A1~) and force near-zero chains slow (A2~), then turn the
assignment into a schedule by speed-based list scheduling. The best of many
seeded trials is kept.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bounds import ListBoundReport, list_bound_quantities
from .errors import NoSlowMachines, NotChains, NotTwoSpeed, SizeLimitExceeded
from .schedule import Schedule, Segment, makespan
from .simplex import EQ, LE, LinearProgram, solve
from .taskmodel import ChainSet, Instance, TwoSpeedView, is_two_speed

MAX_LP_TASKS = 200
MASK64 = (1 << 64) - 1


def _view(instance: Instance) -> TwoSpeedView:
    view = is_two_speed(instance.config)
    if view is None:
        raise NotTwoSpeed("the LP pipeline needs m_s machines of speed s > 1 and the rest of speed 1")
    return view


# ---------------------------------------------------------------------------
# assignments


@dataclass(frozen=True)
class SpeedAssignment:
    """``fast[j]`` is True when task ``j`` runs at speed ``s`` (``x_j = 1``)."""

    fast: tuple[bool, ...]

    @property
    def n_s(self) -> int:
        return sum(self.fast)

    def classes(self) -> list[str]:
        return ["fast" if f else "slow" for f in self.fast]

    @classmethod
    def uniform(cls, n: int, fast: bool) -> "SpeedAssignment":
        return cls((fast,) * n)


# ---------------------------------------------------------------------------
# the program


@dataclass
class SpeedProgram:
    instance: Instance
    lp: LinearProgram


def build_mip(instance: Instance) -> SpeedProgram:
    """Integer program over ``x_j, y_j`` (fast/slow), completion times ``t_j`` and ``D``.

    Groups: ``assign`` (x+y=1), ``capacity`` (fast and slow load), ``edge`` (one
    row per precedence edge), ``root`` (tasks without predecessors) and
    ``deadline`` (t_j <= D).
    """
    view = _view(instance)
    g = instance.graph
    n, s = g.n, view.s
    xs = [f"x{j}" for j in range(n)]
    ys = [f"y{j}" for j in range(n)]
    ts = [f"t{j}" for j in range(n)]
    lp = LinearProgram(xs + ys + ts + ["D"], {"D": 1}, integral=set(xs + ys))
    for j in range(n):
        lp.add(f"assign[{j}]", "assign", {xs[j]: 1, ys[j]: 1}, EQ, 1)
    fast_load = {x: 1 for x in xs}
    fast_load["D"] = -(view.m_s * s)
    lp.add("fast_load", "capacity", fast_load, LE, 0)
    slow_load = {y: 1 for y in ys}
    if view.m > view.m_s:
        slow_load["D"] = -(view.m - view.m_s)
    lp.add("slow_load", "capacity", slow_load, LE, 0)
    for u, v in g.edges:
        lp.add(f"edge[{u},{v}]", "edge", {xs[v]: 1 / s, ys[v]: 1, ts[v]: -1, ts[u]: 1}, LE, 0)
    for j in g.roots:
        lp.add(f"root[{j}]", "root", {xs[j]: 1 / s, ys[j]: 1, ts[j]: -1}, LE, 0)
    for j in range(n):
        lp.add(f"deadline[{j}]", "deadline", {ts[j]: 1, "D": -1}, LE, 0)
    return SpeedProgram(instance, lp)


@dataclass(frozen=True)
class LpSolution:
    x: tuple[Fraction, ...]
    t: tuple[Fraction, ...]
    D: Fraction
    chain_x: tuple[Fraction, ...] | None = None

    @property
    def y(self) -> tuple[Fraction, ...]:
        return tuple(1 - v for v in self.x)


def solve_lp(program: SpeedProgram, max_tasks: int = MAX_LP_TASKS) -> LpSolution:
    """Optimal basic solution of the relaxation (``x_j, y_j`` in ``[0, 1]``)."""
    inst = program.instance
    n = inst.n
    if n > max_tasks:
        raise SizeLimitExceeded(f"exact LP is limited to n <= {max_tasks}, got {n}")
    res = solve(program.lp.relaxed())
    x = tuple(res.x[f"x{j}"] for j in range(n))
    t = tuple(res.x[f"t{j}"] for j in range(n))
    chain_x = None
    chains = inst.chain_set()
    if not chains.cross_edges:
        # averaging x over a chain keeps every constraint satisfied at the same D
        chain_x = tuple(sum((x[j] for j in c), Fraction(0)) / len(c) for c in chains.chains)
    return LpSolution(x, t, res.value, chain_x)


def solve_chain_lp(instance: Instance) -> tuple[Fraction, tuple[Fraction, ...]]:
    """The collapsed program with one ``x_i`` per chain; returns ``(D, x)``."""
    view = _view(instance)
    chains = instance.chain_set()
    if chains.cross_edges:
        raise NotChains("collapsed program needs independent chains")
    s = view.s
    lengths = chains.lengths
    xs = [f"x{i}" for i in range(len(lengths))]
    lp = LinearProgram(xs + ["D"], {"D": 1})
    fast = {x: l for x, l in zip(xs, lengths)}
    fast["D"] = -(view.m_s * s)
    lp.add("fast_load", "capacity", fast, LE, 0)
    slow = {x: -l for x, l in zip(xs, lengths)}
    if view.m > view.m_s:
        slow["D"] = -(view.m - view.m_s)
    lp.add("slow_load", "capacity", slow, LE, -sum(lengths))
    for x, l in zip(xs, lengths):
        lp.add(f"chain[{x}]", "chain", {x: l * (1 / s - 1), "D": -1}, LE, -l)
        lp.add(f"bound[{x}]", "bound", {x: 1}, LE, 1)
    res = solve(lp)
    return res.value, tuple(res.x[x] for x in xs)


# ---------------------------------------------------------------------------
# rounding


def mix64(z: int) -> int:
    """SplitMix64 finaliser."""
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(seed: int, trial: int) -> int:
    return mix64((seed ^ trial) & MASK64)


def round_a1(lp: LpSolution, rng_seed: int) -> SpeedAssignment:
    """Independent draws: task ``j`` fast with probability exactly ``x_j``."""
    rng = random.Random(rng_seed)
    out = []
    for p in lp.x:
        if p >= 1:
            out.append(True)
        elif p <= 0:
            out.append(False)
        else:
            out.append(rng.randrange(p.denominator) < p.numerator)
    return SpeedAssignment(tuple(out))


def _chains_only(chains: ChainSet):
    if chains.cross_edges:
        raise NotChains("operation needs independent chains")


def improve_a1_tilde(assignment: SpeedAssignment, chains: ChainSet) -> SpeedAssignment:
    """Per chain keep the number of fast draws but give them to the chain's prefix."""
    _chains_only(chains)
    fast = list(assignment.fast)
    for chain in chains.chains:
        k = sum(fast[j] for j in chain)
        for pos, j in enumerate(chain):
            fast[j] = pos < k
    return SpeedAssignment(tuple(fast))


def a2_threshold(n: int) -> float:
    return math.log(n) / n if n > 0 else 0.0


def threshold_a2(lp: LpSolution, assignment: SpeedAssignment, chains: ChainSet, n: int) -> SpeedAssignment:
    """Force every chain with collapsed ``x_i < ln(n)/n`` entirely slow."""
    _chains_only(chains)
    if lp.chain_x is None:
        raise NotChains("LP solution carries no per-chain values")
    cut = a2_threshold(n)
    fast = list(assignment.fast)
    for xi, chain in zip(lp.chain_x, chains.chains):
        if float(xi) < cut:
            for j in chain:
                fast[j] = False
    return SpeedAssignment(tuple(fast))


# ---------------------------------------------------------------------------
# list scheduling


def _priority(instance: Instance):
    pos = instance.chain_set().position()
    return sorted(range(instance.n), key=lambda j: pos[j])


def _simulate(instance: Instance, pick_machine):
    """Event-driven non-preemptive list scheduling.

    ``pick_machine(task, free)`` returns a free machine index or None.
    """
    g = instance.graph
    speeds = instance.config.speeds
    order = _priority(instance)
    waiting = [len(g.preds[j]) for j in range(g.n)]
    started = [False] * g.n
    free = set(range(len(speeds)))
    running = []
    segments = []
    t = Fraction(0)
    ready = {j for j in range(g.n) if waiting[j] == 0}
    left = g.n
    while left:
        for j in order:
            if j in ready and not started[j]:
                k = pick_machine(j, free)
                if k is not None:
                    started[j] = True
                    ready.discard(j)
                    free.discard(k)
                    end = t + 1 / speeds[k]
                    heapq.heappush(running, (end, k, j))
                    segments.append(Segment(t, end, k, j))
        if not running:
            raise RuntimeError("list scheduler stalled with tasks left")
        t = running[0][0]
        while running and running[0][0] == t:
            _, k, j = heapq.heappop(running)
            free.add(k)
            left -= 1
            for v in g.succs[j]:
                waiting[v] -= 1
                if waiting[v] == 0:
                    ready.add(v)
    return Schedule(instance, segments)


def speed_based_list_schedule(instance: Instance, assignment: SpeedAssignment) -> Schedule:
    """A free machine takes the first available task whose speed class matches."""
    view = _view(instance)
    if assignment.n_s < instance.n and view.m == view.m_s:
        raise NoSlowMachines("tasks assigned slow but every machine is fast")
    fast_set = set(range(view.m_s))

    def pick(j, free):
        want_fast = assignment.fast[j]
        cands = [k for k in free if (k in fast_set) == want_fast]
        return min(cands) if cands else None

    return _simulate(instance, pick)


def greedy_list_schedule(instance: Instance) -> Schedule:
    """Classic list scheduling: each available task goes to the fastest free machine."""

    def pick(j, free):
        return min(free) if free else None

    return _simulate(instance, pick)


# ---------------------------------------------------------------------------
# the pipeline


@dataclass(frozen=True)
class RoundingConfig:
    seed: int = 0
    trials: int | None = None  # default: min(20 n, 100000)
    a2_threshold_enabled: bool = False
    gamma: Fraction | None = None  # informational
    beta: Fraction | None = None  # informational

    def trial_count(self, n: int) -> int:
        if self.trials is not None:
            if self.trials < 1:
                raise ValueError("trials must be positive")
            return self.trials
        return max(1, min(20 * n, 100_000))


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    makespan: Fraction
    bounds: ListBoundReport

    def row(self) -> list:
        b = self.bounds
        return [self.trial, self.makespan, b.n_s, b.C, b.D_s, b.D_1]


@dataclass
class RoundingOutcome:
    assignment: SpeedAssignment
    schedule: Schedule
    makespan: Fraction
    trial: int
    lp: LpSolution
    fast_counts: list[int] | None = None
    slow_counts: list[int] | None = None
    trials: list[TrialRecord] = field(default_factory=list)

    @property
    def mean_makespan(self) -> Fraction:
        return sum((r.makespan for r in self.trials), Fraction(0)) / len(self.trials)


def assign_once(instance: Instance, lp: LpSolution, seed: int, a2: bool = False) -> SpeedAssignment:
    """A1, then A1~ (and A2~ if requested) when the instance is a set of chains."""
    assignment = round_a1(lp, seed)
    chains = instance.chain_set()
    if not chains.cross_edges:
        assignment = improve_a1_tilde(assignment, chains)
        if a2:
            assignment = threshold_a2(lp, assignment, chains, instance.n)
    return assignment


def rounding_pipeline(instance: Instance, rounding: RoundingConfig = RoundingConfig(),
                      lp: LpSolution | None = None) -> RoundingOutcome:
    """Solve the LP once, run seeded trials, keep the shortest schedule.

    Trial ``i`` draws from ``trial_seed(seed, i)`` only; ties go to the lowest trial.
    """
    _view(instance)
    if lp is None:
        lp = solve_lp(build_mip(instance))
    best = None
    records = []
    for i in range(rounding.trial_count(instance.n)):
        assignment = assign_once(instance, lp, trial_seed(rounding.seed, i), rounding.a2_threshold_enabled)
        sched = speed_based_list_schedule(instance, assignment)
        span = makespan(sched)
        records.append(TrialRecord(i, span, list_bound_quantities(instance.graph, assignment.fast, instance.config)))
        if best is None or span < best[0]:
            best = (span, i, assignment, sched)
    span, i, assignment, sched = best
    fast_counts = slow_counts = None
    chains = instance.chain_set()
    if not chains.cross_edges:
        fast_counts = [sum(assignment.fast[j] for j in c) for c in chains.chains]
        slow_counts = [len(c) - f for c, f in zip(chains.chains, fast_counts)]
    return RoundingOutcome(assignment, sched, span, i, lp, fast_counts, slow_counts, records)


def expected_chain_time(lp: LpSolution, chains: ChainSet, s: Fraction) -> list[Fraction]:
    """``sum_j x_j/s + y_j`` per chain: the expectation of its processing time."""
    return [sum((lp.x[j] / s + 1 - lp.x[j] for j in c), Fraction(0)) for c in chains.chains]


def fast_fraction(assignments: Sequence[SpeedAssignment]) -> float:
    total = sum(len(a.fast) for a in assignments)
    return sum(a.n_s for a in assignments) / total if total else 0.0
