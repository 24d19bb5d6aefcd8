"""Preemptive schedules over exact-rational time.

A schedule is a bag of ``(task, machine, start, end)`` segments. Work done by a
segment is its duration times the machine speed; every task needs exactly one
unit of work. Intervals are half-open, so touching endpoints never overlap.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import mpmath

from .errors import (
    InvalidSegment,
    MachineOverlap,
    NonRepresentablePower,
    PrecedenceViolation,
    ScheduleError,
    TaskSelfOverlap,
    WorkMismatch,
)
from .taskmodel import EnergyParams, Instance, parse_rational, render_rational

FRACTION_BITS = 64


@dataclass(frozen=True, order=True)
class Segment:
    start: Fraction
    end: Fraction
    machine: int
    task: int

    @property
    def duration(self) -> Fraction:
        return self.end - self.start

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "machine": self.machine,
            "start": render_rational(self.start),
            "end": render_rational(self.end),
        }


def seg(task, machine, start, end) -> Segment:
    return Segment(Fraction(start), Fraction(end), machine, task)


@dataclass(frozen=True)
class Schedule:
    instance: Instance
    segments: tuple[Segment, ...]

    def __init__(self, instance: Instance, segments: Iterable[Segment]):
        object.__setattr__(self, "instance", instance)
        object.__setattr__(self, "segments", tuple(sorted(segments)))

    @property
    def speeds(self):
        return self.instance.config.speeds

    def by_task(self) -> dict[int, list[Segment]]:
        out = defaultdict(list)
        for s in self.segments:
            out[s.task].append(s)
        return out

    def by_machine(self) -> dict[int, list[Segment]]:
        out = defaultdict(list)
        for s in self.segments:
            out[s.machine].append(s)
        return out

    def completion_times(self) -> dict[int, Fraction]:
        out = {}
        for s in self.segments:
            if s.end > out.get(s.task, s.end - 1):
                out[s.task] = s.end
        return out

    def start_times(self) -> dict[int, Fraction]:
        out = {}
        for s in self.segments:
            out.setdefault(s.task, s.start)
        return out

    def is_preemptive(self) -> bool:
        return any(len(v) > 1 for v in self.by_task().values())

    def to_json(self) -> dict:
        return {"segments": [s.to_json() for s in self.segments]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"


def schedule_from_json(instance: Instance, data: dict) -> Schedule:
    try:
        rows = data["segments"]
        segments = [
            Segment(parse_rational(r["start"]), parse_rational(r["end"]), int(r["machine"]), int(r["task"]))
            for r in rows
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSegment(f"malformed schedule: {exc}") from exc
    return Schedule(instance, segments)


def load_schedule(instance: Instance, path) -> Schedule:
    with open(path, encoding="utf-8") as fh:
        return schedule_from_json(instance, json.load(fh))


def merge_abutting(segments: Iterable[Segment]) -> list[Segment]:
    """Join touching segments of the same task on the same machine."""
    out: list[Segment] = []
    for s in sorted(segments, key=lambda s: (s.machine, s.start)):
        if out and out[-1].machine == s.machine and out[-1].task == s.task and out[-1].end == s.start:
            out[-1] = Segment(out[-1].start, s.end, s.machine, s.task)
        else:
            out.append(s)
    return sorted(out)


# ---------------------------------------------------------------------------
# feasibility


def _first_overlap(items):
    items = sorted(items)
    for a, b in zip(items, items[1:]):
        if b.start < a.end:
            return a, b
    return None


def validate(schedule: Schedule) -> None:
    """Raise the first violated invariant, or return ``None``.

    Checks, in order: segment sanity, machine overlap, task self-overlap, unit
    work per task and precedence.
    """
    inst = schedule.instance
    n, m = inst.n, inst.config.m
    for s in schedule.segments:
        if not s.end > s.start:
            raise InvalidSegment(f"segment {s} has non-positive duration")
        if not 0 <= s.machine < m:
            raise InvalidSegment(f"segment {s} uses machine outside [0, {m})")
        if not 0 <= s.task < n:
            raise InvalidSegment(f"segment {s} uses task outside [0, {n})")
        if s.start < 0:
            raise InvalidSegment(f"segment {s} starts before time 0")
    for machine, items in sorted(schedule.by_machine().items()):
        hit = _first_overlap(items)
        if hit:
            raise MachineOverlap(machine, *hit)
    tasks = schedule.by_task()
    for task, items in sorted(tasks.items()):
        hit = _first_overlap(items)
        if hit:
            raise TaskSelfOverlap(task, *hit)
    speeds = inst.config.speeds
    for task in range(n):
        work = sum((s.duration * speeds[s.machine] for s in tasks.get(task, ())), Fraction(0))
        if work != 1:
            raise WorkMismatch(task, work)
    ends = schedule.completion_times()
    starts = schedule.start_times()
    for u, v in inst.graph.edges:
        if ends[u] > starts[v]:
            raise PrecedenceViolation((u, v), ends[u], starts[v])


def is_valid(schedule: Schedule) -> bool:
    try:
        validate(schedule)
    except ScheduleError:
        return False
    return True


def makespan(schedule: Schedule) -> Fraction:
    return max((s.end for s in schedule.segments), default=Fraction(0))


# ---------------------------------------------------------------------------
# energy


def _int_root(x: int, k: int) -> int | None:
    """Exact integer k-th root of ``x >= 0`` or None."""
    if x < 2:
        return x
    r = int(round(x ** (1.0 / k))) if x.bit_length() < 1000 else 1 << (x.bit_length() // k)
    # Newton refinement then local correction
    for _ in range(200):
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == x:
            return cand
    return None


def exact_power(base: Fraction, exponent: Fraction) -> Fraction | None:
    """``base**exponent`` when it is rational, else None."""
    base, exponent = Fraction(base), Fraction(exponent)
    if exponent.denominator == 1:
        return base ** exponent.numerator
    if base < 0:
        return None
    p, q = exponent.numerator, exponent.denominator
    num = _int_root(abs(base.numerator), q)
    den = _int_root(base.denominator, q)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** p


def fixed_point(x) -> Fraction:
    """Round an mpmath value to the nearest multiple of ``2**-64``."""
    scale = 1 << FRACTION_BITS
    return Fraction(int(mpmath.nint(x * scale)), scale)


def rational_power(base: Fraction, exponent: Fraction, exact: bool = True) -> Fraction:
    value = exact_power(base, exponent)
    if value is not None:
        return value
    if exact:
        raise NonRepresentablePower(f"{base}**{exponent} is irrational")
    with mpmath.workprec(256):
        return fixed_point(mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                                        mpmath.mpf(exponent.numerator) / exponent.denominator))


def power(speed: Fraction, params: EnergyParams) -> Fraction:
    """Energy per unit time at ``speed``."""
    return rational_power(speed, params.alpha, params.exact)


def energy(schedule: Schedule, params: EnergyParams) -> Fraction:
    speeds = schedule.instance.config.speeds
    cache = {}
    total = Fraction(0)
    for s in schedule.segments:
        c = speeds[s.machine]
        if c not in cache:
            cache[c] = power(c, params)
        total += cache[c] * s.duration
    return total


# ---------------------------------------------------------------------------
# timeline and supported-set blocks


@dataclass(frozen=True)
class Timeline:
    """Breakpoints ``t0 < ... < t_tau`` and, per interval, ``machine -> task``."""

    breakpoints: tuple[Fraction, ...]
    occupancy: tuple[dict, ...]

    def intervals(self):
        return list(zip(self.breakpoints, self.breakpoints[1:], self.occupancy))


def build_timeline(schedule: Schedule) -> Timeline:
    points = {Fraction(0)}
    for s in schedule.segments:
        points.add(s.start)
        points.add(s.end)
    bps = tuple(sorted(points))
    occ = []
    for a, b in zip(bps, bps[1:]):
        occ.append({s.machine: s.task for s in schedule.segments if s.start <= a and b <= s.end})
    return Timeline(bps, tuple(occ))


@dataclass(frozen=True)
class Block:
    start: Fraction
    end: Fraction
    supported: frozenset


def supported_set_blocks(schedule: Schedule) -> list[Block]:
    """Maximal windows with a constant supported set.

    The supported set at time ``t`` holds every task whose predecessors have all
    completed by ``t`` (completed, running and ready tasks). It grows only when a
    completion releases a new task, so block boundaries are release times.
    """
    span = makespan(schedule)
    if span == 0:
        return []
    graph = schedule.instance.graph
    ends = schedule.completion_times()
    release = {j: max((ends[p] for p in graph.preds[j]), default=Fraction(0)) for j in range(graph.n)}
    cuts = sorted({Fraction(0), span} | {r for r in release.values() if 0 < r < span})
    blocks = []
    for a, b in zip(cuts, cuts[1:]):
        blocks.append(Block(a, b, frozenset(j for j, r in release.items() if r <= a)))
    return blocks


# ---------------------------------------------------------------------------
# text rendering


def gantt(schedule: Schedule, width: int = 60) -> str:
    """One text row per machine; characters are task ids modulo 36."""
    span = makespan(schedule)
    lines = []
    digits = "0123456789abcdefghijklmnopqrstuvwxyz"
    for k, c in enumerate(schedule.instance.config.speeds):
        row = ["."] * width
        for s in schedule.by_machine().get(k, ()):
            lo = int(s.start / span * width) if span else 0
            hi = max(lo + 1, int(s.end / span * width)) if span else 0
            for x in range(lo, min(hi, width)):
                row[x] = digits[s.task % 36]
        lines.append(f"M{k:<2} c={str(c):>5} |{''.join(row)}|")
    lines.append(f"makespan {span}")
    return "\n".join(lines)
