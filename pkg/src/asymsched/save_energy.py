"""Energy post-processing of preemptive schedules ("Save-Energy").

Work is moved from a segment at speed ``c_u`` into an idle window ("hole") of a
strictly slower machine ``c_v`` inside the same supported-set block. Moving
``d`` time units of slow processing replaces ``c_v*d/c_u`` fast time, changing
energy by ``c_v*d*(P(c_v)/c_v - P(c_u)/c_u)`` which is negative for convex
power ``P(c) = c**alpha``. Among admissible holes the one whose speed is
closest to ``alpha**(-1/(alpha-1)) * c_u`` wins. Makespan never grows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from .schedule import (
    Block,
    Schedule,
    Segment,
    makespan,
    merge_abutting,
    power,
    rational_power,
    supported_set_blocks,
)
from .taskmodel import EnergyParams

log = logging.getLogger(__name__)

MAX_ROUNDS = 64
MAX_MOVES = 20_000


def optimal_target_speed(c_u: Fraction, params: EnergyParams) -> Fraction:
    """Speed that maximises the saving of moving work off ``c_u``.

    Exact when the root is rational (always for ``alpha = 2``: ``c_u/2``);
    otherwise rounded to 64 fractional bits, which is only used for ranking.
    """
    a = params.alpha
    factor = rational_power(1 / a, 1 / (a - 1), exact=False)
    return factor * Fraction(c_u)


def saving_rate(c_u, c_v, params: EnergyParams) -> Fraction:
    """Energy saved per unit of slow time: ``c_v*(P(c_u)/c_u - P(c_v)/c_v)``."""
    return c_v * (power(c_u, params) / c_u - power(c_v, params) / c_v)


@dataclass(frozen=True)
class Hole:
    machine: int
    start: Fraction
    end: Fraction
    speed: Fraction


@dataclass(frozen=True)
class MoveCandidate:
    task: int
    source: Segment
    fragment: tuple[Fraction, Fraction]  # part of the source inside the block
    target: Hole  # the hole window the work goes into
    placed: tuple[Fraction, Fraction]  # interval actually used on the target machine
    remainder: tuple[Fraction, Fraction] | None  # where the unmoved work stays on the source machine
    moved_work: Fraction
    freed_time: Fraction  # source time replaced: c_u * freed = c_v * placed duration
    energy_delta: Fraction
    kind: str  # "exact", "slack" or "partial"


# ---------------------------------------------------------------------------
# interval helpers


def _gaps(busy, lo, hi):
    """Maximal sub-intervals of ``[lo, hi]`` avoiding every ``(a, b)`` in ``busy``."""
    out = []
    cur = lo
    for a, b in sorted(busy):
        if b <= cur:
            continue
        if a >= hi:
            break
        if a > cur:
            out.append((cur, a))
        cur = max(cur, b)
    if cur < hi:
        out.append((cur, hi))
    return out


def _clamp(x, lo, hi):
    return lo if x < lo else hi if x > hi else x


class _View:
    """Indexes a segment list for move enumeration."""

    def __init__(self, schedule: Schedule):
        self.schedule = schedule
        self.speeds = schedule.instance.config.speeds
        self.graph = schedule.instance.graph
        self.by_machine = schedule.by_machine()
        self.by_task = schedule.by_task()
        self.ends = schedule.completion_times()
        self.starts = schedule.start_times()

    def task_window(self, h):
        lo = max((self.ends[p] for p in self.graph.preds[h]), default=Fraction(0))
        hi = min((self.starts[v] for v in self.graph.succs[h]), default=None)
        return lo, hi


def _candidates_for(view: _View, sigma: Segment, block: Block, params, allowed, span, partial_ok=True):
    h, u = sigma.task, sigma.machine
    c_u = view.speeds[u]
    p, q = max(sigma.start, block.start), min(sigma.end, block.end)
    if q <= p:
        return []
    lo_h, hi_h = view.task_window(h)
    lb = max(block.start, lo_h)
    ub = min(block.end, span) if hi_h is None else min(block.end, span, hi_h)
    others = [(s.start, s.end) for s in view.by_task[h] if s != sigma]
    # source window: u idle apart from sigma, h not running elsewhere
    busy_u = [(s.start, s.end) for s in view.by_machine.get(u, ()) if s != sigma] + others
    P, Q = lb, ub
    for a, b in busy_u:
        if b <= p and b > P:
            P = b
        if a >= q and a < Q:
            Q = a
    w = c_u * (q - p)
    src_time = q - p
    out = []
    for v, c_v in enumerate(view.speeds):
        if not c_v < c_u or (allowed is not None and c_v not in allowed):
            continue
        busy_v = [(s.start, s.end) for s in view.by_machine.get(v, ())] + others
        rate = saving_rate(c_u, c_v, params)
        if rate <= 0:
            continue
        k = c_v / c_u
        full = w / c_v
        for a, b in _gaps(busy_v, lb, ub):
            hole = Hole(v, a, b, c_v)
            if b - a >= full:
                x = _clamp(p, a, b - full)
                kind = "exact" if b - a == full else "slack"
                out.append(MoveCandidate(h, sigma, (p, q), hole, (x, x + full), None, w,
                                         src_time, -rate * full, kind))
                continue
            if not partial_ok:
                continue
            best = None
            # target first, remainder after it inside [P, Q]
            d = min(b - a, (Q - a - src_time) / (1 - k))
            if d > 0:
                r = (w - c_v * d) / c_u
                y = _clamp(p, max(P, a + d), Q - r)
                best = (d, (a, a + d), (y, y + r))
            # remainder first, target after it
            d2 = min(b - a, (b - P - src_time) / (1 - k))
            if d2 > 0 and (best is None or d2 > best[0]):
                r = (w - c_v * d2) / c_u
                x = max(a, P + r)
                if x + d2 <= b:
                    y = _clamp(p, P, x - r)
                    best = (d2, (x, x + d2), (y, y + r))
            if best is None:
                continue
            d, placed, rem = best
            out.append(MoveCandidate(h, sigma, (p, q), hole, placed, rem, c_v * d,
                                     c_v * d / c_u, -rate * d, "partial"))
    return out


def enumerate_moves(schedule: Schedule, params: EnergyParams, block: Block,
                    allowed_speeds=None, span=None, frozen=frozenset()) -> list[MoveCandidate]:
    """All best-in-window single moves of work from a segment in ``block`` to a
    strictly slower hole in ``block``.

    One candidate per (source fragment, hole window): a whole move when the
    fragment fits (exact or with slack), otherwise the largest partial move that
    keeps the task's two pieces disjoint in time. Candidates honour precedence,
    machine and task overlap, and the makespan ``span`` (default: current).
    Segments in ``frozen`` may only be moved whole.
    """
    view = _View(schedule)
    if span is None:
        span = makespan(schedule)
    out = []
    for sigma in schedule.segments:
        if sigma.end <= block.start or sigma.start >= block.end:
            continue
        out.extend(_candidates_for(view, sigma, block, params, allowed_speeds, span,
                                   partial_ok=sigma not in frozen))
    return [c for c in out if c.energy_delta < 0]


def apply_move(schedule: Schedule, move: MoveCandidate) -> tuple[Schedule, Segment | None]:
    """Return the new schedule and the remainder segment (if any)."""
    sigma = move.source
    segs = [s for s in schedule.segments if s != sigma]
    p, q = move.fragment
    if sigma.start < p:
        segs.append(Segment(sigma.start, p, sigma.machine, sigma.task))
    if q < sigma.end:
        segs.append(Segment(q, sigma.end, sigma.machine, sigma.task))
    rem = None
    if move.remainder is not None:
        rem = Segment(move.remainder[0], move.remainder[1], sigma.machine, sigma.task)
        segs.append(rem)
    segs.append(Segment(move.placed[0], move.placed[1], move.target.machine, sigma.task))
    return Schedule(schedule.instance, merge_abutting(segs)), rem


def _rank(move: MoveCandidate, targets, speeds):
    c_u = speeds[move.source.machine]
    c_v = move.target.speed
    return (
        move.fragment[0],
        move.source.machine,
        abs(c_v - targets[c_u]),
        c_v,  # equal distance: lower speed first
        move.energy_delta,
        move.placed[0],
        move.target.machine,
    )


def _split_at(schedule: Schedule, cuts) -> Schedule:
    segs = []
    for s in schedule.segments:
        pieces = [s.start] + [c for c in cuts if s.start < c < s.end] + [s.end]
        segs.extend(Segment(a, b, s.machine, s.task) for a, b in zip(pieces, pieces[1:]))
    return Schedule(schedule.instance, segs)


def save_energy(schedule: Schedule, params: EnergyParams, max_rounds: int = MAX_ROUNDS) -> Schedule:
    """Apply energy-reducing moves block by block until none is left.

    Each round makes one pass per slower speed class (``c(2)`` down to ``c(m)``),
    admitting holes at speeds from ``c(2)`` down to the pass class; within a
    pass a fragment is split at most once. Rounds repeat until no block admits
    a move, which is the local-optimality condition checked by
    :func:`verify_local_optimality`.
    """
    speeds = schedule.instance.config.speeds
    classes = sorted(set(speeds), reverse=True)
    targets = {c: optimal_target_speed(c, params) for c in classes}
    span = makespan(schedule)
    current = Schedule(schedule.instance, merge_abutting(schedule.segments))
    moves = 0
    for _ in range(max_rounds):
        blocks = supported_set_blocks(current)
        current = _split_at(current, [b.start for b in blocks[1:]])
        for i in range(1, len(classes)):
            allowed = set(classes[1 : i + 1])
            for block in blocks:
                frozen = set()
                while moves < MAX_MOVES:
                    cands = enumerate_moves(current, params, block, allowed, span, frozen)
                    if not cands:
                        break
                    best = min(cands, key=lambda mv: _rank(mv, targets, speeds))
                    current, rem = apply_move(current, best)
                    moves += 1
                    if rem is not None:
                        frozen = {s for s in current.segments if s.task == rem.task and s.machine == rem.machine
                                  and s.start <= rem.start and rem.end <= s.end} | {
                            s for s in frozen if s in current.segments}
        current = Schedule(current.instance, merge_abutting(current.segments))
        if verify_local_optimality(current, params, span) is None:
            return current
        if moves >= MAX_MOVES:
            break
    log.warning("save_energy stopped after %d moves without reaching a fixed point", moves)
    return current


def verify_local_optimality(schedule: Schedule, params: EnergyParams, span=None) -> MoveCandidate | None:
    """Search every block for an admissible energy-reducing move; None if there is none."""
    if span is None:
        span = makespan(schedule)
    for block in supported_set_blocks(schedule):
        cands = enumerate_moves(schedule, params, block, None, span)
        if cands:
            return min(cands, key=lambda mv: (mv.energy_delta, mv.fragment[0], mv.source.machine))
    return None
