"""The round-based "Remnants" scheduler for chains on one fast and m-1 unit machines.

Round ``k`` covers the window ``[k-1, k]``. The fast machine (speed ``s``, an
integer) serves up to ``s`` head tasks, draining the longest remnants first; each
slow machine then takes the head of one remnant the fast machine did not touch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CrossChainEdges, GuaranteeViolated, NonIntegerSpeed, NotSingleFast, NotTwoSpeed
from .schedule import Schedule, Segment, makespan
from .taskmodel import ChainSet, Instance, is_two_speed


@dataclass
class RoundTrace:
    round: int
    remnant_lengths: list[int]
    order: list[int]  # original chain indices, sorted by remnant length
    fast_picks: list[tuple[int, int]] = field(default_factory=list)  # (chain, count)
    slow_picks: list[tuple[int, int]] = field(default_factory=list)  # (chain, machine)
    g: int = 0

    def to_json(self) -> dict:
        return {
            "round": self.round,
            "g": self.g,
            "remnant_lengths": self.remnant_lengths,
            "order": self.order,
            "fast_picks": [list(p) for p in self.fast_picks],
            "slow_picks": [list(p) for p in self.slow_picks],
        }


def _check(instance: Instance) -> tuple[ChainSet, int]:
    view = is_two_speed(instance.config)
    if view is None:
        raise NotTwoSpeed("Remnants needs one fast machine and unit-speed machines")
    if view.m_s != 1:
        raise NotSingleFast(f"Remnants needs exactly one fast machine, got {view.m_s}")
    if view.s.denominator != 1:
        raise NonIntegerSpeed(f"fast speed {view.s} is not an integer")
    chains = instance.chain_set()
    if chains.cross_edges:
        raise CrossChainEdges(f"{len(chains.cross_edges)} edges run between chains")
    return chains, int(view.s)


def remnants_schedule(instance: Instance) -> tuple[Schedule, list[RoundTrace]]:
    chains, s = _check(instance)
    m = instance.config.m
    fast_dur = Fraction(1, s)
    heads = [0] * chains.r
    segments = []
    traces = []
    k = 0
    while True:
        alive = [i for i in range(chains.r) if heads[i] < len(chains.chains[i])]
        if not alive:
            break
        k += 1
        t0 = Fraction(k - 1)
        rem = {i: len(chains.chains[i]) - heads[i] for i in alive}
        order = sorted(alive, key=lambda i: (-rem[i], i))  # stable on chain index
        trace = RoundTrace(k, [rem[i] for i in order], order, g=len(order))

        budget, v, slot = s, 0, 0
        while budget > 0 and v < len(order):
            i = order[v]
            p = min(budget, rem[i])
            for _ in range(p):
                task = chains.chains[i][heads[i]]
                segments.append(Segment(t0 + slot * fast_dur, t0 + (slot + 1) * fast_dur, 0, task))
                heads[i] += 1
                slot += 1
            trace.fast_picks.append((i, p))
            budget -= p
            v += 1

        # slow machines 1..m-1 serve the next remnants in sorted order
        for machine, w in enumerate(range(v, min(len(order), v + m - 1)), start=1):
            i = order[w]
            task = chains.chains[i][heads[i]]
            segments.append(Segment(t0, t0 + 1, machine, task))
            heads[i] += 1
            trace.slow_picks.append((i, machine))
        traces.append(trace)
    return Schedule(instance, segments), traces


def check_remnants_guarantee(instance: Instance, t_opt: Fraction) -> Fraction:
    """Return the Remnants makespan, raising if it exceeds ``t_opt + 1/s``."""
    sched, _ = remnants_schedule(instance)
    span = makespan(sched)
    s = instance.config.speeds[0]
    if span > t_opt + 1 / s:
        raise GuaranteeViolated(instance, span, t_opt)
    return span
