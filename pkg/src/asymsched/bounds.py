"""Lower bounds on the optimal makespan and the list-scheduling quantities."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NoSlowMachines, NotEnoughChains, NotSingleFast, NotTwoSpeed
from .taskmodel import Instance, MachineConfig, TaskGraph, TwoSpeedView, is_two_speed


def _two_speed(config: MachineConfig) -> TwoSpeedView:
    view = is_two_speed(config)
    if view is None:
        raise NotTwoSpeed(f"speeds {list(map(str, config.speeds))} are not of the form s..s,1..1")
    return view


def bound_A(n: int, config: MachineConfig) -> Fraction:
    """Average-load bound ``n / (m_s*s + m - m_s)``."""
    v = _two_speed(config)
    return Fraction(n) / (v.m_s * v.s + v.m - v.m_s)


def bound_B_general(lengths: Sequence[int], config: MachineConfig) -> Fraction:
    """``max_j sum(l_1..l_j) / sum(c(1)..c(j))`` for ``j <= min(r, m)``.

    ``lengths`` must be sorted non-increasing. Works for any speed vector.
    """
    best = Fraction(0)
    num, den = 0, Fraction(0)
    for l, c in zip(lengths, config.speeds):
        num += l
        den += c
        best = max(best, num / den)
    return best


def bound_B_paper_two_speed(lengths: Sequence[int], config: MachineConfig) -> Fraction:
    """Specialised two-speed prefix formula with denominator ``m_s(s-1)+j-1``.

    Kept for comparison only; :func:`bound_B_general` is the one used elsewhere.
    """
    v = _two_speed(config)
    r = len(lengths)
    if v.m_s >= r:
        raise NotEnoughChains(f"m_s={v.m_s} is not below r={r}")
    l_s = sum(lengths[: v.m_s])
    best = None
    for j in range(v.m_s + 1, min(r, v.m) + 1):
        val = Fraction(l_s + sum(lengths[v.m_s : j])) / (v.m_s * (v.s - 1) + j - 1)
        best = val if best is None else max(best, val)
    if best is None:
        raise NotEnoughChains(f"no j in [{v.m_s + 1}, min(r, m)]")
    return best


def bound_single_fast(n: int, r: int, config: MachineConfig) -> Fraction:
    """One fast machine: at most ``s + min(r-1, m)`` tasks per time unit."""
    v = _two_speed(config)
    if v.m_s != 1:
        raise NotSingleFast(f"needs exactly one fast machine, got {v.m_s}")
    return Fraction(n) / (v.s + min(r - 1, v.m))


@dataclass(frozen=True)
class BoundReport:
    A: Fraction
    B_general: Fraction
    B_paper_two_speed: Fraction | None
    single_fast: Fraction | None
    max_lower: Fraction

    def to_json(self) -> dict:
        return {k: (None if v is None else str(v)) for k, v in self.__dict__.items()}


def bound_report(instance: Instance) -> BoundReport:
    """All applicable lower bounds; ``A`` falls back to ``n / sum(c)`` off two-speed."""
    config = instance.config
    chains = instance.chain_set()
    lengths = chains.lengths
    n = instance.n
    a = Fraction(n) / config.capability
    b = bound_B_general(lengths, config)
    view = is_two_speed(config)
    b_paper = single = None
    if view is not None:
        if view.m_s < min(len(lengths), view.m):
            b_paper = bound_B_paper_two_speed(lengths, config)
        if view.m_s == 1 and n > 0:
            single = bound_single_fast(n, len(lengths), config)
    lower = max(a, b)
    if single is not None:
        lower = max(lower, single)
    return BoundReport(a, b, b_paper, single, lower)


@dataclass(frozen=True)
class ListBoundReport:
    C: Fraction
    D_s: Fraction
    D_1: Fraction
    n_s: int

    @property
    def total(self) -> Fraction:
        return self.C + self.D_s + self.D_1


def list_bound_quantities(graph: TaskGraph, fast: Sequence[bool], config: MachineConfig) -> ListBoundReport:
    """``C``, ``D_s`` and ``D_1`` for a speed assignment (``fast[j]`` true = speed ``s``).

    ``C`` is the heaviest directed path with task weight ``1/c(j)``; on a chain
    instance this is the heaviest chain.
    """
    v = _two_speed(config)
    n = graph.n
    n_s = sum(1 for f in fast if f)
    if n_s < n and v.m == v.m_s:
        raise NoSlowMachines("tasks assigned slow but every machine is fast")
    inv_s = 1 / v.s
    one = Fraction(1)
    c = graph.longest_path(lambda j: inv_s if fast[j] else one)
    d_s = Fraction(n_s) / (v.s * v.m_s)
    d_1 = Fraction(n - n_s, v.m - v.m_s) if n - n_s else Fraction(0)
    return ListBoundReport(Fraction(c), d_s, d_1, n_s)
