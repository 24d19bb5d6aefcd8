"""Task systems, machines and exact-rational quantities.

Every time, speed and energy value in the package is a :class:`fractions.Fraction`.
Tasks are unit-work nodes ``0..n-1`` of a DAG; machines are uniformly related and
described only by their speeds.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CycleDetected, InvalidInstance, InvalidTaskId

Rational = Fraction


def parse_rational(value) -> Fraction:
    """Parse ``"p"``, ``"p/q"``, an int or a Fraction. Floats are refused."""
    if isinstance(value, bool) or isinstance(value, float):
        raise InvalidInstance(f"refusing inexact rational {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise InvalidInstance(f"rational strings must be 'p' or 'p/q', got {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"bad rational {value!r}") from exc
    raise InvalidInstance(f"cannot read {value!r} as a rational")


def render_rational(q: Fraction) -> str:
    return str(Fraction(q))


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class TaskGraph:
    """A DAG of unit tasks. Build it with :func:`validate_dag`."""

    n: int
    edges: tuple[tuple[int, int], ...]
    topo_order: tuple[int, ...]

    @cached_property
    def preds(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.n)]
        for u, v in self.edges:
            out[v].append(u)
        return tuple(tuple(p) for p in out)

    @cached_property
    def succs(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.n)]
        for u, v in self.edges:
            out[u].append(v)
        return tuple(tuple(s) for s in out)

    @property
    def roots(self) -> list[int]:
        return [j for j in range(self.n) if not self.preds[j]]

    def longest_path(self, weight=None):
        """Maximum total weight of a directed path (``weight(j)`` defaults to 1)."""
        if weight is None:
            weight = lambda j: 1  # noqa: E731
        best = {}
        top = 0
        for j in self.topo_order:
            w = weight(j) + max((best[p] for p in self.preds[j]), default=0)
            best[j] = w
            top = max(top, w)
        return top


def _find_cycle(n, succs, alive):
    color = {v: 0 for v in alive}
    parent = {}
    for root in sorted(alive):
        if color[root]:
            continue
        stack = [(root, iter(succs[root]))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in color:
                    continue
                if color[nxt] == 1:
                    cycle = [nxt]
                    cur = node
                    while cur != nxt:
                        cycle.append(cur)
                        cur = parent[cur]
                    cycle.append(nxt)
                    return cycle[::-1]
                if color[nxt] == 0:
                    color[nxt] = 1
                    parent[nxt] = node
                    stack.append((nxt, iter(succs[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return []


def validate_dag(edges: Iterable[Sequence[int]], n: int) -> TaskGraph:
    """Check ids and acyclicity; duplicate edges are collapsed.

    Raises :class:`InvalidTaskId` or :class:`CycleDetected` (carrying one cycle).
    The cached topological order is Kahn's order with smallest-id-first.
    """
    if n < 0:
        raise InvalidInstance("task count must be non-negative")
    clean = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        for t in (u, v):
            if not 0 <= t < n:
                raise InvalidTaskId(t, n)
        if u == v:
            raise CycleDetected([u, u])
        clean.add((u, v))
    ordered = tuple(sorted(clean))
    succs = [[] for _ in range(n)]
    indeg = [0] * n
    for u, v in ordered:
        succs[u].append(v)
        indeg[v] += 1

    import heapq

    heap = [j for j in range(n) if indeg[j] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        j = heapq.heappop(heap)
        order.append(j)
        for k in succs[j]:
            indeg[k] -= 1
            if indeg[k] == 0:
                heapq.heappush(heap, k)
    if len(order) < n:
        alive = {j for j in range(n) if indeg[j] > 0}
        raise CycleDetected(_find_cycle(n, succs, alive))
    return TaskGraph(n, ordered, tuple(order))


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class ChainSet:
    """Disjoint chains covering a graph, longest first.

    ``cross_edges`` holds the graph edges between different chains; the chain
    model of the scheduling algorithms ignores them, so they are kept on the side.
    """

    chains: tuple[tuple[int, ...], ...]
    cross_edges: tuple[tuple[int, int], ...] = ()

    @property
    def lengths(self) -> list[int]:
        return [len(c) for c in self.chains]

    @property
    def r(self) -> int:
        return len(self.chains)

    @property
    def n(self) -> int:
        return sum(self.lengths)

    def position(self) -> dict[int, tuple[int, int]]:
        """Map task -> (chain index, position in chain)."""
        return {t: (i, k) for i, c in enumerate(self.chains) for k, t in enumerate(c)}


def make_chain_set(graph: TaskGraph, chains: Sequence[Sequence[int]]) -> ChainSet:
    """Validate an explicit decomposition against ``graph`` and sort it."""
    seen = set()
    for chain in chains:
        for t in chain:
            if not 0 <= t < graph.n:
                raise InvalidTaskId(t, graph.n)
            if t in seen:
                raise InvalidInstance(f"task {t} appears in two chains")
            seen.add(t)
    if len(seen) != graph.n:
        missing = sorted(set(range(graph.n)) - seen)
        raise InvalidInstance(f"chains do not cover tasks {missing}")
    edge_set = set(graph.edges)
    for chain in chains:
        for a, b in zip(chain, chain[1:]):
            if (a, b) not in edge_set:
                raise InvalidInstance(f"chain link {a}->{b} is not a graph edge")
    ordered = sorted((tuple(c) for c in chains if c), key=len, reverse=True)
    owner = {t: i for i, c in enumerate(ordered) for t in c}
    cross = tuple(e for e in graph.edges if owner[e[0]] != owner[e[1]])
    return ChainSet(tuple(ordered), cross)


def decompose_chains(graph: TaskGraph) -> ChainSet:
    """Greedy longest-path peeling.

    Repeatedly removes the lexicographically smallest longest path of the
    remaining induced subgraph. This is not the cubic maximal-decomposition
    method; it is deterministic and always yields a valid :class:`ChainSet`.
    """
    alive = set(range(graph.n))
    chains = []
    while alive:
        # longest path starting at each alive node, over alive nodes only
        down = {}
        for j in reversed(graph.topo_order):
            if j in alive:
                down[j] = 1 + max((down[k] for k in graph.succs[j] if k in alive), default=0)
        top = max(down.values())
        node = min(j for j in alive if down[j] == top)
        path = [node]
        while down[node] > 1:
            node = min(k for k in graph.succs[node] if k in alive and down[k] == down[node] - 1)
            path.append(node)
        chains.append(tuple(path))
        alive.difference_update(path)
    return make_chain_set(graph, chains)


# ---------------------------------------------------------------------------
# machines


@dataclass(frozen=True)
class TwoSpeedView:
    m: int
    m_s: int
    s: Fraction


@dataclass(frozen=True)
class MachineConfig:
    """Machine speeds, stored non-increasing so machine 0 is the fastest."""

    speeds: tuple[Fraction, ...]

    def __init__(self, speeds: Iterable):
        vals = tuple(sorted((parse_rational(c) for c in speeds), reverse=True))
        if not vals:
            raise InvalidInstance("at least one machine is required")
        if vals[-1] <= 0:
            raise InvalidInstance("speeds must be positive")
        object.__setattr__(self, "speeds", vals)

    @property
    def m(self) -> int:
        return len(self.speeds)

    @property
    def capability(self) -> Fraction:
        """Total capability ``p``: the sum of all speeds."""
        return sum(self.speeds, Fraction(0))

    @property
    def distinct_speeds(self) -> list[Fraction]:
        return sorted(set(self.speeds), reverse=True)

    @property
    def two_speed(self) -> TwoSpeedView | None:
        return is_two_speed(self)

    def is_symmetric(self) -> bool:
        return len(set(self.speeds)) == 1


def is_two_speed(config: MachineConfig) -> TwoSpeedView | None:
    """Return ``(m, m_s, s)`` when speeds are ``m_s`` copies of ``s > 1`` plus ones."""
    s = config.speeds[0]
    if s <= 1:
        return None
    m_s = sum(1 for c in config.speeds if c == s)
    if any(c != 1 for c in config.speeds[m_s:]):
        return None
    return TwoSpeedView(config.m, m_s, s)


@dataclass(frozen=True)
class EnergyParams:
    """Power at speed ``c`` is ``c**alpha``.

    ``exact`` demands a rational ``c**alpha``; with ``exact=False`` non-rational
    powers are rounded to 64 fractional bits.
    """

    alpha: Fraction
    exact: bool = True

    def __post_init__(self):
        a = parse_rational(self.alpha)
        object.__setattr__(self, "alpha", a)
        if a <= 1:
            raise InvalidInstance("alpha must exceed 1")


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Instance:
    graph: TaskGraph
    config: MachineConfig
    chains: ChainSet | None = field(default=None)

    @property
    def n(self) -> int:
        return self.graph.n

    def chain_set(self) -> ChainSet:
        return self.chains if self.chains is not None else decompose_chains(self.graph)

    def is_chain_instance(self) -> bool:
        return not self.chain_set().cross_edges

    def with_config(self, config: MachineConfig) -> "Instance":
        return Instance(self.graph, config, self.chains)

    def to_json(self) -> dict:
        out = {
            "n": self.graph.n,
            "edges": [list(e) for e in self.graph.edges],
            "speeds": [render_rational(c) for c in self.config.speeds],
        }
        if self.chains is not None:
            out["chains"] = [list(c) for c in self.chains.chains]
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def instance_from_json(data: dict) -> Instance:
    """Build an instance from the JSON file schema.

    Chain links listed under ``"chains"`` are precedence edges by definition and
    are added to ``"edges"`` if absent.
    """
    try:
        n = int(data["n"])
        edges = [tuple(e) for e in data.get("edges", [])]
        speeds = data["speeds"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed instance: {exc}") from exc
    chains = data.get("chains")
    if chains is not None:
        for c in chains:
            edges.extend(zip(c, c[1:]))
    graph = validate_dag(edges, n)
    config = MachineConfig(speeds)
    chain_set = make_chain_set(graph, chains) if chains is not None else None
    return Instance(graph, config, chain_set)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_json(json.load(fh))


def chain_instance(lengths: Sequence[int], speeds: Iterable) -> Instance:
    """Independent chains with task ids assigned chain by chain."""
    chains, edges, nxt = [], [], 0
    for length in lengths:
        chain = list(range(nxt, nxt + length))
        nxt += length
        chains.append(chain)
        edges.extend(zip(chain, chain[1:]))
    graph = validate_dag(edges, nxt)
    return Instance(graph, MachineConfig(speeds), make_chain_set(graph, chains))
