"""Seeded instance corpora and small independent oracles for the test-suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from asymsched.taskmodel import Instance, chain_instance, instance_from_json


def random_lengths(rng: random.Random, n: int, r: int) -> list[int]:
    cuts = sorted(rng.sample(range(1, n), r - 1)) if r > 1 else []
    return sorted((b - a for a, b in zip([0] + cuts, cuts + [n])), reverse=True)


def random_chain_instance(rng: random.Random, max_n=12, max_m=4, speeds=(2, 3, 4), min_m=2) -> Instance:
    """Chains on one fast machine of speed s and m-1 unit machines."""
    n = rng.randint(1, max_n)
    r = rng.randint(1, n)
    m = rng.randint(min_m, max_m)
    s = rng.choice(speeds)
    return chain_instance(random_lengths(rng, n, r), [s] + [1] * (m - 1))


def chain_corpus(count: int, seed: int = 2024, **kw) -> list[Instance]:
    rng = random.Random(seed)
    return [random_chain_instance(rng, **kw) for _ in range(count)]


def two_speed_chain_corpus(count: int, seed: int = 7, max_n=10, max_m=4) -> list[Instance]:
    """Chains with m_s >= 1 fast machines, including the all-fast case."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_n)
        lengths = random_lengths(rng, n, rng.randint(1, n))
        m = rng.randint(1, max_m)
        m_s = rng.randint(1, m)
        s = rng.choice([2, 3, 4, Fraction(3, 2), Fraction(5, 2)])
        out.append(chain_instance(lengths, [s] * m_s + [1] * (m - m_s)))
    return out


def random_dag_instance(rng: random.Random, n: int, p: float, speeds) -> Instance:
    edges = [[a, b] for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    perm = list(range(n))
    rng.shuffle(perm)  # ids need not follow a topological order
    edges = [[perm[a], perm[b]] for a, b in edges]
    return instance_from_json({"n": n, "edges": edges, "speeds": [str(c) for c in speeds]})


def dag_corpus(count: int, seed: int = 11, max_n=8, max_m=3) -> list[Instance]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_n)
        m = rng.randint(1, max_m)
        speeds = sorted((rng.choice([1, 2, 3, Fraction(3, 2)]) for _ in range(m)), reverse=True)
        out.append(random_dag_instance(rng, n, rng.choice([0.1, 0.3, 0.5]), speeds))
    return out


def brute_force_optimum(instance: Instance) -> Fraction:
    """Non-preemptive optimum by plain enumeration.

    Every semi-active schedule arises from some topological order plus a machine
    per task, placing each task as early as its machine and predecessors allow.
    Exponential: keep n <= 6 and m <= 3.
    """
    g = instance.graph
    speeds = instance.config.speeds
    n, m = g.n, len(speeds)
    if n == 0:
        return Fraction(0)
    best = None
    for order in itertools.permutations(range(n)):
        pos = {t: i for i, t in enumerate(order)}
        if any(pos[u] > pos[v] for u, v in g.edges):
            continue
        for machines in itertools.product(range(m), repeat=n):
            free = [Fraction(0)] * m
            end = {}
            for t, q in zip(order, machines):
                start = max([free[q]] + [end[p] for p in g.preds[t]])
                end[t] = start + 1 / speeds[q]
                free[q] = end[t]
            span = max(end.values())
            if best is None or span < best:
                best = span
    return best
