"""Dense two-phase simplex over Fractions with Bland's rule.

Solves ``min c.x`` subject to linear rows (``<=``, ``>=``, ``==``) and ``x >= 0``.
Exact, so optimal values compare exactly against combinatorial bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import Infeasible, Unbounded

LE, GE, EQ = "<=", ">=", "=="


@dataclass
class Row:
    name: str
    group: str
    coeffs: dict  # variable name -> Fraction
    sense: str
    rhs: Fraction


@dataclass
class LinearProgram:
    """Minimisation problem over non-negative variables."""

    variables: list[str]
    objective: dict
    rows: list[Row] = field(default_factory=list)
    integral: set = field(default_factory=set)

    def add(self, name, group, coeffs, sense, rhs=0):
        self.rows.append(Row(name, group, {k: Fraction(v) for k, v in coeffs.items() if v}, sense, Fraction(rhs)))

    def count(self, group: str) -> int:
        return sum(1 for r in self.rows if r.group == group)

    def relaxed(self) -> "LinearProgram":
        return LinearProgram(list(self.variables), dict(self.objective), list(self.rows), set())


@dataclass
class LpResult:
    value: Fraction
    x: dict
    pivots: int


def solve(lp: LinearProgram, max_pivots: int = 100_000) -> LpResult:
    if lp.integral:
        raise ValueError("solve() handles the continuous relaxation only")
    names = list(lp.variables)
    index = {v: i for i, v in enumerate(names)}
    nv = len(names)
    rows = []
    for r in lp.rows:
        a = [Fraction(0)] * nv
        for k, v in r.coeffs.items():
            a[index[k]] += v
        b, sense = r.rhs, r.sense
        if b < 0:
            a = [-x for x in a]
            b = -b
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        rows.append((a, sense, b))

    # columns: originals, then one slack/surplus per inequality, then artificials
    n_slack = sum(1 for _, s, _ in rows if s != EQ)
    n_art = sum(1 for _, s, _ in rows if s != LE)
    width = nv + n_slack + n_art
    tab = []
    basis = []
    artificial = set()
    si, ai = nv, nv + n_slack
    for a, sense, b in rows:
        line = a + [Fraction(0)] * (n_slack + n_art) + [b]
        if sense == LE:
            line[si] = Fraction(1)
            basis.append(si)
            si += 1
        else:
            if sense == GE:
                line[si] = Fraction(-1)
                si += 1
            line[ai] = Fraction(1)
            basis.append(ai)
            artificial.add(ai)
            ai += 1
        tab.append(line)

    pivots = [0]

    def run(cost, allowed):
        # reduced-cost row: z_j - c_j form with objective value in last slot
        z = [Fraction(0)] * (width + 1)
        for j in range(width):
            z[j] = -cost[j]
        for i, bv in enumerate(basis):
            cb = cost[bv]
            if cb:
                line = tab[i]
                for j in range(width + 1):
                    if line[j]:
                        z[j] += cb * line[j]
        while True:
            enter = next((j for j in range(width) if allowed[j] and z[j] > 0), None)
            if enter is None:
                return z
            best = None
            for i, line in enumerate(tab):
                if line[enter] > 0:
                    ratio = line[width] / line[enter]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise Unbounded("objective is unbounded below")
            pivots[0] += 1
            if pivots[0] > max_pivots:
                raise RuntimeError("pivot limit exceeded")
            _pivot(tab, z, best[1], enter, width)
            basis[best[1]] = enter

    allowed = [True] * width
    if artificial:
        cost1 = [Fraction(1) if j in artificial else Fraction(0) for j in range(width)]
        z = run(cost1, allowed)
        if z[width] != 0:
            raise Infeasible("linear program has no feasible point")
        # drive artificials out of the basis where possible
        for i, bv in enumerate(basis):
            if bv in artificial:
                col = next((j for j in range(nv + n_slack) if tab[i][j] != 0), None)
                if col is not None:
                    _pivot(tab, None, i, col, width)
                    basis[i] = col
        for j in artificial:
            allowed[j] = False
    cost2 = [Fraction(0)] * width
    for k, v in lp.objective.items():
        cost2[index[k]] = Fraction(v)
    z = run(cost2, allowed)
    x = {v: Fraction(0) for v in names}
    for i, bv in enumerate(basis):
        if bv < nv:
            x[names[bv]] = tab[i][width]
    value = sum((Fraction(lp.objective.get(v, 0)) * x[v] for v in names), Fraction(0))
    return LpResult(value, x, pivots[0])


def _pivot(tab, z, r, c, width):
    line = tab[r]
    piv = line[c]
    if piv != 1:
        for j in range(width + 1):
            if line[j]:
                line[j] /= piv
    nz = [j for j in range(width + 1) if line[j]]
    for i, other in enumerate(tab):
        if i != r:
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * line[j]
    if z is not None:
        f = z[c]
        if f:
            for j in nz:
                z[j] -= f * line[j]
