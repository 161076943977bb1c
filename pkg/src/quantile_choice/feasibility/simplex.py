"""Exact two-phase simplex over the rationals.

The tableau is kept in fraction-free integer form: every entry is an integer
and the true tableau is ``T / D`` where ``D`` is the determinant of the current
basis.  A pivot on ``(r, c)`` updates every other row as
``(T[i][j] * p - T[i][c] * T[r][j]) // D`` which is always an exact division.
Entering and leaving variables follow Bland's rule, so the method terminates
on degenerate problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

LE, GE, EQ = "<=", ">=", "=="


@dataclass
class LinearProgram:
    """``maximize objective . x`` subject to ``rows`` and ``x >= 0``."""

    n_vars: int
    rows: list[tuple[dict[int, Fraction], str, Fraction]] = field(default_factory=list)
    objective: dict[int, Fraction] = field(default_factory=dict)

    def add(self, coeffs: Mapping[int, Fraction], sense: str, rhs) -> None:
        if sense not in (LE, GE, EQ):
            raise ValueError(f"unknown constraint sense {sense!r}")
        for j in coeffs:
            if not 0 <= j < self.n_vars:
                raise IndexError(f"variable {j} out of range")
        self.rows.append((dict(coeffs), sense, Fraction(rhs)))


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _scaled_row(coeffs: Mapping[int, Fraction], rhs: Fraction) -> tuple[dict[int, int], int]:
    den = 1
    for v in list(coeffs.values()) + [rhs]:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return ({j: int(v * den) for j, v in coeffs.items() if v != 0}, int(rhs * den))


class _Tableau:
    def __init__(self, rows: list[list[int]], basis: list[int], n_cols: int):
        self.rows = rows  # rows[0] is the objective row; last entry is the rhs
        self.basis = basis  # basis[i] is the basic column of rows[i + 1]
        self.n_cols = n_cols
        self.det = 1

    def pivot(self, r: int, c: int) -> None:
        rows = self.rows
        prow = rows[r]
        p = prow[c]
        d = self.det
        width = len(prow)
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[c]
            if f == 0:
                if p != d:
                    rows[i] = [v * p // d for v in row]
                continue
            rows[i] = [(row[j] * p - f * prow[j]) // d for j in range(width)]
        self.det = p
        self.basis[r - 1] = c
        if p < 0:
            self.rows = [[-v for v in row] for row in self.rows]
            self.det = -p

    def entering(self, allowed: int) -> Optional[int]:
        obj = self.rows[0]
        for j in range(allowed):
            if obj[j] < 0:
                return j
        return None

    def leaving(self, c: int) -> Optional[int]:
        best = None
        for i in range(1, len(self.rows)):
            a = self.rows[i][c]
            if a <= 0:
                continue
            b = self.rows[i][-1]
            if best is None:
                best = i
                continue
            bb, ba = self.rows[best][-1], self.rows[best][c]
            lhs, rhs = b * ba, bb * a
            if lhs < rhs or (lhs == rhs and self.basis[i - 1] < self.basis[best - 1]):
                best = i
        return best

    def run(self, allowed: int) -> str:
        while True:
            c = self.entering(allowed)
            if c is None:
                return "optimal"
            r = self.leaving(c)
            if r is None:
                return "unbounded"
            self.pivot(r, c)

    def values(self, n: int) -> list[Fraction]:
        x = [Fraction(0)] * n
        for i, col in enumerate(self.basis):
            if col < n:
                x[col] = Fraction(self.rows[i + 1][-1], self.det)
        return x


def solve(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly; returns an optimal vertex when one exists."""
    n = lp.n_vars
    prepared = []
    for coeffs, sense, rhs in lp.rows:
        ic, ib = _scaled_row(coeffs, rhs)
        if ib < 0:
            ic = {j: -v for j, v in ic.items()}
            ib = -ib
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        prepared.append((ic, sense, ib))

    n_slack = sum(1 for _, s, _ in prepared if s != EQ)
    n_art = sum(1 for _, s, _ in prepared if s != LE)
    first_art = n + n_slack
    n_cols = first_art + n_art

    rows: list[list[int]] = [[0] * (n_cols + 1)]
    basis = []
    slack = n
    art = first_art
    for ic, sense, ib in prepared:
        row = [0] * (n_cols + 1)
        for j, v in ic.items():
            row[j] = v
        row[-1] = ib
        if sense == LE:
            row[slack] = 1
            basis.append(slack)
            slack += 1
        else:
            if sense == GE:
                row[slack] = -1
                slack += 1
            row[art] = 1
            basis.append(art)
            art += 1
        rows.append(row)

    # phase 1: maximize -sum(artificials)
    obj = rows[0]
    for i, col in enumerate(basis):
        if col >= first_art:
            row = rows[i + 1]
            for j in range(first_art):
                obj[j] -= row[j]
            obj[-1] -= row[-1]
    tab = _Tableau(rows, basis, n_cols)
    tab.run(first_art)
    if tab.rows[0][-1] != 0:
        return LPResult("infeasible")

    # drive zero-level artificials out of the basis; drop redundant rows
    i = 0
    while i < len(tab.basis):
        if tab.basis[i] >= first_art:
            row = tab.rows[i + 1]
            col = next((j for j in range(first_art) if row[j] != 0), None)
            if col is None:
                del tab.rows[i + 1]
                del tab.basis[i]
                continue
            tab.pivot(i + 1, col)
        i += 1

    # phase 2
    cden = 1
    for v in lp.objective.values():
        cden = cden * v.denominator // math.gcd(cden, v.denominator)
    cost = [0] * first_art
    for j, v in lp.objective.items():
        cost[j] = int(v * cden)
    obj = [0] * (n_cols + 1)
    for j in range(first_art):
        obj[j] = -cost[j] * tab.det
    for i, col in enumerate(tab.basis):
        ck = cost[col] if col < first_art else 0
        if ck:
            row = tab.rows[i + 1]
            for j in range(n_cols + 1):
                obj[j] += ck * row[j]
    tab.rows[0] = obj
    status = tab.run(first_art)
    if status == "unbounded":
        return LPResult("unbounded")
    x = tab.values(n)
    value = sum((v * x[j] for j, v in lp.objective.items()), Fraction(0))
    return LPResult("optimal", tuple(x), value)
