"""Exact linear programming over Fractions.

Dense two-phase simplex with Bland's anti-cycling rule. All variables are
implicitly non-negative; callers model free variables as differences. The
problems solved in this package are tiny (tens of variables), so exact
rational pivoting is fast enough and removes every floating-point tolerance
question from feasibility and projection logic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import UsageError
from .rationals import ZERO

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: Optional[tuple]
    objective: Optional[Fraction]


def _pivot(tab, basis, row: int, col: int) -> None:
    piv = tab[row][col]
    inv = 1 / piv
    tab[row] = [v * inv for v in tab[row]]
    prow = tab[row]
    for r in range(len(tab)):
        if r == row:
            continue
        factor = tab[r][col]
        if factor != 0:
            tab[r] = [a - factor * b for a, b in zip(tab[r], prow)]
    basis[row] = col


def _run_simplex(tab, basis, cost) -> str:
    """Minimize cost over the current tableau; returns OPTIMAL or UNBOUNDED."""
    m = len(tab)
    ncols = len(tab[0]) - 1
    while True:
        # Reduced costs c_j - c_B . column_j, recomputed exactly each round.
        cb = [cost[b] for b in basis]
        entering = -1
        for j in range(ncols):
            if j in basis:
                continue
            red = cost[j] - sum(cb[r] * tab[r][j] for r in range(m) if cb[r] != 0)
            if red < 0:
                entering = j  # Bland: first (smallest-index) improving column
                break
        if entering < 0:
            return OPTIMAL
        leaving = -1
        best_ratio = None
        for r in range(m):
            a = tab[r][entering]
            if a > 0:
                ratio = tab[r][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = r
        if leaving < 0:
            return UNBOUNDED
        _pivot(tab, basis, leaving, entering)


def solve_lp(
    c: Sequence,
    A_ub: Optional[Sequence[Sequence]] = None,
    b_ub: Optional[Sequence] = None,
    A_eq: Optional[Sequence[Sequence]] = None,
    b_eq: Optional[Sequence] = None,
) -> LPResult:
    """Minimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0. Exact."""
    c = [Fraction(v) for v in c]
    n = len(c)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    slack_rows: list[int] = []
    if A_ub is not None:
        for a, b in zip(A_ub, b_ub):
            if len(a) != n:
                raise UsageError("constraint width does not match objective")
            slack_rows.append(len(rows))
            rows.append([Fraction(v) for v in a])
            rhs.append(Fraction(b))
    if A_eq is not None:
        for a, b in zip(A_eq, b_eq):
            if len(a) != n:
                raise UsageError("constraint width does not match objective")
            rows.append([Fraction(v) for v in a])
            rhs.append(Fraction(b))
    m = len(rows)
    if m == 0:
        if all(v >= 0 for v in c):
            return LPResult(OPTIMAL, tuple([ZERO] * n), ZERO)
        return LPResult(UNBOUNDED, None, None)

    n_slack = len(slack_rows)
    total = n + n_slack + m  # structural + slack + one artificial per row
    tab = []
    for r in range(m):
        row = rows[r] + [ZERO] * (n_slack + m) + [rhs[r]]
        if r in slack_rows:
            row[n + slack_rows.index(r)] = Fraction(1)
        tab.append(row)
    for r in range(m):
        if tab[r][-1] < 0:
            tab[r] = [-v for v in tab[r]]
        tab[r][n + n_slack + r] = Fraction(1)
    basis = [n + n_slack + r for r in range(m)]

    phase1 = [ZERO] * (n + n_slack) + [Fraction(1)] * m
    status = _run_simplex(tab, basis, phase1)
    assert status == OPTIMAL  # phase-1 objective is bounded below by 0
    obj1 = sum(phase1[basis[r]] * tab[r][-1] for r in range(m))
    if obj1 != 0:
        return LPResult(INFEASIBLE, None, None)

    # Drive any zero-valued artificials out of the basis; rows with no real
    # pivot candidate are redundant and get dropped.
    r = 0
    while r < len(tab):
        if basis[r] >= n + n_slack:
            col = next((j for j in range(n + n_slack) if tab[r][j] != 0), None)
            if col is None:
                del tab[r], basis[r]
                continue
            _pivot(tab, basis, r, col)
        r += 1
    keep = n + n_slack
    tab = [row[:keep] + [row[-1]] for row in tab]

    phase2 = c + [ZERO] * n_slack
    status = _run_simplex(tab, basis, phase2)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None)
    x = [ZERO] * n
    for r, b in enumerate(basis):
        if b < n:
            x[b] = tab[r][-1]
    obj = sum(ci * xi for ci, xi in zip(c, x))
    return LPResult(OPTIMAL, tuple(x), obj)
