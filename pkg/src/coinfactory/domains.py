"""Compact domains K = [0,1]^n intersected with an affine subspace {Mx = b}.

Everything is exact: membership, l-infinity distance, and projection are
decided by rational LPs, so there is no floating-point acceptance boundary.
The conditional-resampling primitives (draw a sample mean, accept when it
lands near K, project onto K) and their factor-2 domination check live here
too, since they are purely geometric plus lattice enumeration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Callable, Optional

from .bounds import exp_upper
from .errors import ResourceLimitError, UsageError
from .rationals import ONE, ZERO, format_rational, parse_point, parse_rational
from .simplex import OPTIMAL, solve_lp


class AffineCubeDomain:
    """K = {x in [0,1]^n : Mx = b}; non-emptiness is checked at construction."""

    def __init__(self, n: int, M, b):
        if n < 1:
            raise UsageError("dimension must be >= 1")
        self.n = n
        self.M = tuple(tuple(parse_rational(v) for v in row) for row in M)
        self.b = tuple(parse_rational(v) for v in b)
        if len(self.M) != len(self.b):
            raise UsageError("M and b row counts differ")
        for row in self.M:
            if len(row) != n:
                raise UsageError("M row width does not match n")
        self._proj_cache: dict = {}
        self._dist_cache: dict = {}
        if not self._feasible():
            raise UsageError("domain is empty")

    @classmethod
    def from_json(cls, doc) -> "AffineCubeDomain":
        if not isinstance(doc, dict) or "n" not in doc:
            raise UsageError('domain document needs "n", "M", "b"')
        return cls(int(doc["n"]), doc.get("M", []), doc.get("b", []))

    def to_json(self):
        return {
            "n": self.n,
            "M": [[format_rational(v) for v in row] for row in self.M],
            "b": [format_rational(v) for v in self.b],
        }

    def key(self):
        return (self.n, self.M, self.b)

    def _feasible(self) -> bool:
        n = self.n
        res = solve_lp(
            [ZERO] * n,
            A_ub=[[ONE if j == i else ZERO for j in range(n)] for i in range(n)],
            b_ub=[ONE] * n,
            A_eq=[list(row) for row in self.M],
            b_eq=list(self.b),
        )
        return res.status == OPTIMAL

    def contains(self, p) -> bool:
        p = parse_point(p)
        if len(p) != self.n:
            return False
        if any(not 0 <= x <= 1 for x in p):
            return False
        return all(
            sum(m * x for m, x in zip(row, p)) == bv for row, bv in zip(self.M, self.b)
        )

    def linf_dist(self, x) -> Fraction:
        """Minimum l-infinity distance from x to K, exact."""
        x = parse_point(x)
        if x in self._dist_cache:
            return self._dist_cache[x]
        n = self.n
        if len(x) != n:
            raise UsageError("point dimension mismatch")
        # Variables (y_1..y_n, d): minimize d with y_i - d <= x_i, -y_i - d <= -x_i,
        # y_i <= 1, My = b, all variables >= 0.
        c = [ZERO] * n + [ONE]
        A_ub, b_ub = [], []
        for i in range(n):
            row = [ZERO] * (n + 1)
            row[i] = ONE
            row[n] = -ONE
            A_ub.append(row)
            b_ub.append(x[i])
            row = [ZERO] * (n + 1)
            row[i] = -ONE
            row[n] = -ONE
            A_ub.append(row)
            b_ub.append(-x[i])
            row = [ZERO] * (n + 1)
            row[i] = ONE
            A_ub.append(row)
            b_ub.append(ONE)
        A_eq = [list(row) + [ZERO] for row in self.M]
        res = solve_lp(c, A_ub, b_ub, A_eq, list(self.b))
        assert res.status == OPTIMAL  # K is non-empty and the cube is bounded
        self._dist_cache[x] = res.objective
        return res.objective

    def within_ball(self, x, eps) -> bool:
        """True iff dist(x, K) < eps, strictly (the acceptance ball is open)."""
        eps = parse_rational(eps)
        if eps <= 0:
            raise UsageError("eps must be positive")
        return self.linf_dist(x) < eps

    def linf_project(self, x) -> tuple:
        """The lexicographically smallest l-infinity-nearest point of K."""
        x = parse_point(x)
        if x in self._proj_cache:
            return self._proj_cache[x]
        n = self.n
        d = self.linf_dist(x)
        # Fix coordinates one at a time: minimize y_i over the optimal-face
        # polytope {y in K : |y_j - x_j| <= d, y_j = v_j for j < i}.
        fixed: list[Fraction] = []
        for i in range(n):
            c = [ZERO] * n
            c[i] = ONE
            A_ub, b_ub = [], []
            for j in range(n):
                row = [ZERO] * n
                row[j] = ONE
                A_ub.append(row)
                b_ub.append(min(ONE, x[j] + d))
                row = [ZERO] * n
                row[j] = -ONE
                A_ub.append(row)
                b_ub.append(-max(ZERO, x[j] - d))
            A_eq = [list(row) for row in self.M]
            b_eq = list(self.b)
            for j, v in enumerate(fixed):
                row = [ZERO] * n
                row[j] = ONE
                A_eq.append(row)
                b_eq.append(v)
            res = solve_lp(c, A_ub, b_ub, A_eq, b_eq)
            assert res.status == OPTIMAL
            fixed.append(res.objective)
        z = tuple(fixed)
        self._proj_cache[x] = z
        return z


def lattice_counts(n: int, t: int, work_limit: int = 2**24):
    """All count vectors in [0,t]^n; errors out instead of silently truncating."""
    if (t + 1) ** n > work_limit:
        raise ResourceLimitError(
            f"lattice of size {(t + 1) ** n} exceeds work limit {work_limit}"
        )
    return iter_product(range(t + 1), repeat=n)


def lattice_prob(p, counts, t: int) -> Fraction:
    """P[each coin's t-flip count equals counts] under independent biases p."""
    w = ONE
    for x, c in zip(p, counts):
        if x == 0:
            if c != 0:
                return ZERO
            continue
        if x == 1:
            if c != t:
                return ZERO
            continue
        w *= math.comb(t, c) * x**c * (1 - x) ** (t - c)
    return w


def counts_to_point(counts, t: int) -> tuple:
    return tuple(Fraction(c, t) for c in counts)


def domination_precondition(n: int, t: int, eps) -> bool:
    """Certified check of t >= log(8n)/(2 eps^2), i.e. exp(-2 eps^2 t) <= 1/(8n).

    Uses a rational upper bound on exp, so True is a proof; False only means
    the certificate could not be established at this precision.
    """
    eps = parse_rational(eps)
    if eps <= 0 or t < 1:
        raise UsageError("need eps > 0 and t >= 1")
    return exp_upper(-2 * eps**2 * t) <= Fraction(1, 8 * n)


@dataclass
class DominationReport:
    holds: bool
    conditional_prob: Fraction  # P[accepted mean in A | accepted]
    unconditional_prob: Fraction  # P[mean in A]
    accept_prob: Fraction

    def to_json(self):
        return {
            "holds": self.holds,
            "conditional_prob": format_rational(self.conditional_prob),
            "unconditional_prob": format_rational(self.unconditional_prob),
            "accept_prob": format_rational(self.accept_prob),
        }


def resample_domination_check(
    domain: AffineCubeDomain,
    p,
    t: int,
    eps,
    event: Callable[[tuple], bool],
    work_limit: int = 2**24,
) -> DominationReport:
    """Exhaustively verifies P[accepted mean in A] <= 2 P[raw mean in A].

    The accepted mean is the t-flip sample-mean vector conditioned on landing
    within l-infinity distance eps of K. Requires the certified sample-size
    precondition; the factor-2 bound is only guaranteed under it.
    """
    p = parse_point(p)
    eps = parse_rational(eps)
    if not domain.contains(p):
        raise UsageError("p must lie in the domain")
    if not domination_precondition(domain.n, t, eps):
        raise UsageError("t is below the certified resampling threshold for this eps")
    accept_mass = ZERO
    event_raw = ZERO
    event_accepted = ZERO
    for counts in lattice_counts(domain.n, t, work_limit):
        w = lattice_prob(p, counts, t)
        if w == 0:
            continue
        pt = counts_to_point(counts, t)
        in_event = bool(event(pt))
        if in_event:
            event_raw += w
        if domain.within_ball(pt, eps):
            accept_mass += w
            if in_event:
                event_accepted += w
    if accept_mass == 0:
        raise UsageError("acceptance probability is zero at this p (t too small)")
    conditional = event_accepted / accept_mass
    return DominationReport(conditional <= 2 * event_raw, conditional, event_raw, accept_mass)


def sample_mean_point(coins, n: int, t: int) -> tuple:
    """One sample-mean vector from t flips of each of the n coins."""
    return tuple(Fraction(coins.flip_many(i, t), t) for i in range(1, n + 1))


def sample_Z(coins, domain: AffineCubeDomain, t: int, eps) -> tuple:
    """Draw sample means until one lands within eps of K; return its projection.

    Budget exhaustion propagates as BudgetExhausted from the coin source.
    """
    eps = parse_rational(eps)
    if eps <= 0:
        raise UsageError("eps must be positive")
    while True:
        pt = sample_mean_point(coins, domain.n, t)
        if domain.within_ball(pt, eps):
            return domain.linf_project(pt)


def full_cube_domain(n: int) -> AffineCubeDomain:
    """[0,1]^n with no affine constraints."""
    return AffineCubeDomain(n, [], [])
