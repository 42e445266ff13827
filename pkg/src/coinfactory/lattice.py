"""The recursive factory construction.

A target f on the domain is peeled into levels: f_1 = f, and
f_{k+1} = (4/3)(f_k - g_k/4) where g_k(p) is the probability that f_k of the
(possibly projected, acceptance-conditioned) t_k-flip sample mean clears 1/2.
Then f(p) = sum_k (1/4)(3/4)^(k-1) g_k(p), so the sampler draws a geometric
level K, forms one sample-mean point for level K, and outputs the threshold
indicator. Validity of a schedule (every f_k staying inside [0,1]) is not
decidable from the construction alone; it is certified on a grid by
margin_certificate and enforced dynamically at every evaluated point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .bounds import chernoff_bound, hoeffding_bound  # re-exported utilities
from .combinators import geometric_level
from .domains import (
    AffineCubeDomain,
    counts_to_point,
    domination_precondition,
    full_cube_domain,
    lattice_counts,
    lattice_prob,
)
from .errors import CertificateViolationError, ResourceLimitError, UsageError
from .faces import grid_points
from .programs import Procedural
from .rationals import HALF, ONE, ZERO, format_rational, parse_point, parse_rational

__all__ = [
    "LevelSchedule",
    "TargetFunction",
    "FactoryRecursion",
    "threshold_prob",
    "margin_certificate",
    "general_factory",
    "subdomain_factory",
    "hoeffding_bound",
    "chernoff_bound",
]


@dataclass(frozen=True)
class LevelSchedule:
    """Per-level sample size t_k; constant by default.

    max_level is how deep the grid certificate checks; validity beyond it is
    the caller's assertion. level_cap aborts (raising LevelCapExceeded, which
    the harness records as a separate outcome) samples whose geometric level
    exceeds it, rather than truncating silently. Choose the cap at or below
    the deepest level whose residuals have been verified to stay in [0,1]:
    the sampler's conditional output probability then deviates from the
    target by at most (3/4)^cap.
    """

    t_const: int = 64
    t_fn: Optional[Callable[[int], int]] = None
    max_level: int = 4
    level_cap: int = 512

    def t(self, k: int) -> int:
        t = self.t_fn(k) if self.t_fn is not None else self.t_const
        if t < 1:
            raise UsageError("schedule must give t >= 1 at every level")
        return t


class TargetFunction:
    """Exact evaluator [0,1]^n (or K) -> [0,1] on rational points."""

    def __init__(self, n: int, fn: Callable[[tuple], Fraction], name: str = ""):
        if n < 1:
            raise UsageError("target dimension must be >= 1")
        self.n = n
        self.fn = fn
        self.name = name

    def __call__(self, p) -> Fraction:
        v = Fraction(self.fn(tuple(p)))
        if not 0 <= v <= 1:
            raise UsageError(
                f"target {self.name or '<anonymous>'} returned {format_rational(v)} "
                "outside [0,1]"
            )
        return v

    @classmethod
    def from_polynomial(cls, n: int, terms, name: str = "polynomial") -> "TargetFunction":
        """Polynomial target from JSON terms [{"coeff": "1/4", "exponents": [0,2]}]."""
        parsed = []
        for term in terms:
            coeff = parse_rational(term["coeff"])
            exps = [int(e) for e in term.get("exponents", [0] * n)]
            if len(exps) != n or any(e < 0 for e in exps):
                raise UsageError("each term needs n non-negative exponents")
            parsed.append((coeff, tuple(exps)))

        def fn(p):
            total = ZERO
            for coeff, exps in parsed:
                v = coeff
                for x, e in zip(p, exps):
                    v *= Fraction(x) ** e
                total += v
            return total

        return cls(n, fn, name)


def threshold_prob(fk: Callable[[tuple], Fraction], q, t: int, work_limit: int = 2**24) -> Fraction:
    """P_q[fk(sample mean of t flips per coin) >= 1/2], exact; ties succeed."""
    q = parse_point(q)
    total = ZERO
    for counts in lattice_counts(len(q), t, work_limit):
        w = lattice_prob(q, counts, t)
        if w != 0 and fk(counts_to_point(counts, t)) >= HALF:
            total += w
    return total


class FactoryRecursion:
    """Level tables and exact evaluation of f_k / g_k, shared by oracle and sampler.

    Without a domain the sample mean is used as-is. With (domain, eps) the
    mean is conditioned on landing within l-infinity distance eps of the
    domain and projected onto it, which keeps the recursion on the domain and
    gives boundary termination.
    """

    def __init__(
        self,
        target: TargetFunction,
        schedule: LevelSchedule,
        domain: Optional[AffineCubeDomain] = None,
        eps=None,
        work_limit: int = 2**24,
    ):
        if (domain is None) != (eps is None):
            raise UsageError("domain and eps must be supplied together")
        self.target = target
        self.schedule = schedule
        self.conditional = domain is not None
        self.domain = domain if domain is not None else full_cube_domain(target.n)
        self.eps = None if eps is None else parse_rational(eps)
        if self.conditional and self.eps <= 0:
            raise UsageError("eps must be positive")
        self.work_limit = work_limit
        self.n = target.n
        self._support: dict[int, list] = {}  # t -> [(counts, z)]
        self._accept: dict[int, dict] = {}  # t -> {counts: projected point}
        self._memo: dict[tuple, Fraction] = {}  # (level, point) -> f_level(point)
        self._weights: dict[tuple, list] = {}  # (t, q) -> weights aligned with support
        self._levels_ready = 0
        self._checked_t: set[int] = set()

    # -- support of the (projected) sample mean at sample size t --------------

    def support(self, t: int) -> list:
        cached = self._support.get(t)
        if cached is not None:
            return cached
        if self.conditional:
            if t in self._checked_t:
                pass
            elif not domination_precondition(self.n, t, self.eps):
                raise UsageError(
                    f"t={t} is below the certified resampling threshold for eps="
                    f"{format_rational(self.eps)}, n={self.n}"
                )
            self._checked_t.add(t)
        entries = []
        for counts in lattice_counts(self.n, t, self.work_limit):
            pt = counts_to_point(counts, t)
            if self.conditional:
                if not self.domain.within_ball(pt, self.eps):
                    continue
                z = self.domain.linf_project(pt)
            else:
                z = pt
            entries.append((counts, z))
        self._support[t] = entries
        return entries

    # -- exact evaluation ------------------------------------------------------

    def ensure_levels(self, k: int) -> None:
        """Fill the level tables bottom-up over the whole support (used by the
        certificate and diagnostics; sampling paths evaluate lazily instead)."""
        while self._levels_ready < k:
            j = self._levels_ready + 1
            for _, z in self.support(self.schedule.t(j)):
                self.value(j, z)
            self._levels_ready = j

    def value(self, level: int, q) -> Fraction:
        """f_level(q), exact, memoized on (level, point).

        Evaluation is lazy: each g_j(q) sums only over support points with
        nonzero weight under q, so points with deterministic coordinates (0/1
        coins) evaluate along their small reachable closure instead of the
        whole support. Zero-weight terms contribute nothing to the sum
        regardless of their indicator value, so this is exactly the full sum.
        """
        if level < 1:
            raise UsageError("level must be >= 1")
        q = parse_point(q)
        key = (level, q)
        if key in self._memo:
            return self._memo[key]
        # Iterative chain f_{j+1}(q) = (4/3)(f_j(q) - g_j(q)/4), from the
        # deepest memoized level at q.
        start = level
        while start > 1 and (start, q) not in self._memo:
            start -= 1
        if (start, q) not in self._memo:
            self._memo[(1, q)] = self._check(1, q, self.target(q))
        v = self._memo[(start, q)]
        for j in range(start, level):
            g = self.success_prob(j, q)
            v = self._check(j + 1, q, Fraction(4, 3) * (v - g / 4))
            self._memo[(j + 1, q)] = v
        return v

    def _check(self, level: int, q, v: Fraction) -> Fraction:
        if not 0 <= v <= 1:
            raise CertificateViolationError(
                f"level-{level} residual left [0,1] at point "
                f"({', '.join(format_rational(x) for x in q)}): {format_rational(v)} "
                "— the schedule's sample sizes are too small for this target"
            )
        return v

    def _support_weights(self, t: int, q: tuple) -> list:
        """Weights of q's sample-mean distribution on the support, cached: the
        same points (support entries and grid points) recur across levels."""
        key = (t, q)
        cached = self._weights.get(key)
        if cached is None:
            cached = [lattice_prob(q, counts, t) for counts, _ in self.support(t)]
            self._weights[key] = cached
        return cached

    def _threshold_mass(self, level: int, q: tuple, success: bool) -> Fraction:
        t = self.schedule.t(level)
        support = self.support(t)
        weights = self._support_weights(t, q)
        mass = ZERO
        total = ZERO
        for (_, z), w in zip(support, weights):
            if w == 0:
                continue
            total += w
            v = self.value(level, z)
            if (v >= HALF) if success else (v <= HALF):
                mass += w
        if self.conditional:
            if total == 0:
                raise CertificateViolationError(
                    "acceptance probability is zero at the queried point"
                )
            return mass / total
        return mass

    def success_prob(self, level: int, q) -> Fraction:
        """g_level(q): threshold-clearing probability of the level's sample mean."""
        q = parse_point(q)
        return self._threshold_mass(level, q, success=True)

    def failure_prob(self, level: int, q) -> Fraction:
        """P[f_level(sample point) <= 1/2], ties included (for the 1-f margin)."""
        q = parse_point(q)
        return self._threshold_mass(level, q, success=False)

    def partial_sum(self, k: int, q) -> Fraction:
        """sum_{s<=k} (1/4)(3/4)^(s-1) g_s(q); sandwiched in [f - (3/4)^k, f]."""
        total = ZERO
        w = Fraction(1, 4)
        for s in range(1, k + 1):
            total += w * self.success_prob(s, q)
            w *= Fraction(3, 4)
        return total

    # -- the sampler -----------------------------------------------------------

    def factory_program(self) -> Procedural:
        n = self.n

        def sample(coins) -> int:
            k = geometric_level(coins, self.schedule.level_cap)
            t = self.schedule.t(k)
            accept = self._accept.get(t)
            if accept is None:
                # One-time: acceptance and projection for the whole lattice,
                # so resampling rounds are dictionary lookups.
                accept = dict(self.support(t))
                self._accept[t] = accept
            while True:
                counts = tuple(coins.flip_many(i, t) for i in range(1, n + 1))
                z = accept.get(counts)
                if z is not None:
                    break
            return 1 if self.value(k, z) >= HALF else 0

        label = "subdomain-factory" if self.conditional else "general-factory"
        name = f"{label}({self.target.name})" if self.target.name else label
        return Procedural(sample, n, name)


@dataclass
class MarginReport:
    """Grid evidence for the schedule's validity (heuristic, not a proof)."""

    holds: bool
    max_level: int
    mesh_den: int
    worst_level: Optional[int]
    worst_point: Optional[tuple]
    worst_margin: Optional[Fraction]

    def to_json(self):
        return {
            "holds": self.holds,
            "max_level": self.max_level,
            "mesh": f"1/{self.mesh_den}",
            "worst_level": self.worst_level,
            "worst_point": None
            if self.worst_point is None
            else [format_rational(x) for x in self.worst_point],
            "worst_margin": None
            if self.worst_margin is None
            else format_rational(self.worst_margin),
        }


def margin_certificate(
    engine: FactoryRecursion, mesh_den: int = 16, max_level: Optional[int] = None
) -> MarginReport:
    """Checks, at every (domain-feasible) grid point and level up to max_level:

        f_k - g_k/4 >= f_k/8      and      (1-f_k) - fail_k/4 >= (1-f_k)/8

    where fail_k counts ties as failures (the conservative side). Both margins
    non-negative at a point imply the next residual stays in [0,1] there.
    """
    if max_level is None:
        max_level = engine.schedule.max_level
    pts = [
        p
        for p in grid_points(engine.n, mesh_den)
        if not engine.conditional or engine.domain.contains(p)
    ]
    if not pts:
        raise UsageError("no grid points on the domain at this mesh")
    worst = None  # (margin, level, point)
    for k in range(1, max_level + 1):
        for q in pts:
            fk = engine.value(k, q)
            m1 = fk - engine.success_prob(k, q) / 4 - fk / 8
            m2 = (1 - fk) - engine.failure_prob(k, q) / 4 - (1 - fk) / 8
            m = min(m1, m2)
            if worst is None or m < worst[0]:
                worst = (m, k, q)
    margin, level, point = worst
    return MarginReport(margin >= 0, max_level, mesh_den, level, point, margin)


def general_factory(target: TargetFunction, schedule: LevelSchedule, work_limit: int = 2**24) -> Procedural:
    """Sampler for an arbitrary valid target on the full cube; see FactoryRecursion."""
    return FactoryRecursion(target, schedule, work_limit=work_limit).factory_program()


def subdomain_factory(
    target: TargetFunction,
    schedule: LevelSchedule,
    eps,
    domain: AffineCubeDomain,
    work_limit: int = 2**24,
) -> Procedural:
    """Sampler for a target defined on K = cube ∩ affine subspace, terminating
    on the boundary of K as well."""
    return FactoryRecursion(target, schedule, domain=domain, eps=eps, work_limit=work_limit).factory_program()
