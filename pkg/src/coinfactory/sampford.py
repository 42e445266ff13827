"""Fixed-size subset sampling with prescribed inclusion probabilities.

Given coins with biases summing to k, the classic rejection scheme samples a
k-subset U with P[U] proportional to the round probability below; its
inclusion probabilities are exactly p. The classic scheme diverges when all
coins are deterministic (e.g. p = (1,1,0)); the boundary sampler rebuilds
each subset's closed-form probability as a subdomain factory on
K = {sum p = k} and races them, which terminates everywhere on K.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .combinators import bernoulli_race, uniform_index
from .domains import AffineCubeDomain
from .errors import UsageError
from .faces import BoundCertificate
from .lattice import FactoryRecursion, LevelSchedule, TargetFunction
from .rationals import ONE, ZERO, parse_point


def k_subset_domain(n: int, k: int) -> AffineCubeDomain:
    """K = {p in [0,1]^n : sum p_i = k}."""
    if not 1 <= k < n:
        raise UsageError("need 1 <= k < n")
    return AffineCubeDomain(n, [[ONE] * n], [Fraction(k)])


def all_subsets(n: int, k: int) -> list:
    """All k-subsets of {1..n} (1-based), in lexicographic order."""
    return [frozenset(c) for c in combinations(range(1, n + 1), k)]


def round_prob(p, U) -> Fraction:
    """Probability that one round of the classic scheme outputs exactly U:
    (1/(n-k)) * prod_{i in U} p_i * prod_{i not in U} (1-p_i) * sum_{i not in U} p_i."""
    p = parse_point(p)
    n, k = len(p), len(U)
    if not 1 <= k < n:
        raise UsageError("need 1 <= |U| < n")
    v = Fraction(1, n - k)
    tail = ZERO
    for i in range(1, n + 1):
        if i in U:
            v *= p[i - 1]
        else:
            v *= 1 - p[i - 1]
            tail += p[i - 1]
    return v * tail


def subset_prob(p, U) -> Fraction:
    """Normalized round probability; undefined where every round aborts."""
    p = parse_point(p)
    total = sum(round_prob(p, V) for V in all_subsets(len(p), len(U)))
    if total == 0:
        raise UsageError("all round probabilities vanish at this p; use the closed form")
    return round_prob(p, U) / total


def subset_prob_closed(p, U) -> Fraction:
    """Continuous extension of subset_prob to all of K = {sum p = k}:
    1 at the indicator vector of U, 0 at the other subset vertices."""
    p = parse_point(p)
    n, k = len(p), len(U)
    if sum(p) != k:
        raise UsageError("closed-form subset probability needs sum(p) = k")
    if all(x in (ZERO, ONE) for x in p):
        heads = frozenset(i for i, x in enumerate(p, start=1) if x == 1)
        return ONE if heads == frozenset(U) else ZERO
    return subset_prob(p, U)


def bound_certificate(n: int, k: int) -> BoundCertificate:
    """Face-polynomial domination constants for every closed-form subset
    probability on the k-subset domain: c = 1/((n-k) k C(n,k)), m = 1."""
    if not 1 <= k < n:
        raise UsageError("need 1 <= k < n")
    return BoundCertificate(Fraction(1, (n - k) * k * comb(n, k)), 1)


@dataclass(frozen=True)
class SubsetOutcome:
    subset: frozenset
    flips_used: int


def classic_sampford(coins, n: int, k: int) -> frozenset:
    """The classic rejection scheme; P[output = U] = subset_prob(p, U).

    May never terminate at boundary points (all coins deterministic); run it
    under a FlipBudget to observe that as BudgetExhausted.
    """
    if not 1 <= k < n:
        raise UsageError("need 1 <= k < n")
    while True:
        U = [i for i in range(1, n + 1) if coins.flip(i)]
        if len(U) != k:
            continue
        outside = [i for i in range(1, n + 1) if i not in U]
        probe = outside[uniform_index(coins, len(outside))]
        if coins.flip(probe):
            return frozenset(U)


def naive_sampford(coins, n: int, k: int) -> frozenset:
    """Incorrect baseline: accept the first all-coins pass with exactly k heads.

    Its inclusion probabilities are NOT p (the defect is order eps^2 at
    p = (1-eps, 1-eps, 2*eps)); kept as a planted wrong sampler that the
    statistical harness must reject.
    """
    if not 1 <= k < n:
        raise UsageError("need 1 <= k < n")
    while True:
        U = [i for i in range(1, n + 1) if coins.flip(i)]
        if len(U) == k:
            return frozenset(U)


def naive_prob(p, U) -> Fraction:
    """Exact outcome distribution of naive_sampford (size-conditioned Poisson)."""
    p = parse_point(p)

    def mass(V):
        v = ONE
        for i in range(1, len(p) + 1):
            v *= p[i - 1] if i in V else 1 - p[i - 1]
        return v

    total = sum(mass(V) for V in all_subsets(len(p), len(U)))
    if total == 0:
        raise UsageError("naive sampler has zero acceptance probability at this p")
    return mass(frozenset(U)) / total


class BoundarySampford:
    """Everywhere-terminating k-subset sampler: one subdomain factory per
    subset's closed-form probability, converted to a subset draw by a race.

    Building the level tables is a one-time cost; keep the instance around and
    call sample() once per trial.
    """

    def __init__(self, n: int, k: int, schedule: LevelSchedule, eps, work_limit: int = 2**24):
        if not 1 <= k < n:
            raise UsageError("need 1 <= k < n")
        self.n, self.k = n, k
        self.domain = k_subset_domain(n, k)
        self.subsets = all_subsets(n, k)
        self.engines = []
        programs = []
        for U in self.subsets:
            target = TargetFunction(
                n, lambda p, U=U: subset_prob_closed(p, U), f"subset{sorted(U)}"
            )
            engine = FactoryRecursion(
                target, schedule, domain=self.domain, eps=eps, work_limit=work_limit
            )
            self.engines.append(engine)
            programs.append(engine.factory_program())
        self._race = bernoulli_race(programs)

    def sample(self, coins) -> frozenset:
        return self.subsets[self._race.sample(coins)]
