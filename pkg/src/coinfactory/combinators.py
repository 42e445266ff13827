"""Closed-form program constructions: constants, complement, product, mixtures,
the retry/ratio construction, and the race that picks an index with probability
proportional to each program's acceptance probability.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import UsageError
from .programs import (
    BiasNode,
    CoinNode,
    FactoryProgram,
    Leaf,
    Procedural,
    TreeNode,
    n_coins,
)
from .rationals import ONE


def uniform_index(coins, k: int) -> int:
    """Exact uniform draw from {0, .., k-1} using known-bias flips.

    Sequentially accepts index j with conditional probability 1/(k-j), so the
    scheme works for any k, not just powers of two.
    """
    if k < 1:
        raise UsageError("need at least one alternative")
    for j in range(k - 1):
        if coins.flip_known(Fraction(1, k - j)):
            return j
    return k - 1


def const_program(c) -> TreeNode:
    """Program whose output probability is the constant c at every p."""
    c = Fraction(c)
    if not 0 <= c <= 1:
        raise UsageError("constant must lie in [0,1]")
    if c == 0:
        return Leaf(0)
    if c == 1:
        return Leaf(1)
    return BiasNode(c, Leaf(0), Leaf(1))


def complement(a: FactoryProgram) -> FactoryProgram:
    """Program with output probability 1 - f_a(p)."""
    if isinstance(a, Procedural):
        return Procedural(lambda coins: 1 - a.sample(coins), a.n_coins, f"not({a.name})")

    def flip_leaves(node: TreeNode) -> TreeNode:
        if isinstance(node, Leaf):
            return Leaf(1 - node.label)
        if isinstance(node, CoinNode):
            return CoinNode(node.coin, flip_leaves(node.zero), flip_leaves(node.one))
        return BiasNode(node.bias, flip_leaves(node.zero), flip_leaves(node.one))

    return flip_leaves(a)


def product(a: FactoryProgram, b: FactoryProgram) -> FactoryProgram:
    """Program with output probability f_a(p) * f_b(p) (independent runs, AND)."""
    if not isinstance(a, Procedural) and not isinstance(b, Procedural):
        def graft(node: TreeNode) -> TreeNode:
            if isinstance(node, Leaf):
                return b if node.label else node
            if isinstance(node, CoinNode):
                return CoinNode(node.coin, graft(node.zero), graft(node.one))
            return BiasNode(node.bias, graft(node.zero), graft(node.one))

        return graft(a)

    nc = max(n_coins(a), n_coins(b))

    def sample(coins):
        if isinstance(a, Procedural):
            first = a.sample(coins)
        else:
            first = _walk_tree(a, coins)
        if not first:
            return 0
        if isinstance(b, Procedural):
            return b.sample(coins)
        return _walk_tree(b, coins)

    return Procedural(sample, nc, "product")


def _walk_tree(node: TreeNode, coins) -> int:
    while not isinstance(node, Leaf):
        if isinstance(node, CoinNode):
            bit = coins.flip(node.coin)
        else:
            bit = coins.flip_known(node.bias)
        node = node.one if bit else node.zero
    return node.label


@dataclass(frozen=True)
class WeightedMixture:
    """Finite convex mixture; weights are exact rationals summing to at most 1.

    Any deficit mass outputs 0. The geometric family (weight (1/4)(3/4)^(k-1)
    on level k) is the one infinite mixture supported; see geometric_mix.
    """

    weights: tuple
    programs: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.programs) or not self.programs:
            raise UsageError("weights and programs must be non-empty and match")
        total = sum(self.weights, Fraction(0))
        if any(w < 0 for w in self.weights):
            raise UsageError("weights must be non-negative")
        if total > 1:
            raise UsageError("finite mixture weights must sum to at most 1")


def convex_mix(mixture: WeightedMixture) -> FactoryProgram:
    """Program with output probability sum_k w_k * f_k(p)."""
    weights = [Fraction(w) for w in mixture.weights]
    programs = list(mixture.programs)

    if all(not isinstance(pr, Procedural) for pr in programs):
        # Build a selection spine of helper flips so the result stays a tree;
        # entry k is taken with conditional probability w_k / (mass left).
        spine = [(w, pr) for w, pr in zip(weights, programs) if w > 0]

        def build(idx: int, remaining: Fraction) -> TreeNode:
            if idx == len(spine):
                return Leaf(0)
            w, pr = spine[idx]
            if w == remaining:
                return pr
            rest = build(idx + 1, remaining - w)
            return BiasNode(w / remaining, rest, pr)

        return build(0, ONE)

    nc = max(n_coins(pr) for pr in programs)

    def sample(coins):
        remaining = ONE
        for w, pr in zip(weights, programs):
            if w == 0:
                continue
            take = w == remaining or coins.flip_known(w / remaining)
            if take:
                if isinstance(pr, Procedural):
                    return pr.sample(coins)
                return _walk_tree(pr, coins)
            remaining -= w
        return 0

    return Procedural(sample, nc, "mixture")


def geometric_level(coins, level_cap: Optional[int] = None) -> int:
    """Sample k >= 1 with probability (1/4)(3/4)^(k-1) via repeated 1/4-flips."""
    k = 1
    quarter = Fraction(1, 4)
    while coins.flip_known(quarter) == 0:
        k += 1
        if level_cap is not None and k > level_cap:
            from .errors import LevelCapExceeded

            raise LevelCapExceeded(k, level_cap)
    return k


def geometric_mix(program_for_level: Callable[[int], FactoryProgram], nc: int) -> Procedural:
    """Mixture over levels k = 1, 2, ... with weight (1/4)(3/4)^(k-1); the
    weights sum to 1, so no deficit mass exists."""

    def sample(coins):
        k = geometric_level(coins)
        pr = program_for_level(k)
        if isinstance(pr, Procedural):
            return pr.sample(coins)
        return _walk_tree(pr, coins)

    return Procedural(sample, nc, "geometric-mixture")


@dataclass(frozen=True)
class IndexSampler:
    """Sampler returning an index in range(k) rather than a bit."""

    sample: Callable[[object], int]
    n_coins: int
    k: int
    name: str = ""


def bernoulli_race(programs: Sequence[FactoryProgram]) -> IndexSampler:
    """Returns index i with probability f_i(p) / sum_j f_j(p).

    Each round picks an index uniformly and runs that program; a 1 wins the
    race, a 0 retries. Terminates almost surely whenever some f_j(p) > 0; run
    it under a FlipBudget to surface the all-zero case.
    """
    programs = list(programs)
    if not programs:
        raise UsageError("race needs at least one program")
    nc = max(n_coins(pr) for pr in programs)
    k = len(programs)

    def sample(coins) -> int:
        while True:
            i = uniform_index(coins, k)
            pr = programs[i]
            bit = pr.sample(coins) if isinstance(pr, Procedural) else _walk_tree(pr, coins)
            if bit:
                return i

    return IndexSampler(sample, nc, k, "race")


def ratio_retry(first: int = 1, second: int = 2) -> Procedural:
    """Program outputting 1 with probability p_first / (p_first + p_second).

    Each round picks one of the two coins uniformly and flips it: heads on the
    first coin outputs 1, heads on the second outputs 0, tails retries. Needs
    p_first + p_second > 0 to terminate.
    """
    half = Fraction(1, 2)

    def sample(coins):
        while True:
            pick_first = coins.flip_known(half)
            coin = first if pick_first else second
            if coins.flip(coin):
                return 1 if pick_first else 0

    return Procedural(sample, max(first, second), f"ratio({first},{second})")
