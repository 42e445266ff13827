"""Factory programs: finite coin-flipping trees and procedural samplers.

A finite tree flips the coin at each internal node and walks the 0-edge or
1-edge; leaves output 0/1. Procedural programs are opaque samplers over the
same coin interface with no a-priori depth bound (retry loops, races,
geometric mixtures); they must draw all their randomness through the coin
source so that transcript enumeration and replay stay exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .coins import BudgetedCoins, CoinBank, FlipBudget
from .errors import BudgetExhausted, ResourceLimitError, UsageError
from .faces import FacePartition
from .rationals import ONE, ZERO, format_rational, parse_rational


@dataclass(frozen=True)
class Leaf:
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise UsageError("leaf label must be 0 or 1")


@dataclass(frozen=True)
class CoinNode:
    coin: int  # 1-based input-coin index
    zero: "TreeNode"
    one: "TreeNode"

    def __post_init__(self):
        if self.coin < 1:
            raise UsageError("coin index must be >= 1")


@dataclass(frozen=True)
class BiasNode:
    bias: Fraction  # known helper bias, strictly inside (0,1)
    zero: "TreeNode"
    one: "TreeNode"

    def __post_init__(self):
        if not 0 < self.bias < 1:
            raise UsageError("helper bias must lie strictly in (0,1); constants are leaves")


TreeNode = Union[Leaf, CoinNode, BiasNode]


@dataclass(frozen=True)
class Procedural:
    """Opaque sampler: a pure function of the coin transcript it requests."""

    sample: Callable[[object], int]
    n_coins: int
    name: str = ""


FactoryProgram = Union[Leaf, CoinNode, BiasNode, Procedural]


@dataclass(frozen=True)
class RunResult:
    """Outcome of one execution: bit 0/1, or None when the budget ran out."""

    bit: Optional[int]
    flips: int

    @property
    def exhausted(self) -> bool:
        return self.bit is None


def n_coins(program: FactoryProgram) -> int:
    if isinstance(program, Procedural):
        return program.n_coins
    if isinstance(program, Leaf):
        return 0
    top = 0
    stack = [program]
    while stack:
        node = stack.pop()
        if isinstance(node, CoinNode):
            top = max(top, node.coin)
        if not isinstance(node, Leaf):
            stack.extend((node.zero, node.one))
    return top


def run(program: FactoryProgram, bank: CoinBank, budget: Optional[FlipBudget] = None) -> RunResult:
    """Execute the program against a bank, charging every flip to the budget."""
    if n_coins(program) > bank.n:
        raise UsageError("program references more coins than the bank provides")
    coins = BudgetedCoins(bank, budget)
    try:
        if isinstance(program, Procedural):
            bit = program.sample(coins)
        else:
            node = program
            while not isinstance(node, Leaf):
                if isinstance(node, CoinNode):
                    b = coins.flip(node.coin)
                else:
                    b = coins.flip_known(node.bias)
                node = node.one if b else node.zero
            bit = node.label
        return RunResult(bit, coins.flips_used)
    except BudgetExhausted:
        return RunResult(None, coins.flips_used)


def exact_eval(tree: TreeNode, p) -> Fraction:
    """Exact output probability P[output=1] of a finite tree at rational p."""
    p = tuple(Fraction(x) for x in p)
    for x in p:
        if not 0 <= x <= 1:
            raise UsageError("evaluation point outside the hypercube")
    memo: dict[int, Fraction] = {}

    def rec(node) -> Fraction:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Leaf):
            v = ONE if node.label else ZERO
        else:
            if isinstance(node, CoinNode):
                if node.coin > len(p):
                    raise UsageError(f"tree references coin {node.coin} but point has {len(p)}")
                q = p[node.coin - 1]
            else:
                q = node.bias
            v = q * rec(node.one) + (1 - q) * rec(node.zero)
        memo[key] = v
        return v

    return rec(tree)


class _NeedFlip(Exception):
    pass


class _ReplayCoins:
    """Feeds a fixed bit prefix to a sampler; asks for a branch when it runs out."""

    def __init__(self, prefix: tuple, p):
        self.prefix = prefix
        self.p = p
        self.pos = 0
        self.next_prob: Optional[Fraction] = None

    def _draw(self, prob: Fraction) -> int:
        if self.pos >= len(self.prefix):
            self.next_prob = prob
            raise _NeedFlip()
        bit = self.prefix[self.pos]
        self.pos += 1
        return bit

    def flip(self, coin: int) -> int:
        if not 1 <= coin <= len(self.p):
            raise UsageError(f"coin index {coin} out of range")
        return self._draw(self.p[coin - 1])

    def flip_many(self, coin: int, t: int) -> int:
        return sum(self.flip(coin) for _ in range(t))

    def flip_known(self, bias) -> int:
        bias = Fraction(bias)
        if not 0 < bias < 1:
            raise UsageError("known-bias coins must have bias strictly in (0,1)")
        return self._draw(bias)


def truncated_bounds(
    program: FactoryProgram, p, depth: int, work_limit: int = 2**20
) -> tuple[Fraction, Fraction]:
    """Sandwich (lower, upper) on the output probability from length-`depth` transcripts.

    lower is the mass of transcripts that reach a 1-output within `depth`
    flips; upper is 1 minus the 0-output mass; the gap is the probability the
    program is still running after `depth` flips.
    """
    if depth < 1:
        raise UsageError("depth must be >= 1")
    p = tuple(Fraction(x) for x in p)
    one_mass = ZERO
    zero_mass = ZERO
    work = 0

    if isinstance(program, Procedural):
        def explore(prefix: tuple, weight: Fraction) -> None:
            nonlocal one_mass, zero_mass, work
            work += 1
            if work > work_limit:
                raise ResourceLimitError(
                    f"transcript enumeration exceeded work limit {work_limit}"
                )
            rc = _ReplayCoins(prefix, p)
            try:
                bit = program.sample(rc)
            except _NeedFlip:
                if len(prefix) >= depth:
                    return
                q = rc.next_prob
                if q > 0:
                    explore(prefix + (1,), weight * q)
                if q < 1:
                    explore(prefix + (0,), weight * (1 - q))
                return
            if bit:
                one_mass += weight
            else:
                zero_mass += weight

        explore((), ONE)
    else:
        def rec(node, weight: Fraction, remaining: int) -> None:
            nonlocal one_mass, zero_mass, work
            work += 1
            if work > work_limit:
                raise ResourceLimitError(
                    f"transcript enumeration exceeded work limit {work_limit}"
                )
            if isinstance(node, Leaf):
                if node.label:
                    one_mass += weight
                else:
                    zero_mass += weight
                return
            if remaining == 0:
                return
            q = p[node.coin - 1] if isinstance(node, CoinNode) else node.bias
            if q > 0:
                rec(node.one, weight * q, remaining - 1)
            if q < 1:
                rec(node.zero, weight * (1 - q), remaining - 1)

        rec(program, ONE, depth)

    return one_mass, 1 - zero_mass


@dataclass(frozen=True)
class BernsteinMonomial:
    """Contribution of one root-to-1-leaf path: coeff * prod p_i^a_i (1-p_i)^b_i.

    a_i counts 1-edges taken after flips of coin i (each contributing a factor
    p_i to the path probability); b_i counts 0-edges (factor 1-p_i). The
    coefficient collects the helper-coin branch probabilities along the path.
    """

    coeff: Fraction
    p_exp: tuple
    q_exp: tuple

    def value(self, p) -> Fraction:
        v = self.coeff
        for x, a, b in zip(p, self.p_exp, self.q_exp):
            v *= Fraction(x) ** a * (1 - Fraction(x)) ** b
        return v


def leaf_monomials(tree: TreeNode, n: Optional[int] = None) -> list[BernsteinMonomial]:
    """One monomial per 1-leaf; their values sum to exact_eval at every point."""
    if n is None:
        n = n_coins(tree)
    out: list[BernsteinMonomial] = []

    def rec(node, coeff: Fraction, p_exp: list, q_exp: list) -> None:
        if isinstance(node, Leaf):
            if node.label:
                out.append(BernsteinMonomial(coeff, tuple(p_exp), tuple(q_exp)))
            return
        if isinstance(node, CoinNode):
            i = node.coin - 1
            p_exp[i] += 1
            rec(node.one, coeff, p_exp, q_exp)
            p_exp[i] -= 1
            q_exp[i] += 1
            rec(node.zero, coeff, p_exp, q_exp)
            q_exp[i] -= 1
        else:
            rec(node.one, coeff * node.bias, p_exp, q_exp)
            rec(node.zero, coeff * (1 - node.bias), p_exp, q_exp)

    rec(tree, ONE, [0] * n, [0] * n)
    return out


def face_certificate(
    tree: TreeNode, face: FacePartition
) -> Optional[tuple[Fraction, int]]:
    """Constants (c, m) witnessing f >= c * face_poly^m, read off one 1-leaf path.

    A path qualifies when it never takes a 1-edge on an A-coin (those coins
    are pinned at 0 on the face) and never a 0-edge on a B-coin. The first
    qualifying monomial in traversal order supplies c (its coefficient) and
    m (its largest per-coin exponent).
    """
    for mono in leaf_monomials(tree, n=face.n):
        if all(mono.p_exp[i - 1] == 0 for i in face.A) and all(
            mono.q_exp[i - 1] == 0 for i in face.B
        ):
            m = 0
            for a, b in zip(mono.p_exp, mono.q_exp):
                m = max(m, a, b)
            return mono.coeff, m
    return None


def tree_to_json(node: TreeNode):
    if isinstance(node, Leaf):
        return {"leaf": node.label}
    inner = {"zero": tree_to_json(node.zero), "one": tree_to_json(node.one)}
    if isinstance(node, CoinNode):
        inner["coin"] = node.coin
    else:
        inner["bias"] = format_rational(node.bias)
    return {"node": inner}


def tree_from_json(doc) -> TreeNode:
    if not isinstance(doc, dict):
        raise UsageError(f"bad tree document: {doc!r}")
    if "leaf" in doc:
        return Leaf(int(doc["leaf"]))
    if "node" not in doc:
        raise UsageError('tree document must have a "leaf" or "node" key')
    inner = doc["node"]
    zero = tree_from_json(inner["zero"])
    one = tree_from_json(inner["one"])
    if "coin" in inner:
        return CoinNode(int(inner["coin"]), zero, one)
    if "bias" in inner:
        return BiasNode(parse_rational(inner["bias"]), zero, one)
    raise UsageError('tree node needs a "coin" or "bias" label')
