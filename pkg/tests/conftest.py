"""Shared helpers: deterministic random rational points and example programs."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest

from coinfactory import CoinNode, Leaf


def random_rational(rng: random.Random, max_den: int = 60) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, den), den)


def random_point(rng: random.Random, n: int, max_den: int = 60) -> tuple:
    return tuple(random_rational(rng, max_den) for _ in range(n))


def random_domain_point(rng: random.Random, vertices, max_den: int = 60) -> tuple:
    """Random rational convex combination of the given vertices."""
    weights = [Fraction(rng.randint(0, max_den), 1) for _ in vertices]
    total = sum(weights)
    if total == 0:
        weights[0] = Fraction(1)
        total = Fraction(1)
    weights = [w / total for w in weights]
    n = len(vertices[0])
    return tuple(
        sum(w * v[i] for w, v in zip(weights, vertices)) for i in range(n)
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260823)


# One line per acceptance criterion, echoed at the end of the pytest run so
# the verdicts are visible even with output capture on.
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line.rstrip("\n"))


def p_squared_one_minus_p_tree() -> CoinNode:
    """Three flips of coin 1; outputs 1 iff (heads, heads, tails): p^2 (1-p)."""
    return CoinNode(
        1,
        Leaf(0),
        CoinNode(1, Leaf(0), CoinNode(1, Leaf(1), Leaf(0))),
    )
