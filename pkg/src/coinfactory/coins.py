"""Coin simulation: n unknown-bias input coins plus known-bias helper draws.

A CoinBank hides an exact rational bias vector behind a flip interface and
keeps per-coin flip counters. Randomness comes from a seeded deterministic
word stream, so two banks built from equal (biases, seed) produce identical
flip transcripts; parallel trials derive independent child seeds.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .backend import BitStream, derive_seed
from .errors import BudgetExhausted, UsageError
from .rationals import parse_bias_vector


class CoinBank:
    """n input coins of hidden bias plus a helper stream for known-bias draws.

    Coin indices are 1-based. Deterministic coins (bias 0 or 1) do not consume
    randomness, which keeps boundary inputs cheap and exactly reproducible.
    """

    def __init__(self, biases, seed: int = 0):
        self.biases = parse_bias_vector(biases)
        self.seed = seed
        self.flip_counts = [0] * len(self.biases)
        self._stream = BitStream(seed)

    @property
    def n(self) -> int:
        return len(self.biases)

    def spawn(self, index: int) -> "CoinBank":
        """Independent bank for trial `index`, derived from this bank's seed."""
        return CoinBank(self.biases, derive_seed(self.seed, index))

    def flip(self, coin: int) -> int:
        """Flip input coin `coin` (1-based); returns 1 with its hidden bias."""
        if not 1 <= coin <= len(self.biases):
            raise UsageError(f"coin index {coin} out of range 1..{len(self.biases)}")
        b = self.biases[coin - 1]
        self.flip_counts[coin - 1] += 1
        return self._stream.bernoulli(b.numerator, b.denominator)

    def flip_many(self, coin: int, t: int) -> int:
        """t flips of one input coin; returns the count of ones."""
        if not 1 <= coin <= len(self.biases):
            raise UsageError(f"coin index {coin} out of range 1..{len(self.biases)}")
        if t < 0:
            raise UsageError("flip count must be non-negative")
        b = self.biases[coin - 1]
        self.flip_counts[coin - 1] += t
        return self._stream.binomial(b.numerator, b.denominator, t)

    def flip_known(self, bias: Fraction) -> int:
        """Draw from a helper coin of known bias in (0,1)."""
        bias = Fraction(bias)
        if not 0 < bias < 1:
            raise UsageError("known-bias coins must have bias strictly in (0,1)")
        return self._stream.bernoulli(bias.numerator, bias.denominator)


class FlipBudget:
    """Execution cap that turns potential non-termination into an observable outcome."""

    def __init__(self, max_flips: Optional[int] = None):
        if max_flips is not None and max_flips < 1:
            raise UsageError("max_flips must be positive")
        self.max_flips = max_flips
        self.used = 0

    def charge(self, n: int = 1) -> None:
        if self.max_flips is not None and self.used + n > self.max_flips:
            self.used = self.max_flips
            raise BudgetExhausted(self.used)
        self.used += n


class BudgetedCoins:
    """Coin source that charges every flip (input and helper) to a budget."""

    def __init__(self, bank: CoinBank, budget: Optional[FlipBudget] = None):
        self.bank = bank
        self.budget = budget if budget is not None else FlipBudget(None)

    @property
    def flips_used(self) -> int:
        return self.budget.used

    def flip(self, coin: int) -> int:
        self.budget.charge()
        return self.bank.flip(coin)

    def flip_many(self, coin: int, t: int) -> int:
        self.budget.charge(t)
        return self.bank.flip_many(coin, t)

    def flip_known(self, bias) -> int:
        self.budget.charge()
        return self.bank.flip_known(bias)
