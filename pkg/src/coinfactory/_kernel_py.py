"""Pure-Python randomness kernel.

Twin of the compiled extension in ``_kernel.pyx``: both implement the exact
same word stream (splitmix64) and the exact same rational Bernoulli draw, so
they produce bit-for-bit identical transcripts. Keep the two in sync.

The Bernoulli draw is exact: to sample with probability a/b we write a/b in
base 2^64 and compare a uniform word against the leading digit; on the single
boundary word we recurse into the remaining digits, so no precision is ever
lost.
"""

MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

BACKEND = "python"


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Child seed for a parallel trial; distinct indices give independent streams."""
    return mix64((seed & MASK) ^ mix64(((index + 1) * _GOLDEN) & MASK))


class BitStream:
    """Deterministic 64-bit word stream with exact Bernoulli draws."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_word(self) -> int:
        self.state = (self.state + _GOLDEN) & MASK
        return mix64(self.state)

    def bernoulli(self, num: int, den: int) -> int:
        """One draw that is 1 with probability exactly num/den."""
        if den <= 0 or num < 0 or num > den:
            raise ValueError("bernoulli probability must satisfy 0 <= num/den <= 1")
        if num == 0:
            return 0
        if num == den:
            return 1
        a = num
        while True:
            u = self.next_word()
            hi = a << 64
            thr = hi // den
            if u < thr:
                return 1
            if u > thr:
                return 0
            a = hi - thr * den  # boundary word: recurse into the next digit
            if a == 0:
                return 0

    def binomial(self, num: int, den: int, t: int) -> int:
        """Count of ones in t successive bernoulli(num, den) draws."""
        if num == 0:
            return 0
        if num == den:
            return t
        c = 0
        for _ in range(t):
            c += self.bernoulli(num, den)
        return c
