# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled randomness kernel.

Must stay bit-for-bit identical to the pure-Python twin in ``_kernel_py.py``:
same splitmix64 word stream, same exact rational Bernoulli draw, same word
consumption. The fast path uses 128-bit integer division when the denominator
fits in 64 bits; larger rationals fall back to Python integers.
"""
from libc.stdint cimport uint64_t

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

cdef uint64_t _GOLDEN = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t _M = <uint64_t>0xFFFFFFFFFFFFFFFF

MASK = (1 << 64) - 1
BACKEND = "compiled"


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


def mix64(z):
    return _mix(<uint64_t>(z & MASK))


def derive_seed(seed, index):
    """Child seed for a parallel trial; distinct indices give independent streams."""
    cdef uint64_t s = <uint64_t>(seed & MASK)
    cdef uint64_t i = <uint64_t>(((index + 1) * 0x9E3779B97F4A7C15) & MASK)
    return _mix(s ^ _mix(i))


cdef class BitStream:
    """Deterministic 64-bit word stream with exact Bernoulli draws."""
    cdef uint64_t _state

    def __init__(self, seed):
        self._state = <uint64_t>(seed & MASK)

    @property
    def state(self):
        return self._state

    def next_word(self):
        self._state += _GOLDEN
        return _mix(self._state)

    cdef inline uint64_t _next(self) nogil:
        self._state += _GOLDEN
        return _mix(self._state)

    cdef int _bern_small(self, uint64_t a, uint64_t b):
        cdef u128 hi
        cdef uint64_t thr, u
        while True:
            u = self._next()
            hi = (<u128>a) << 64
            thr = <uint64_t>(hi // b)
            if u < thr:
                return 1
            if u > thr:
                return 0
            a = <uint64_t>(hi - (<u128>thr) * b)  # boundary word: next digit
            if a == 0:
                return 0

    def _bern_big(self, a, den):
        while True:
            u = self.next_word()
            hi = a << 64
            thr = hi // den
            if u < thr:
                return 1
            if u > thr:
                return 0
            a = hi - thr * den
            if a == 0:
                return 0

    def bernoulli(self, num, den):
        """One draw that is 1 with probability exactly num/den."""
        if den <= 0 or num < 0 or num > den:
            raise ValueError("bernoulli probability must satisfy 0 <= num/den <= 1")
        if num == 0:
            return 0
        if num == den:
            return 1
        if den <= MASK:
            return self._bern_small(<uint64_t>num, <uint64_t>den)
        return self._bern_big(num, den)

    def binomial(self, num, den, long t):
        """Count of ones in t successive bernoulli(num, den) draws."""
        cdef long c = 0
        cdef long i
        cdef uint64_t a, b
        if num == 0:
            return 0
        if num == den:
            return t
        if den <= MASK:
            a = <uint64_t>num
            b = <uint64_t>den
            for i in range(t):
                c += self._bern_small(a, b)
            return c
        for i in range(t):
            c += self._bern_big(num, den)
        return c
