"""Certified rational tail bounds for binomial sample means.

Everything here returns an exact Fraction that is provably an UPPER bound on
the quantity it names (never a float approximation), so callers can use the
results inside exact preconditions: if the returned bound is below a
threshold, the true probability is too.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import UsageError
from .rationals import ONE, ZERO


def exp_upper(x, rel_bits: int = 96) -> Fraction:
    """Rational upper bound on e^x for x <= 0.

    Uses e^(-y) = 1/e^y <= 1/T(y) where T is a truncated Taylor sum of e^y
    with positive terms; the sum is extended until the next term is below
    2^-rel_bits of the running total.
    """
    x = Fraction(x)
    if x > 0:
        raise UsageError("exp_upper only certifies x <= 0")
    if x == 0:
        return ONE
    y = -x
    term = ONE
    total = ONE
    k = 1
    cutoff = Fraction(1, 2**rel_bits)
    while term > total * cutoff:
        term = term * y / k
        total += term
        k += 1
    return 1 / total


def iroot_ceil(x: int, k: int) -> int:
    """Smallest integer r with r^k >= x (x >= 0, k >= 1), via Newton iteration."""
    if x < 0 or k < 1:
        raise UsageError("iroot_ceil needs x >= 0 and k >= 1")
    if x in (0, 1) or k == 1:
        return x
    r = 1 << ((x.bit_length() + k - 1) // k)  # r^k >= x, a safe start
    while True:
        nxt = ((k - 1) * r + x // r ** (k - 1)) // k
        if nxt >= r:
            break
        r = nxt
    # Newton lands on the floor root; bump if it falls short.
    while r**k < x:
        r += 1
    while r > 1 and (r - 1) ** k >= x:
        r -= 1
    return r


def pow_upper(base, exponent, frac_bits: int = 64) -> Fraction:
    """Rational upper bound on base^exponent for base >= 0, rational exponent >= 0.

    Convention 0^0 = 1. Exact when the exponent is an integer; otherwise the
    b-th root is rounded up at frac_bits binary digits.
    """
    base = Fraction(base)
    exponent = Fraction(exponent)
    if base < 0 or exponent < 0:
        raise UsageError("pow_upper needs base >= 0 and exponent >= 0")
    if exponent == 0:
        return ONE
    if base == 0:
        return ZERO
    a, b = exponent.numerator, exponent.denominator
    if b == 1:
        return base**a
    u, v = base.numerator, base.denominator
    scale = 1 << frac_bits
    # M >= u^a * scale^b / v^a, so iroot_ceil(M, b)/scale >= base^(a/b).
    num, den = u**a * scale**b, v**a
    M = -(-num // den)
    return Fraction(iroot_ceil(M, b), scale)


def hoeffding_bound(delta, t: int, n: int = 1) -> Fraction:
    """Upper bound on P[some of n sample means deviates from its mean by >= delta],
    each mean over t flips: 2n * e^(-2 delta^2 t), certified from above."""
    delta = Fraction(delta)
    if delta <= 0 or t < 1 or n < 1:
        raise UsageError("need delta > 0, t >= 1, n >= 1")
    return min(ONE, 2 * n * exp_upper(-2 * delta**2 * t))


def chernoff_bound(p, delta, t: int, frac_bits: int = 64) -> Fraction:
    """Upper bound on P[mean of t flips of a bias-p coin >= p + delta].

    Relative-entropy form: ((p/(p+delta))^(p+delta) *
    ((1-p)/(1-p-delta))^(1-p-delta))^t, with 0^0 = 1 so the boundary case
    p + delta = 1 degrades gracefully to p^t.
    """
    p = Fraction(p)
    delta = Fraction(delta)
    if not 0 <= p <= 1 or delta <= 0 or t < 1:
        raise UsageError("need p in [0,1], delta > 0, t >= 1")
    if p + delta > 1:
        return ZERO
    first = pow_upper(p / (p + delta), p + delta, frac_bits)
    if p + delta == 1:
        second = ONE  # exponent 0: the entropy term vanishes at the boundary
    else:
        second = pow_upper((1 - p) / (1 - p - delta), 1 - p - delta, frac_bits)
    return min(ONE, (first * second) ** t)
