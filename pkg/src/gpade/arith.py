"""Exact arithmetic primitives.

Everything here is exact: rationals are `fractions.Fraction`, integers are
unbounded, and every irrational quantity is represented by a rational
enclosure [lo, hi] with outward (directed) rounding.  No floating point is
used anywhere in the computation paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

__all__ = [
    "Fraction",
    "FactoredInteger",
    "Interval",
    "LogUpperBound",
    "primes_upto",
    "factorize",
    "prime_divisors",
    "pochhammer",
    "legendre_nu",
    "floor_log",
    "p_valuation",
    "epsilon_n",
    "epsilon_interval",
    "log_interval",
    "log_iv",
    "exp_interval",
    "exp_iv",
    "nth_root_iv",
    "dyadic_up",
    "dyadic_down",
    "integer_nth_root",
    "digits10",
    "floor_log10",
    "fmt_real",
]


# ---------------------------------------------------------------------------
# Primes: one shared sieve, grown on demand and only ever appended to.
# ---------------------------------------------------------------------------

_primes: list[int] = [2, 3, 5, 7, 11, 13]
_sieved_upto = 13


def _grow_sieve(limit: int) -> None:
    global _primes, _sieved_upto
    if limit <= _sieved_upto:
        return
    limit = max(2 * _sieved_upto, limit, 64)
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    _primes = [i for i, f in enumerate(flags) if f]
    _sieved_upto = limit


def primes_upto(n: int) -> list[int]:
    """All primes p <= n, ascending."""
    if n > _sieved_upto:
        _grow_sieve(n)
    # bisect by hand; the list is small and this avoids an import
    lo, hi = 0, len(_primes)
    while lo < hi:
        mid = (lo + hi) // 2
        if _primes[mid] <= n:
            lo = mid + 1
        else:
            hi = mid
    return _primes[:lo]


def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as ((p, e), ...), primes ascending."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out = []
    m = n
    for p in primes_upto(isqrt(n) + 1):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                e += 1
                m //= p
            out.append((p, e))
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def prime_divisors(n: int) -> tuple[int, ...]:
    return tuple(p for p, _ in factorize(n))


# ---------------------------------------------------------------------------
# Elementary exact operations
# ---------------------------------------------------------------------------


def pochhammer(x: Fraction, n: int) -> Fraction:
    """Rising factorial x(x+1)...(x+n-1), with the empty product equal to 1."""
    if n < 0:
        raise ValueError("pochhammer requires n >= 0")
    acc = Fraction(1)
    for k in range(n):
        acc *= x + k
    return acc


def legendre_nu(p: int, n: int) -> int:
    """Valuation of n! at the prime p: sum of floor(n / p^t) over t >= 1.

    By convention the value at n = 0 is 0 (empty sum).
    """
    if n < 0:
        raise ValueError("legendre_nu requires n >= 0")
    total = 0
    q = p
    while q <= n:
        total += n // q
        q *= p
    return total


def floor_log(p: int, x: Fraction) -> int:
    """Largest t >= 0 with p^t <= x, decided by exact comparison.

    Only defined for x >= 1; callers never need the negative branch.
    """
    x = Fraction(x)
    if x < 1:
        raise ValueError("floor_log requires x >= 1")
    t = 0
    power = p
    while power <= x:
        t += 1
        power *= p
    return t


def p_valuation(q: Fraction, p: int) -> int:
    """Exponent v with |q|_p = p^(-v), for q != 0."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("p-adic valuation of zero is +infinity")

    def _v(n: int) -> int:
        v = 0
        while n % p == 0:
            v += 1
            n //= p
        return v

    num = abs(q.numerator)
    if num % p == 0:
        return _v(num)
    return -_v(q.denominator)


def integer_nth_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1, by Newton iteration on integers."""
    if n < 0 or k < 1:
        raise ValueError("integer_nth_root requires n >= 0, k >= 1")
    if k == 1 or n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k + 1)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    return x


# ---------------------------------------------------------------------------
# Factored positive integers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer together with its prime factorization.

    Invariants: primes strictly increasing, exponents >= 1, and the product
    of p^e equals `value` (checked on construction).
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError("factors must have ascending primes, e >= 1")
            last = p
            prod *= p**e
        if prod != self.value or self.value < 1:
            raise ValueError("factorization does not match value")

    @classmethod
    def one(cls) -> "FactoredInteger":
        return cls(1, ())

    @classmethod
    def from_exponents(cls, exps: dict[int, int]) -> "FactoredInteger":
        items = tuple(sorted((p, e) for p, e in exps.items() if e > 0))
        val = 1
        for p, e in items:
            val *= p**e
        return cls(val, items)

    @classmethod
    def of(cls, n: int) -> "FactoredInteger":
        return cls(n, factorize(n)) if n > 1 else cls.one()

    def __mul__(self, other: "FactoredInteger") -> "FactoredInteger":
        exps: dict[int, int] = dict(self.factors)
        for p, e in other.factors:
            exps[p] = exps.get(p, 0) + e
        return FactoredInteger.from_exponents(exps)

    def __pow__(self, n: int) -> "FactoredInteger":
        if n < 0:
            raise ValueError("negative power of a FactoredInteger")
        return FactoredInteger.from_exponents({p: e * n for p, e in self.factors})

    def format_factors(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(f"{p}^{e}" if e > 1 else f"{p}" for p, e in self.factors)


# ---------------------------------------------------------------------------
# Directed rounding: dyadics and rational enclosures
# ---------------------------------------------------------------------------


def digits10(n: int) -> int:
    """Number of decimal digits of |n|, without converting n to a string."""
    n = abs(n)
    if n == 0:
        return 1
    est = max(0, (n.bit_length() * 30103) // 100000 - 1)
    while 10 ** (est + 1) <= n:
        est += 1
    return est + 1


def floor_log10(q: Fraction) -> int:
    """floor(log10 q) for q > 0, by exact comparison."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("floor_log10 requires q > 0")
    e = digits10(q.numerator) - digits10(q.denominator)
    while Fraction(10) ** e > q:
        e -= 1
    while Fraction(10) ** (e + 1) <= q:
        e += 1
    return e


def fmt_real(q: Fraction, sig: int = 18) -> str:
    """Deterministic decimal rendering of a rational, exact-arithmetic only.

    Mid-range values print in fixed point (truncated); very large or very
    small ones print as a truncated mantissa with a power of ten.  Safe for
    integers of any size (never stringifies a huge int directly).
    """
    q = Fraction(q)
    if q == 0:
        return "0"
    sign = "-" if q < 0 else ""
    q = abs(q)
    e = floor_log10(q)
    if -6 <= e <= 24:
        scaled = int(q * 10**sig)
        whole, frac = divmod(scaled, 10**sig)
        return f"{sign}{whole}.{str(frac).zfill(sig)}"
    mant = int(q / Fraction(10) ** e * 10 ** (sig - 1))
    ms = str(mant)[:sig]
    return f"{sign}{ms[0]}.{ms[1:]}e{e:+d}"


def dyadic_up(x: Fraction, bits: int) -> Fraction:
    """Smallest multiple of 2^-bits that is >= x."""
    x = Fraction(x)
    n = x.numerator << bits
    d = x.denominator
    return Fraction(-((-n) // d), 1 << bits)


def dyadic_down(x: Fraction, bits: int) -> Fraction:
    """Largest multiple of 2^-bits that is <= x."""
    x = Fraction(x)
    return Fraction((x.numerator << bits) // x.denominator, 1 << bits)


@dataclass(frozen=True)
class Interval:
    """A rational enclosure [lo, hi] of a real number.

    All operations round outward, so any Interval produced here certifiably
    contains the exact real it stands for.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @classmethod
    def point(cls, q) -> "Interval":
        q = Fraction(q)
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __add__(self, other):
        o = other if isinstance(other, Interval) else Interval.point(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = other if isinstance(other, Interval) else Interval.point(other)
        return self + (-o)

    def __rsub__(self, other):
        return Interval.point(other) - self

    def __mul__(self, other):
        o = other if isinstance(other, Interval) else Interval.point(other)
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(cands), max(cands))

    __rmul__ = __mul__

    def inv(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval straddles zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        o = other if isinstance(other, Interval) else Interval.point(other)
        return self * o.inv()

    def __rtruediv__(self, other):
        return Interval.point(other) / self

    def pow_int(self, n: int) -> "Interval":
        if n < 0:
            return self.pow_int(-n).inv()
        acc = Interval.point(1)
        base = self
        k = n
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def rounded(self, bits: int) -> "Interval":
        return Interval(dyadic_down(self.lo, bits), dyadic_up(self.hi, bits))

    def max_with(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    def contains(self, q) -> bool:
        q = Fraction(q)
        return self.lo <= q <= self.hi


@dataclass(frozen=True)
class LogUpperBound:
    """A certified upper bound for a nonnegative real quantity.

    `value` is a dyadic rational that is >= the exact quantity; `precision`
    records the rounding grid (value is on the 2^-precision lattice).
    """

    value: Fraction
    precision: int

    @classmethod
    def from_interval(cls, iv: Interval, bits: int) -> "LogUpperBound":
        return cls(dyadic_up(iv.hi, bits), bits)


# ---------------------------------------------------------------------------
# Certified log / exp / roots over rationals
# ---------------------------------------------------------------------------


def _atanh_series(t: Fraction, prec: int) -> Interval:
    # 2*atanh(t) for 0 <= t < 1/2, with an explicit geometric tail bound.
    assert 0 <= t < Fraction(1, 2)
    if t == 0:
        return Interval.point(0)
    total = Fraction(0)
    term = t
    tt = t * t
    k = 0
    eps = Fraction(1, 1 << (prec + 8))
    while term / (2 * k + 1) > eps:
        total += term / (2 * k + 1)
        term *= tt
        k += 1
        if k % 8 == 0:
            total = dyadic_down(total, prec + 16)  # keep denominators bounded
    # remaining tail: sum_{j>=k} t^(2j+1)/(2j+1) <= t^(2k+1) / (1 - t^2)
    tail = term / (1 - tt)
    return Interval(2 * total, 2 * (total + tail + eps)).rounded(prec + 8)


@lru_cache(maxsize=None)
def _log2_interval(prec: int) -> Interval:
    # log 2 = 2*atanh(1/3)
    return _atanh_series(Fraction(1, 3), prec)


def log_interval(x: Fraction, prec: int = 128) -> Interval:
    """Certified enclosure of the natural log of a positive rational."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of a nonpositive rational")
    if x == 1:
        return Interval.point(0)
    if x < 1:
        return -log_interval(1 / x, prec)
    # write x = 2^e * m with m in [1, 2); here x > 1 so e >= 0
    e = max(x.numerator.bit_length() - x.denominator.bit_length(), 0)
    if (1 << e) > x:
        e -= 1
    m = x / (1 << e)
    if m >= 2:
        e += 1
        m /= 2
    assert 1 <= m < 2
    wp = prec + max(16, e.bit_length() + 8)
    t = (m - 1) / (m + 1)  # in [0, 1/3)
    body = _atanh_series(t, wp)
    total = body + _log2_interval(wp) * e
    return total.rounded(prec)


def log_iv(iv: Interval, prec: int = 128) -> Interval:
    return Interval(log_interval(iv.lo, prec).lo, log_interval(iv.hi, prec).hi)


def _exp_core(x: Fraction, prec: int) -> Interval:
    # exp for 0 <= x <= 1/2 by Taylor series with a tail bound.
    assert 0 <= x <= Fraction(1, 2)
    total = Fraction(1)
    term = Fraction(1)
    k = 0
    eps = Fraction(1, 1 << (prec + 8))
    while True:
        k += 1
        term = term * x / k
        if term <= eps:
            break
        total += term
        if k % 8 == 0:
            total = dyadic_down(total, prec + 16)
    tail = 2 * term  # ratio of consecutive terms is <= 1/2
    return Interval(total, total + tail + eps).rounded(prec + 8)


def exp_interval(x: Fraction, prec: int = 128) -> Interval:
    """Certified enclosure of exp(x) for rational x."""
    x = Fraction(x)
    if x < 0:
        iv = exp_interval(-x, prec).inv()
        # keep relative precision: small values need a finer absolute grid
        shift = max(0, floor_log(2, 1 / iv.lo)) if iv.lo < 1 else 0
        return iv.rounded(prec + shift + 8)
    if x == 0:
        return Interval.point(1)
    j = 0
    r = x
    while r > Fraction(1, 2):
        r /= 2
        j += 1
    wp = prec + 4 * j + 24
    acc = _exp_core(r, wp)
    for _ in range(j):
        acc = (acc * acc).rounded(wp)
    return acc.rounded(prec)


def exp_iv(iv: Interval, prec: int = 128) -> Interval:
    return Interval(exp_interval(iv.lo, prec).lo, exp_interval(iv.hi, prec).hi)


def nth_root_iv(iv: Interval, k: int, prec: int = 128) -> Interval:
    """Certified enclosure of the k-th root of a positive enclosure."""
    if iv.lo <= 0:
        raise ValueError("nth root requires a positive interval")
    scale = 1 << (k * prec)
    lo_int = (iv.lo.numerator * scale) // iv.lo.denominator
    hi_int = -((-iv.hi.numerator * scale) // iv.hi.denominator)
    r_lo = integer_nth_root(lo_int, k)
    r_hi = integer_nth_root(hi_int, k)
    if r_hi**k < hi_int:
        r_hi += 1
    return Interval(Fraction(r_lo, 1 << prec), Fraction(r_hi, 1 << prec))


def epsilon_interval(n: int, prec: int = 128) -> Interval:
    """Enclosure of the product over primes p | n of p^(1/(p-1))."""
    if n < 1:
        raise ValueError("epsilon is defined for n >= 1")
    acc = Interval.point(1)
    for p in prime_divisors(n):
        acc = acc * nth_root_iv(Interval.point(p), p - 1, prec + 8)
    return acc.rounded(prec)


def epsilon_n(n: int, precision: int = 96) -> tuple[tuple[tuple[int, Fraction], ...], LogUpperBound]:
    """Exact exponent list ((p, 1/(p-1)), ...) over p | n, plus a certified
    upper bound for the product of p^(1/(p-1))."""
    exps = tuple((p, Fraction(1, p - 1)) for p in prime_divisors(n))
    iv = epsilon_interval(n, precision + 16)
    return exps, LogUpperBound.from_interval(iv, precision)
