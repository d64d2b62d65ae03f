"""Exact coefficient rings: Z, Q, F_p, and Z[1/n].

All four are principal ideal domains with decidable divisibility and
effective Bezout identities, which is exactly what the matrix routines
need.  Elements are dumb values (ints, Fractions, or numerator/exponent
pairs); the ring object carries the arithmetic.  That keeps the hot
loops free of operator-dispatch surprises and lets Z and F_p use plain
ints.

Ring tags, as used on the command line and in JSON files:

    Z          integers
    Q          rationals
    Fp:7       prime field with 7 elements
    Zinv:6     integers with 2 and 3 inverted

An element of Z[1/n] is stored as ``(num, exps)`` where ``num`` is an
integer coprime to n and ``exps`` gives, for each prime p dividing n,
the exponent of p in the denominator (negative exponents put the prime
back in the numerator).  The value is num / prod(p**e).  Equality is
structural because the form is canonical.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import UnsupportedRing


def xgcd(a, b):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and g == x*a + y*b.

    >>> xgcd(12, 18)
    (6, -1, 1)
    """
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    # deterministic Miller-Rabin, good far past any sane modulus here
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n):
    """Sorted distinct prime factors of n >= 1."""
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out.append(m)
    return out


class CoefficientRing:
    """Shared surface of the four rings.  Subclasses fill in arithmetic."""

    kind = "?"

    def sum(self, values):
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    def characteristic_divides(self, k):
        """True iff the integer k maps to zero in this ring."""
        return self.is_zero(self.from_int(k))

    def __eq__(self, other):
        return isinstance(other, CoefficientRing) and self.tag() == other.tag()

    def __hash__(self):
        return hash(self.tag())

    def __repr__(self):
        return f"<ring {self.tag()}>"


class IntegerRing(CoefficientRing):
    kind = "Z"
    zero = 0
    one = 1

    def tag(self):
        return "Z"

    def from_int(self, k):
        return k

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a == 1 or a == -1

    def inv(self, a):
        if a == 1 or a == -1:
            return a
        raise ZeroDivisionError(f"{a} is not a unit in Z")

    def divides(self, a, b):
        if a == 0:
            return b == 0
        return b % a == 0

    def exact_div(self, b, a):
        q, r = divmod(b, a)
        if r:
            raise ZeroDivisionError(f"{a} does not divide {b} in Z")
        return q

    def gcd_bezout(self, a, b):
        return xgcd(a, b)

    def canonical_associate(self, a):
        """Return (c, u) with a == u*c, u a unit, c the canonical associate."""
        if a < 0:
            return -a, -1
        return a, 1

    def pivot_key(self, a):
        return a if a >= 0 else -a

    def fmt(self, a):
        return a

    def parse(self, v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise UnsupportedRing(f"not an integer value: {v!r}")
        return v


class RationalField(CoefficientRing):
    kind = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def tag(self):
        return "Q"

    def from_int(self, k):
        return Fraction(k)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        return 1 / a

    def divides(self, a, b):
        return a != 0 or b == 0

    def exact_div(self, b, a):
        return b / a

    def gcd_bezout(self, a, b):
        if a != 0:
            return Fraction(1), 1 / a, Fraction(0)
        if b != 0:
            return Fraction(1), Fraction(0), 1 / b
        return Fraction(0), Fraction(0), Fraction(0)

    def canonical_associate(self, a):
        if a == 0:
            return Fraction(0), Fraction(1)
        return Fraction(1), a

    def pivot_key(self, a):
        return a.numerator.bit_length() + a.denominator.bit_length()

    def fmt(self, a):
        if a.denominator == 1:
            return a.numerator
        return f"{a.numerator}/{a.denominator}"

    def parse(self, v):
        if isinstance(v, bool):
            raise UnsupportedRing(f"not a rational value: {v!r}")
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, str):
            return Fraction(v)
        raise UnsupportedRing(f"not a rational value: {v!r}")


class PrimeField(CoefficientRing):
    """F_p with elements stored as ints in [0, p)."""

    kind = "Fp"

    def __init__(self, p):
        if not is_prime(p):
            raise UnsupportedRing(f"modulus {p} is not prime")
        self.p = p
        self.zero = 0
        self.one = 1 % p

    def tag(self):
        return f"Fp:{self.p}"

    def from_int(self, k):
        return k % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"0 is not invertible mod {self.p}")
        return pow(a, -1, self.p)

    def divides(self, a, b):
        return a != 0 or b == 0

    def exact_div(self, b, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"division by zero mod {self.p}")
        return b * pow(a, -1, self.p) % self.p

    def gcd_bezout(self, a, b):
        if a != 0:
            return self.one, pow(a, -1, self.p), 0
        if b != 0:
            return self.one, 0, pow(b, -1, self.p)
        return 0, 0, 0

    def canonical_associate(self, a):
        if a == 0:
            return 0, self.one
        return self.one, a

    def pivot_key(self, a):
        return 1 if a else 0

    def fmt(self, a):
        return a

    def parse(self, v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise UnsupportedRing(f"not an integer value mod {self.p}: {v!r}")
        return v % self.p


class LocalizedIntegers(CoefficientRing):
    """Z[1/n]: integers with every prime dividing n made invertible.

    Units are +-(products of primes dividing n), so the canonical
    associate of an element is the positive part of its numerator and
    gcds reduce to integer gcds of numerators.  n = 1 gives a ring that
    behaves exactly like Z under a different tag.
    """

    kind = "Zinv"

    def __init__(self, n):
        if n < 1:
            raise UnsupportedRing(f"Zinv modulus must be >= 1, got {n}")
        self.n = n
        self.primes = tuple(prime_factors(n))
        self._zexp = (0,) * len(self.primes)
        self.zero = (0, self._zexp)
        self.one = (1, self._zexp)

    def tag(self):
        return f"Zinv:{self.n}"

    def _canon(self, num, exps):
        if num == 0:
            return self.zero
        exps = list(exps)
        for k, p in enumerate(self.primes):
            while num % p == 0:
                num //= p
                exps[k] -= 1
        return num, tuple(exps)

    def from_int(self, k):
        return self._canon(k, self._zexp)

    def add(self, a, b):
        na, ea = a
        nb, eb = b
        if na == 0:
            return b
        if nb == 0:
            return a
        common = tuple(max(x, y) for x, y in zip(ea, eb))
        fa = fb = 1
        for p, m, x, y in zip(self.primes, common, ea, eb):
            fa *= p ** (m - x)
            fb *= p ** (m - y)
        return self._canon(na * fa + nb * fb, common)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        na, ea = a
        nb, eb = b
        if na == 0 or nb == 0:
            return self.zero
        # numerators coprime to n stay coprime under multiplication
        return na * nb, tuple(x + y for x, y in zip(ea, eb))

    def neg(self, a):
        return -a[0], a[1]

    def is_zero(self, a):
        return a[0] == 0

    def is_unit(self, a):
        return a[0] == 1 or a[0] == -1

    def inv(self, a):
        na, ea = a
        if na == 1 or na == -1:
            return na, tuple(-x for x in ea)
        raise ZeroDivisionError(f"{self.fmt(a)} is not a unit in Z[1/{self.n}]")

    def divides(self, a, b):
        if a[0] == 0:
            return b[0] == 0
        return b[0] % a[0] == 0

    def exact_div(self, b, a):
        nb, eb = b
        na, ea = a
        if nb == 0:
            return self.zero
        q, r = divmod(nb, na)
        if r:
            raise ZeroDivisionError(f"{self.fmt(a)} does not divide {self.fmt(b)}")
        return q, tuple(x - y for x, y in zip(eb, ea))

    def gcd_bezout(self, a, b):
        na, ea = a
        nb, eb = b
        if na == 0 and nb == 0:
            return self.zero, self.zero, self.zero
        g, x, y = xgcd(na, nb)
        # x/(prod p^ea) * a + y/(prod p^eb) * b == g exactly
        gx = self._canon(x, tuple(-e for e in ea)) if x else self.zero
        gy = self._canon(y, tuple(-e for e in eb)) if y else self.zero
        return (g, self._zexp), gx, gy

    def canonical_associate(self, a):
        na, ea = a
        if na == 0:
            return self.zero, self.one
        c = na if na > 0 else -na
        return (c, self._zexp), (1 if na > 0 else -1, ea)

    def pivot_key(self, a):
        na = a[0]
        return na if na >= 0 else -na

    def fmt(self, a):
        na, ea = a
        num = na
        den = 1
        for p, e in zip(self.primes, ea):
            if e > 0:
                den *= p ** e
            elif e < 0:
                num *= p ** (-e)
        if den == 1:
            return num
        return f"{num}/{den}"

    def parse(self, v):
        if isinstance(v, bool):
            raise UnsupportedRing(f"not a Z[1/{self.n}] value: {v!r}")
        if isinstance(v, int):
            return self.from_int(v)
        if isinstance(v, str):
            fr = Fraction(v)
            den = fr.denominator
            exps = [0] * len(self.primes)
            for k, p in enumerate(self.primes):
                while den % p == 0:
                    den //= p
                    exps[k] += 1
            if den != 1:
                raise UnsupportedRing(
                    f"denominator of {v!r} is not supported by Z[1/{self.n}]")
            return self._canon(fr.numerator, tuple(exps))
        raise UnsupportedRing(f"not a Z[1/{self.n}] value: {v!r}")


def parse_ring_tag(tag):
    """Ring object for a tag like Z, Q, Fp:5, Zinv:6."""
    if tag == "Z":
        return IntegerRing()
    if tag == "Q":
        return RationalField()
    if tag.startswith("Fp:"):
        try:
            p = int(tag[3:])
        except ValueError:
            raise UnsupportedRing(f"bad prime field tag {tag!r}") from None
        return PrimeField(p)
    if tag.startswith("Zinv:"):
        try:
            n = int(tag[5:])
        except ValueError:
            raise UnsupportedRing(f"bad localization tag {tag!r}") from None
        return LocalizedIntegers(n)
    raise UnsupportedRing(f"unknown ring tag {tag!r}")


ZZ = IntegerRing()
QQ = RationalField()
