"""Exact roots of unity and the (pre)periodic points of the power map z -> z^d.

A root of unity is stored as a reduced fraction a/m of a full turn, so the value
is exp(2*pi*i*a/m).  The extra value Zero is absorbing under multiplication.
Everything here is integer arithmetic; complex floats never appear.

Under z -> z^d a root of order m splits as m = m0 * t with m0 the largest
divisor coprime to d.  The prime-to-d part is periodic with period equal to the
order of d modulo m0, and the d-primary part dies after the least a with
t | d^a.  That gives the (preperiod, period) classification used throughout
the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

DEFAULT_ENUMERATION_BOUND = 10**6


class EnumerationBoundError(ValueError):
    """Raised when an enumeration would exceed the configured bound."""

    def __init__(self, required, bound):
        super().__init__(f"enumeration needs {required} elements, bound is {bound}")
        self.required = required
        self.bound = bound


class RootOfUnityOrZero:
    """Zero, or exp(2 pi i a/m) with a/m reduced and 0 <= a < m."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, *, zero=False):
        if zero:
            self.num = None
            self.den = None
            return
        if den < 1:
            raise ValueError("denominator must be positive")
        num %= den
        g = math.gcd(num, den)
        if num == 0:
            den = 1
        else:
            num //= g
            den //= g
        self.num = num
        self.den = den

    @classmethod
    def _reduced(cls, num, den):
        # caller guarantees 0 <= num < den and gcd(num, den) = 1
        x = object.__new__(cls)
        x.num = num
        x.den = den
        return x

    @classmethod
    def from_turn(cls, turn):
        turn = Fraction(turn)
        return cls(turn.numerator, turn.denominator)

    @property
    def is_zero(self):
        return self.num is None

    @property
    def order(self):
        """Multiplicative order (the denominator); None for Zero."""
        return self.den

    @property
    def turn(self):
        if self.is_zero:
            raise ValueError("Zero has no turn")
        return Fraction(self.num, self.den)

    def __mul__(self, other):
        if not isinstance(other, RootOfUnityOrZero):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return ZERO
        return RootOfUnityOrZero(self.num * other.den + other.num * self.den, self.den * other.den)

    def inverse(self):
        if self.is_zero:
            raise ZeroDivisionError("Zero is not invertible")
        return RootOfUnityOrZero(-self.num, self.den)

    def __truediv__(self, other):
        if not isinstance(other, RootOfUnityOrZero):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, k):
        if self.is_zero:
            if k <= 0:
                raise ZeroDivisionError("Zero to a non-positive power")
            return ZERO
        return RootOfUnityOrZero(self.num * k, self.den)

    def __eq__(self, other):
        if not isinstance(other, RootOfUnityOrZero):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __lt__(self, other):
        # Zero first, then by turn; handy for deterministic sorting
        if self.is_zero or other.is_zero:
            return self.is_zero and not other.is_zero
        return self.num * other.den < other.num * self.den

    def __repr__(self):
        return f"RootOfUnityOrZero({self})"

    def __str__(self):
        if self.is_zero:
            return "0"
        return f"{self.num}/{self.den}"

    def to_complex(self):
        if self.is_zero:
            return 0j
        return complex(math.cos(2 * math.pi * self.num / self.den),
                       math.sin(2 * math.pi * self.num / self.den))


ZERO = RootOfUnityOrZero(zero=True)
ONE = RootOfUnityOrZero(0, 1)


def root(a, m):
    """exp(2 pi i a/m) as an exact value."""
    return RootOfUnityOrZero(a, m)


def mul(x, y):
    return x * y


def parse_value(text):
    """Parse "0" (Zero), "1" (the value 1) or "a/m"."""
    text = text.strip()
    if text == "0":
        return ZERO
    if text == "1":
        return ONE
    if "/" not in text:
        raise ValueError(f"cannot parse root of unity {text!r}")
    a, m = text.split("/")
    return RootOfUnityOrZero(int(a), int(m))


def format_value(x):
    """Inverse of parse_value; the value 1 is written "0/1"."""
    return str(x)


class PrePeriod(NamedTuple):
    preperiod: int
    period: int


# -- elementary number theory ------------------------------------------------

def factorize(n):
    """Prime factorization by trial division, as a dict prime -> exponent."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n):
    divs = [1]
    for p, e in factorize(n).items():
        divs = [q * p**k for q in divs for k in range(e + 1)]
    return sorted(divs)


def mobius(n):
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def _carmichael(fac):
    lam = 1
    for p, e in fac.items():
        if p == 2 and e >= 3:
            v = 2 ** (e - 2)
        else:
            v = (p - 1) * p ** (e - 1)
        lam = math.lcm(lam, v)
    return lam


def mult_order(d, m):
    """Least a >= 1 with d^a = 1 mod m (1 when m = 1)."""
    if m < 1:
        raise ValueError("m must be positive")
    if math.gcd(m, d) != 1:
        raise ValueError(f"gcd(m, d) = gcd({m}, {d}) != 1")
    if m == 1:
        return 1
    order = _carmichael(factorize(m))
    for q in factorize(order):
        while order % q == 0 and pow(d, order // q, m) == 1:
            order //= q
    return order


def prime_to_part(m, d):
    """Largest divisor of m coprime to d."""
    g = math.gcd(m, d)
    while g > 1:
        m //= g
        g = math.gcd(m, d)
    return m


def least_power_exponent(t, d):
    """Least a >= 0 with t | d^a (t must only have primes dividing d)."""
    a = 0
    while t != 1:
        g = math.gcd(t, d)
        if g == 1:
            raise ValueError(f"{t} has a prime factor not dividing {d}")
        t //= g
        a += 1
    return a


def phi0_type(x, d):
    """(preperiod, period) of x under z -> z^d."""
    if x.is_zero:
        return PrePeriod(0, 1)
    m = x.den
    m0 = prime_to_part(m, d)
    return PrePeriod(least_power_exponent(m // m0, d), mult_order(d, m0))


def count_per_phi0(d, b):
    """Number of points of exact period b for z -> z^d (Zero included at b = 1)."""
    if b < 1:
        raise ValueError("period must be positive")
    if b == 1:
        return d
    return sum(mobius(b // e) * (d**e - 1) for e in divisors(b))


def enumerate_per_phi0(d, b, bound=DEFAULT_ENUMERATION_BOUND):
    """All points of exact period b for z -> z^d, sorted (Zero first)."""
    size = d**b - 1
    if size > bound:
        raise EnumerationBoundError(size, bound)
    out = [ZERO] if b == 1 else []
    # one order computation per divisor e of d^b - 1, then all primitive e-th roots
    for e in divisors(size) if size > 0 else []:
        if mult_order(d, e) == b:
            new = RootOfUnityOrZero._reduced
            out.extend(new(a, e) for a in range(e) if math.gcd(a, e) == 1)
    # distinct turns with denominators below 2^26 differ by more than float rounding
    out.sort(key=lambda x: -1.0 if x.is_zero else x.num / x.den)
    return out


def v2(n):
    return (n & -n).bit_length() - 1


# -- constructive witnesses for orders of products ----------------------------

@dataclass(frozen=True)
class RootsWitness:
    zeta: RootOfUnityOrZero
    zeta_prime: RootOfUnityOrZero
    eta: RootOfUnityOrZero
    lcm: int
    order_divisibility: bool  # mult_order(d, lcm) divisible by lcm of the two orders


def _primitive_numerators(m):
    return (a for a in range(m) if math.gcd(a, m) == 1)


def _prime_feasible(p, e, e2):
    """Whether the local conditions at p admit a witness.

    With r = max(e, e2) the local components must satisfy: the difference of
    the two components has exact order p^r, and some unit over p^r plus the
    first component has exact order p^r.  The only obstructions come from
    p = 2.
    """
    r = max(e, e2)
    if r == 0:
        return None
    if p == 2 and e == e2:
        return "2-adic valuations of m and m' are equal and positive"
    if p == 2 and e == r:
        return ("no eta exists: m is even and its 2-adic valuation is at least that of m' "
                "(a unit over 2^r plus a unit over 2^r is never a unit)")
    return None


def roots_witness(d, m, m2):
    """Roots zeta (order m), zeta' (order m2), eta (order L = lcm(m, m2)).

    zeta/zeta' and eta*zeta are primitive L-th roots of unity.  Choices are the
    least numerators: zeta first, then zeta', then eta.
    """
    if m < 1 or m2 < 1:
        raise ValueError("orders must be positive")
    if math.gcd(m, d) != 1:
        raise ValueError(f"clause gcd(m, d) = 1 violated for m={m}, d={d}")
    if math.gcd(m2, d) != 1:
        raise ValueError(f"clause gcd(m', d) = 1 violated for m'={m2}, d={d}")
    a2, b2 = v2(m), v2(m2)
    if a2 == b2 and a2 > 0:
        raise ValueError("clause on 2-adic valuations violated: "
                         f"v2(m) = v2(m') = {a2} > 0")
    L = math.lcm(m, m2)
    for p in factorize(L) if L > 1 else {}:
        e, e2 = _valuation(m, p), _valuation(m2, p)
        problem = _prime_feasible(p, e, e2)
        if problem:
            raise ValueError(f"clause for eta violated at p={p}: {problem}")
    zeta = RootOfUnityOrZero(next(_primitive_numerators(m)), m)
    zeta_prime = None
    for a in _primitive_numerators(m2):
        cand = RootOfUnityOrZero(a, m2)
        if (zeta / cand).order == L:
            zeta_prime = cand
            break
    eta = None
    for a in _primitive_numerators(L):
        cand = RootOfUnityOrZero(a, L)
        if (cand * zeta).order == L:
            eta = cand
            break
    if zeta_prime is None or eta is None:  # excluded by the local analysis
        raise AssertionError(f"witness search failed for {(d, m, m2)}")
    o = math.lcm(mult_order(d, m), mult_order(d, m2))
    return RootsWitness(zeta, zeta_prime, eta, L, mult_order(d, L) % o == 0)


def _valuation(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k
