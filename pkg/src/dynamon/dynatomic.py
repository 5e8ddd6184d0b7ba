"""Exact integer polynomials for the unicritical family z^d + c.

Univariate polynomials (ExactPoly) are dense ascending coefficient tuples.
Bivariate polynomials (ExactBiPoly) keep a sparse map (z-degree, c-degree) ->
coefficient; the three-variable iterate of z(z - eps)^(d-1) + c uses the same
sparse map keyed by (z, c, eps) exponents.

Large products go through Kronecker substitution: the coefficient list is
packed into one big integer, multiplied by CPython's Karatsuba routine and
unpacked.  With degrees in the thousands this is far faster than schoolbook
convolution and it is still exact.

The gcd used for squarefreeness works on primitive parts.  It evaluates both
polynomials at a large integer, takes the integer gcd, reads the candidate back
in balanced base and keeps it only if it divides both inputs exactly (the
heuristic gcd of Char, Geddes and Gonnet).  If that fails a few times it falls
back to the primitive remainder sequence, which is also exposed as prs_gcd.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .cyclo import divisors, mobius

DEFAULT_DEGREE_BUDGET = 5000


class BudgetError(ValueError):
    """A requested polynomial would exceed the configured degree budget."""


class DivisionError(ArithmeticError):
    """An exact division left a remainder."""


# -- dense integer list helpers ----------------------------------------------

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _school_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pack(vals, nbytes):
    return int.from_bytes(b"".join(v.to_bytes(nbytes, "little") for v in vals), "little")


def _kron_mul(a, b):
    """Exact product of two integer coefficient lists by Kronecker substitution."""
    bound = max(abs(x) for x in a) * max(abs(x) for x in b) * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2) // 8 + 1
    bits = 8 * nbytes

    def pack_signed(vals):
        pos = _pack([v if v > 0 else 0 for v in vals], nbytes)
        neg = _pack([-v if v < 0 else 0 for v in vals], nbytes)
        return pos - neg

    n = len(a) + len(b) - 1
    half = 1 << (bits - 1)
    prod = pack_signed(a) * pack_signed(b)
    # shift every digit into [0, 2^bits) so that plain byte slicing works
    prod += _pack([half] * n, nbytes)
    raw = prod.to_bytes(n * nbytes, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(n)]


def _mul_lists(a, b):
    if not a or not b:
        return []
    if isinstance(a[0], Fraction) or isinstance(b[0], Fraction) or any(
            isinstance(x, Fraction) for x in a) or any(isinstance(x, Fraction) for x in b):
        return _school_mul(a, b)
    if min(len(a), len(b)) < 24:
        return _school_mul(a, b)
    return _kron_mul(a, b)


class ExactPoly:
    """Dense polynomial in one variable with exact (int or Fraction) coefficients.

    coeffs[k] is the coefficient of x^k; the list is trimmed so the last entry
    is non-zero.  The zero polynomial has degree -1.
    """

    __slots__ = ("coeffs",)
    ZERO_DEGREE = -1

    def __init__(self, coeffs=()):
        self.coeffs = tuple(_trim(coeffs))

    @classmethod
    def monomial(cls, k, coeff=1):
        return cls([0] * k + [coeff])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = ExactPoly([other])
        if not isinstance(other, ExactPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return ExactPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly([-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExactPoly([x * other for x in self.coeffs])
        other = _as_poly(other)
        return ExactPoly(_mul_lists(list(self.coeffs), list(other.coeffs)))

    __rmul__ = __mul__

    def __pow__(self, k):
        result = ExactPoly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return ExactPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def content(self):
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
            if g == 1:
                break
        return g

    def primitive_part(self):
        """Divide by the content and make the leading coefficient positive."""
        if self.is_zero():
            return self
        g = self.content()
        if self.lc < 0:
            g = -g
        return ExactPoly([c // g for c in self.coeffs])

    def divmod(self, other):
        """Division with remainder; exact over Q, integer when lc(other) = +-1."""
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dv = other.coeffs
        lc = dv[-1]
        q = [0] * max(len(rem) - len(dv) + 1, 0)
        for i in range(len(rem) - len(dv), -1, -1):
            c = rem[i + len(dv) - 1]
            if c == 0:
                continue
            if isinstance(c, int) and isinstance(lc, int) and c % lc == 0:
                f = c // lc
            else:
                f = Fraction(c, 1) / lc
            q[i] = f
            for k, y in enumerate(dv):
                rem[i + k] -= f * y
        return ExactPoly(q), ExactPoly(rem)

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise DivisionError("division left a non-zero remainder")
        return q

    def to_text(self):
        return format_poly(self)

    @classmethod
    def from_text(cls, text):
        return parse_poly(text)

    def __repr__(self):
        return f"ExactPoly({self.to_text()!r})"


def _as_poly(x):
    if isinstance(x, ExactPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactPoly([x])
    raise TypeError(f"cannot use {type(x).__name__} as a polynomial")


C = ExactPoly([0, 1])  # the parameter c


def format_poly(p):
    """Sparse `deg:coeff` pairs in ascending degree, space separated."""
    return " ".join(f"{k}:{c}" for k, c in enumerate(p.coeffs) if c != 0)


def _parse_coeff(s):
    return Fraction(s) if "/" in s else int(s)


def parse_poly(text):
    terms = {}
    for tok in text.split():
        k, c = tok.split(":")
        k = int(k)
        if k in terms:
            raise ValueError(f"repeated degree {k}")
        terms[k] = _parse_coeff(c)
    if not terms:
        return ExactPoly()
    dense = [0] * (max(terms) + 1)
    for k, c in terms.items():
        dense[k] = c
    return ExactPoly(dense)


# -- gcd ------------------------------------------------------------------------

def pseudo_rem(a, b):
    """Remainder of lc(b)^k * a by b over the integers (k just large enough)."""
    rem = list(a.coeffs)
    dv = b.coeffs
    lc, n = dv[-1], len(dv)
    while len(rem) >= n:
        top, shift = rem[-1], len(rem) - n
        rem = [x * lc for x in rem]
        for k, y in enumerate(dv):
            rem[shift + k] -= top * y
        rem = _trim(rem)
    return ExactPoly(rem)


def prs_gcd(a, b):
    """gcd over Z[x] by the primitive polynomial remainder sequence."""
    if a.is_zero() or b.is_zero():
        p = b if a.is_zero() else a
        return p.primitive_part() * p.content() if not p.is_zero() else p
    g = math.gcd(a.content(), b.content())
    a, b = a.primitive_part(), b.primitive_part()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        r = pseudo_rem(a, b)
        a, b = b, r.primitive_part()
    return a.primitive_part() * g


def _balanced_digits(h, x):
    out = []
    half = x // 2
    while h:
        g = h % x
        if g > half:
            g -= x
        out.append(g)
        h = (h - g) // x
    return ExactPoly(out)


def _divides(h, f):
    if h.degree == 0:
        return all(c % h.coeffs[0] == 0 for c in f.coeffs)
    if f.lc % h.lc:
        return False
    try:
        q, r = f.divmod(h)
    except ZeroDivisionError:
        return False
    return r.is_zero() and all(isinstance(c, int) for c in q.coeffs)


def poly_gcd(a, b, attempts=6):
    """gcd over Z[x] of two non-zero polynomials, positive leading coefficient."""
    if a.is_zero() or b.is_zero():
        return prs_gcd(a, b)
    g = math.gcd(a.content(), b.content())
    f, h = a.primitive_part(), b.primitive_part()
    if f.degree == 0 or h.degree == 0:
        return ExactPoly([g])
    fn = max(abs(c) for c in f.coeffs)
    hn = max(abs(c) for c in h.coeffs)
    big = 2 * min(fn, hn) + 29
    x = max(min(big, 99 * math.isqrt(big)), 2 * min(fn // abs(f.lc), hn // abs(h.lc)) + 2)
    for _ in range(attempts):
        fx, hx = f(x), h(x)
        if fx and hx:
            cand = _balanced_digits(math.gcd(fx, hx), x).primitive_part()
            if _divides(cand, f) and _divides(cand, h):
                return cand * g
        x = 73794 * x * math.isqrt(math.isqrt(x)) // 27011
    return prs_gcd(f, h) * g


def is_squarefree(p):
    """(squarefree?, gcd(p, p')) for a non-zero integer polynomial."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no squarefreeness")
    if p.degree <= 0:
        return True, ExactPoly([1])
    g = poly_gcd(p, p.derivative())
    return g.degree == 0, g


# -- the unicritical family ----------------------------------------------------

def _check_budget(degree, budget):
    if degree > budget:
        raise BudgetError(f"degree {degree} exceeds budget {budget}")


def gleason(d, b, budget=DEFAULT_DEGREE_BUDGET):
    """P_b(c) = phi_c^b(0); P_1 = c and P_{k+1} = P_k^d + c."""
    if b < 1:
        raise ValueError("b must be positive")
    _check_budget(d ** (b - 1), budget)
    p = C
    for _ in range(b - 1):
        p = p ** d + C
    return p


def gleason_mod_p(d, b, p, budget=DEFAULT_DEGREE_BUDGET):
    """Check P_b' = 1 mod p for a prime p dividing d."""
    if d % p:
        raise ValueError(f"p={p} does not divide d={d}")
    deriv = gleason(d, b, budget).derivative()
    reduced = ExactPoly([c % p for c in deriv.coeffs])
    return {
        "d": d, "b": b, "p": p,
        "reduced_derivative": reduced.to_text(),
        "derivative_is_one": reduced == ExactPoly([1]),
    }


def misiurewicz_diff(d, s, t, budget=DEFAULT_DEGREE_BUDGET, check_division=False):
    """phi_c^s(0) - phi_c^t(0) as a polynomial in c, for s > t >= 1.

    With check_division the result is also divided exactly by P_{s-t}: every
    parameter where 0 has period dividing s - t is a root of the difference.
    """
    if not s > t >= 1:
        raise ValueError(f"need s > t >= 1, got s={s}, t={t}")
    _check_budget(d ** (s - 1), budget)
    ps = [C]
    for _ in range(s - 1):
        ps.append(ps[-1] ** d + C)
    diff = ps[s - 1] - ps[t - 1]
    if check_division:
        diff.exact_div(ps[s - t - 1])
    return diff


def root_multiplicity(p, r):
    """Largest k with (c - r)^k dividing p, for exact rational r."""
    if p.is_zero():
        raise ValueError("multiplicity in the zero polynomial is undefined")
    r = Fraction(r)
    coeffs = [Fraction(c) for c in p.coeffs]
    k = 0
    while len(coeffs) > 1:
        # synthetic division by (c - r)
        out = [Fraction(0)] * (len(coeffs) - 1)
        acc = Fraction(0)
        for i in range(len(coeffs) - 1, 0, -1):
            acc = acc * r + coeffs[i]
            out[i - 1] = acc
        if acc * r + coeffs[0] != 0:
            break
        coeffs = out
        k += 1
    return k


def integer_roots(p):
    """All integer roots of a non-zero integer polynomial (trial division)."""
    coeffs = list(p.coeffs)
    roots = []
    if coeffs and coeffs[0] == 0:
        roots.append(0)
        while coeffs[0] == 0:
            coeffs.pop(0)
    q = ExactPoly(coeffs)
    if q.degree < 1:
        return roots
    for v in divisors(abs(coeffs[0])):
        for r in (v, -v):
            if q(r) == 0:
                roots.append(r)
    return sorted(roots)


# -- sparse multivariate helpers -----------------------------------------------

def _sparse_mul(a, b, widths):
    """Product of two sparse polynomials (dicts exponent-tuple -> int).

    widths[i] bounds the degree in variable i of the *product*, so exponents
    can be packed into one index without collisions.
    """
    if not a or not b:
        return {}
    strides = []
    s = 1
    for w in reversed(widths):
        strides.append(s)
        s *= w + 1
    strides.reverse()

    def flat(p):
        idx = {sum(e * st for e, st in zip(k, strides)): v for k, v in p.items()}
        out = [0] * (max(idx) + 1)
        for i, v in idx.items():
            out[i] = v
        return out

    prod = _mul_lists(flat(a), flat(b))
    res = {}
    for i, v in enumerate(prod):
        if v:
            key = []
            for st in strides:
                key.append(i // st)
                i %= st
            res[tuple(key)] = v
    return res


def _sparse_add(a, b, sign=1):
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + sign * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _sparse_pow(a, k, widths):
    result = {(0,) * len(widths): 1}
    base = a
    while k:
        if k & 1:
            result = _sparse_mul(result, base, widths)
        k >>= 1
        if k:
            base = _sparse_mul(base, base, widths)
    return result


class ExactBiPoly:
    """Polynomial in (z, c) with integer coefficients, keyed by (z-degree, c-degree)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @property
    def z_degree(self):
        return max((i for i, _ in self.terms), default=-1)

    @property
    def c_degree(self):
        return max((j for _, j in self.terms), default=-1)

    def __eq__(self, other):
        if not isinstance(other, ExactBiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        return ExactBiPoly(_sparse_add(self.terms, other.terms))

    def __sub__(self, other):
        return ExactBiPoly(_sparse_add(self.terms, other.terms, -1))

    def __mul__(self, other):
        widths = (self.z_degree + other.z_degree, self.c_degree + other.c_degree)
        return ExactBiPoly(_sparse_mul(self.terms, other.terms, widths))

    def coeff_in_z(self, i):
        """Coefficient of z^i as an ExactPoly in c."""
        row = {j: v for (ii, j), v in self.terms.items() if ii == i}
        dense = [0] * (max(row, default=-1) + 1)
        for j, v in row.items():
            dense[j] = v
        return ExactPoly(dense)

    def z_rows(self):
        return [self.coeff_in_z(i) for i in range(self.z_degree + 1)]

    def at_z0(self):
        return self.coeff_in_z(0)

    def __call__(self, z, c):
        return sum(v * z**i * c**j for (i, j), v in self.terms.items())

    def to_text(self):
        return " ".join(f"({i},{j}):{v}" for (i, j), v in sorted(self.terms.items()))

    @classmethod
    def from_text(cls, text):
        terms = {}
        for m in re.finditer(r"\((\d+),(\d+)\):(-?\d+)", text):
            key = (int(m.group(1)), int(m.group(2)))
            if key in terms:
                raise ValueError(f"repeated term {key}")
            terms[key] = int(m.group(3))
        return cls(terms)

    @classmethod
    def from_rows(cls, rows):
        terms = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row.coeffs):
                if v:
                    terms[(i, j)] = v
        return cls(terms)

    def __repr__(self):
        return f"ExactBiPoly({self.to_text()!r})"


Z_BI = ExactBiPoly({(1, 0): 1})
C_BI = ExactBiPoly({(0, 1): 1})


def iterate(d, b, budget=DEFAULT_DEGREE_BUDGET):
    """phi_c^b(z) for phi_c(z) = z^d + c."""
    if b < 1:
        raise ValueError("b must be positive")
    _check_budget(d**b, budget)
    f = ExactBiPoly({(d, 0): 1, (0, 1): 1})
    for _ in range(b - 1):
        widths = (d * f.z_degree, d * f.c_degree)
        f = ExactBiPoly(_sparse_add(_sparse_pow(f.terms, d, widths), {(0, 1): 1}))
    return f


def _divide_monic_in_z(num, den):
    """Exact quotient num/den in Z[c][z] where den is monic in z."""
    rows = num.z_rows()
    drows = den.z_rows()
    dz = len(drows) - 1
    if drows[-1] != ExactPoly([1]):
        raise ValueError("divisor must be monic in z")
    q = [ExactPoly()] * max(len(rows) - dz, 0)
    for i in range(len(rows) - 1 - dz, -1, -1):
        top = rows[i + dz]
        if top.is_zero():
            continue
        q[i] = top
        for k in range(dz + 1):
            rows[i + k] = rows[i + k] - top * drows[k]
    if any(not r.is_zero() for r in rows):
        raise DivisionError("dynatomic division left a remainder")
    return ExactBiPoly.from_rows(q)


def dynatomic(d, b, budget=DEFAULT_DEGREE_BUDGET):
    """Phi_b(z, c) = prod over e | b of (phi^e(z) - z)^mu(b/e), by exact division."""
    _check_budget(d**b, budget)
    num = ExactBiPoly({(0, 0): 1})
    dens = []
    for e in divisors(b):
        mu = mobius(b // e)
        if mu == 0:
            continue
        factor = iterate(d, e, budget) - Z_BI
        if mu == 1:
            num = num * factor
        else:
            dens.append(factor)
    for den in dens:
        num = _divide_monic_in_z(num, den)
    expected = sum(mobius(b // e) * d**e for e in divisors(b))
    if num.z_degree != expected:
        raise DivisionError(f"dynatomic degree {num.z_degree}, expected {expected}")
    return num


class ExactTriPoly:
    """Polynomial in (z, c, eps), keyed by exponent triples."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def __eq__(self, other):
        return isinstance(other, ExactTriPoly) and self.terms == other.terms

    def degree(self, var):
        return max((k[var] for k in self.terms), default=-1)

    def at_eps(self, eps=0):
        """Specialize eps to an integer, giving an ExactBiPoly in (z, c)."""
        out = {}
        for (i, j, k), v in self.terms.items():
            w = v * eps**k
            if w:
                out[(i, j)] = out.get((i, j), 0) + w
        return ExactBiPoly(out)

    def __call__(self, z, c, eps):
        return sum(v * z**i * c**j * eps**k for (i, j, k), v in self.terms.items())

    def to_text(self):
        return " ".join(f"({i},{j},{k}):{v}" for (i, j, k), v in sorted(self.terms.items()))


def iterate_two_param(d, b, max_d=4, max_b=3):
    """phi_{c,eps}^b(z) for phi_{c,eps}(z) = z (z - eps)^(d-1) + c."""
    if d > max_d or b > max_b:
        raise BudgetError(f"(d, b) = ({d}, {b}) exceeds the three-variable budget ({max_d}, {max_b})")
    if b < 1:
        raise ValueError("b must be positive")
    # phi^b is weighted homogeneous of weight d^b (z, eps weight 1, c weight d)
    w = d**b
    widths = (w, d ** (b - 1), w)
    g = {(1, 0, 0): 1}
    for _ in range(b):
        shifted = _sparse_add(g, {(0, 0, 1): -1})
        g = _sparse_add(_sparse_mul(g, _sparse_pow(shifted, d - 1, widths), widths), {(0, 1, 0): 1})
    return ExactTriPoly(g)
