"""Dynamics of z -> z^d + c over finite fields.

Elements of F_{p^k} are encoded as integers 0 .. p^k - 1 whose base-p digits
are the coefficients of a polynomial in the generator (digit i is the
coefficient of x^i).  The modulus is the least irreducible monic polynomial
of degree k in the order of that same encoding.  Multiplication goes through
discrete log tables, built once per field.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from . import SCHEMA
from .cyclo import factorize, mult_order

FIELD_SIZE_BUDGET = 2**20


class FieldSizeError(ValueError):
    """p^k exceeds the configured field-size budget."""


# -- polynomials over F_p (ascending int lists) -----------------------------------

def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = list(a)
    inv = pow(m[-1], -1, p)
    while len(a) >= len(m):
        f = a[-1] * inv % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        _ptrim(a)
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pgcd(a, b, p):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base, e, m, p):
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        e >>= 1
        if e:
            base = _pmod(_pmul(base, base, p), m, p)
    return result


def is_irreducible(f, p):
    """Monic f of degree k is irreducible iff gcd(f, x^(p^i) - x) = 1 for i <= k/2."""
    k = len(f) - 1
    if k < 1:
        return False
    h = [0, 1]
    for _ in range(k // 2):
        h = _ppowmod(h, p, f, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _ptrim(diff), p)) > 1:
            return False
    return True


def _digits(v, p, k):
    out = []
    for _ in range(k):
        v, r = divmod(v, p)
        out.append(r)
    return out


def _from_digits(ds, p):
    v = 0
    for c in reversed(ds):
        v = v * p + c
    return v


def least_irreducible(p, k):
    """Least monic irreducible of degree k, coefficients ascending (constant first)."""
    for code in range(p**k):
        f = _digits(code, p, k) + [1]
        if is_irreducible(f, p):
            return f
    raise ValueError(f"no irreducible polynomial of degree {k} over F_{p}")


class FqField:
    """F_{p^k} with elements encoded as ints; immutable after construction."""

    def __init__(self, p, k, budget=FIELD_SIZE_BUDGET):
        if p**k > budget:
            raise FieldSizeError(f"field size {p}^{k} exceeds budget {budget}")
        self.p, self.k = p, k
        self.q = p**k
        self.modulus = least_irreducible(p, k)
        self._build_tables()

    def _slow_mul(self, a, b):
        if self.p == 2:
            modbits = _from_digits(self.modulus, 2)
            top = 1 << self.k
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a & top:
                    a ^= modbits
            return r
        pa, pb = _digits(a, self.p, self.k), _digits(b, self.p, self.k)
        prod = _pmod(_pmul(_ptrim(pa), _ptrim(pb), self.p), self.modulus, self.p) if self.k > 1 \
            else [(a * b) % self.p]
        return _from_digits(prod + [0] * (self.k - len(prod)), self.p)

    def _build_tables(self):
        q = self.q
        primes = list(factorize(q - 1)) if q > 2 else []
        for g in range(1, q):
            if g == 1 and q > 2:
                continue
            if all(self._slow_pow(g, (q - 1) // r) != 1 for r in primes):
                break
        self.generator = g
        exp = [0] * (q - 1)
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, g)
        self._exp, self._log = exp, log

    def _slow_pow(self, a, e):
        r = 1
        while e:
            if e & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return r

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        da, db = _digits(a, self.p, self.k), _digits(b, self.p, self.k)
        return _from_digits([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def neg(self, a):
        if self.p == 2:
            return a
        return _from_digits([(-x) % self.p for x in _digits(a, self.p, self.k)], self.p)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def pow(self, a, e):
        if a == 0:
            return 0 if e > 0 else 1
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def from_prime(self, c):
        return c % self.p

    def frobenius(self, a, times=1):
        return self.pow(a, self.p**times)

    def degree_of(self, a):
        """Degree over F_p of the smallest subfield containing a."""
        for j in sorted(_divisors_small(self.k)):
            if self.pow(a, self.p**j) == a:
                return j
        return self.k

    def elements(self):
        return range(self.q)

    def element_of_order(self, m):
        if (self.q - 1) % m:
            raise ValueError(f"F_{self.q} has no element of order {m}")
        return self._exp[((self.q - 1) // m) % (self.q - 1)]

    def __repr__(self):
        return f"FqField(p={self.p}, k={self.k}, modulus={self.modulus})"


def _divisors_small(n):
    return [e for e in range(1, n + 1) if n % e == 0]


@lru_cache(maxsize=64)
def field(p, k, budget=FIELD_SIZE_BUDGET):
    """Cached field objects; they are immutable."""
    return FqField(p, k, budget)


# -- orbits ----------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitRecord:
    start: object
    preperiod: int
    period: int

    @property
    def length(self):
        return self.preperiod + self.period


def brent(f, x0):
    """Brent's cycle detection: (preperiod, period) of x0 under f."""
    power = lam = 1
    tortoise, hare = x0, f(x0)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        lam += 1
    tortoise = hare = x0
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while tortoise != hare:
        tortoise, hare = f(tortoise), f(hare)
        mu += 1
    return mu, lam


def _iter(f, x, k):
    for _ in range(k):
        x = f(x)
    return x


def confirm_minimal(f, x0, mu, lam):
    """Check f^(mu+lam)(x) = f^mu(x), and that neither mu nor lam can shrink."""
    y = _iter(f, x0, mu)
    if _iter(f, y, lam) != y:
        return False
    if mu > 0:
        y0 = _iter(f, x0, mu - 1)
        if _iter(f, y0, lam) == y0:
            return False
    for r in factorize(lam) if lam > 1 else {}:
        if _iter(f, y, lam // r) == y:
            return False
    return True


def orbit(F, d, c, x, confirm=True):
    """(preperiod, period) of x under z -> z^d + c over the field F."""
    exp, log, qm1 = F._exp, F._log, F.q - 1
    add = F.add

    if F.p == 2:
        def f(z):
            return (exp[(log[z] * d) % qm1] if z else 0) ^ c
    else:
        def f(z):
            return add(exp[(log[z] * d) % qm1] if z else 0, c)

    mu, lam = brent(f, x)
    if confirm and not confirm_minimal(f, x, mu, lam):
        raise AssertionError("cycle detection gave a non-minimal answer")
    return OrbitRecord(x, mu, lam)


def orbit_bruteforce(F, d, c, x):
    """Walk the orbit storing every visited point."""
    seen = {}
    k = 0
    while x not in seen:
        seen[x] = k
        x = F.add(F.pow(x, d), c)
        k += 1
    return OrbitRecord(None, seen[x], k - seen[x])


def power_period(d, m):
    """Period under z -> z^d of a root of unity of order m coprime to d."""
    return mult_order(d, m)


def power_census(d, p, m_max, checkpoints=(100, 1000, 10000)):
    """Periods mult_order(d, m) over m <= m_max with gcd(m, d p) = 1."""
    counts = Counter()
    distinct_at = {}
    checks = sorted(c for c in checkpoints if c <= m_max)
    seen = set()
    ci = 0
    for m in range(1, m_max + 1):
        if math.gcd(m, d * p) == 1:
            per = mult_order(d, m)
            counts[per] += 1
            seen.add(per)
        while ci < len(checks) and checks[ci] == m:
            distinct_at[m] = len(seen)
            ci += 1
    vals = [distinct_at[c] for c in checks]
    return {
        "schema": SCHEMA,
        "d": d, "p": p, "m_max": m_max,
        "distinct_periods": len(counts),
        "periods": {str(k): counts[k] for k in sorted(counts)},
        "distinct_at_checkpoints": {str(c): distinct_at[c] for c in checks},
        "strictly_increasing": all(u < v for u, v in zip(vals, vals[1:])),
    }


# -- curves in the (x, c) plane -------------------------------------------------------

CURVES = {
    "diag": ((0, 1), (0, 1)),   # (t, t)
    "crit": ((0,), (0, 1)),     # (0, t)
    "power": ((0, 1), (0,)),    # (t, 0)
}


def _eval_prime_poly(F, coeffs, t):
    acc = 0
    for a in reversed(coeffs):
        acc = F.add(F.mul(acc, t), F.from_prime(a))
    return acc


def curve_period_survey(p, d, curve="diag", k_max=12, budget=FIELD_SIZE_BUDGET, min_records=None):
    """Period statistics over all t in F_{p^k}, k = 1..k_max, for (x(t), c(t)).

    A k is a record when its maximal period beats every smaller k; the first k
    counts as a record only if some earlier k exists, so records measure growth.
    """
    if d % p:
        raise ValueError(f"p={p} must divide d={d}")
    if p**k_max > budget:
        raise FieldSizeError(f"p^k_max = {p}^{k_max} exceeds budget {budget}")
    xs, cs = CURVES[curve] if isinstance(curve, str) else curve
    rows = []
    best = None
    records = 0
    for k in range(1, k_max + 1):
        F = field(p, k, budget)
        periods = Counter()
        for t in F.elements():
            rec = orbit(F, d, _eval_prime_poly(F, cs, t), _eval_prime_poly(F, xs, t), confirm=False)
            periods[rec.period] += 1
        mx = max(periods)
        is_record = best is not None and mx > best
        records += is_record
        best = mx if best is None else max(best, mx)
        rows.append({"k": k, "t_count": F.q, "max_period": mx, "distinct_periods": len(periods),
                     "record": is_record, "running_max": best})
    need = min_records if min_records is not None else math.ceil(k_max / 3)
    return {
        "schema": SCHEMA,
        "p": p, "d": d, "curve": curve if isinstance(curve, str) else "custom",
        "k_max": k_max, "rows": rows, "records": records, "required_records": need,
        "verdict": "PASS" if records >= need else "FAIL",
    }


def survey_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "t_count", "max_period", "distinct_periods"])
    for r in report["rows"]:
        w.writerow([r["k"], r["t_count"], r["max_period"], r["distinct_periods"]])
    return buf.getvalue()


# -- fixed points and Frobenius -----------------------------------------------------

def _fpoly_mod(F, a, m):
    a = list(a)
    inv = F.inv(m[-1])
    while len(a) >= len(m):
        f = F.mul(a[-1], inv)
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = F.sub(a[shift + i], F.mul(f, c))
        while a and a[-1] == 0:
            a.pop()
    return a


def _fpoly_mul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    while out and out[-1] == 0:
        out.pop()
    return out


def _fpoly_gcd(F, a, b):
    while b:
        a, b = b, _fpoly_mod(F, a, b)
    return a


def _fpoly_powmod(F, base, e, m):
    result = [1]
    base = _fpoly_mod(F, base, m)
    while e:
        if e & 1:
            result = _fpoly_mod(F, _fpoly_mul(F, result, base), m)
        e >>= 1
        if e:
            base = _fpoly_mod(F, _fpoly_mul(F, base, base), m)
    return result


def factor_degrees(F, f, sub_q):
    """Degrees of the irreducible factors of squarefree f over the subfield F_{sub_q}.

    Distinct-degree factorization: gcd(f, x^(sub_q^i) - x) collects the factors
    of degree dividing i.
    """
    f = list(f)
    degs = []
    h = [0, 1]
    i = 0
    while len(f) > 1:
        i += 1
        if 2 * i > len(f) - 1:
            degs.append(len(f) - 1)
            break
        h = _fpoly_powmod(F, h, sub_q, f)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = F.sub(diff[1], 1)
        while diff and diff[-1] == 0:
            diff.pop()
        g = _fpoly_gcd(F, f, diff)
        gdeg = len(g) - 1
        if gdeg > 0:
            degs.extend([i] * (gdeg // i))
            f = _fpoly_divexact(F, f, g)
            h = _fpoly_mod(F, h, f) if len(f) > 1 else h
    return sorted(degs)


def _fpoly_divexact(F, a, b):
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    inv = F.inv(b[-1])
    for i in range(len(a) - len(b), -1, -1):
        f = F.mul(a[i + len(b) - 1], inv)
        q[i] = f
        for k, c in enumerate(b):
            a[i + k] = F.sub(a[i + k], F.mul(f, c))
    return q


def fixed_curve_fibers(p, d, k, sample=None, budget=FIELD_SIZE_BUDGET):
    """Fixed points of z -> z^d + c as c ranges over F_{p^k}.

    The fixed-point curve is the graph c = x - x^d, so it is irreducible.  For
    each c the fiber is the root set of x^d - x + c, which is separable when
    p | d (its derivative is -1), hence always of size d.  Frobenius over the
    field of definition of c permutes it; its orbits correspond to the
    irreducible factors.
    """
    if d % p:
        raise ValueError(f"p={p} must divide d={d}")
    F = field(p, k, budget)
    graph_ok = all(F.add(F.pow(x, d), F.sub(x, F.pow(x, d))) == x for x in F.elements())
    cs = list(F.elements()) if sample is None else sample
    fibers = []
    structures = Counter()
    transitive_gen = 0
    single_total = 0
    generating = 0
    sizes_ok = True
    for c in cs:
        kc = F.degree_of(c)
        f = [c, F.neg(1)] + [0] * (d - 2) + [1]  # x^d - x + c
        if d == 1:
            raise ValueError("d must be at least 2")
        df = [F.mul(i % p, a) for i, a in enumerate(f)][1:]
        while df and df[-1] == 0:
            df.pop()
        separable = bool(df) and len(_fpoly_gcd(F, f, df)) == 1
        degs = factor_degrees(F, f, p**kc)
        sizes_ok = sizes_ok and separable and sum(degs) == d
        single = degs == [d]
        if kc == k:
            generating += 1
            transitive_gen += single
        single_total += single
        structures[tuple(degs)] += 1
        fibers.append({"c": c, "field_degree": kc, "orbit_sizes": degs, "single_orbit": single})
    return {
        "schema": SCHEMA,
        "p": p, "d": d, "k": k,
        "modulus": F.modulus,
        "graph_parametrization_ok": graph_ok,
        "fiber_sizes_all_d": sizes_ok,
        "orbit_structures": {" ".join(map(str, s)): v for s, v in sorted(structures.items())},
        "generating_c": generating,
        "generating_c_single_orbit": transitive_gen,
        "fibers": fibers,
        # small fields need not contain a generating c with an irreducible fiber, so the
        # transitivity evidence is any single-orbit fiber at all
        "single_orbit_fibers": single_total,
        "verdict": "PASS" if graph_ok and sizes_ok and single_total > 0 else "FAIL",
    }


# -- the projective family psi_c ------------------------------------------------------

def _pcanon(F, pt):
    for v in reversed(pt):
        if v:
            inv = F.inv(v)
            return tuple(F.mul(x, inv) for x in pt)
    raise ValueError("all coordinates are zero")


def psi_apply(F, d, c, pt):
    """psi_c[x_0, ..., x_n] = [x_0^d + c x_n^d, x_1^d, ..., x_n^d]."""
    powd = [F.pow(x, d) for x in pt]
    return (F.add(powd[0], F.mul(c, powd[-1])),) + tuple(powd[1:])


def psi_family_orbit(p, d, n, c, pt, k, budget=FIELD_SIZE_BUDGET):
    """(preperiod, period) of a projective point under psi_c over F_{p^k}."""
    if d % p:
        raise ValueError(f"p={p} must divide d={d}")
    if len(pt) != n + 1:
        raise ValueError("point must have n + 1 coordinates")
    F = field(p, k, budget)
    x = _pcanon(F, tuple(pt))
    seen = {}
    i = 0
    while x not in seen:
        seen[x] = i
        x = _pcanon(F, psi_apply(F, d, c, x))
        i += 1
    return OrbitRecord(tuple(pt), seen[x], i - seen[x])


def psi_affine_orbit(p, d, c, z, k, budget=FIELD_SIZE_BUDGET):
    """Orbit of an affine tuple under (z_0^d + c, z_1^d, ..., z_{n-1}^d)."""
    F = field(p, k, budget)
    x = tuple(z)
    seen = {}
    i = 0
    while x not in seen:
        seen[x] = i
        x = (F.add(F.pow(x[0], d), c),) + tuple(F.pow(v, d) for v in x[1:])
        i += 1
    return OrbitRecord(tuple(z), seen[x], i - seen[x])
