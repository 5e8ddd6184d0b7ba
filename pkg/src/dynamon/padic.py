"""Truncated p-adic integers and two ways to lift periodic points.

When p divides d, the map z -> z^d + c has derivative d z^(d-1), which vanishes
mod p.  Two consequences are used here:

* iterating f^b from a point whose reduction is b-periodic is a contraction on
  the residue disk, so the iterates converge p-adically to a periodic point
  (invlim_iterate);
* the derivative of f^b(z) - z is -1 mod p, so Newton's method lifts any
  b-periodic residue uniquely (newton_lift).

The two answers must agree, which lift_agreement checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cyclo import PrePeriod, divisors

DEFAULT_PRECISION = 32


class ContractionError(ArithmeticError):
    """Successive differences stopped shrinking: the hypothesis does not hold."""


class PrecisionError(ArithmeticError):
    """Iteration did not stabilize within the available precision."""


class NonUnitDerivativeError(ArithmeticError):
    """Newton's method needs a unit derivative."""


class LiftDisagreementError(AssertionError):
    """The two lifting methods returned different points."""


@dataclass(frozen=True)
class PAdicInt:
    """Residue modulo p^prec; arithmetic keeps the smaller precision."""

    p: int
    prec: int
    residue: int

    def __post_init__(self):
        if self.prec < 0:
            raise ValueError("precision must be non-negative")
        object.__setattr__(self, "residue", self.residue % self.p**self.prec)

    @property
    def modulus(self):
        return self.p**self.prec

    def _coerce(self, other):
        if isinstance(other, PAdicInt):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, int):
            return PAdicInt(self.p, self.prec, other)
        return NotImplemented

    def _binop(self, other, op):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        return PAdicInt(self.p, prec, op(self.residue, other.residue))

    def __add__(self, other):
        return self._binop(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._binop(other, lambda x, y: y - x)

    def __mul__(self, other):
        return self._binop(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __neg__(self):
        return PAdicInt(self.p, self.prec, -self.residue)

    def __pow__(self, k):
        return PAdicInt(self.p, self.prec, pow(self.residue, k, self.modulus))

    def inverse(self):
        if self.residue % self.p == 0:
            raise ZeroDivisionError("not a unit")
        return PAdicInt(self.p, self.prec, pow(self.residue, -1, self.modulus))

    def valuation(self):
        """p-adic valuation, capped at the precision."""
        r = self.residue
        if r == 0:
            return self.prec
        v = 0
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def reduce(self):
        """Image in the residue field F_p."""
        return self.residue % self.p

    def with_precision(self, prec):
        if prec > self.prec:
            raise ValueError("cannot invent digits")
        return PAdicInt(self.p, prec, self.residue)

    def __str__(self):
        return f"{self.p}^{self.prec}:{self.residue}"

    @classmethod
    def parse(cls, text):
        head, residue = text.split(":")
        p, prec = head.split("^")
        return cls(int(p), int(prec), int(residue))


@dataclass(frozen=True)
class PAdicMap:
    """Coordinate-wise polynomial map; coeffs[j] is the ascending coefficient list of coordinate j."""

    p: int
    coeffs: tuple

    @classmethod
    def unicritical(cls, p, d, cs):
        """z_j -> z_j^d + c_j for each parameter c_j (an int or a single value)."""
        if isinstance(cs, int):
            cs = (cs,)
        return cls(p, tuple(tuple([c] + [0] * (d - 1) + [1]) for c in cs))

    @property
    def n(self):
        return len(self.coeffs)

    @property
    def differential_vanishes(self):
        """Every derivative coefficient k * a_k is 0 mod p."""
        return all((k * a) % self.p == 0 for cs in self.coeffs for k, a in enumerate(cs))

    def _eval1(self, cs, z, mod):
        acc = 0
        for a in reversed(cs):
            acc = (acc * z + a) % mod
        return acc

    def apply(self, point, mod):
        return tuple(self._eval1(cs, z, mod) for cs, z in zip(self.coeffs, point))

    def iterate(self, point, k, mod):
        for _ in range(k):
            point = self.apply(point, mod)
        return point

    def derivative_iterate(self, j, z, k, mod):
        """d/dz of the k-th iterate of coordinate j at z."""
        cs = self.coeffs[j]
        dcs = [i * a for i, a in enumerate(cs)][1:]
        acc = 1
        for _ in range(k):
            acc = acc * self._eval1(dcs, z, mod) % mod
            z = self._eval1(cs, z, mod)
        return acc


def _as_tuple(x):
    if isinstance(x, (int, PAdicInt)):
        x = (x,)
    return tuple(v.residue if isinstance(v, PAdicInt) else int(v) for v in x)


def residue_orbit(fmap, x):
    """(preperiod, period) of the reduction of x under the reduced map."""
    z = tuple(v % fmap.p for v in _as_tuple(x))
    seen = {}
    k = 0
    while z not in seen:
        seen[z] = k
        z = fmap.apply(z, fmap.p)
        k += 1
    return PrePeriod(seen[z], k - seen[z])


@dataclass
class InvlimResult:
    point: tuple
    preperiod: int
    period: int
    prec: int
    valuations: list = field(default_factory=list)

    def as_padic(self, p):
        return tuple(PAdicInt(p, self.prec, r) for r in self.point)


def _coord_valuation(diff, p, cap):
    v = cap
    for r in diff:
        if r:
            k = 0
            while r % p == 0:
                r //= p
                k += 1
            v = min(v, k)
    return v


def invlim_iterate(fmap, x, prec=DEFAULT_PRECISION, max_steps=None):
    """Limit of f^(a + b k)(x), the periodic point in the residue disk of f^a(x)."""
    if not fmap.differential_vanishes:
        raise ValueError("the differential of the map does not vanish mod p")
    p = fmap.p
    mod = p**prec
    a, b = residue_orbit(fmap, x)
    z = fmap.iterate(tuple(v % mod for v in _as_tuple(x)), a, mod)
    vals = []
    limit = max_steps if max_steps is not None else prec + 2
    for _ in range(limit):
        nxt = fmap.iterate(z, b, mod)
        diff = tuple((u - w) % mod for u, w in zip(nxt, z))
        v = _coord_valuation(diff, p, prec)
        if vals and v < prec and v <= vals[-1]:
            raise ContractionError(f"valuation sequence {vals + [v]} is not increasing")
        vals.append(v)
        z = nxt
        if v >= prec:
            return InvlimResult(z, a, b, prec, vals)
    raise PrecisionError(f"no agreement mod {p}^{prec} after {limit} steps")


def newton_lift(fmap, residue_point, b, prec=DEFAULT_PRECISION):
    """Newton iteration on f^b(z) - z, coordinate by coordinate."""
    p = fmap.p
    z = tuple(v % p for v in _as_tuple(residue_point))
    if fmap.iterate(z, b, p) != z:
        raise ValueError(f"{z} is not b-periodic mod {p} for b={b}")
    mod = p**prec
    out = []
    for j, zj in enumerate(z):
        cs = fmap.coeffs[j]
        sub = PAdicMap(p, (cs,))
        w = zj
        for _ in range(2 * prec.bit_length() + 4):
            fw = sub.iterate((w,), b, mod)[0]
            F = (fw - w) % mod
            if F == 0:
                break
            dF = (sub.derivative_iterate(0, w, b, mod) - 1) % mod
            if dF % p == 0:
                raise NonUnitDerivativeError(f"derivative of f^b - id vanishes mod p at {w}")
            w = (w - F * pow(dF, -1, mod)) % mod
        else:
            raise PrecisionError("Newton iteration did not converge")
        out.append(w)
    return tuple(out)


def minimal_period(fmap, y, b, prec):
    """Least e | b with f^e(y) = y mod p^prec."""
    mod = fmap.p**prec
    for e in divisors(b):
        if fmap.iterate(y, e, mod) == tuple(v % mod for v in y):
            return e
    return None


def lift_agreement(fmap, x, prec=DEFAULT_PRECISION):
    """Run both lifting methods and insist they agree mod p^prec."""
    res = invlim_iterate(fmap, x, prec)
    mod = fmap.p**prec
    start = fmap.iterate(tuple(v % fmap.p for v in _as_tuple(x)), res.preperiod, fmap.p)
    newton = newton_lift(fmap, start, res.period, prec)
    if newton != res.point:
        raise LiftDisagreementError(f"invlim gave {res.point}, Newton gave {newton}")
    period_full = minimal_period(fmap, res.point, res.period, prec)
    return {
        "p": fmap.p,
        "prec": prec,
        "point": [str(PAdicInt(fmap.p, prec, r)) for r in res.point],
        "preperiod": res.preperiod,
        "period": res.period,
        "period_at_full_precision": period_full,
        "valuations": res.valuations,
        "contraction_monotone": all(u < v for u, v in zip(res.valuations, res.valuations[1:])),
        "fixed_mod_p^N": fmap.iterate(res.point, res.period, mod) == res.point,
        "agree": True,
    }


def product_family_lift(n, d, p, cs, x, prec=DEFAULT_PRECISION):
    """Coordinate-wise limits for the product of n maps z -> z^d + c_j."""
    if d % p:
        raise ValueError(f"p={p} must divide d={d}")
    cs = _as_tuple(cs)
    x = _as_tuple(x)
    if len(cs) != n or len(x) != n:
        raise ValueError("need one parameter and one coordinate per factor")
    coords, periods, preperiods = [], [], []
    for j in range(n):
        try:
            r = invlim_iterate(PAdicMap.unicritical(p, d, cs[j]), x[j], prec)
        except ArithmeticError as exc:
            raise type(exc)(f"coordinate {j}: {exc}") from exc
        coords.append(r.point[0])
        periods.append(r.period)
        preperiods.append(r.preperiod)
    period = math.lcm(*periods)
    full = PAdicMap.unicritical(p, d, cs)
    return {
        "point": tuple(coords),
        "text": [str(PAdicInt(p, prec, r)) for r in coords],
        "coordinate_periods": periods,
        "coordinate_preperiods": preperiods,
        "period": period,
        "periodic": full.iterate(tuple(coords), period, p**prec) == tuple(coords),
    }
