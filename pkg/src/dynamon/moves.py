"""Monodromy moves on (pre)periodic points of the coordinate power map.

A point of projective n-space is a tuple of RootOfUnityOrZero values.  The
power map g raises every coordinate to the d-th power.  A certificate is a list
of steps acting on a representative:

* Rescale(f) multiplies every coordinate by a root of unity f.  The projective
  point does not change.
* Replace(j, v, chart=i) sets coordinate j to v.  It is legal only when
  coordinate i is exactly 1, old and new value have the same (preperiod,
  period) under z -> z^d, and no Zero passage happens at a strictly
  preperiodic point unless d = 2.

Replacing coordinate j in chart i is the action of the family that moves the
j-th affine coordinate of the chart x_i = 1 along its own unicritical family.
Whatever the family does, it preserves the type of that coordinate, and that is
all the legality rule encodes.

The connectors follow the constructive transitivity arguments.  A value of
type (a, b) factors uniquely as s * p, where s has order a power of primes
dividing d (the part that dies after a steps) and p has order prime to d (the
periodic part).  The type of a ratio splits the same way, so the periodic part
of a point can be moved without touching the other part.  For d > 2 the
connector first solves the periodic parts, then the d-primary parts.  For
d = 2 the d-primary layer {-1} is too small for that trick and the arguments
pass through points with a Zero coordinate.  There the connector searches the
(tiny) graph of chart moves breadth first.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache

from . import SCHEMA
from .cyclo import (DEFAULT_ENUMERATION_BOUND, ONE, ZERO, EnumerationBoundError, PrePeriod,
                    RootOfUnityOrZero, divisors, format_value, mobius, mult_order, parse_value,
                    phi0_type, prime_to_part, roots_witness, v2)


class MoveError(RuntimeError):
    """A connector could not produce a certificate."""


class TypeMismatchError(MoveError, ValueError):
    """The two endpoints do not have the requested (preperiod, period)."""


# -- points ---------------------------------------------------------------------

@lru_cache(maxsize=None)
def _vtype(num, den, d):
    if num is None:
        return PrePeriod(0, 1)
    return phi0_type(RootOfUnityOrZero(num, den), d)


def vtype(x, d):
    """phi0_type with a cache."""
    return _vtype(x.num, x.den, d)


def canonical(coords):
    """Divide by the last non-Zero coordinate."""
    for x in reversed(coords):
        if not x.is_zero:
            inv = x.inverse()
            return tuple(y * inv for y in coords)
    raise ValueError("all coordinates are Zero")


class CyclotomicProjPoint:
    """Projective point with root-of-unity-or-zero coordinates.

    Two points compare equal when their canonical forms agree, but the stored
    representative is kept as given because certificates act on it.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = tuple(coords)
        if len(coords) < 2:
            raise ValueError("need at least two coordinates")
        if all(x.is_zero for x in coords):
            raise ValueError("all coordinates are Zero")
        self.coords = coords

    @property
    def n(self):
        return len(self.coords) - 1

    def canonical(self):
        return canonical(self.coords)

    def __eq__(self, other):
        if not isinstance(other, CyclotomicProjPoint):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def to_strings(self):
        return [format_value(x) for x in self.coords]

    def __str__(self):
        return "[" + ",".join(self.to_strings()) + "]"

    def __repr__(self):
        return f"CyclotomicProjPoint({self})"

    @classmethod
    def parse(cls, text):
        """Parse "[1/3,1,0]" style text (or a list of strings)."""
        if isinstance(text, str):
            body = text.strip().strip("[]")
            parts = [p for p in body.split(",") if p.strip()]
        else:
            parts = list(text)
        return cls(parse_value(p) for p in parts)


def point(*values):
    """Shorthand: point("1/3", "1", "0") or point(x, y, z)."""
    return CyclotomicProjPoint(parse_value(v) if isinstance(v, str) else v for v in values)


def point_type(P, d):
    """(preperiod, period) of P under the coordinate-wise d-th power map."""
    x = P.canonical() if isinstance(P, CyclotomicProjPoint) else canonical(P)
    seen = {}
    k = 0
    while x not in seen:
        seen[x] = k
        x = canonical(tuple(y ** d for y in x))
        k += 1
    return PrePeriod(seen[x], k - seen[x])


def fast_type(coords, d):
    """Same as point_type, read off coordinate types of the canonical form."""
    pre, per = 0, 1
    for x in canonical(coords):
        t = vtype(x, d)
        pre = max(pre, t.preperiod)
        per = math.lcm(per, t.period)
    return PrePeriod(pre, per)


# -- steps and certificates -------------------------------------------------------

@dataclass(frozen=True)
class Rescale:
    factor: RootOfUnityOrZero

    def to_json(self):
        return {"op": "rescale", "factor": format_value(self.factor)}


@dataclass(frozen=True)
class Replace:
    j: int
    new_value: RootOfUnityOrZero
    chart: int

    def to_json(self):
        return {"op": "replace", "j": self.j, "new_value": format_value(self.new_value),
                "chart": self.chart}


def step_from_json(obj):
    if obj["op"] == "rescale":
        return Rescale(parse_value(obj["factor"]))
    if obj["op"] == "replace":
        return Replace(int(obj["j"]), parse_value(obj["new_value"]), int(obj["chart"]))
    raise ValueError(f"unknown step {obj!r}")


@dataclass
class MoveCertificate:
    d: int
    n: int
    start: CyclotomicProjPoint
    steps: list
    end: CyclotomicProjPoint

    def to_json(self):
        return {
            "schema": SCHEMA,
            "d": self.d,
            "n": self.n,
            "start": self.start.to_strings(),
            "steps": [s.to_json() for s in self.steps],
            "end": self.end.to_strings(),
        }

    def dumps(self, indent=None):
        return json.dumps(self.to_json(), indent=indent)

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["d"]), int(obj["n"]), CyclotomicProjPoint.parse(obj["start"]),
                   [step_from_json(s) for s in obj["steps"]], CyclotomicProjPoint.parse(obj["end"]))


@dataclass
class ValidationReport:
    ok: bool
    reason: str = ""
    step_index: int | None = None
    trace: list = field(default_factory=list)
    point_type: PrePeriod | None = None

    def to_json(self):
        return {"ok": self.ok, "reason": self.reason, "step_index": self.step_index,
                "point_type": list(self.point_type) if self.point_type else None,
                "trace": [[format_value(x) for x in rep] for rep in self.trace]}


def validate(cert):
    """Replay a certificate, checking every step; never raises on illegal input."""
    d = cert.d
    rep = list(cert.start.coords)
    trace = [tuple(rep)]
    if len(rep) != cert.n + 1 or len(cert.end.coords) != cert.n + 1:
        return ValidationReport(False, "dimension mismatch", None, trace)
    ptype = fast_type(rep, d)
    for idx, step in enumerate(cert.steps):
        if isinstance(step, Rescale):
            if step.factor.is_zero:
                return ValidationReport(False, "rescale by Zero", idx, trace, ptype)
            rep = [x * step.factor for x in rep]
        elif isinstance(step, Replace):
            j, i = step.j, step.chart
            if not (0 <= j <= cert.n and 0 <= i <= cert.n):
                return ValidationReport(False, "index out of range", idx, trace, ptype)
            if i == j:
                return ValidationReport(False, "chart equals replaced coordinate", idx, trace, ptype)
            if rep[i] != ONE:
                return ValidationReport(False, "chart not normalized", idx, trace, ptype)
            old, new = rep[j], step.new_value
            if vtype(old, d) != vtype(new, d):
                return ValidationReport(False, "period class changed", idx, trace, ptype)
            if (old.is_zero or new.is_zero) and old != new and d != 2 and ptype.preperiod > 0:
                return ValidationReport(False, "Zero passage at a preperiodic point needs d = 2",
                                        idx, trace, ptype)
            rep[j] = new
        else:
            return ValidationReport(False, f"unknown step {step!r}", idx, trace, ptype)
        trace.append(tuple(rep))
        if fast_type(rep, d) != ptype:
            return ValidationReport(False, "point type changed", idx, trace, ptype)
    if canonical(rep) != cert.end.canonical():
        return ValidationReport(False, "replay does not reach end", len(cert.steps), trace, ptype)
    return ValidationReport(True, "", None, trace, ptype)


# -- chain builder ------------------------------------------------------------------

class _Chain:
    """Records legal steps on a representative, together with their inverses."""

    def __init__(self, coords):
        self.rep = list(coords)
        self.steps = []
        self.undo = []

    @property
    def n(self):
        return len(self.rep) - 1

    def rescale(self, f):
        if f == ONE:
            return
        self.rep = [x * f for x in self.rep]
        self.steps.append(Rescale(f))
        self.undo.append(Rescale(f.inverse()))

    def replace(self, j, v, chart):
        if self.rep[chart] != ONE:
            raise AssertionError("chart coordinate is not 1")
        old = self.rep[j]
        if old == v:
            return
        self.rep[j] = v
        self.steps.append(Replace(j, v, chart))
        self.undo.append(Replace(j, old, chart))

    def move(self, j, ratio, chart):
        """Set coordinate j so that rep[j] / rep[chart] = ratio."""
        f = self.rep[chart]
        self.rescale(f.inverse())
        self.replace(j, ratio, chart)
        self.rescale(f)

    def net(self, j, w, chart):
        """Set coordinate j to w through the given chart (needs rep[n] = 1)."""
        f = self.rep[chart]
        self.move(j, w * f.inverse() if not w.is_zero else ZERO, chart)

    def inverse_steps(self):
        return list(reversed(self.undo))


def _simplify(steps):
    """Merge runs of Rescale steps (dropping trivial ones)."""
    out = []
    for s in steps:
        if isinstance(s, Rescale) and out and isinstance(out[-1], Rescale):
            f = out.pop().factor * s.factor
            if f != ONE:
                out.append(Rescale(f))
        elif isinstance(s, Rescale) and s.factor == ONE:
            continue
        else:
            out.append(s)
    return out


def step_budget(n):
    return 50 * (n + 1)


def _finish(P, Q, d, steps):
    steps = _simplify(steps)
    if len(steps) > step_budget(P.n):
        raise MoveError(f"certificate has {len(steps)} steps, budget {step_budget(P.n)}")
    cert = MoveCertificate(d, P.n, P, steps, Q)
    return cert


# -- value decomposition ------------------------------------------------------------

def split_value(x, d):
    """x = p * s with p of order prime to d and s of order dividing a power of d."""
    if x.is_zero:
        raise ValueError("Zero has no decomposition")
    m = x.den
    m0 = prime_to_part(m, d)
    t = m // m0
    u = x.num * pow(t, -1, m0) % m0 if m0 > 1 else 0
    v = x.num * pow(m0, -1, t) % t if t > 1 else 0
    return RootOfUnityOrZero(u, m0), RootOfUnityOrZero(v, t)


def _per(x, d):
    return vtype(x, d).period


def _pre(x, d):
    return vtype(x, d).preperiod


def _layer(d, a):
    """d-primary roots of preperiod exactly a, by increasing numerator."""
    m = d**a
    return [RootOfUnityOrZero(k, m) for k in range(m)
            if math.gcd(k, m) == 1 or a == 0
            if _pre(RootOfUnityOrZero(k, m), d) == a]


def _periodic_roots(d, e, exact=True):
    """Roots in mu_{d^e - 1} of period e (or dividing e), increasing numerator."""
    m = d**e - 1
    out = []
    for k in range(max(m, 1)):
        x = RootOfUnityOrZero(k, max(m, 1))
        p = _per(x, d)
        if p == e or (not exact and e % p == 0):
            out.append(x)
    return out


# -- the periodic solver ------------------------------------------------------------

class _View:
    """Which part of each coordinate a solver phase moves.

    The periodic phases act on the prime-to-d part and carry the d-primary part
    along unchanged; with periodic points the d-primary part is trivial.
    """

    def __init__(self, d):
        self.d = d

    def p(self, x):
        return split_value(x, self.d)[0]

    def s(self, x):
        return split_value(x, self.d)[1]

    def with_p(self, x, p):
        return p * self.s(x)

    def with_s(self, x, s):
        return self.p(x) * s


def _halvings(m, d, e):
    """m, m/2, m/4, ... while the period under z -> z^d stays e."""
    out = [m]
    while m % 2 == 0:
        m //= 2
        if m < 1 or mult_order(d, m) != e:
            break
        out.append(m)
    return out


def _boost_triple(d, a0, a1):
    """alpha (period a0), beta (period a1), w (period lcm) with per(w/beta) = per(alpha/beta)."""
    l = math.lcm(a0, a1)
    M0, M1 = d**a0 - 1, d**a1 - 1
    cands = sorted(((i + k, m1, m0) for i, m1 in enumerate(_halvings(M1, d, a1))
                    for k, m0 in enumerate(_halvings(M0, d, a0))))
    for _, m1, m0 in cands:
        try:
            wit = roots_witness(d, m1, m0)
        except ValueError:
            continue
        beta, alpha = wit.zeta, wit.zeta_prime
        w = wit.eta * beta
        if (_per(alpha, d) == a0 and _per(beta, d) == a1 and _per(w, d) == l
                and _per(w / beta, d) == _per(alpha / beta, d)):
            return alpha, beta, w
    # least-numerator search; only reached if no witness applies
    for beta in _periodic_roots(d, a1):
        for alpha in _periodic_roots(d, a0):
            target = _per(alpha / beta, d)
            for w in _periodic_roots(d, l):
                if _per(w / beta, d) == target:
                    return alpha, beta, w
    raise MoveError(f"unreachable configuration: no boost triple for d={d}, periods {a0}, {a1}")


def _standard_root(d, e, b):
    m = d**e - 1
    if d % 2 == 1 and m % 2 == 0 and v2(m) == v2(d**b - 1):
        m //= 2
    return RootOfUnityOrZero(1 if m > 1 else 0, m)


def _least_eta(d, b, x):
    """Least eta of period b with x/eta also of period b."""
    for eta in _periodic_roots(d, b):
        if _per(x / eta, d) == b:
            return eta
    raise MoveError(f"unreachable configuration: no eta for {x} at period {b}")


def _normalize_last(chain):
    last = max(k for k, x in enumerate(chain.rep) if not x.is_zero)
    chain.rescale(chain.rep[last].inverse())
    for k, x in enumerate(chain.rep):
        if x.is_zero:
            chain.replace(k, ONE, last)
    chain.rescale(chain.rep[-1].inverse())


def _periodic_reduce(chain, d, b, view):
    """Phases 2 and 3: boost coordinate 0 to period b, standardize the others."""
    n = chain.n
    rep = chain.rep
    for j in range(1, n):
        a0, a1 = _per(view.p(rep[0]), d), _per(view.p(rep[j]), d)
        if math.lcm(a0, a1) == a0:
            continue
        alpha, beta, w = _boost_triple(d, a0, a1)
        chain.net(0, view.with_p(rep[0], alpha), n)
        chain.net(j, view.with_p(rep[j], beta), n)
        chain.net(0, view.with_p(rep[0], w), j)
        rep = chain.rep
    if _per(view.p(chain.rep[0]), d) != b:
        raise MoveError("unreachable configuration: coordinate 0 did not reach full period")
    for j in range(1, n):
        e = _per(view.p(chain.rep[j]), d)
        chain.net(j, view.with_p(chain.rep[j], _standard_root(d, e, b)), n)


def _periodic_build(target, d, b, view):
    """Chain from the base point (with target's other parts) to target."""
    n = len(target) - 1
    zeta_b = RootOfUnityOrZero(1 if d**b - 1 > 1 else 0, d**b - 1)
    start = [view.with_p(target[0], zeta_b)] + [view.with_p(x, ONE) for x in target[1:]]
    chain = _Chain(start)
    for j in range(1, n):
        x = view.p(target[j])
        if x == ONE:
            continue
        eta = _least_eta(d, b, x)
        chain.net(0, view.with_p(chain.rep[0], eta), n)
        chain.net(j, view.with_p(chain.rep[j], x), 0)
    chain.net(0, target[0], n)
    if chain.rep != list(target):
        raise MoveError("unreachable configuration: induction missed the target")
    return chain


def _periodic_path(coords, d, b, view):
    """Steps from coords to the base point (parts other than p kept)."""
    norm = _Chain(coords)
    _normalize_last(norm)
    _periodic_reduce(norm, d, b, view)
    build = _periodic_build(tuple(norm.rep), d, b, view)
    return norm.steps + build.inverse_steps()


def _base_of(rep, d, b, view):
    zeta_b = RootOfUnityOrZero(1 if d**b - 1 > 1 else 0, d**b - 1)
    return [view.with_p(rep[0], zeta_b)] + [view.with_p(x, ONE) for x in rep[1:]]


def _check_types(P, Q, d, want):
    for name, X in (("start", P), ("end", Q)):
        t = point_type(X, d)
        if t != want:
            raise TypeMismatchError(f"{name} point {X} has type {tuple(t)}, expected {tuple(want)}")
    if P.n != Q.n:
        raise TypeMismatchError("points live in different dimensions")


def _trivial(P, Q, d):
    if P.coords == Q.coords:
        return MoveCertificate(d, P.n, P, [], Q)
    if P.canonical() == Q.canonical():
        k = max(i for i, x in enumerate(P.coords) if not x.is_zero)
        return MoveCertificate(d, P.n, P, [Rescale(Q.coords[k] / P.coords[k])], Q)
    return None


def connect_periodic(P, Q, d, b):
    """Certificate connecting two points of exact period b (n >= 2)."""
    _check_types(P, Q, d, PrePeriod(0, b))
    if P.n < 2:
        raise MoveError("n = 1 is covered by the numerical monodromy module, not by moves")
    triv = _trivial(P, Q, d)
    if triv:
        return triv
    view = _View(d)
    steps_p = _periodic_path(P.coords, d, b, view)
    steps_q = _periodic_path(Q.coords, d, b, view)
    inv_q = _invert(Q.coords, steps_q)
    return _finish(P, Q, d, steps_p + inv_q)


def _invert(coords, steps):
    """Inverse step list of `steps` applied from `coords`."""
    rep = list(coords)
    undo = []
    for s in steps:
        if isinstance(s, Rescale):
            rep = [x * s.factor for x in rep]
            undo.append(Rescale(s.factor.inverse()))
        else:
            undo.append(Replace(s.j, rep[s.j], s.chart))
            rep[s.j] = s.new_value
    return list(reversed(undo))


# -- the preperiodic solver, d > 2 --------------------------------------------------

def _s_reduce(chain, d, a):
    """Move the d-primary parts to (sigma_a, 1, ..., 1); periodic parts untouched."""
    n = chain.n
    view = _View(d)
    s = lambda k: view.s(chain.rep[k])
    layer = _layer(d, a)
    # make coordinate 0 reach preperiod a, using a coordinate j that already does
    if _pre(s(0), d) != a:
        j = next(k for k in range(1, n) if _pre(s(k), d) == a)
        target = _pre(s(0) / s(j), d)
        u = next((u for u in layer if _pre(u / s(j), d) == target), None)
        if u is None:
            raise MoveError("unreachable configuration: no layer element for coordinate 0")
        chain.net(0, view.with_s(chain.rep[0], u), j)
    for j in range(1, n):
        if s(j) == ONE:
            continue
        if _pre(s(j) / s(0), d) != a:
            v = next((v for v in layer if _pre(v / s(0), d) == a), None)
            if v is None:
                raise MoveError("unreachable configuration: no layer element for the chart move")
            chain.net(j, view.with_s(chain.rep[j], v), n)
        chain.net(j, view.with_s(chain.rep[j], ONE), 0)
    sigma = RootOfUnityOrZero(1, d**a)
    chain.net(0, view.with_s(chain.rep[0], sigma), n)


def _prep_path_big_d(coords, d, a, b):
    view = _View(d)
    chain = _Chain(coords)
    chain.rescale(chain.rep[-1].inverse())
    _periodic_reduce(chain, d, b, view)
    build = _periodic_build(tuple(chain.rep), d, b, view)
    steps = chain.steps + build.inverse_steps()
    tail = _Chain(_base_of(chain.rep, d, b, view))
    _s_reduce(tail, d, a)
    return steps + tail.steps


# -- the preperiodic solver, d = 2: breadth-first search ------------------------------

class _ChartGraph:
    """Canonical points of one type, with edges given by single chart moves.

    Values are residues k mod M (meaning k/M) or -1 for Zero, where
    M = d^a (d^b - 1) contains every coordinate of a point of type (a, b).
    """

    def __init__(self, d, n, a, b, allow_zero, bound):
        self.d, self.n, self.a, self.b = d, n, a, b
        self.M = M = d**a * (d**b - 1)
        self.allow_zero = allow_zero
        self.types = [vtype(RootOfUnityOrZero(k, M), d) for k in range(M)]
        classes = {}
        for k, t in enumerate(self.types):
            classes.setdefault(t, []).append(k)
        if allow_zero:
            classes.setdefault(PrePeriod(0, 1), []).append(-1)
        self.classes = classes
        self.bound = bound
        self.base = self.encode(_base_point(d, n, a, b))
        self.parent = {self.base: None}
        self._bfs()

    def encode(self, coords):
        out = []
        for x in canonical(coords):
            if x.is_zero:
                out.append(-1)
            else:
                if self.M % x.den:
                    raise MoveError(f"coordinate {x} is outside mu_{self.M}")
                out.append(x.num * (self.M // x.den))
        return tuple(out)

    def _canon(self, t):
        last = max(k for k, v in enumerate(t) if v >= 0)
        sh = t[last]
        return tuple(-1 if v < 0 else (v - sh) % self.M for v in t)

    def _ztype(self, v):
        return PrePeriod(0, 1) if v < 0 else self.types[v]

    def neighbors(self, t):
        M = self.M
        for i, yi in enumerate(t):
            if yi < 0:
                continue
            for j, yj in enumerate(t):
                if j == i:
                    continue
                r = -1 if yj < 0 else (yj - yi) % M
                for r2 in self.classes[self._ztype(r)]:
                    if r2 == r:
                        continue
                    new = list(t)
                    new[j] = -1 if r2 < 0 else (r2 + yi) % M
                    if all(v < 0 for v in new):
                        continue
                    yield self._canon(tuple(new)), j, i

    def _bfs(self):
        queue = deque([self.base])
        while queue:
            t = queue.popleft()
            for u, j, i in self.neighbors(t):
                if u not in self.parent:
                    self.parent[u] = (t, j, i)
                    if len(self.parent) > self.bound:
                        raise EnumerationBoundError(len(self.parent), self.bound)
                    queue.append(u)

    def value(self, v):
        return ZERO if v < 0 else RootOfUnityOrZero(v, self.M)

    def path_to_base(self, coords):
        t = self.encode(coords)
        if t not in self.parent:
            raise MoveError("unreachable configuration: point not in the move graph")
        chain = _Chain(coords)
        while self.parent[t] is not None:
            prev, j, i = self.parent[t]
            ratio = ZERO if prev[j] < 0 else self.value(prev[j]) / self.value(prev[i])
            chain.move(j, ratio, i)
            t = prev
        last = max(k for k, x in enumerate(chain.rep) if not x.is_zero)
        chain.rescale(chain.rep[last].inverse())
        return chain


_GRAPHS = {}


def chart_graph(d, n, a, b, allow_zero=True, bound=DEFAULT_ENUMERATION_BOUND):
    key = (d, n, a, b, allow_zero)
    if key not in _GRAPHS:
        _GRAPHS[key] = _ChartGraph(d, n, a, b, allow_zero, bound)
    return _GRAPHS[key]


def _base_point(d, n, a, b):
    m = d**b - 1
    zeta = RootOfUnityOrZero(1 if m > 1 else 0, m)
    sigma = RootOfUnityOrZero(1 if a else 0, d**a)
    return (zeta * sigma,) + (ONE,) * n


def base_point(d, n, a, b):
    """The reference point [zeta_b * sigma_a, 1, ..., 1] every certificate passes through."""
    return CyclotomicProjPoint(_base_point(d, n, a, b))


def connect_preperiodic(P, Q, d, a, b):
    """Certificate connecting two points of type (a, b) with a >= 1."""
    if a < 1:
        raise ValueError("use connect_periodic for a = 0")
    _check_types(P, Q, d, PrePeriod(a, b))
    triv = _trivial(P, Q, d)
    if triv:
        return triv
    if d == 2 or P.n == 1:
        g = chart_graph(d, P.n, a, b, allow_zero=(d == 2))
        sp = g.path_to_base(P.coords)
        sq = g.path_to_base(Q.coords)
        return _finish(P, Q, d, sp.steps + sq.inverse_steps())
    for X in (P, Q):
        if any(x.is_zero for x in X.coords):
            raise MoveError(f"{X} has a Zero coordinate: for d > 2 such preperiodic points are "
                            "ramified and no certificate avoids Zero passages")
    steps_p = _prep_path_big_d(P.coords, d, a, b)
    steps_q = _prep_path_big_d(Q.coords, d, a, b)
    return _finish(P, Q, d, steps_p + _invert(Q.coords, steps_q))


def connect(P, Q, d):
    """Dispatch on the common type of P and Q."""
    t = point_type(P, d)
    if t.preperiod == 0:
        return connect_periodic(P, Q, d, t.period)
    return connect_preperiodic(P, Q, d, t.preperiod, t.period)


# -- counting, enumeration, sampling ------------------------------------------------

def _count_upto(d, n, A, B, nonzero):
    """Points with preperiod <= A and period dividing B."""
    if A < 0:
        return 0
    M = d**A * (d**B - 1)
    if nonzero:
        return M**n
    return ((M + 1) ** (n + 1) - 1) // M


def count_points(d, n, a, b, nonzero=False):
    """Exact number of points of type (a, b) (only Zero-free ones if nonzero)."""
    total = 0
    for e in divisors(b):
        mu = mobius(b // e)
        if mu:
            total += mu * (_count_upto(d, n, a, e, nonzero) - _count_upto(d, n, a - 1, e, nonzero))
    return total


def survey_domain_nonzero(d, a):
    """For d > 2 preperiodic points the certificates live on Zero-free points."""
    return d > 2 and a > 0


def enumerate_points(d, n, a, b, nonzero=False, bound=DEFAULT_ENUMERATION_BOUND):
    """All canonical points of type (a, b), in a fixed order."""
    M = d**a * (d**b - 1)
    alphabet = [RootOfUnityOrZero(k, M) for k in range(M)]
    if not nonzero:
        alphabet = [ZERO] + alphabet
    lasts = [n] if nonzero else range(n, -1, -1)
    cands = sum(len(alphabet) ** k for k in lasts)
    if cands > bound:
        raise EnumerationBoundError(cands, bound)
    want = PrePeriod(a, b)
    out = []
    for k in lasts:
        tail = (ONE,) + (ZERO,) * (n - k)
        for head in itertools.product(alphabet, repeat=k):
            coords = head + tail
            if fast_type(coords, d) == want:
                out.append(CyclotomicProjPoint(coords))
    return out


def random_point(rng, d, n, a, b, nonzero=False, max_tries=100000):
    """Rejection sampler over representatives with coordinates in mu_M (and Zero)."""
    M = d**a * (d**b - 1)
    want = PrePeriod(a, b)
    for _ in range(max_tries):
        coords = []
        for _ in range(n + 1):
            k = rng.randrange(M if nonzero else M + 1)
            coords.append(RootOfUnityOrZero(k, M) if k < M else ZERO)
        if all(x.is_zero for x in coords):
            continue
        if fast_type(coords, d) == want:
            return CyclotomicProjPoint(canonical(coords))
    raise MoveError(f"no point of type {(a, b)} found by sampling")


# -- batch drivers -------------------------------------------------------------------

def _run_pair(P, Q, d):
    cert = connect(P, Q, d)
    rep = validate(cert)
    return cert, rep


def transitivity_survey(d, n, a, b, sample=None, seed=0, enum_limit=5000, explicit_pairs=500,
                        bound=DEFAULT_ENUMERATION_BOUND):
    """Connect and validate same-type pairs.

    sample=None asks for every pair.  That needs the point set to have at most
    enum_limit elements.  In that mode the survey connects the base point to
    every point, validating each certificate.  Any pair certificate is the
    reverse of one star certificate followed by another.  On top of that it
    validates explicit pair certificates, either for all pairs (if there are at
    most explicit_pairs of them) or for that many seeded random pairs.
    With an integer sample it validates that many seeded random pairs.
    """
    rng = random.Random(seed)
    nonzero = survey_domain_nonzero(d, a)
    total = count_points(d, n, a, b, nonzero)
    lengths = []
    failures = []
    mode = "sampled"
    checked = 0

    def record(P, Q):
        nonlocal checked
        checked += 1
        try:
            cert, rep = _run_pair(P, Q, d)
        except MoveError as exc:
            failures.append({"start": str(P), "end": str(Q), "reason": str(exc)})
            return
        if not rep.ok:
            failures.append({"start": str(P), "end": str(Q), "reason": rep.reason})
            return
        lengths.append(len(cert.steps))

    if sample is None:
        if total > enum_limit:
            raise EnumerationBoundError(total, enum_limit)
        mode = "all"
        pts = enumerate_points(d, n, a, b, nonzero, bound)
        if len(pts) != total:
            raise MoveError(f"enumerated {len(pts)} points, expected {total}")
        base = CyclotomicProjPoint(_base_point(d, n, a, b))
        for P in pts:
            record(base, P)
        pairs = [(P, Q) for i, P in enumerate(pts) for Q in pts[i + 1:]]
        if len(pairs) > explicit_pairs:
            pairs = rng.sample(pairs, explicit_pairs)
        for P, Q in pairs:
            record(P, Q)
    else:
        for _ in range(sample):
            P = random_point(rng, d, n, a, b, nonzero)
            Q = random_point(rng, d, n, a, b, nonzero)
            record(P, Q)
    hist = Counter(lengths)
    return {
        "schema": SCHEMA,
        "d": d, "n": n, "a": a, "b": b,
        "mode": mode,
        "domain": "zero-free points" if nonzero else "all points",
        "point_count": total,
        "checked": checked,
        "succeeded": len(lengths),
        "success_rate": (len(lengths) / checked) if checked else 1.0,
        "max_length": max(lengths, default=0),
        "step_histogram": {str(k): hist[k] for k in sorted(hist)},
        "failures": failures[:20],
        "seed": seed,
    }


def ramification_census(d, n, b_max, enumerate_check=False, bound=DEFAULT_ENUMERATION_BOUND):
    """Per period b, how many period-b points have a Zero coordinate and how many do not."""
    rows = []
    ok = True
    for b in range(1, b_max + 1):
        total = count_points(d, n, 0, b)
        free = count_points(d, n, 0, b, nonzero=True)
        witness = base_point(d, n, 0, b)
        wtype = point_type(witness, d)
        row = {"b": b, "total": total, "with_zero": total - free, "zero_free": free,
               "witness": str(witness), "witness_type": list(wtype)}
        good = free > 0 and wtype == (0, b) and not any(x.is_zero for x in witness.coords)
        if enumerate_check:
            pts = enumerate_points(d, n, 0, b, False, bound)
            nz = sum(1 for P in pts if not any(x.is_zero for x in P.canonical()))
            row["enumerated"] = [len(pts), nz]
            good = good and len(pts) == total and nz == free
        row["ok"] = good
        ok = ok and good
        rows.append(row)
    return {"schema": SCHEMA, "d": d, "n": n, "b_max": b_max, "rows": rows,
            "verdict": "PASS" if ok else "FAIL"}
