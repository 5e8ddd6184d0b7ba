"""Numerical monodromy for one-parameter polynomial families.

A family is any callable taking a complex parameter to an ascending coefficient
array.  Roots are found by Aberth iteration, tracked along closed loops by
re-solving from the previous roots and matching by nearest neighbour, and the
end-to-start matching gives a permutation.  Permutations from many loops
generate a group whose order is computed exactly by Schreier-Sims.

The main use is the family f_c^b(z) - z for f_c(z) = z^d + c, whose monodromy
group is the product over e | b of the wreath products Z/e wr S_{r_e}, with
e * r_e the number of points of exact period e.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .cyclo import divisors, mobius
from .dynatomic import gleason, iterate

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1000
COLLISION_THRESHOLD = 1e-8
ORDER_BOUND = 10**7
MIN_STEP = 1e-9  # fraction of the loop length


class RootFindingError(ArithmeticError):
    def __init__(self, message, worst_residual):
        super().__init__(f"{message} (worst relative residual {worst_residual:.3e})")
        self.worst_residual = worst_residual


class StepUnderflowError(ArithmeticError):
    """The step fell below the minimum: the path passes too close to a discriminant point."""

    def __init__(self, s, parameter):
        super().__init__(f"step underflow at path position {s:.6g}, parameter {parameter:.12g}")
        self.s = s
        self.parameter = parameter


class OrderBoundError(ArithmeticError):
    def __init__(self, lower, bound):
        super().__init__(f"group order at least {lower} exceeds bound {bound}")
        self.lower = lower
        self.bound = bound


class IllDefinedDynError(ValueError):
    """The image of some root is not close to any root."""


class AmbiguousRootError(ValueError):
    """Roots could not be told apart reliably (for instance epsilon is too large)."""


# -- permutations ---------------------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """Bijection of 0..N-1; image[i] is where i goes."""

    image: tuple

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        if sorted(img) != list(range(len(img))):
            raise ValueError(f"not a bijection: {img}")
        object.__setattr__(self, "image", img)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n, cycles):
        img = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(tuple(img))

    def __len__(self):
        return len(self.image)

    def __call__(self, i):
        return self.image[i]

    def __mul__(self, other):
        """(self * other)(i) = self(other(i)): apply other first."""
        if len(other) != len(self):
            raise ValueError("permutations of different sizes")
        return Permutation(tuple(self.image[j] for j in other.image))

    def inverse(self):
        inv = [0] * len(self.image)
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    @property
    def is_identity(self):
        return all(i == j for i, j in enumerate(self.image))

    def cycles(self, include_fixed=False):
        seen = set()
        out = []
        for i in range(len(self.image)):
            if i in seen:
                continue
            cyc = [i]
            seen.add(i)
            j = self.image[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.image[j]
            if include_fixed or len(cyc) > 1:
                out.append(cyc)
        return out

    def cycle_type(self):
        return sorted((len(c) for c in self.cycles(include_fixed=True)), reverse=True)

    def to_list(self):
        return list(self.image)


# -- root sets and root finding -------------------------------------------------------

@dataclass
class ComplexRootSet:
    roots: np.ndarray
    residuals: np.ndarray
    collision_threshold: float = COLLISION_THRESHOLD

    @property
    def degree(self):
        return len(self.roots)

    @property
    def min_separation(self):
        return _min_separation(self.roots)

    @property
    def degenerate(self):
        return self.min_separation <= 10 * self.collision_threshold

    def to_json(self):
        return {
            "degree": self.degree,
            "roots": [[float(z.real), float(z.imag)] for z in self.roots],
            "residuals": [float(r) for r in self.residuals],
            "degenerate": bool(self.degenerate),
        }


def _min_separation(z):
    if len(z) < 2:
        return math.inf
    diff = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def _trim_leading(coeffs):
    a = np.asarray(coeffs, dtype=complex)
    scale = np.abs(a).max() if len(a) else 0.0
    if scale == 0:
        raise ValueError("zero polynomial")
    n = len(a)
    while n > 1 and abs(a[n - 1]) <= 1e-14 * scale:
        n -= 1
    if n < 2:
        raise ValueError("degree must be at least 1")
    return a[:n]


def relative_residuals(coeffs, z):
    """|p(z)| / sum |a_k| |z|^k for each root."""
    a = np.asarray(coeffs, dtype=complex)
    hi = a[::-1]
    num = np.abs(np.polyval(hi, z))
    den = np.polyval(np.abs(hi), np.abs(z))
    return num / np.maximum(den, np.finfo(float).tiny)


def _initial_guess(a, seed):
    n = len(a) - 1
    rng = np.random.default_rng(seed)
    radius = abs(a[0] / a[-1]) ** (1.0 / n)
    if radius == 0:
        radius = 1.0
    theta = rng.uniform(0, 2 * np.pi) + 2 * np.pi * np.arange(n) / n
    jitter = 1 + 0.01 * rng.standard_normal(n)
    return radius * jitter * np.exp(1j * theta)


def _aberth(a, z, tol, max_iter):
    a = a / a[-1]
    da = a[1:] * np.arange(1, len(a))
    absa = np.abs(a)
    z = np.array(z, dtype=complex)
    n = len(z)
    target = 1e-3 * tol
    for _ in range(max_iter):
        powers = np.cumprod(np.concatenate([np.ones((n, 1)), np.repeat(z[:, None], n, axis=1)], axis=1), axis=1)
        p = powers @ a
        rel = np.abs(p) / np.maximum(np.abs(powers) @ absa, np.finfo(float).tiny)
        if rel.max() <= target:
            break
        dp = powers[:, :-1] @ da
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            w = ratio / (1 - ratio * inv.sum(axis=1))
        bad = ~np.isfinite(w)
        if bad.any():
            w[bad] = 1e-3 * (1 + np.abs(z[bad]))  # nudge off a critical point
        z = z - w
        if np.all(np.abs(w) <= 4 * np.finfo(float).eps * (1 + np.abs(z))):
            break
    return z


def solve_roots(coeffs, seed=0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, init=None,
                collision_threshold=COLLISION_THRESHOLD):
    """All roots of sum coeffs[k] z^k by Aberth iteration."""
    a = _trim_leading(coeffs)
    z0 = _initial_guess(a, seed) if init is None else np.asarray(init, dtype=complex)
    if len(z0) != len(a) - 1:
        raise ValueError("initial guess has the wrong length")
    z = _aberth(a, z0, tol, max_iter)
    res = relative_residuals(a, z)
    worst = float(res.max())
    if not np.all(np.isfinite(z)) or worst > tol:
        raise RootFindingError("Aberth iteration did not converge", worst)
    return ComplexRootSet(z, res, collision_threshold)


# -- loops ----------------------------------------------------------------------------

@dataclass
class LoopPath:
    """Closed path made of segments ("line", z0, z1) and ("arc", center, radius, t0, dt).

    Angles are in radians; dt = 2*pi is a full counterclockwise turn.
    """

    base: complex
    segments: list
    initial_step: float = 1 / 200
    min_step: float = MIN_STEP

    def __post_init__(self):
        self.base = complex(self.base)
        if abs(self._end() - self.base) > 1e-12 * (1 + abs(self.base)):
            raise ValueError("loop does not return to its base point")
        if self._start() != self.base and abs(self._start() - self.base) > 1e-12 * (1 + abs(self.base)):
            raise ValueError("loop does not start at its base point")

    @staticmethod
    def _seg_length(seg):
        if seg[0] == "line":
            return abs(seg[2] - seg[1])
        return abs(seg[2] * seg[4])

    @staticmethod
    def _seg_point(seg, t):
        if seg[0] == "line":
            return seg[1] + (seg[2] - seg[1]) * t
        _, center, radius, t0, dt = seg
        return center + radius * cmath.exp(1j * (t0 + dt * t))

    def _start(self):
        return self._seg_point(self.segments[0], 0.0) if self.segments else self.base

    def _end(self):
        return self._seg_point(self.segments[-1], 1.0) if self.segments else self.base

    @property
    def length(self):
        return sum(self._seg_length(s) for s in self.segments)

    def point(self, s):
        """Point at arclength fraction s in [0, 1]."""
        total = self.length
        if total == 0:
            return self.base
        target = min(max(s, 0.0), 1.0) * total
        for seg in self.segments:
            ln = self._seg_length(seg)
            if target <= ln or seg is self.segments[-1]:
                return self._seg_point(seg, target / ln if ln else 0.0)
            target -= ln
        return self.base

    def reversed(self):
        segs = []
        for seg in reversed(self.segments):
            if seg[0] == "line":
                segs.append(("line", seg[2], seg[1]))
            else:
                _, c, r, t0, dt = seg
                segs.append(("arc", c, r, t0 + dt, -dt))
        return LoopPath(self.base, segs, self.initial_step, self.min_step)

    def __add__(self, other):
        """Traverse self, then other (same base point)."""
        if abs(self.base - other.base) > 1e-12 * (1 + abs(self.base)):
            raise ValueError("loops have different base points")
        return LoopPath(self.base, self.segments + other.segments, self.initial_step, self.min_step)

    def clearance(self, points, samples=4000):
        """Least distance from the path to the given points (sampled)."""
        if not len(points):
            return math.inf
        s = np.linspace(0, 1, samples)
        path = np.array([self.point(t) for t in s])
        pts = np.asarray(points, dtype=complex)
        return float(np.abs(path[:, None] - pts[None, :]).min())

    @classmethod
    def constant(cls, base):
        return cls(base, [])

    @classmethod
    def circle(cls, center, radius, start_angle=0.0, turns=1):
        center = complex(center)
        base = center + radius * cmath.exp(1j * start_angle)
        return cls(base, [("arc", center, radius, start_angle, 2 * math.pi * turns)])

    @classmethod
    def lollipop(cls, base, center, radius, ccw=True):
        """Straight stick from base to the nearest point of the circle, once round, back."""
        base, center = complex(base), complex(center)
        if abs(base - center) <= radius:
            raise ValueError("base point must lie outside the circle")
        t0 = cmath.phase(base - center)
        q = center + radius * cmath.exp(1j * t0)
        dt = 2 * math.pi if ccw else -2 * math.pi
        return cls(base, [("line", base, q), ("arc", center, radius, t0, dt), ("line", q, base)])


# -- tracking ---------------------------------------------------------------------------

def _nearest_match(old, new):
    """Index map old -> new by nearest neighbour, and the largest match distance."""
    dist = np.abs(old[:, None] - new[None, :])
    idx = dist.argmin(axis=1)
    if len(set(idx.tolist())) != len(idx):
        return None, math.inf
    return idx, float(dist[np.arange(len(old)), idx].max())


def _resolve(family, c, init, tol):
    a = _trim_leading(family(c))
    if len(a) - 1 != len(init):
        raise ValueError("degree changed along the path")
    z = _aberth(a, init, tol, 60)
    res = relative_residuals(a, z)
    if not np.all(np.isfinite(z)) or res.max() > tol:
        return None
    return z


def track_loop(family, loop, base, tol=DEFAULT_TOL, max_steps=200000):
    """Continue the roots in base once around loop; i goes to the label it returns to."""
    roots = np.array(base.roots, dtype=complex)
    start = roots.copy()
    if not loop.segments or loop.length == 0:
        return Permutation.identity(len(roots))
    s = 0.0
    h = loop.initial_step
    max_h = 4 * loop.initial_step
    steps = 0
    while s < 1.0:
        h = min(h, 1.0 - s)
        c = loop.point(s + h)
        z = _resolve(family, c, roots, tol)
        ok = False
        if z is not None:
            idx, dmax = _nearest_match(roots, z)
            ok = idx is not None and dmax <= 0.5 * _min_separation(roots)
        if ok:
            roots = z[idx]
            s += h
            h = min(2 * h, max_h)
        else:
            h /= 2
            if h < loop.min_step:
                raise StepUnderflowError(s, loop.point(s))
        steps += 1
        if steps > max_steps:
            raise StepUnderflowError(s, loop.point(s))
    idx, dmax = _nearest_match(roots, start)
    if idx is None or dmax > 0.5 * _min_separation(start):
        raise AmbiguousRootError("end of loop does not match the base fiber")
    return Permutation(tuple(int(i) for i in idx))


# -- permutation groups -------------------------------------------------------------

def _compose(p, q):
    """p after q."""
    return tuple(p[i] for i in q)


def _invert(p):
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


class _Level:
    def __init__(self, point, n):
        self.point = point
        self.gens = []
        self.trans = {point: tuple(range(n))}

    def rebuild(self):
        self.trans = {self.point: self.trans[self.point]}
        queue = [self.point]
        while queue:
            x = queue.pop()
            u = self.trans[x]
            for g in self.gens:
                y = g[x]
                if y not in self.trans:
                    self.trans[y] = _compose(g, u)
                    queue.append(y)


def _sift(levels, g, start=0):
    for k in range(start, len(levels)):
        lv = levels[k]
        x = g[lv.point]
        if x not in lv.trans:
            return g, k
        g = _compose(_invert(lv.trans[x]), g)
    return g, len(levels)


def schreier_sims(gens, n, bound=ORDER_BOUND):
    """Base and transversals of the group generated by gens (tuples on 0..n-1)."""
    ident = tuple(range(n))
    levels = []
    strong = []

    def add(g, k):
        if k == len(levels):
            moved = next(i for i in range(n) if g[i] != i)
            levels.append(_Level(moved, n))
        strong.append(g)
        for j, lv in enumerate(levels):
            lv.gens = [s for s in strong if all(s[levels[i].point] == levels[i].point for i in range(j))]
            lv.rebuild()
        order = math.prod(len(lv.trans) for lv in levels)
        if order > bound:
            raise OrderBoundError(order, bound)

    for g in gens:
        g = tuple(g)
        if g == ident:
            continue
        h, k = _sift(levels, g)
        if h != ident:
            add(h, k)
    k = len(levels) - 1
    while k >= 0:
        lv = levels[k]
        found = None
        for x, u in list(lv.trans.items()):
            for s in lv.gens:
                y = s[x]
                h = _compose(_invert(lv.trans[y]), _compose(s, u))
                h, j = _sift(levels, h, k + 1)
                if h != ident:
                    found = (h, j)
                    break
            if found:
                break
        if found:
            add(*found)
            k = found[1] if found[1] < len(levels) else len(levels) - 1
        else:
            k -= 1
    return levels


def group_contains(levels, g):
    h, _ = _sift(levels, tuple(g))
    return h == tuple(range(len(g)))


def _orbits(gens, n):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, j in enumerate(g):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def is_block_system(gens, blocks):
    """Each generator maps every block onto a block."""
    where = {}
    for k, blk in enumerate(blocks):
        for x in blk:
            where[x] = k
    for g in gens:
        for blk in blocks:
            if len({where[g[x]] for x in blk}) != 1:
                return False
    return True


def minimal_block(gens, a, b, n):
    """Finest block system in which a and b share a block (Atkinson's algorithm)."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(a, b)]
    while queue:
        x, y = queue.pop()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        parent[max(rx, ry)] = min(rx, ry)
        for g in gens:
            queue.append((g[x], g[y]))
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


@dataclass
class GroupSummary:
    order: int | None
    order_lower_bound: int
    orbits: list
    base: list
    blocks_ok: bool | None = None

    @property
    def order_text(self):
        return str(self.order) if self.order is not None else f">= {self.order_lower_bound}"


def generate_group(gens, n=None, partition=None, bound=ORDER_BOUND):
    """Exact order, orbits, and whether partition is a block system."""
    gens = [p.image if isinstance(p, Permutation) else tuple(p) for p in gens]
    if n is None:
        n = len(gens[0]) if gens else 1
    if any(len(g) != n for g in gens):
        raise ValueError("generators act on different sets")
    orbits = _orbits(gens, n)
    blocks_ok = None if partition is None else is_block_system(gens, partition)
    levels = schreier_sims(gens, n, bound)
    order = math.prod(len(lv.trans) for lv in levels)
    return GroupSummary(order, order, orbits, [lv.point for lv in levels], blocks_ok)


# -- the unicritical family -----------------------------------------------------------------

def expected_morton_order(d, b):
    """prod over e | b of e^(r_e) * r_e!, with e*r_e points of exact period e."""
    total = 1
    for e in divisors(b):
        count = d if e == 1 else sum(mobius(e // k) * d**k for k in divisors(e))
        r = count // e
        total *= e**r * math.factorial(r)
    return total


def morton_family(d, b):
    """c -> ascending coefficients of f_c^b(z) - z, built from exact integer coefficients."""
    terms = iterate(d, b).terms
    deg_z = d**b
    deg_c = d ** (b - 1)
    mat = np.zeros((deg_z + 1, deg_c + 1))
    for (i, j), v in terms.items():
        mat[i, j] = float(v)
    mat[1, 0] -= 1.0

    def family(c):
        return mat @ (complex(c) ** np.arange(deg_c + 1))

    family.degree = deg_z
    return family


def dyn_permutation(roots, d, c, tol=1e-6):
    """Permutation induced on the root set by z -> z^d + c."""
    z = np.asarray(roots, dtype=complex)
    img = z**d + c
    dist = np.abs(img[:, None] - z[None, :])
    idx = dist.argmin(axis=1)
    best = dist[np.arange(len(z)), idx]
    if np.any(best > tol * (1 + np.abs(img))) or len(set(idx.tolist())) != len(z):
        raise IllDefinedDynError(f"images miss the root set by up to {best.max():.3e}")
    return Permutation(tuple(int(i) for i in idx))


def equivariance_check(perm, dyn):
    if len(perm) != len(dyn):
        raise ValueError("permutations of different sizes")
    return perm * dyn == dyn * perm


def known_discriminant_points(d, b):
    """Parameters where f_c^b(z) - z has a repeated root, for d = 2 and b <= 3."""
    if d != 2 or b > 3:
        raise ValueError("only tabulated for d = 2, b <= 3")
    s3 = 3 * math.sqrt(3) / 8
    table = {
        1: [0.25],
        2: [0.25, -0.75],
        3: [0.25, -1.75, complex(-0.125, s3), complex(-0.125, -s3)],
    }
    return [complex(c) for c in table[b]]


def _morton_geometry(d):
    # the connectedness locus lies in |c| <= 2^(1/(d-1))
    radius = 2 ** (1 / (d - 1))
    return radius, complex(0.0, 1.3 * radius) if d == 2 else complex(1.3 * radius, 0.35)


def random_loop(rng, d, base=None):
    radius, default_base = _morton_geometry(d)
    base = default_base if base is None else base
    while True:
        center = complex(*rng.uniform(-0.8 * radius, 0.8 * radius, size=2))
        r = float(np.exp(rng.uniform(np.log(0.2 * radius), np.log(radius))))
        if abs(center) <= 0.8 * radius and abs(base - center) > r * 1.05:
            return LoopPath.lollipop(base, center, r, ccw=bool(rng.integers(2)))


_FAMILIES = {}


def _track_job(d, b, base_roots, loop, tol):
    family = _FAMILIES.get((d, b)) or _FAMILIES.setdefault((d, b), morton_family(d, b))
    base = ComplexRootSet(np.asarray(base_roots), np.zeros(len(base_roots)))
    try:
        return track_loop(family, loop, base, tol), None
    except (StepUnderflowError, AmbiguousRootError) as exc:
        return None, str(exc)


def verify_morton(d, b, n_loops=60, seed=0, tol=DEFAULT_TOL, stop_when_full=False, jobs=1,
                  order_bound=ORDER_BOUND):
    """Monodromy of f_c^b(z) - z over random lollipop loops, checked against the expected group.

    Loops are drawn from one seeded generator before any tracking, so the report
    does not depend on jobs.  stop_when_full stops once the expected order is
    reached (serial runs only).
    """
    if d**b > 32:
        raise ValueError(f"degree d^b = {d**b} exceeds the tracking bound 32")
    family = morton_family(d, b)
    _FAMILIES[(d, b)] = family
    rng = np.random.default_rng(seed)
    _, c0 = _morton_geometry(d)
    base = solve_roots(family(c0), seed=seed, tol=tol)
    if base.degenerate:
        raise AmbiguousRootError("base fiber is degenerate")
    dyn = dyn_permutation(base.roots, d, c0)
    expected = expected_morton_order(d, b)
    n = base.degree
    paths = [random_loop(rng, d, c0) for _ in range(n_loops)]
    if jobs > 1 and not stop_when_full:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_track_job, [d] * n_loops, [b] * n_loops,
                                    [base.roots] * n_loops, paths, [tol] * n_loops))
    else:
        results = []
        perms_so_far = []
        for loop in paths:
            res = _track_job(d, b, base.roots, loop, tol)
            results.append(res)
            if stop_when_full and res[0] is not None:
                perms_so_far.append(res[0])
                if generate_group(perms_so_far, n, bound=order_bound).order == expected:
                    break
    loops, perms, discarded = [], [], []
    for k, (perm, err) in enumerate(results):
        if perm is None:
            discarded.append({"loop": k, "reason": err})
            continue
        perms.append(perm)
        loops.append({"loop": k, "permutation": perm.to_list(),
                      "equivariant": equivariance_check(perm, dyn)})
    cycles = dyn.cycles(include_fixed=True)
    try:
        summary = generate_group(perms, n, partition=cycles, bound=order_bound)
    except OrderBoundError as exc:
        summary = GroupSummary(None, exc.lower, [], [], is_block_system(
            [p.image for p in perms], cycles))
    periods = {}
    for cyc in cycles:
        periods.setdefault(len(cyc), []).extend(cyc)
    classes = {e: sorted(pts) for e, pts in sorted(periods.items())}
    orbit_sets = {tuple(o) for o in summary.orbits}
    transitive = {str(e): tuple(pts) in orbit_sets for e, pts in classes.items()}
    equivariant = all(item["equivariant"] for item in loops)
    ok = (summary.order == expected and equivariant and all(transitive.values())
          and bool(summary.blocks_ok))
    return {
        "d": d, "b": b, "seed": seed, "n_loops": n_loops, "tracked": len(results),
        "base_parameter": [c0.real, c0.imag],
        "degree": n,
        "dyn_permutation": dyn.to_list(),
        "loops": loops,
        "discarded": discarded,
        "order": summary.order_text,
        "expected_order": str(expected),
        "equivariant": equivariant,
        "transitive_on_period_classes": transitive,
        "blocks_are_dynamical_orbits": summary.blocks_ok,
        "verdict": "PASS" if ok else "FAIL",
    }


# -- the two-parameter family and its local monodromy ------------------------------------

def _phi_eps_poly(d, c, eps):
    """Ascending coefficients of z (z - eps)^(d-1) + c."""
    base = np.array([1.0 + 0j])
    for _ in range(d - 1):
        base = np.convolve(base, [-eps, 1.0])
    out = np.concatenate([[0j], base])
    out[0] += c
    return out


def _compose_with(p, inner):
    """p(inner(z)) for ascending arrays, by Horner."""
    out = np.array([p[-1]], dtype=complex)
    for a in p[-2::-1]:
        out = np.convolve(out, inner)
        out[0] += a
    return out


def prep_family(d, b, eps):
    """c -> coefficients of phi^(b+1)(z) - phi(z) for phi(z) = z (z - eps)^(d-1) + c."""
    def family(c):
        phi = _phi_eps_poly(d, c, eps)
        g = phi.copy()
        for _ in range(b):
            g = _compose_with(phi, g)
        out = g.copy()
        out[: len(phi)] -= phi
        return out

    family.degree = d ** (b + 1)
    return family


def _orbit_of_zero(d, c, eps, b):
    """phi^b(0) and its derivatives in z (at the orbit point) and in c."""
    z, dz, dc = 0j, 1 + 0j, 0j
    for _ in range(b):
        fp = (z - eps) ** (d - 1) + (d - 1) * z * (z - eps) ** (d - 2)
        z, dz, dc = z * (z - eps) ** (d - 1) + c, fp * dz, fp * dc + 1
    return z, dz, dc


def _exact_period_roots(d, b, seed):
    cs = solve_roots([complex(v) for v in gleason(d, b).coeffs], seed=seed).roots if b > 1 else np.array([0j])
    out = []
    for c in cs:
        z = 0j
        early = False
        for k in range(1, b):
            z = z**d + c
            if abs(z) < 1e-6:
                early = True
                break
        if not early:
            out.append(complex(c))
    return out


def prep1_cycle_check(d, b, eps=1e-2, seed=0, tol=DEFAULT_TOL):
    """Local monodromy of the preperiod-1 points of phi_{c,eps} around its critical parameter."""
    if not (2 <= d <= 4 and 1 <= b <= 3):
        raise ValueError("needs 2 <= d <= 4 and 1 <= b <= 3")
    eps = complex(eps)
    rng = np.random.default_rng(seed)
    cands = _exact_period_roots(d, b, seed)
    cb = cands[int(rng.integers(len(cands)))]
    # Newton for c* with phi_{c,eps}^b(0) = 0, so the cycle of 0 passes through c* = phi(0)
    c = cb
    for _ in range(100):
        g, _, dg = _orbit_of_zero(d, c, eps, b)
        step = g / dg
        c -= step
        if abs(step) < 1e-15 * (1 + abs(c)):
            break
    cstar = c
    # the periodic point x(c) near c* has x(c*) = c*, and its drift relative to the
    # critical value c decides the loop size: the other collision is at x - c = v
    # c* lies on the cycle; x'(c*) = -F_c / F_z for F(z, c) = phi^b(z) - z
    z, dzz, dcc = cstar, 1 + 0j, 0j
    for _ in range(b):
        fp = (z - eps) ** (d - 1) + (d - 1) * z * (z - eps) ** (d - 2)
        z, dzz, dcc = z * (z - eps) ** (d - 1) + cstar, fp * dzz, fp * dcc + 1
    xprime = -dcc / (dzz - 1)
    drift = abs(xprime - 1) or 1.0
    crit = eps / d
    v = abs(crit * (crit - eps) ** (d - 1))
    rho = 0.1 * v / max(drift, 1e-3)
    family = prep_family(d, b, eps)
    loop = LoopPath.circle(cstar, rho)
    base = solve_roots(family(loop.base), seed=seed, tol=tol)
    roots = base.roots
    near0 = np.argsort(np.abs(roots))
    near_eps = np.argsort(np.abs(roots - eps))
    periodic = int(near0[0])
    pre = [int(i) for i in near_eps[: d - 1]]
    if periodic in pre or abs(roots[periodic]) > abs(eps) / 4 or \
            any(abs(roots[i] - eps) > abs(eps) / 4 for i in pre) or \
            (len(roots) > d and abs(roots[near_eps[d - 1]] - eps) <= abs(eps) / 4):
        raise AmbiguousRootError("cannot separate the preimages near 0 and eps; use a smaller eps")
    # the point of the cycle equal to c* at c = c*
    tracked = int(np.argmin(np.abs(roots - loop.base)))
    perm = track_loop(family, loop, base, tol)
    pre_cycle = [len(cyc) for cyc in perm.cycles(include_fixed=True) if set(cyc) <= set(pre)]
    single_cycle = sorted(pre_cycle) == [d - 1] and all(perm(i) in pre for i in pre)
    fixed = perm(periodic) == periodic and perm(tracked) == tracked
    return {
        "d": d, "b": b, "eps": [eps.real, eps.imag], "seed": seed,
        "gleason_root": [cb.real, cb.imag],
        "critical_parameter": [cstar.real, cstar.imag],
        "loop_radius": rho,
        "degree": base.degree,
        "periodic_preimage": periodic,
        "tracked_periodic_point": tracked,
        "preimages": pre,
        "permutation": perm.to_list(),
        "preimage_cycle_type": sorted(pre_cycle, reverse=True),
        "periodic_point_fixed": fixed,
        "single_cycle": single_cycle,
        "verdict": "PASS" if fixed and single_cycle else "FAIL",
    }
