import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynamon.monodromy_num import (LoopPath, OrderBoundError, Permutation, RootFindingError, dyn_permutation,
                                   equivariance_check, expected_morton_order, generate_group,
                                   known_discriminant_points, morton_family, prep1_cycle_check, prep_family,
                                   random_loop, relative_residuals, solve_roots, track_loop, verify_morton)


def brute_group_order(gens, n):
    """Closure by breadth-first multiplication; only for tiny groups."""
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = tuple(h[i] for i in g)
                if gh not in seen:
                    seen.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return len(seen)


def test_permutation_algebra():
    p = Permutation.from_cycles(4, [[0, 1, 2]])
    q = Permutation.from_cycles(4, [[2, 3]])
    assert (p * q)(3) == p(q(3)) == 0
    assert (p * p.inverse()).is_identity
    assert p.cycle_type() == [3, 1]
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_solve_roots_examples():
    r = solve_roots([-1, 0, 1])
    assert np.allclose(sorted(r.roots, key=lambda z: z.real), [-1, 1], atol=1e-12)
    r = solve_roots([2, -1, 1])
    want = [(1 + 1j * math.sqrt(7)) / 2, (1 - 1j * math.sqrt(7)) / 2]
    for w in want:
        assert min(abs(r.roots - w)) < 1e-10
    fam = morton_family(2, 3)
    r = solve_roots(fam(1j))
    assert r.degree == 8 and r.residuals.max() < 1e-10 and not r.degenerate
    assert relative_residuals(fam(1j), r.roots).max() < 1e-10


def test_solve_roots_matches_numpy():
    rng = np.random.default_rng(3)
    for deg in (3, 8, 16, 32):
        a = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        got = solve_roots(a, seed=1).roots
        want = np.roots(a[::-1])
        for w in want:
            assert min(abs(got - w)) < 1e-7 * (1 + abs(w))


def test_root_finding_failure_reports_residual():
    with pytest.raises(RootFindingError) as info:
        solve_roots([1, 0, 0, 0, 0, 0, 0, 0, 1], max_iter=1)
    assert info.value.worst_residual > 0


def test_constant_loop_is_identity():
    fam = morton_family(2, 2)
    base = solve_roots(fam(1j))
    assert track_loop(fam, LoopPath.constant(1j), base).is_identity


def test_transposition_around_quarter():
    def fam(c):
        return [c, -1, 1]

    loop = LoopPath.circle(0.25, 0.1)
    base = solve_roots(fam(loop.base))
    perm = track_loop(fam, loop, base)
    assert perm.cycle_type() == [2]
    # a circle that misses 1/4 does nothing
    far = LoopPath.circle(-1.0, 0.5)
    assert track_loop(fam, far, solve_roots(fam(far.base))).is_identity


def test_small_loop_near_misiurewicz_parameter_is_trivial_for_d2():
    # for d = 2, eps = 0 the preperiodic family splits as (z^2 - z + c)(z^2 + z + c),
    # which is unramified near c = -2: the extra preimage is a 1-cycle
    fam = prep_family(2, 1, 0.0)
    loop = LoopPath.circle(-2.0, 0.1)
    perm = track_loop(fam, loop, solve_roots(fam(loop.base)))
    assert perm.is_identity


def test_generate_group_examples():
    assert generate_group([], 3).order == 1
    assert generate_group([(1, 0)]).order == 2
    s5 = generate_group([(1, 2, 3, 4, 0), (1, 0, 2, 3, 4)])
    assert s5.order == 120
    with pytest.raises(OrderBoundError):
        generate_group([tuple(list(range(1, 12)) + [0]), tuple([1, 0] + list(range(2, 12)))], bound=1000)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.lists(st.permutations(list(range(6))), min_size=1, max_size=3))
def test_group_order_matches_closure(n, perms):
    gens = [tuple(p[:n]) if sorted(p[:n]) == list(range(n)) else tuple(range(n)) for p in perms]
    assert generate_group(gens, n).order == brute_group_order(gens, n)


def test_expected_morton_order_examples():
    assert expected_morton_order(2, 1) == 2
    assert expected_morton_order(2, 2) == 4
    assert expected_morton_order(2, 3) == 36
    assert expected_morton_order(3, 2) == 288


@pytest.mark.parametrize("d,b", [(2, 1), (2, 2), (3, 1), (2, 3), (4, 1)])
def test_expected_order_is_centralizer_size_by_enumeration(d, b):
    c0 = 0.3 + 1.1j
    roots = solve_roots(morton_family(d, b)(c0)).roots
    dyn = dyn_permutation(roots, d, c0)
    count = sum(1 for img in itertools.permutations(range(len(roots)))
                if equivariance_check(Permutation(img), dyn))
    assert count == expected_morton_order(d, b)


@pytest.mark.parametrize("d,b,loops", [(2, 1, 20), (2, 2, 20), (2, 3, 40), (3, 2, 40)])
def test_verify_morton_examples(d, b, loops):
    rep = verify_morton(d, b, n_loops=loops, seed=7)
    assert rep["verdict"] == "PASS"
    assert rep["order"] == rep["expected_order"] == str(expected_morton_order(d, b))
    assert rep["equivariant"] and all(rep["transitive_on_period_classes"].values())


def test_verify_morton_parallel_matches_serial():
    a = verify_morton(2, 2, n_loops=12, seed=3)
    b = verify_morton(2, 2, n_loops=12, seed=3, jobs=2)
    assert a == b


def test_equivariance_examples():
    fam = morton_family(2, 3)
    c0 = 1.3j
    base = solve_roots(fam(c0))
    dyn = dyn_permutation(base.roots, 2, c0)
    assert equivariance_check(Permutation.identity(8), dyn)
    rng = np.random.default_rng(5)
    for _ in range(5):
        perm = track_loop(fam, random_loop(rng, 2, c0), base)
        assert equivariance_check(perm, dyn)
    # a transposition swapping a fixed point with a period-3 point cannot commute
    fixed = [c[0] for c in dyn.cycles(include_fixed=True) if len(c) == 1]
    three = [c for c in dyn.cycles() if len(c) == 3][0]
    bad = Permutation.from_cycles(8, [[fixed[0], three[0]]])
    assert not equivariance_check(bad, dyn)
    found = [img for img in itertools.permutations(range(8))
             if not equivariance_check(Permutation(img), dyn)]
    assert len(found) == math.factorial(8) - expected_morton_order(2, 3)


def test_inverse_and_concatenated_loops():
    fam = morton_family(2, 2)
    c0 = 1.3j
    base = solve_roots(fam(c0))
    l1 = LoopPath.lollipop(c0, 0.25, 0.2)
    l2 = LoopPath.lollipop(c0, -0.75, 0.2)
    p1, p2 = track_loop(fam, l1, base), track_loop(fam, l2, base)
    assert not p1.is_identity and not p2.is_identity
    assert track_loop(fam, l1.reversed(), base) == p1.inverse()
    assert track_loop(fam, l1 + l2, base) == p2 * p1


def _winding_equivalent_pair(rng, d, b, c0):
    """A random lollipop and a second one on the same ray whose radius change sweeps no
    discriminant point, so the two loops are homotopic in the punctured plane."""
    disc = known_discriminant_points(d, b)
    while True:
        l1 = random_loop(rng, d, c0)
        center, r = l1.segments[1][1], l1.segments[1][2]
        if l1.clearance(disc) < 0.05:
            continue
        dists = sorted(abs(p - center) for p in disc)
        lo = max([x for x in dists if x < r], default=0.0)
        hi = min([x for x in dists if x > r], default=abs(c0 - center))
        hi = min(hi, 0.95 * abs(c0 - center))
        if hi - lo < 0.12:
            continue
        r2 = float(rng.uniform(lo + 0.05, hi - 0.05))
        ccw = l1.segments[1][4] > 0
        l2 = LoopPath.lollipop(c0, center, r2, ccw=ccw)
        if l2.clearance(disc) >= 0.04:
            return l1, l2


def test_homotopy_invariance():
    rng = np.random.default_rng(17)
    c0 = 1.3j
    pairs = 0
    nontrivial = 0
    for b in (1, 2, 3):
        fam = morton_family(2, b)
        base = solve_roots(fam(c0))
        for _ in range(7 if b < 3 else 6):
            l1, l2 = _winding_equivalent_pair(rng, 2, b, c0)
            p1 = track_loop(fam, l1, base)
            assert p1 == track_loop(fam, l2, base)
            nontrivial += not p1.is_identity
            pairs += 1
    assert pairs == 20 and nontrivial > 0


def test_known_discriminant_points_are_collisions():
    for b in (1, 2, 3):
        fam = morton_family(2, b)
        for c in known_discriminant_points(2, b):
            # a triple collision separates like the cube root of the offset
            near = solve_roots(fam(c + 1e-9), tol=1e-6).min_separation
            away = solve_roots(fam(c + 0.05)).min_separation
            assert near < 1e-2 and near < away / 20


@pytest.mark.parametrize("d,b,cycle", [(2, 1, [1]), (3, 1, [2]), (3, 2, [2]), (4, 1, [3])])
def test_prep1_examples(d, b, cycle):
    rep = prep1_cycle_check(d, b, eps=0.01)
    assert rep["verdict"] == "PASS"
    assert rep["preimage_cycle_type"] == cycle and rep["periodic_point_fixed"]


def test_loop_geometry():
    loop = LoopPath.lollipop(2j, 0, 0.5)
    assert abs(loop.point(0) - 2j) < 1e-12 and abs(loop.point(1) - 2j) < 1e-12
    assert math.isclose(loop.length, 2 * 1.5 + 2 * math.pi * 0.5)
    assert math.isclose(loop.clearance([0]), 0.5, rel_tol=1e-3)
    circle = LoopPath.circle(1, 0.25, start_angle=math.pi / 2)
    assert abs(circle.base - (1 + 0.25j)) < 1e-12
    assert abs(circle.point(0.5) - (1 + 0.25 * cmath.exp(1.5j * math.pi))) < 1e-12
    with pytest.raises(ValueError):
        LoopPath.lollipop(0.1, 0, 0.5)
