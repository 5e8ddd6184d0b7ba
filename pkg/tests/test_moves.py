import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynamon.cyclo import ONE, ZERO, PrePeriod, root
from dynamon.moves import (CyclotomicProjPoint, MoveCertificate, Replace, Rescale, TypeMismatchError,
                           base_point, chart_graph, connect, connect_periodic, connect_preperiodic,
                           count_points, enumerate_points, fast_type, point, point_type,
                           ramification_census, random_point, step_budget, transitivity_survey, validate)
from oracles import orbit_type


def brute_point_type(P, d):
    """Orbit walk on canonical tuples of turns, independent of the package's canonical()."""
    def canon(coords):
        last = next(x for x in reversed(coords) if x is not None)
        return tuple(None if x is None else (x - last) % 1 for x in coords)

    start = canon(tuple(None if x.is_zero else x.turn for x in P.coords))
    return orbit_type(lambda c: canon(tuple(None if x is None else (x * d) % 1 for x in c)), start)


def replay_types(cert):
    rep = list(cert.start.coords)
    types = [point_type(CyclotomicProjPoint(rep), cert.d)]
    for s in cert.steps:
        if isinstance(s, Rescale):
            rep = [x * s.factor for x in rep]
        else:
            rep[s.j] = s.new_value
        types.append(point_type(CyclotomicProjPoint(rep), cert.d))
    return types, rep


def assert_sound(cert, d):
    rep = validate(cert)
    assert rep.ok, rep.reason
    types, last = replay_types(cert)
    assert len(set(types)) == 1
    assert CyclotomicProjPoint(last) == cert.end
    assert len(cert.steps) <= step_budget(cert.n)
    return types[0]


def test_point_equality_uses_canonical_form():
    assert point("1/3", "1/3", "1/3") == point("1", "1", "1")
    assert point("1/2", "0", "1/2") == point("1", "0", "1")
    assert point("1/2", "1", "0") != point("1", "1", "0")
    assert str(CyclotomicProjPoint.parse("[1/3,1,0]")) == "[1/3,0/1,0]"


def test_point_type_examples():
    assert point_type(point("1/3", "1", "1"), 2) == PrePeriod(0, 2)
    assert point_type(point("1/2", "1/2", "1"), 2) == PrePeriod(1, 1)
    assert point_type(point("0", "1", "1"), 5) == PrePeriod(0, 1)


@settings(max_examples=300)
@given(st.integers(2, 4), st.lists(st.one_of(st.none(), st.tuples(st.integers(0, 59), st.integers(1, 60))),
                                   min_size=2, max_size=4))
def test_point_type_matches_orbit_walk(d, raw):
    coords = [ZERO if r is None else root(*r) for r in raw]
    if all(x.is_zero for x in coords):
        return
    P = CyclotomicProjPoint(coords)
    t = point_type(P, d)
    assert tuple(t) == brute_point_type(P, d)
    assert fast_type(coords, d) == t


def test_validate_rejections():
    P = point("1", "1", "1")
    cert = MoveCertificate(2, 2, P, [Replace(0, ZERO, 2)], point("0", "1", "1"))
    assert validate(cert).ok
    bad_chart = MoveCertificate(2, 2, point("1", "1", "1/3"), [Replace(0, ZERO, 2)], point("0", "1", "1/3"))
    assert validate(bad_chart).reason == "chart not normalized"
    bad_type = MoveCertificate(2, 2, P, [Replace(0, root(1, 3), 2)], point("1/3", "1", "1"))
    assert validate(bad_type).reason == "period class changed"
    wrong_end = MoveCertificate(2, 2, P, [Replace(0, ZERO, 2)], point("1", "1", "1"))
    assert validate(wrong_end).reason == "replay does not reach end"
    same_index = MoveCertificate(2, 2, P, [Replace(1, ONE, 1)], P)
    assert validate(same_index).reason == "chart equals replaced coordinate"
    assert validate(MoveCertificate(2, 2, P, [Rescale(ZERO)], P)).reason == "rescale by Zero"
    zero_pass = MoveCertificate(3, 2, point("1/6", "1", "1"), [Replace(1, ZERO, 2)], point("1/6", "0", "1"))
    assert not validate(zero_pass).ok


def test_connect_periodic_examples():
    cert = connect_periodic(point("1", "1", "1"), point("0", "1", "1"), 2, 1)
    assert cert.steps == [Replace(0, ZERO, 2)]
    assert_sound(cert, 2)
    cert = connect_periodic(point("1/2", "1", "1"), point("1", "1/2", "1"), 3, 1)
    assert len([s for s in cert.steps if isinstance(s, Replace)]) == 2
    assert_sound(cert, 3)
    # the intermediate point is [1,1,1]
    rep = list(cert.start.coords)
    rep[cert.steps[0].j] = cert.steps[0].new_value
    assert CyclotomicProjPoint(rep) == point("1", "1", "1")
    cert = connect_periodic(point("1/3", "1", "1"), point("2/3", "2/3", "1"), 2, 2)
    assert_sound(cert, 2)


def test_connect_preperiodic_examples():
    cert = connect_preperiodic(point("1/2", "1/2", "1"), point("1/2", "1", "1"), 2, 1, 1)
    assert cert.steps == [Rescale(root(1, 2)), Replace(1, ZERO, 0), Rescale(root(1, 2)), Replace(1, ONE, 2)]
    assert_sound(cert, 2)
    # d = 3: any two points whose coordinates are {order-6 root, 1, 1}
    pts = [point(*c) for c in set(itertools.permutations(["1/6", "1", "1"]))]
    pts += [point(*c) for c in set(itertools.permutations(["5/6", "1", "1"]))]
    for P in pts:
        for Q in pts:
            if point_type(P, 3) == point_type(Q, 3):
                assert_sound(connect(P, Q, 3), 3)
    P = point("1/4", "1", "1")
    assert point_type(P, 2) == (2, 1)
    assert connect_preperiodic(P, P, 2, 2, 1).steps == []


def test_d3_preperiodic_certificates_avoid_zero():
    rng = random.Random(4)
    for _ in range(30):
        P = random_point(rng, 3, 2, 1, 2, nonzero=True)
        Q = random_point(rng, 3, 2, 1, 2, nonzero=True)
        cert = connect(P, Q, 3)
        assert_sound(cert, 3)
        rep = list(cert.start.coords)
        for s in cert.steps:
            if isinstance(s, Replace):
                rep[s.j] = s.new_value
            else:
                rep = [x * s.factor for x in rep]
            assert not any(x.is_zero for x in rep)


def test_type_mismatch():
    with pytest.raises(TypeMismatchError):
        connect_periodic(point("1/3", "1", "1"), point("1", "1", "1"), 2, 2)
    with pytest.raises(TypeMismatchError):
        connect_preperiodic(point("1/2", "1", "1"), point("1/4", "1", "1"), 2, 1, 1)


def test_certificate_json_round_trip():
    cert = connect(point("1/7", "1", "0"), point("2/7", "4/7", "1"), 2)
    again = MoveCertificate.from_json(cert.dumps())
    assert again.to_json() == cert.to_json()
    assert validate(again).ok
    assert list(cert.to_json()) == ["schema", "d", "n", "start", "steps", "end"]


@pytest.mark.parametrize("d,n,a,b", [(2, 2, 0, 1), (2, 2, 0, 2), (2, 3, 0, 1), (3, 2, 0, 1),
                                     (2, 2, 1, 1), (2, 2, 1, 2), (2, 3, 1, 1), (2, 2, 2, 1),
                                     (3, 2, 1, 1), (3, 3, 0, 1)])
def test_count_points_matches_enumeration(d, n, a, b):
    nonzero = d > 2 and a > 0
    pts = enumerate_points(d, n, a, b, nonzero)
    assert len(pts) == count_points(d, n, a, b, nonzero)
    assert len(set(pts)) == len(pts)
    assert all(point_type(P, d) == (a, b) for P in pts)


def test_count_points_brute_force_small():
    # every tuple over Zero and mu_12, canonicalized, against count_points
    d, n, M = 2, 2, 12
    alphabet = [ZERO] + [root(k, M) for k in range(M)]
    seen = {}
    for coords in itertools.product(alphabet, repeat=n + 1):
        if all(x.is_zero for x in coords):
            continue
        P = CyclotomicProjPoint(coords)
        seen[P] = point_type(P, d)
    for a, b in [(0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2)]:
        assert sum(1 for t in seen.values() if t == (a, b)) == count_points(d, n, a, b)


@pytest.mark.parametrize("d,n,a,b,sample", [(2, 2, 0, 2, None), (3, 2, 1, 1, 100), (2, 3, 0, 1, None)])
def test_survey_examples(d, n, a, b, sample):
    rep = transitivity_survey(d, n, a, b, sample=sample, seed=1)
    assert rep["success_rate"] == 1.0
    assert rep["failures"] == []
    assert rep["checked"] > 0


def test_base_point_reaches_every_sampled_point():
    d, n, a, b = 2, 2, 1, 2
    pts = enumerate_points(d, n, a, b)
    rng = random.Random(0)
    B = base_point(d, n, a, b)
    for _ in range(40):
        P, Q = rng.sample(pts, 2)
        assert_sound(connect(B, P, d), d)
        assert_sound(connect(B, Q, d), d)
        assert_sound(connect(P, Q, d), d)


def test_breadth_first_graph_is_connected():
    g = chart_graph(2, 2, 1, 1)
    pts = enumerate_points(2, 2, 1, 1)
    for P in pts:
        path = g.path_to_base(P.coords)
        assert path is not None


def test_ramification_census_examples():
    rep = ramification_census(2, 2, 3)
    assert rep["verdict"] == "PASS"
    assert point_type(point("1/7", "1", "1"), 2) == (0, 3)
    rep = ramification_census(2, 1, 1)
    assert rep["rows"][0]["zero_free"] >= 1 and rep["verdict"] == "PASS"
    rep = ramification_census(3, 2, 2, enumerate_check=True)
    assert rep["verdict"] == "PASS"
    assert all(r["zero_free"] > 0 for r in rep["rows"])


def test_ramification_census_enumeration_cross_check():
    rep = ramification_census(2, 2, 3, enumerate_check=True)
    for row in rep["rows"]:
        assert row["enumerated"] == [row["total"], row["zero_free"]]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 2, 0, 3), (2, 3, 0, 2), (3, 2, 0, 2), (3, 3, 0, 1), (2, 2, 2, 2),
                        (2, 3, 1, 3), (3, 2, 1, 2), (3, 3, 2, 1)]), st.integers(0, 10**6))
def test_random_pairs_always_connect(cfg, seed):
    d, n, a, b = cfg
    rng = random.Random(seed)
    nonzero = d > 2 and a > 0
    P = random_point(rng, d, n, a, b, nonzero)
    Q = random_point(rng, d, n, a, b, nonzero)
    assert assert_sound(connect(P, Q, d), d) == (a, b)
