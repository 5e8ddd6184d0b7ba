import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dynamon.cyclo import divisors, mobius
from dynamon.dynatomic import (BudgetError, ExactBiPoly, ExactPoly, dynatomic, format_poly, gleason,
                               gleason_mod_p, integer_roots, is_squarefree, iterate, iterate_two_param,
                               misiurewicz_diff, parse_poly, poly_gcd, prs_gcd, root_multiplicity)
from oracles import gcd_over_q, iterate_int

c_sym, z_sym, e_sym = sympy.symbols("c z e")


def to_sympy(p):
    return sympy.Poly(list(reversed(p.coeffs)) or [0], c_sym)


def bi_to_sympy(p):
    return sympy.expand(sum(v * z_sym**i * c_sym**j for (i, j), v in p.terms.items()))


def test_poly_arithmetic():
    a = ExactPoly([1, 2])
    b = ExactPoly([-1, 0, 3])
    assert (a * b).coeffs == (-1, -2, 3, 6)
    assert (a + b).coeffs == (0, 2, 3)
    assert (a - a).is_zero() and (a - a).degree == -1
    assert (a**3)(2) == 125
    q, r = b.divmod(ExactPoly([0, 1]))
    assert q.coeffs == (0, 3) and r.coeffs == (-1,)


def test_text_round_trip():
    p = gleason(2, 3)
    assert format_poly(p) == "1:1 2:1 3:2 4:1"
    assert parse_poly(format_poly(p)) == p
    assert parse_poly("") == ExactPoly([])
    big = ExactPoly([0, -10**40, 0, 7])
    assert parse_poly(big.to_text()) == big
    bi = iterate(2, 2)
    assert ExactBiPoly.from_text(bi.to_text()) == bi


@given(st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=60),
       st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=60))
@settings(max_examples=60)
def test_multiplication_matches_schoolbook(a, b):
    want = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            want[i + j] += x * y
    assert ExactPoly(a) * ExactPoly(b) == ExactPoly(want)


def test_iterate_examples():
    assert bi_to_sympy(iterate(2, 2)) == sympy.expand(z_sym**4 + 2 * c_sym * z_sym**2 + c_sym**2 + c_sym)
    for d in (2, 3, 5):
        assert bi_to_sympy(iterate(d, 1)) == z_sym**d + c_sym
    p = iterate(2, 3)
    assert p.z_degree == 8
    assert p.at_z0() == ExactPoly([0, 1, 1, 2, 1])


def test_iterate_evaluation_homomorphism():
    rng = random.Random(5)
    for _ in range(100):
        d, b = rng.randint(2, 3), rng.randint(1, 3)
        z, c = rng.randint(-5, 5), rng.randint(-5, 5)
        assert iterate(d, b)(z, c) == iterate_int(d, c, z, b)


def test_gleason_examples():
    assert gleason(2, 2) == ExactPoly([0, 1, 1])
    assert gleason(2, 3) == ExactPoly([0, 1, 1, 2, 1])
    for d in (2, 3, 7):
        assert gleason(d, 1) == ExactPoly([0, 1])
    assert gleason(3, 4).degree == 27


def test_budget():
    with pytest.raises(BudgetError):
        gleason(2, 40)
    with pytest.raises(BudgetError):
        iterate(2, 14)
    with pytest.raises(BudgetError):
        iterate_two_param(5, 1)


def test_squarefree_examples():
    assert is_squarefree(ExactPoly([0, 1, 1])) == (True, ExactPoly([1]))
    ok, g = is_squarefree(ExactPoly([0, 0, 0, 2, 1]))
    assert not ok and g.degree == 2 and g.coeffs[:2] == (0, 0)
    assert is_squarefree(ExactPoly([0, 1]))[0]
    with pytest.raises(ValueError):
        is_squarefree(ExactPoly([]))


def _primitive_monic(coeffs):
    lead = coeffs[-1]
    return [sympy.Rational(x) / lead for x in coeffs]


@settings(max_examples=80)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=6),
       st.lists(st.integers(-9, 9), min_size=1, max_size=6),
       st.lists(st.integers(-9, 9), min_size=1, max_size=6))
def test_gcd_against_euclid_over_q(f, g, h):
    F, G, H = ExactPoly(f), ExactPoly(g), ExactPoly(h)
    A, B = F * H, G * H
    if A.is_zero() or B.is_zero():
        return
    want = gcd_over_q(list(A.coeffs), list(B.coeffs))
    for algo in (poly_gcd, prs_gcd):
        got = algo(A, B)
        assert _primitive_monic(list(got.coeffs)) == want
        assert got.lc > 0


def test_gcd_with_large_coefficients_agrees_with_prs():
    rng = random.Random(3)
    for _ in range(20):
        f = ExactPoly([rng.randint(-10**12, 10**12) for _ in range(rng.randint(2, 30))])
        g = ExactPoly([rng.randint(-10**12, 10**12) for _ in range(rng.randint(2, 30))])
        h = ExactPoly([rng.randint(-10**6, 10**6) for _ in range(rng.randint(1, 10))])
        assert poly_gcd(f * h, g * h) == prs_gcd(f * h, g * h)


@pytest.mark.parametrize("d,b", [(2, 5), (3, 3), (4, 3), (6, 2)])
def test_gleason_squarefree_against_sympy_discriminant(d, b):
    P = gleason(d, b)
    assert is_squarefree(P)[0]
    assert sympy.discriminant(to_sympy(P)) != 0


def test_gleason_mod_p_examples():
    assert gleason_mod_p(2, 5, 2)["derivative_is_one"]
    assert gleason_mod_p(6, 3, 3)["derivative_is_one"]
    assert gleason(2, 1).derivative() == ExactPoly([1])
    with pytest.raises(ValueError):
        gleason_mod_p(3, 2, 2)


def test_misiurewicz_examples():
    m = misiurewicz_diff(2, 3, 2)
    assert m == ExactPoly([0, 0, 0, 2, 1])
    assert to_sympy(m) == sympy.Poly(c_sym**3 * (c_sym + 2), c_sym)
    assert misiurewicz_diff(2, 2, 1) == ExactPoly([0, 0, 1])
    with pytest.raises(ValueError):
        misiurewicz_diff(2, 3, 3)
    assert misiurewicz_diff(2, 5, 2, check_division=True).degree == 16


def test_root_multiplicity_examples():
    m = ExactPoly([0, 0, 0, 2, 1])
    assert root_multiplicity(m, -2) == 1
    assert root_multiplicity(m, 0) == 3
    assert root_multiplicity(ExactPoly([0, 1, 1]), 5) == 0


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=1, max_size=6))
@settings(max_examples=60)
def test_root_multiplicity_matches_construction(roots):
    # build prod (c - r) over Z by clearing denominators
    p = sympy.Integer(1)
    for r in roots:
        p *= (r.denominator * c_sym - r.numerator)
    coeffs = [int(x) for x in reversed(sympy.Poly(p, c_sym).all_coeffs())]
    P = ExactPoly(coeffs)
    for r in set(roots):
        assert root_multiplicity(P, r) == roots.count(r)


def test_misiurewicz_simplicity_for_rational_roots():
    gleason_roots = set()
    for e in range(1, 6):
        gleason_roots.update(integer_roots(gleason(2, e)))
    seen = set()
    for s in range(2, 7):
        for t in range(1, s):
            m = misiurewicz_diff(2, s, t)
            # rational roots of a monic integer polynomial are integers
            for r in integer_roots(m):
                if r != 0 and r not in gleason_roots:
                    assert root_multiplicity(m, r) == 1, (s, t, r)
                    seen.add(r)
    assert seen == {-2}


def test_dynatomic_examples():
    assert bi_to_sympy(dynatomic(2, 2)) == sympy.expand(z_sym**2 + z_sym + c_sym + 1)
    assert bi_to_sympy(dynatomic(2, 1)) == sympy.expand(z_sym**2 - z_sym + c_sym)
    p3 = dynatomic(2, 3)
    assert p3.z_degree == 6
    assert p3 * dynatomic(2, 1) == iterate(2, 3) - ExactBiPoly({(1, 0): 1})


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_dynatomic_product_identity(d, b):
    prod = ExactBiPoly({(0, 0): 1})
    for e in divisors(b):
        prod = prod * dynatomic(d, e)
    assert prod == iterate(d, b) - ExactBiPoly({(1, 0): 1})
    assert dynatomic(d, b).z_degree == sum(mobius(b // e) * d**e for e in divisors(b))


def test_iterate_two_param_examples():
    t = iterate_two_param(2, 1)
    assert t.terms == {(2, 0, 0): 1, (1, 0, 1): -1, (0, 1, 0): 1}
    t = iterate_two_param(3, 1)
    assert t.terms == {(3, 0, 0): 1, (2, 0, 1): -2, (1, 0, 2): 1, (0, 1, 0): 1}
    assert iterate_two_param(2, 2).at_eps(0) == iterate(2, 2)
    assert iterate_two_param(3, 2).at_eps(0) == iterate(3, 2)


def test_iterate_two_param_evaluation():
    rng = random.Random(2)
    for _ in range(30):
        d, b = rng.randint(2, 3), rng.randint(1, 3)
        z, c, e = (rng.randint(-3, 3) for _ in range(3))
        w = z
        for _ in range(b):
            w = w * (w - e) ** (d - 1) + c
        assert iterate_two_param(d, b)(z, c, e) == w
