"""Gleason polynomials, Misiurewicz differences and dynatomic factors over Z."""

from dynamon.dynatomic import (dynatomic, format_poly, gleason, integer_roots, is_squarefree,
                               misiurewicz_diff, root_multiplicity)

# P_b(c) = f_c^b(0): the parameters where 0 has period dividing b
for b in range(1, 6):
    P = gleason(2, b)
    ok, witness = is_squarefree(P)
    print(f"P_{b}: degree {P.degree}, squarefree {ok}, gcd with derivative {format_poly(witness)}")

# c = -2 makes 0 strictly preperiodic: 0 -> -2 -> 2 -> 2
M = misiurewicz_diff(2, 3, 2)
print("f^3(0) - f^2(0) =", format_poly(M))
for r in integer_roots(M):
    print(f"  root {r} has multiplicity {root_multiplicity(M, r)}")

# f^3(z) - z splits as the fixed-point factor times the period-3 factor
print("dynatomic factor for period 3 has z-degree", dynatomic(2, 3).z_degree)
