"""Numerical monodromy of f_c^b(z) - z over random loops in the parameter plane."""

from dynamon.monodromy_num import LoopPath, prep1_cycle_check, solve_roots, track_loop, verify_morton


def quadratic(c):
    return [c, -1, 1]  # z^2 - z + c


loop = LoopPath.circle(0.25, 0.1)
perm = track_loop(quadratic, loop, solve_roots(quadratic(loop.base)))
print("loop around c = 1/4 swaps the fixed points:", perm.cycles())

for d, b in [(2, 2), (2, 3), (3, 2)]:
    rep = verify_morton(d, b, n_loops=40, seed=7)
    print(f"d={d} b={b}: group order {rep['order']} (expected {rep['expected_order']}), "
          f"{len(rep['loops'])} loops, all equivariant {rep['equivariant']}")

rep = prep1_cycle_check(3, 1, eps=1e-2)
print("local monodromy on the extra preimages for d = 3:", rep["preimage_cycle_type"])
