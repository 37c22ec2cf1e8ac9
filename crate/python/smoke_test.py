"""Smoke test for the manlab Python extension."""

import math

import manlab


def close(x, y, tol=1e-9):
    return abs(x - y) <= tol


def main():
    left = manlab.Algebra.factor_left(2, 2)
    full = manlab.Algebra.full(4)
    assert left.dim == 4 and left.algebra_dim == 4
    assert left.commutant().algebra_dim == 4

    for method in ("omega", "projection", "collinear", "entropy"):
        report = manlab.man(left, full, method=method)
        assert close(report["s"], 0.75), (method, report)
        assert close(report["s2"], 2.0)

    sym = manlab.Algebra.symmetric_operators(2)
    assert close(manlab.self_man(sym)["s"], 2 / 3, 1e-12)
    for d in (3, 4, 8):
        nc = manlab.self_man(manlab.Algebra.asymptotically_abelian(d))["s"]
        assert close(nc, 3 / (2 * d), 1e-12)

    assert close(manlab.orbit_averaged_man(left, left), 0.6)
    lattice = manlab.lattice_man([2, 2, 2], [0, 1], [1, 2])
    assert close(lattice["s"], 0.75)

    h = 1 / math.sqrt(2)
    z_basis = [[1, 0], [0, 1]]
    x_basis = [[h, h], [h, -h]]
    q = manlab.quantumness(z_basis, x_basis)
    assert close(q["quantumness"], 0.5) and close(q["man"], 0.5)

    bell = manlab.Algebra.masa([[h, h, 0, 0], [0, 0, h, h], [0, 0, h, -h], [h, -h, 0, 0]])
    assert close(manlab.protocol_choi(left, bell)["estimate"], 0.75)
    mc = manlab.mc_man(left, bell, samples=10_000, seed=7)
    assert abs(mc["estimate"] - 0.75) <= 5 * mc["std_error"]
    assert mc == manlab.mc_man(left, bell, samples=10_000, seed=7)

    stoch = manlab.protocol_stochastic(left, bell, samples=5_000, seed=3)
    assert abs(stoch["estimate"] - 0.75) <= 5 * stoch["std_error"]

    markov = manlab.markov_check(left, left.commutant(), 0.1, samples=50, state_samples=4)
    assert markov["bound"] == 0.0 and not markov["violation"]

    try:
        manlab.man(left, manlab.Algebra.full(2))
    except ValueError:
        pass
    else:
        raise AssertionError("dimension mismatch accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
