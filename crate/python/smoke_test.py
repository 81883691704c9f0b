"""Smoke test for the pdsvqs extension module.

Build and install first, for example:

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import math

import pdsvqs


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    toy = pdsvqs.build_model("toy_a")
    assert all(close(x, y) for x, y in zip(pdsvqs.eig(toy.hamiltonian), [0, 1, 2, 3]))

    h = pdsvqs.PauliSum.from_text("0.5 ZI\n0.3 XX\n-0.2 IZ\n")
    assert h.n_qubits == 2 and len(h) == 3
    assert {t[0] for t in h.terms()} == {"ZI", "XX", "IZ"}
    assert len(h.qwc_groups()) == 2
    assert len(h.power(2)) >= 1

    # PDS(1) is the Rayleigh quotient
    m = pdsvqs.moments(toy, [1.0, 1.0], 3)
    assert close(m[0], 1.0)
    r1 = pdsvqs.pds_solve(m, 1)
    assert close(r1.energy, m[1])
    r2 = pdsvqs.pds_solve(m, 2)
    assert r2.energy <= m[1] + 1e-12
    assert r2.energy >= -1e-9

    t = pdsvqs.run(toy, functional="pds", order=2, max_iters=3000)
    assert t.status == "converged", t.status
    assert abs(t.records[-1].energy) < 1e-6

    heis = pdsvqs.build_model("heisenberg")
    t = pdsvqs.run(heis, order=2, max_iters=5)
    assert t.status == "max_iters"
    assert t.records[-1].fidelity > 0.98

    try:
        pdsvqs.pds_solve(pdsvqs.moments(toy, [0.0, 0.0], 3), 2)
    except ArithmeticError:
        pass
    else:
        raise AssertionError("eigenstate moments should be singular")

    fine = pdsvqs.estimate(h, 5e-4)
    coarse = pdsvqs.estimate(h, 1e-3)
    assert math.isfinite(fine) and close(fine / coarse, 4.0, 1e-12)

    print("smoke test passed")


if __name__ == "__main__":
    main()
