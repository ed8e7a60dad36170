"""Smoke test for the qid_lab extension module.

Build it first, e.g. `maturin develop -m crates/py/Cargo.toml`, or put the
compiled `libqid_lab.so` on the path as `qid_lab.so`.
"""

import cmath
import math

import qid_lab
from qid_lab import Pair, Spec

BERNOULLI = '{"c_d":1,"c_a":0,"c_s":0,"discrete":{"atoms":[[0,0.75],[1,0.25]]}}'


def main():
    b = Spec.from_json(BERNOULLI)
    assert b.coefficients == (1.0, 0.0, 0.0)
    assert abs(abs(b.cf(math.pi, "d")) - 0.5) < 1e-15
    ts = [0.1 * k for k in range(-20, 21)]
    for t, v in zip(ts, b.cf_grid(ts)):
        assert abs(v - (0.75 + 0.25 * cmath.exp(1j * t))) < 1e-15

    mu_d = b.mu_d()
    assert mu_d["lattice"]
    assert 0.5 - 1e-6 <= mu_d["global_lower"] <= 0.5

    pair = b.spectral()
    assert pair.atoms[1][1] < 0  # signed spectral measure
    for t in ts:
        assert abs(pair.cf(t) - b.cf(t)) < 1e-8
    plus, minus = pair.jordan()
    assert abs(plus.cf(1.3) / minus.cf(1.3) - pair.cf(1.3)) < 1e-12
    assert Pair.from_json(pair.to_json()).atoms == pair.atoms

    q = Pair.catalog("inverse_poisson_1").quotient_check(0.0, 2.0)
    assert abs(q["identity_residual_corrected"]) < 1e-12

    assert abs(b.parseval(0.0)["a_exact"] - 0.4609375) < 1e-15

    m = Spec.catalog("bernoulli_0.25_gaussian")
    report = m.check()
    assert report["verdict"] == "member_by_criterion", report["verdict"]
    assert m.mu()["global_lower"] > 0

    g = Spec.catalog("gaussian")
    value, _ = g.mean_value(0.0, 100.0)
    assert abs(value - math.sqrt(math.pi) / 200.0) < 1e-12

    try:
        Spec.from_json('{"c_d":0.5,"c_a":0,"c_s":0,"discrete":{"atoms":[[0,1]]}}')
    except ValueError:
        pass
    else:
        raise AssertionError("invalid spec accepted")

    print(f"qid_lab smoke test ok ({len(Spec.catalog_names())} catalog specs, tol {qid_lab.DEFAULT_TOL})")


if __name__ == "__main__":
    main()
