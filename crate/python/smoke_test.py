"""Smoke test for the compiled `mtsc` module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`
or `pip install ./crates/py`, then run `python python/smoke_test.py`.
"""

import json
import math

import mtsc

LN2 = math.log(2)


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    # probability tables
    j = mtsc.JointPmf([("A", 2), ("B", 2)], [0.5, 0.0, 0.0, 0.5])
    close(j.entropy(["A"]), LN2, 1e-15)
    close(j.mutual_information(["A"], ["B"]), LN2, 1e-15)
    close(j.conditional_mutual_information(["A"], ["B"], []), LN2, 1e-15)
    assert j.names() == ["A", "B"]

    # toy example: outer bound for encoder 1 given encoder 2
    model, gamma, _ = mtsc.casebook("toy")
    outer = mtsc.bt_outer_constraints(model, gamma)
    close(outer.bound([1]), 0.75 * LN2, 1e-12)
    close(outer.sum_rate, 1.25 * LN2, 1e-12)
    assert not gamma.check_class(model, "bt-inner")["pass"]
    try:
        mtsc.bt_inner_constraints(model, gamma)
    except ValueError as e:
        assert "Markov" in str(e) or "residual" in str(e), e
    else:
        raise AssertionError("bt-inner accepted a shared-randomness system")

    model, gamma, _ = mtsc.casebook("toy-bt-gamma")
    inner = mtsc.bt_inner_constraints(model, gamma)
    corner = inner.vertex([1, 2])
    close(corner[0], LN2, 1e-12)
    close(corner[1], LN2, 1e-12)

    # erasure CEO
    rate = mtsc.erasure_sum_rate(0.5, 2, 0.6)
    close(rate, 0.65628389737, 1e-10)
    close(mtsc.noise_info_minimum(0.5, 2, 0.6), mtsc.g_function(math.sqrt(0.6), 0.5), 1e-6)
    model, gamma, x = mtsc.casebook("erasure", p=0.5, encoders=2, distortion=0.6)
    close(mtsc.new_outer_constraints(model, x, gamma).sum_rate, rate, 1e-9)
    i_joint, i_cond, dist = mtsc.erasure_bt_counterexample()
    assert 0.6268 < i_joint <= 0.6273 and 0.3243 < i_cond <= 0.3248 and dist == 0.6
    curve = mtsc.erasure_curve(0.5, [1, 2], 11)
    assert len(curve) == 22 and curve[-1] == (1.0, 2, 0.0)

    # Gaussian CEO
    s, r = mtsc.gaussian_min_sum_rate(1.0, [1.0, 1.0], 0.5)
    close(s, 1.5 * LN2, 1e-12)
    assert mtsc.gaussian_region_contains(1.0, [1.0, 1.0], 0.5, [0.75 * LN2] * 2, r)
    assert not mtsc.gaussian_region_contains(1.0, [1.0, 1.0], 0.5, [0.7 * LN2] * 2, r)
    close(mtsc.oohama_gap(2.0, [0.5, 1.0], [0.3, 0.4], [1]), 0.0, 1e-12)
    w = mtsc.gaussian_counterexample_search(0.04)
    i_joint, i_cond, dist = mtsc.gaussian_bt_counterexample(w)
    assert max(i_joint, 2 * i_cond) <= 1.5 * LN2 - 0.04
    close(dist, 0.5, 1e-12)

    # optimizer and JSON round trip
    model, _, _ = mtsc.casebook("toy")
    found = mtsc.optimize_bt_inner_sum_rate(model, [0.0], seed=1)
    assert found is not None and found["sum_rate"] <= 2 * LN2 + 1e-6
    again = mtsc.AuxSystem.from_json(found["gamma"].to_json())
    close(mtsc.bt_inner_constraints(model, again).sum_rate, found["sum_rate"], 1e-12)
    assert json.loads(model.to_json())["encoders"] == 2

    print("smoke test passed")


if __name__ == "__main__":
    main()
