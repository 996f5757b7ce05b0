"""Smoke tests for the python module: builds instances, checks energies
against direct evaluation, calibrates, and verifies the Gibbs guarantee."""

import json
import math
import sys

import _bigm as bigm


def assert_close(a, b, tol=1e-9, label=""):
    if abs(a - b) > tol * max(1.0, abs(a), abs(b)):
        raise AssertionError(f"{label}: {a} != {b}")


def test_mnpp_energies():
    inst = bigm.gen_mnpp(2, 2, values=[3.0, 5.0])
    assert inst.num_vars == 4
    assert inst.num_constraints == 2
    assert inst.family == "mnpp"
    # Both items in the first partition: (8-4)^2 + (0-4)^2.
    assert_close(bigm.objective_energy(inst, [1, 0, 1, 0]), 32.0, label="objective")
    assert bigm.penalty_energy(inst, [0, 0, 0, 0]) == 2
    assert bigm.penalty_energy(inst, [1, 0, 0, 1]) == 0
    breakdown = bigm.total_energy(inst, 10.0, [0, 0, 0, 0])
    assert_close(breakdown["total"], breakdown["objective"] + 20.0, label="total")


def test_calibration_guarantee():
    inst = bigm.gen_mnpp(4, 3, seed=7)
    result = bigm.calibrate_m(
        inst, beta=0.001, eta=0.5, exact_weights=True, v_cut=bigm.penalty_upper_bound(inst)
    )
    assert result["status"] == "ok", result
    m_star = result["m_star"]
    gibbs = bigm.GibbsExact(inst, m_star, 0.001)
    p = gibbs.feasibility_probability()
    assert p >= 0.5, p
    # The calibrated weight beats the direct baseline.
    m_l1 = bigm.big_m_l1(inst, 0.001, 0.5)
    assert bigm.speedup_metric(m_l1, m_star) > 0.0


def test_sampler_and_counts():
    inst = bigm.gen_tsp_circle(3, 10.0)
    for x in bigm.sample_feasible(inst, seed=5, count=50):
        assert bigm.penalty_energy(inst, x) == 0
    log_f, exact_f = bigm.feasible_count(inst)
    assert exact_f == 6
    assert_close(log_f, math.log(6.0), label="log feasible count")
    # Degeneracy closed form vs brute force.
    counts = bigm.npen_bruteforce(inst, 7)
    for v in range(8):
        _, exact = bigm.npen_tsp(3, v)
        assert exact == counts[v], (v, exact, counts[v])


def test_json_round_trip():
    inst = bigm.gen_po_synthetic(3, 2, risk_aversion=1.0, seed=9)
    text = bigm.instance_to_json(inst)
    parsed = json.loads(text)
    assert parsed["n"] == 6
    restored = bigm.instance_from_json(text)
    assert restored.num_vars == 6
    x = [1, 0, 0, 1, 1, 0]
    assert_close(
        bigm.objective_energy(inst, x), bigm.objective_energy(restored, x), label="round trip"
    )


def test_solvers():
    inst = bigm.gen_mnpp(3, 2, values=[1.0, 2.0, 3.0])
    report = bigm.simulated_annealing(inst, m=50.0, beta_target=1.0, count=64, seed=3)
    assert 0.0 <= report["eta_eff"] <= 1.0
    gibbs = bigm.GibbsExact(inst, 50.0, 1.0)
    sampled = gibbs.sample(count=5000, seed=11)
    assert abs(sampled["eta_eff"] - gibbs.feasibility_probability()) < 0.05


def main():
    tests = [
        test_mnpp_energies,
        test_calibration_guarantee,
        test_sampler_and_counts,
        test_json_round_trip,
        test_solvers,
    ]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
