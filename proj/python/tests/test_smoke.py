import json
import math

import pytest

import lyhflow


def test_catalog_and_hash():
    names = lyhflow.catalog_names()
    assert {"flat_torus", "cigar", "round_sphere_2d"} <= set(names)
    h = lyhflow.convention_hash()
    assert len(h) == 64 and h == lyhflow.convention_hash()


def test_identity_suite_flat_torus():
    reps = lyhflow.identity_suite("flat_torus", samples=4, convergence=False)
    assert reps and all(r["pass"] for r in reps)
    assert max(r["max_residual"] for r in reps) <= 1e-9


def test_soliton_suite_cigar():
    reps = {r["identity"]: r for r in lyhflow.soliton_suite("cigar", samples=4)}
    assert reps["parallel_v"]["pass"]
    assert reps["wrong_picture_control"]["max_residual"] > 1e-2


def test_harnack_sweep_sphere():
    out = lyhflow.harnack_sweep("round_sphere_2d", samples=10, algebra_samples=50)
    assert out["pass"]
    assert all(q["min_eigenvalue"] > 0 for q in out["quadratics"])


def test_run_flow_round_sphere_matches_exact_curvature():
    out = lyhflow.run_flow(u=[0.0], phi=[1.0], resolution=32, t0=0.0, t_end=0.2, elliptic_f=False)
    assert out["completed"]
    exact = 2.0 / (1.0 - 2.0 * out["t_final"])
    assert max(abs(r - exact) / exact for r in out["scalar_curvature"]) < 1e-5
    assert all(abs(m["gauss_bonnet"] - 8 * math.pi) < 1e-10 for m in out["series"])


def test_perturbed_sphere_persistence():
    out = lyhflow.run_flow(resolution=48, t_end=0.15, monitor_stride=100)
    assert out["hypothesis_met"] and out["persisted"]
    assert out["elliptic_margin"] > 0


def test_execute_is_deterministic():
    cfg = "solution: flat_torus\nsamples: 3\n"
    code, body = lyhflow.execute("verify-identities", cfg)
    assert code == 0
    assert lyhflow.execute("verify-identities", cfg)[1] == body
    report = json.loads(body)
    assert report["convention_hash"] == lyhflow.convention_hash()
    assert report["summary"]["pass"]


def test_errors_are_translated():
    with pytest.raises(lyhflow.ConfigError):
        lyhflow.identity_suite("no_such_family")
    with pytest.raises(lyhflow.ConfigError):
        lyhflow.execute("verify-identities", "bogus: 1\n")
    with pytest.raises(lyhflow.LyhflowError):
        lyhflow.identity_suite("perturbed_sphere", samples=2)
