import json
import os
import pathlib
import subprocess

import numpy as np
import pytest

import cliffdyn

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def test_resolution_rebuilds_the_target():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = 0.5 * (a + a.conj().T)
    res = cliffdyn.resolve_hermitian(h)
    c, s = res["coefficients"], np.array(res["signs"])
    # c_i . c_j^* = sum_k 2 s_k c_ik conj(c_jk)
    rebuilt = 2.0 * (c * s) @ c.conj().T
    assert np.max(np.abs(rebuilt - h)) < 1e-10
    assert res["residual"] < 1e-10
    assert res["null_residual"] < 1e-12


def test_non_hermitian_input_is_rejected():
    with pytest.raises(cliffdyn.InputError):
        cliffdyn.resolve_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]], dtype=complex))
    assert issubclass(cliffdyn.InputError, ValueError)


def test_spinor_round_trip_and_determinant():
    v = np.array([2.0, 0.3, -0.7, 1.1])
    s = cliffdyn.vec_to_spinor(v)
    assert np.allclose(s, s.conj().T)
    assert abs(np.linalg.det(s) - (v[0] ** 2 - v[1:] @ v[1:])) < 1e-12
    assert np.allclose(cliffdyn.spinor_to_vec(s), v)


def test_free_particle_moves_on_a_line():
    out = cliffdyn.run_particle((DATA / "particle_free.json").read_text())
    report = json.loads(out["report"])
    assert report["pass"] is True
    p = out["p_lower"]
    assert np.max(np.abs(p - p[0])) < 1e-10


def test_turning_point_is_refused():
    with pytest.raises(cliffdyn.PreconditionError):
        cliffdyn.run_particle((DATA / "particle_turning_point.json").read_text())


def test_string_report_has_residual_orders():
    cfg = json.loads((DATA / "string_vibrating.json").read_text())
    report = cliffdyn.string_report(cfg, residuals=True)
    assert report["pass"] is True
    assert abs(report["residuals"]["wave"]["order"] - 2.0) < 0.2


def test_verify_all_matches_cli():
    report = cliffdyn.verify_all(5)
    assert report["pass"] is True
    assert [c["id"] for c in report["criteria"]] == list(range(1, 9))
    cli = os.environ.get("CLIFFDYN_CLI")
    if not cli:
        pytest.skip("CLIFFDYN_CLI not set")
    run = subprocess.run([cli, "verify-all", "--seed", "5", "--json"], capture_output=True, text=True)
    assert run.returncode == 0
    assert json.loads(run.stdout) == report
