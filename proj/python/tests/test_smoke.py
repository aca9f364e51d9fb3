import math

import numpy as np
import pytest

import chemoflux as cf

L = 2 * math.pi
N = 32
x = np.arange(N) * L / N
X, Y = np.meshgrid(x, x)  # arrays indexed [iy, ix]


def test_gradient_of_mode():
    gx, gy = cf.gradient(np.sin(X), L)
    assert np.max(np.abs(gx - np.cos(X))) < 1e-12
    assert np.max(np.abs(gy)) < 1e-12


def test_curl_of_gradient_and_sign():
    phi = np.sin(2 * X) * np.cos(Y)
    assert np.max(np.abs(cf.curl2d(*cf.gradient(phi, L), L))) < 1e-12
    assert np.allclose(cf.curl2d(np.sin(Y), np.zeros_like(Y), L), np.cos(Y), atol=1e-12)


def test_norms_and_helmholtz():
    assert cf.lp_norm(np.full((N, N), 2.0), L, 2.0) == pytest.approx(2.0 * L)
    assert cf.lp_norm(np.sin(X), L, math.inf) == pytest.approx(1.0, abs=1e-12)
    g = cf.helmholtz_solve(np.sin(X), L, 1.0)
    assert np.allclose(g, np.sin(X) / 2.0, atol=1e-14)
    with pytest.raises(ValueError):
        cf.helmholtz_solve(np.sin(X), L, 0.0)


def test_eta0_and_decay_fit():
    assert cf.compute_eta0(6.0) == pytest.approx(0.25)
    t = np.linspace(1, 20, 50)
    fit = cf.fit_decay(t, 2 * np.exp(-0.9 * t), 1.0, 20.0)
    assert fit["rate"] == pytest.approx(0.9, abs=1e-10)


def test_flux_identities():
    u = 1 + 0.1 * np.cos(X + 2 * Y)
    vx, vy = cf.gradient(0.2 * np.sin(X) * np.sin(Y), L)
    assert cf.flux_divergence_residual(u, vx, vy, L) < 1e-11
    assert cf.curl_flux_residual(u, vx, vy, L) < 1e-10


def test_equilibrium_step_and_cole_hopf():
    u = np.ones((N, N))
    z = np.zeros((N, N))
    un, vxn, vyn = cf.step_transformed(u, z, z, L, 0.01)
    assert np.max(np.abs(un - 1)) < 1e-13 and np.max(np.abs(vxn)) < 1e-13
    un, cn = cf.step_original(u, np.full((N, N), 2.0), L, 0.5)
    assert np.allclose(cn, 2 * math.exp(-0.5), rtol=1e-14)
    vx, vy = cf.forward_transform(np.exp(np.sin(X)), L)
    assert np.allclose(vx, -np.cos(X), atol=1e-12)


def test_run_config_and_errors(tmp_path):
    text = "\n".join([
        "grid.L = 4pi", "grid.N = 32", "recipe.kind = smooth_bump", "recipe.amplitude = 0.05",
        "recipe.delta = 0", "stepper.dt_mode = fixed", "stepper.dt = 0.05", "stepper.t_end = 1",
    ])
    res = cf.run_config(text)
    assert res["status"] == "Completed" and res["exit_code"] == 0
    rec = res["records"]
    assert rec["t"][-1] == pytest.approx(1.0)
    assert np.all(rec["div_flux_residual"] <= 1e-11 * (1 + rec["ut_l2"]))
    assert cf.run_study(text, str(tmp_path / "out"), 1) == 0
    assert (tmp_path / "out" / "diagnostics.csv").exists()
    with pytest.raises(ValueError, match="bogus"):
        cf.apply_config("bogus = 1")
    with pytest.raises(ValueError):
        cf.run_config(text.replace("0.05\nrecipe.delta", "-3\nrecipe.delta"))
