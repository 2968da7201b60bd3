import numpy as np
import pytest

from blockrg import decay as dc, lattice as lat, multiscale as ms, operators as ops

P0 = ms.MultiscaleParams()


def test_fit_recovers_synthetic_profile():
    dists = np.linspace(0.0, 10.0, 40)
    mags = 3.0 * np.exp(-0.7 * dists)
    fit = dc.fit_decay(dists, mags)
    assert fit.rate == pytest.approx(0.7, abs=1e-10)
    assert fit.log_prefactor == pytest.approx(np.log(3.0), abs=1e-10)
    assert fit.rms_residual < 1e-12
    assert fit.point_count >= 5


def test_fit_window_rules():
    dists = np.linspace(0.0, 10.0, 40)
    mags = np.exp(-dists)
    fit = dc.fit_decay(dists, mags)
    assert fit.window[0] == 1.0
    assert fit.window[1] == pytest.approx(8.0)
    with pytest.raises(ValueError):
        dc.fit_decay(dists[:6], mags[:6], window=(9.0, 10.0))


def test_fit_scale_honesty():
    # rescaling distances by lam rescales the fitted rate by 1/lam
    rng = np.random.default_rng(0)
    dists = np.linspace(0.5, 12.0, 30)
    mags = np.exp(-0.9 * dists + 0.05 * rng.standard_normal(30))
    lam = 2.5
    f1 = dc.fit_decay(dists, mags)
    f2 = dc.fit_decay(lam * dists, mags, window=(lam * f1.window[0], lam * f1.window[1]))
    assert f2.rate == pytest.approx(f1.rate / lam, rel=1e-12)


def test_conjugation_bitwise_at_zero():
    g = lat.make_geometry(1, 3, 1, 2)
    D0 = ms.defining_operator(g, P0, 1)
    Dq = dc.conjugated_operator(g, P0, 0.0)
    assert np.array_equal(D0.kernel, Dq.kernel)


def test_conjugated_derivative_identity():
    # e_{-q} d(e_q f) = q E_q f + exp(eta q) d f at interior sites
    g = lat.make_geometry(1, 3, 1, 2)
    eta = g.spacing
    rng = np.random.default_rng(1)
    f = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    D = ops.forward_diff(g, 0).matrix
    x = lat.positions(g)[:, 0]
    for q in (0.3, -0.7):
        lhs = np.exp(-q * x) * (D @ (np.exp(q * x) * f))
        E_q = (np.exp(q * eta) - 1.0) / (q * eta)
        rhs = q * E_q * f + np.exp(eta * q) * (D @ f)
        assert np.max(np.abs(lhs - rhs)[:-1]) < 1e-12 * np.max(np.abs(rhs))


def test_conjugation_covariance():
    # e_{-q} G e_q = (D_q)^{-1}
    g = lat.make_geometry(1, 3, 1, 2)
    for q in (0.02, -0.05):
        lhs = dc.conjugated_green(g, P0, q)
        rhs = ops.invert(dc.conjugated_operator(g, P0, q))
        assert ops.rel_frobenius(lhs, rhs) < 1e-10


def test_coercivity_of_symmetrized_form():
    g = lat.make_geometry(1, 3, 1, 2)
    for q in (0.0, 0.05, -0.05):
        Dq = dc.conjugated_operator(g, P0, q).matrix
        sym = (Dq + Dq.conj().T) / 2.0
        assert np.linalg.eigvalsh(sym)[0] > 0


def test_ct_report_reference():
    g = lat.make_geometry(1, 3, 1, 3)
    rng = np.random.default_rng(5)
    rep = dc.ct_bound_report(g, P0, [0.0, 0.02, -0.02, 0.05, -0.05], rng)
    assert rep.fitted_c1 > 0
    # q = 0 norm equals 1/lambda_min of the defining operator
    D0 = ms.defining_operator(g, P0, 1)
    lam_min = ops.min_eigenvalue(D0)
    assert rep.bound_constants[0] == pytest.approx(1.0 / lam_min, rel=1e-10)
    # reflection symmetry through relabeling: norms at q and -q agree
    assert rep.bound_constants[1] == pytest.approx(rep.bound_constants[2], rel=1e-9)
    assert all(np.isfinite(b) for b in rep.bound_constants)


def test_profile_and_rate_positive():
    g = lat.make_geometry(1, 3, 1, 3)
    dists, mags = dc.decay_profile(g, P0)
    fit = dc.fit_decay(dists, mags)
    assert fit.rate > 0


def test_rate_volume_stability():
    fits = {}
    for m in (3, 4):
        g = lat.make_geometry(1, 3, 1, m)
        dists, mags = dc.decay_profile(g, P0)
        fits[m] = dc.fit_decay(dists, mags).rate
    assert abs(fits[3] - fits[4]) / fits[4] < 0.15


def test_monotone_mass_masking():
    g = lat.make_geometry(1, 3, 1, 3)
    r0 = dc.fit_decay(*dc.decay_profile(g, P0)).rate
    r1 = dc.fit_decay(*dc.decay_profile(g, ms.MultiscaleParams(mu0=0.2))).rate
    assert r1 >= r0 - 1e-9


def test_linf_report():
    geoms = [lat.make_geometry(1, 3, 1, m) for m in (3, 4)]
    rows = dc.linf_report(geoms, P0)
    for row in rows:
        assert row.fit.rate > 0
        assert np.isfinite(row.max_ratio) and row.max_ratio > 0


def test_block_source_profile():
    g = lat.make_geometry(2, 3, 1, 2)
    dists, mags = dc.decay_profile(g, P0, source=("block", (0, 0)))
    assert dists[0] == 0.0
    fit = dc.fit_decay(dists, mags)
    assert fit.rate > 0
