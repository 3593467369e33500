import math

import pytest

yb = pytest.importorskip("yblab")


def test_log_gamma_matches_math():
    for x in (0.5, 1.0, 3.7, 10.2):
        assert abs(yb.log_gamma(x).real - math.lgamma(x)) < 1e-13


def test_theta1_is_odd():
    z = complex(0.4, 0.1)
    assert abs(yb.theta1(z, 0.3) + yb.theta1(-z, 0.3)) < 1e-14


def test_ncqdl_has_unit_modulus_on_real_line():
    assert abs(abs(yb.ncqdl(0.37, b=1.3)) - 1.0) < 1e-9


def test_model_properties():
    m = yb.Model.elliptic(0.3, 0.5)
    assert m.name == "elliptic"
    assert m.eta == pytest.approx(-0.5 * math.log(0.15))
    assert yb.Model.gamma().eta == 1.0


def test_gamma_str_single_config():
    m = yb.Model.gamma()
    outer, spectral = yb.random_star(m, seed=7, index=0)
    r = yb.str_residual(m, outer, spectral, tol=1e-6)
    assert r.passed, r.note
    assert r.rel_residual <= 1e-6


def test_elliptic_str_campaign():
    reps = yb.run_str_campaign(yb.Model.elliptic(0.3, 0.3), 3, tol=1e-8, seed=1)
    assert len(reps) == 3
    assert all(r.passed for r in reps)
    assert all(abs(r.r_factor - 1.0) < 1e-8 for r in reps)


def test_inversion_pointwise():
    m = yb.Model.gamma()
    assert yb.inversion_pointwise(m, 0.3, (0.2, 1), (-0.7, 0)) < 1e-9


def test_spin_kind_is_checked():
    with pytest.raises(yb.Error):
        yb.edge_weight(yb.Model.gamma(), 0.3, 0.1, 0.2)


def test_bad_spectral_triple_is_a_config_error():
    m = yb.Model.elliptic(0.3, 0.3)
    with pytest.raises(yb.Error):
        yb.str_residual(m, [0.1, 0.2, 0.3], [0.1, 0.1, 0.1])


def test_lattice_exact_and_mc_run():
    m = yb.Model.elliptic(0.3, 0.3)
    ex = yb.lattice_exact(m, rows=3, cols=3, nodes=32)
    assert ex.internal_sites == 1
    assert math.isfinite(ex.log_z)
    mc = yb.lattice_mc(m, rows=3, cols=3, sweeps=2000, burn_in=200, seed=3)
    assert len(mc.series) == 2000 - 200
    assert 0.0 < mc.acceptance <= 1.0


def test_mc_is_deterministic():
    m = yb.Model.gamma()
    a = yb.lattice_mc(m, sweeps=500, burn_in=50, seed=9)
    b = yb.lattice_mc(m, sweeps=500, burn_in=50, seed=9)
    assert a.series == b.series
