import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anscy.analysis import estimation_quality
from anscy.core import (CampbellMode, ConfigError, DegenerateConfigWarning, OutageConstraints,
                        SystemConfig, dbm_to_linear, linear_to_dbm, thinned_bs_intensity,
                        wyner_from_thresholds)


@given(st.floats(-120, 80))
def test_dbm_round_trip(x):
    assert linear_to_dbm(dbm_to_linear(x)) == pytest.approx(x, abs=1e-10)


def test_dbm_reference_points():
    assert dbm_to_linear(30.0) == pytest.approx(1000.0)
    assert dbm_to_linear(-50.0) == pytest.approx(1e-5)
    with pytest.raises(ValueError):
        linear_to_dbm(0.0)


def test_thinning_limits():
    assert thinned_bs_intensity(1e-4, 0.0) == 0.0
    assert thinned_bs_intensity(1e-4, 1.0) == pytest.approx(1e-4)
    # tiny user load: expm1 keeps relative precision
    assert thinned_bs_intensity(1e-4, 1e-12) == pytest.approx(1e-12, rel=1e-9)
    assert thinned_bs_intensity(1e-4, 1e-3) == pytest.approx(1e-4 * (1 - math.exp(-10)), rel=1e-14)


def test_power_split():
    cfg = SystemConfig(p_tot_dbm=30.0, phi=0.3)
    assert cfg.p_s + cfg.p_a == pytest.approx(1000.0)
    assert cfg.p_an_per_dim == pytest.approx(700.0 / (cfg.n_t - 1))


@pytest.mark.parametrize("kwargs,msg", [
    ({"alpha": 1.5}, "alpha must exceed 2"),
    ({"alpha": 2.0}, "alpha must exceed 2"),
    ({"n_t": 1}, "n_t"),
    ({"phi": 1.2}, "phi"),
    ({"lambda_b": 0.0}, "lambda_b"),
    ({"r_c": -1.0}, "r_c"),
    ({"lambda_e": -1e-6}, "lambda_e"),
])
def test_invalid_configs(kwargs, msg):
    with pytest.raises(ConfigError, match=msg):
        SystemConfig(**kwargs)


def test_degenerate_split_warns():
    with pytest.warns(DegenerateConfigWarning):
        SystemConfig(phi=1.0)


def test_constraints_validated():
    with pytest.raises(ConfigError):
        OutageConstraints(sigma=0.0)
    with pytest.raises(ConfigError):
        OutageConstraints(epsilon=1.0)


def test_wyner_rates():
    w = wyner_from_thresholds(3.0, 1.0)
    assert (w.r_ts, w.r_e, w.r_s) == (2.0, 1.0, 1.0)


def _delta2_reference(cfg, r, planar):
    with mpmath.workdps(30):
        lam = mpmath.mpf(cfg.lambda_b) * -mpmath.expm1(-mpmath.mpf(cfg.lambda_u) / cfg.lambda_b)
        a = mpmath.mpf(cfg.alpha)
        rc = mpmath.mpf(cfg.r_c)
        if planar:
            pc = 2 * mpmath.pi * lam * rc ** (2 - a) / (a - 2)
        else:
            pc = lam * rc ** (1 - a) / (a - 1)
        train = mpmath.mpf(10) ** (mpmath.mpf(cfg.p_tau_dbm) / 10) * cfg.tau
        own = train * mpmath.mpf(r) ** -a
        n0 = mpmath.mpf(10) ** (mpmath.mpf(cfg.n0_dbm) / 10)
        return float(own / (n0 + train * pc + own))


@pytest.mark.parametrize("planar", [False, True])
def test_estimation_quality_matches_direct_evaluation(fig2_cfg, planar):
    cfg = fig2_cfg.with_(campbell_mode=CampbellMode.PLANAR_2D if planar else CampbellMode.PAPER_LITERAL)
    ctx = estimation_quality(cfg, 50.0)
    assert ctx.delta2 == pytest.approx(_delta2_reference(cfg, 50.0, planar), rel=1e-13)
    assert ctx.r_u == 150.0


def test_estimation_quality_fig2_value(fig2_cfg):
    assert estimation_quality(fig2_cfg, 50.0).delta2 == pytest.approx(0.99570, abs=5e-6)


def test_estimation_quality_rejects_out_of_cell():
    cfg = SystemConfig()
    for r in (0.0, cfg.r_c, 2 * cfg.r_c):
        with pytest.raises(ValueError):
            estimation_quality(cfg, r)


@given(st.floats(1.0, 199.0), st.floats(1.0, 199.0))
def test_estimation_quality_decreases_with_distance(r1, r2):
    cfg = SystemConfig()
    lo, hi = sorted((r1, r2))
    assert estimation_quality(cfg, lo).delta2 >= estimation_quality(cfg, hi).delta2


def test_more_pilot_power_improves_estimate():
    cfg = SystemConfig()
    vals = [estimation_quality(cfg.with_(p_tau_dbm=p), 100.0).delta2 for p in (0, 10, 20, 30)]
    assert vals == sorted(vals)
