import numpy as np
import pytest
from numpy.testing import assert_array_equal

from fodgmm import DgpConfig, fd_estimate, fod_estimate, simulate, stationary_variance


def test_zero_noise_gives_zero_panel():
    panel = simulate(DgpConfig(delta=0.5, T=4, N=6, seed=9, eta_sd=0.0, v_sd=0.0))
    assert_array_equal(panel.y, np.zeros((6, 5)))


def test_pure_unit_effect_reaches_fixed_point():
    # with no shocks, y converges to eta/(1-delta) = 2*eta up to |delta|^burn_in
    panel = simulate(DgpConfig(delta=0.5, T=3, N=50, seed=4, v_sd=0.0))
    y = panel.y
    eta = y[:, 1] - 0.5 * y[:, 0]  # exact from the recursion
    assert np.all(np.abs(y[:, 0] - 2.0 * eta) <= 1e-12 * (1.0 + np.abs(eta)))
    # recursion holds exactly across retained periods
    for t in range(1, 4):
        assert np.allclose(y[:, t] - 0.5 * y[:, t - 1], eta, rtol=0, atol=1e-12)


def test_same_seed_is_bit_identical():
    cfg = DgpConfig(delta=0.5, T=5, N=40, seed=77)
    assert_array_equal(simulate(cfg).y, simulate(cfg).y)


def test_different_seed_differs():
    a = simulate(DgpConfig(delta=0.5, T=5, N=10, seed=1))
    b = simulate(DgpConfig(delta=0.5, T=5, N=10, seed=2))
    assert not np.array_equal(a.y, b.y)


def test_unit_substreams_independent_of_n():
    small = simulate(DgpConfig(delta=0.5, T=6, N=7, seed=123))
    large = simulate(DgpConfig(delta=0.5, T=6, N=12, seed=123))
    assert_array_equal(large.y[:7], small.y)


def test_burn_in_is_configurable():
    no_burn = simulate(DgpConfig(delta=0.5, T=3, N=5, seed=5, burn_in=0))
    burned = simulate(DgpConfig(delta=0.5, T=3, N=5, seed=5, burn_in=50))
    assert not np.array_equal(no_burn.y, burned.y)
    # without burn-in the start is the zero state plus one shock step: y0 = eta + v
    assert np.isfinite(no_burn.y).all()


def test_stationary_variance_value():
    assert stationary_variance(0.5) == pytest.approx(16.0 / 3.0, rel=1e-15)
    assert stationary_variance(0.0, 2.0, 3.0) == pytest.approx(13.0, rel=1e-15)


def test_initial_observation_variance_near_stationary():
    # smoke-scale version of the stationarity check (the acceptance suite
    # runs N = 1e5 at 3 standard errors)
    panel = simulate(DgpConfig(delta=0.5, T=2, N=20_000, seed=31))
    sample_var = panel.y[:, 0].var(ddof=1)
    target = 16.0 / 3.0
    se = target * np.sqrt(2.0 / (20_000 - 1))
    assert abs(sample_var - target) <= 5 * se


def test_output_feeds_estimators_directly():
    panel = simulate(DgpConfig(delta=0.5, T=5, N=50, seed=8))
    fd = fd_estimate(panel).delta_hat
    fod = fod_estimate(panel).delta_hat
    assert abs(fd - fod) <= 1e-8 * (1 + abs(fd))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(delta=0.5, T=1, N=5, seed=1),
        dict(delta=0.5, T=5, N=0, seed=1),
        dict(delta=1.0, T=5, N=5, seed=1),
        dict(delta=-1.2, T=5, N=5, seed=1),
        dict(delta=0.5, T=5, N=5, seed=1, burn_in=-1),
        dict(delta=0.5, T=5, N=5, seed=1, eta_sd=-0.1),
        dict(delta=0.5, T=5, N=5, seed=-3),
        dict(delta=0.5, T=5, N=5, seed=2**64),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        DgpConfig(**kwargs)


def test_unstable_delta_allowed_without_burn_in():
    cfg = DgpConfig(delta=1.1, T=3, N=2, seed=1, burn_in=0)
    panel = simulate(cfg)
    assert np.isfinite(panel.y).all()
