import numpy as np
import pytest

from rrdps.optimizer import SweepConfig, optimize_at, sweep, sweep_detailed

# frozen from a 4 x 4000 exhaustive (nu_th, log-mu) scan at L=6, e=0.03, f_ec=1.1, eta=1
SCAN_BEST_L6_MONITORED = 0.015117736748770441


def test_matches_exhaustive_scan():
    best = optimize_at(1.0, SweepConfig(L=6, eta_grid=(1.0,)))
    assert best.rate_per_pulse >= SCAN_BEST_L6_MONITORED - 1e-12
    assert best.rate_per_pulse == pytest.approx(SCAN_BEST_L6_MONITORED, rel=1e-4)


def test_monitored_beats_unmonitored():
    mon = optimize_at(1.0, SweepConfig(L=6, monitored=True))
    unmon = optimize_at(1.0, SweepConfig(L=6, monitored=False))
    assert mon.rate_per_pulse > unmon.rate_per_pulse


def test_rate_falls_with_loss():
    cfg = SweepConfig(L=6)
    assert optimize_at(0.5, cfg).rate_per_pulse >= optimize_at(0.25, cfg).rate_per_pulse


def test_hopeless_error_rate_gives_zero():
    best = optimize_at(1.0, SweepConfig(L=6, e=0.4))
    assert best.rate_per_pulse == 0.0
    assert best.rate_per_block < 0


def test_result_within_search_box():
    cfg = SweepConfig(L=12, eta_grid=(0.3, 0.03))
    lo, hi = cfg.mu_limits
    for pt in sweep(cfg):
        assert 1 <= pt.nu_th <= 10
        assert lo <= pt.mu <= hi


def test_refinement_beats_coarse_grid():
    from rrdps.optimizer import N_MU_GRID, _rate

    cfg = SweepConfig(L=6)
    best = optimize_at(0.1, cfg)
    lo, hi = cfg.mu_limits
    for nu in range(1, 5):
        for mu in np.exp(np.linspace(np.log(lo), np.log(hi), N_MU_GRID)):
            assert best.rate_per_pulse >= _rate(cfg, 0.1, nu, float(mu)).rate_per_pulse


def test_sweep_is_deterministic_and_ordered():
    cfg = SweepConfig(L=6, eta_grid=(1.0, 0.1, 0.01))
    a, b = sweep(cfg), sweep(cfg)
    assert a == b
    assert [p.eta for p in a] == [1.0, 0.1, 0.01]
    assert len(sweep(SweepConfig(L=6, eta_grid=(0.2,)))) == 1


def test_improvement_larger_for_short_blocks():
    def gain(L):
        mon = optimize_at(0.1, SweepConfig(L=L, monitored=True)).rate_per_pulse
        unmon = optimize_at(0.1, SweepConfig(L=L, monitored=False)).rate_per_pulse
        return (mon - unmon) / unmon

    assert gain(6) > gain(32)


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(L=6, eta_grid=(0.1, 0.5, 0.2))
    with pytest.raises(ValueError):
        SweepConfig(L=6, eta_grid=(0.0,))
    with pytest.raises(ValueError):
        SweepConfig(L=6, nu_th_range=(1, 5))
    with pytest.raises(ValueError):
        SweepConfig(L=6, mu_bracket=(0.0, 1.0))


def test_sweep_detailed_has_no_failures():
    assert sweep_detailed(SweepConfig(L=6, eta_grid=(1.0,))).failures == {}
