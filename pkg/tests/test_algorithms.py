import math

import numpy as np
import pytest

from hybrid_irs.algorithms import (
    BASELINES,
    AlgOptions,
    _Problem,
    baseline,
    flops_ear,
    flops_fp,
    max_snr_ear,
    max_snr_fp,
)
from hybrid_irs.channel import ScenarioConfig, build_channels
from hybrid_irs.errors import InvalidArgumentError, NonConvergenceError
from hybrid_irs.irs_model import IrsLayout, feasibility_report, irs_transmit_power, rate

from conftest import random_scenario
from oracles import best_joint_rate

# log2(1 + P·ρ_sb/σ_b²) at the headline operating point
NO_IRS_RATE = 6.05172697351113

NEAR = dict(N=2, M=4, M_a=1, d_sr=6.0, d_sb=9.0, theta_sr=1.0, theta_sb=2.0,
            Pr_max_dBm=0.0, sigma_r2_dBm=-80.0, beta_max=20.0)


def near_case(**kw):
    cfg = ScenarioConfig(**{**NEAR, **kw})
    return cfg, build_channels(cfg), IrsLayout.hybrid(cfg.M, cfg.M_a, cfg.beta_max)


class TestFlops:
    def test_hand_values(self):
        assert flops_ear(1, 1, 1) == 15
        assert flops_fp(1, 1, 1, math.exp(-1)) == pytest.approx(25, abs=1e-12)

    def test_strictly_increasing_in_M(self):
        Ms = np.arange(1, 300)
        fp = [flops_fp(3, M, 8, 1e-4) for M in Ms]
        ear = [flops_ear(3, M, 8) for M in Ms]
        assert np.all(np.diff(fp) > 0) and np.all(np.diff(ear) > 0)

    @pytest.mark.parametrize("args", [(0, 4, 2, 0.1), (1, 4, 2, 1.0), (1, 4, 2, 0.0), (1, -1, 2, 0.5)])
    def test_rejects_bad_arguments(self, args):
        with pytest.raises(InvalidArgumentError):
            flops_fp(*args)

    def test_ratio_grows_with_M(self):
        r = [flops_fp(2, M, 8, 1e-4) / flops_ear(2, M, 8) for M in (64, 128, 256, 512)]
        assert np.all(np.diff(r) > 0)


class TestOptions:
    @pytest.mark.parametrize("kw", [dict(epsilon=0.0), dict(epsilon=-1.0), dict(max_outer=0)])
    def test_rejects(self, kw):
        with pytest.raises(InvalidArgumentError):
            AlgOptions(**kw)


@pytest.fixture(scope="module")
def headline():
    cfg = ScenarioConfig()
    ch = build_channels(cfg)
    lay = IrsLayout.hybrid(cfg.M, cfg.M_a, cfg.beta_max)
    return cfg, ch, lay, max_snr_fp(cfg, ch, lay), max_snr_ear(cfg, ch, lay)


class TestHeadline:
    def test_trajectories_monotone(self, headline):
        *_, fp, ear = headline
        for res in (fp, ear):
            assert res.converged and res.outer_iterations <= 100
            assert np.all(np.diff(res.rate_trajectory) >= -1e-6)

    def test_final_states_feasible(self, headline):
        cfg, ch, lay, fp, ear = headline
        for res in (fp, ear):
            assert feasibility_report(ch, cfg, res.final_v, res.final_state) == []
            assert res.rate == pytest.approx(rate(ch, cfg, res.final_v, res.final_state), abs=1e-12)

    def test_every_dinkelbach_exit_meets_root_condition(self, headline):
        *_, fp, _ = headline
        assert fp.dinkelbach and all(abs(d.F_value) <= 1e-6 for d in fp.dinkelbach)

    def test_ear_equal_amplitudes(self, headline):
        cfg, ch, lay, _, ear = headline
        mag = np.abs(ear.final_state.theta[lay.active])
        assert np.ptp(mag) <= 1e-12 * max(1.0, mag[0])
        np.testing.assert_allclose(np.abs(ear.final_state.theta[lay.passive_mask]), 1.0, atol=1e-12)

    def test_flops_use_measured_iterations(self, headline):
        cfg, ch, lay, fp, ear = headline
        assert fp.flops_estimate == flops_fp(fp.outer_iterations, 128, 8, 1e-4)
        assert ear.flops_estimate == flops_ear(ear.outer_iterations, 128, 8)


class TestEar:
    def test_power_budget_exhausted_when_uncapped(self):
        cfg, ch, lay = near_case(Pr_max_dBm=-20.0, beta_max=1e4)
        res = max_snr_ear(cfg, ch, lay)
        amp = np.abs(res.final_state.theta[lay.active])[0]
        assert amp < lay.beta_max
        p = irs_transmit_power(ch, cfg, res.final_v, res.final_state)
        assert p == pytest.approx(cfg.Pr_max, rel=1e-6)

    def test_amplitude_capped(self):
        cfg, ch, lay = near_case(Pr_max_dBm=30.0, beta_max=2.0)
        res = max_snr_ear(cfg, ch, lay)
        np.testing.assert_allclose(np.abs(res.final_state.theta[lay.active]), 2.0, rtol=1e-12)

    def test_zero_beamformer_guard(self):
        cfg, ch, lay = near_case()
        prob = _Problem(cfg, ch, lay, AlgOptions())
        amp = prob.equal_amplitude(np.zeros(2, dtype=complex))
        assert math.isfinite(amp) and 0 < amp <= lay.beta_max


class TestFp:
    def test_infinite_epsilon_single_iteration(self):
        cfg, ch, lay = near_case()
        for fn in (max_snr_fp, max_snr_ear):
            res = fn(cfg, ch, lay, AlgOptions(epsilon=math.inf))
            assert res.outer_iterations == 1 and len(res.rate_trajectory) == 2

    def test_max_outer_cap(self):
        cfg, ch, lay = near_case()
        res = max_snr_fp(cfg, ch, lay, AlgOptions(epsilon=1e-300, max_outer=2))
        assert res.outer_iterations == 2 and not res.converged

    def test_tiny_instance_beats_random_search(self):
        cfg, ch, lay = near_case(M=2)
        res = max_snr_fp(cfg, ch, lay)
        best = best_joint_rate(cfg, ch, lay.active, lay.beta_max, 1_000_000, np.random.default_rng(1))
        assert res.rate >= best - 1e-2

    def test_dinkelbach_failure_carries_partial_trajectory(self):
        cfg, ch, lay = near_case()
        with pytest.raises(NonConvergenceError) as exc:
            max_snr_fp(cfg, ch, lay, AlgOptions(dinkelbach_max_iter=1, dinkelbach_tol=-1.0))
        assert len(exc.value.partial) >= 1

    def test_trace_rows(self):
        cfg, ch, lay = near_case()
        rows = []
        res = max_snr_fp(cfg, ch, lay, AlgOptions(trace=rows))
        assert {r[1] for r in rows} == {"v", "psi"}
        assert max(r[0] for r in rows) == res.outer_iterations

    def test_backends_agree(self):
        from hybrid_irs.convex_kernel import BACKENDS
        cfg, ch, lay = near_case(N=4, M=8, M_a=2)
        rates = [max_snr_fp(cfg, ch, lay, AlgOptions(backend=b)).rate for b in sorted(BACKENDS)]
        assert max(rates) - min(rates) <= 1e-9


class TestBaselines:
    def test_no_irs_closed_form(self, headline_cfg, headline_channels, headline_layout):
        res = baseline("no_irs", headline_cfg, headline_channels, headline_layout)
        assert abs(res.rate - NO_IRS_RATE) <= 1e-9
        assert res.outer_iterations == 0
        assert rate(headline_channels, headline_cfg, res.final_v, res.final_state) == pytest.approx(res.rate, abs=1e-12)

    def test_random_phase_reproducible(self):
        cfg, ch, _ = near_case()
        lay = IrsLayout.passive(cfg.M)
        a = baseline("random_phase", cfg, ch, lay, AlgOptions(seed=4))
        b = baseline("random_phase", cfg, ch, lay, AlgOptions(seed=4))
        c = baseline("random_phase", cfg, ch, lay, AlgOptions(seed=5))
        assert a.rate == b.rate and np.array_equal(a.final_state.theta, b.final_state.theta)
        assert not np.array_equal(a.final_state.theta, c.final_state.theta)
        np.testing.assert_allclose(np.abs(a.final_state.theta), 1.0)

    @pytest.mark.parametrize("kind, layout", [
        ("passive_irs", IrsLayout.hybrid(4, 1)),
        ("random_phase", IrsLayout.hybrid(4, 1)),
        ("active_irs", IrsLayout.passive(4)),
        ("bogus", IrsLayout.passive(4)),
        ("no_irs", IrsLayout.passive(8)),
    ])
    def test_invalid_combinations(self, kind, layout):
        cfg, ch, _ = near_case()
        with pytest.raises(InvalidArgumentError):
            baseline(kind, cfg, ch, layout)

    def test_dominance_on_small_scenarios(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            cfg = random_scenario(rng, 4, 8, M_a=2, near=True)
            ch = build_channels(cfg)
            r = {
                "active": baseline("active_irs", cfg, ch, IrsLayout.fully_active(8, cfg.beta_max)).rate,
                "fp": max_snr_fp(cfg, ch, IrsLayout.hybrid(8, 2, cfg.beta_max)).rate,
                "passive": baseline("passive_irs", cfg, ch, IrsLayout.passive(8)).rate,
                "none": baseline("no_irs", cfg, ch, IrsLayout.passive(8)).rate,
            }
            assert r["active"] >= r["fp"] - 1e-3
            assert r["fp"] >= r["passive"] - 1e-3
            assert r["passive"] >= r["none"] - 1e-3

    def test_names(self):
        assert BASELINES == ("no_irs", "random_phase", "passive_irs", "active_irs")
