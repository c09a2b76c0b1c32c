"""
Unit tests for the lattice oracle.

Core claims:
    - One generation splits to +-eps/2 at cost eps^2/4
    - Strong repulsion spreads two generations over four sites
    - Argmin final generations are grid-supported and smooth
    - A finer lattice never raises the minimum
    - The argmin set is closed under reflection
    - Constructed candidates bound the minimum from above
"""

import numpy as np
import pytest
from pytest import approx

from action_functional import total_action
from brute_force_oracle import (
    OracleConfig,
    brute_force_min_action,
    snap_to_lattice,
    snapped_candidate_actions,
    verify_structural_claims,
)
from tree_core import BudgetExceeded, ModelParams, TreeProfile


def _final_sets(result):
    return {tuple(np.round(states[-1], 9)) for states in result.argmin_states}


# == 1. Configuration ==

class TestOracleConfig:

    def test_default_window(self):
        cfg = OracleConfig(ModelParams(N=3, beta=1.0, eps=1.0))
        assert cfg.window == 4
        assert list(cfg.lattice()) == [-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5]

    def test_refined_lattice_symmetric(self):
        cfg = OracleConfig(ModelParams(N=1, beta=1.0, eps=1.0), window=2, refine=2)
        sites = cfg.lattice()
        np.testing.assert_allclose(sites, -sites[::-1])
        assert 0.0 in sites and 0.5 in sites

    @pytest.mark.parametrize("N,refine,window", [(5, 1, None), (4, 2, None), (2, 0, None), (2, 1, 0)])
    def test_rejects(self, N, refine, window):
        with pytest.raises(ValueError):
            OracleConfig(ModelParams(N=N, beta=1.0, eps=1.0), window=window, refine=refine)

    def test_snap_clips_to_window(self):
        cfg = OracleConfig(ModelParams(N=2, beta=1.0, eps=1.0))
        assert list(snap_to_lattice([0.2, 7.0, -0.9], cfg)) == [0.5, 1.5, -0.5]


# == 2. Minima ==

class TestMinimum:

    def test_one_generation(self):
        cfg = OracleConfig(ModelParams(N=1, beta=1.0, eps=1.0), window=2, refine=2)
        result = brute_force_min_action(cfg)
        assert result.min_value == approx(0.25)
        assert _final_sets(result) == {(-0.5, 0.5)}

    def test_strong_repulsion_spreads(self):
        cfg = OracleConfig(ModelParams(N=2, beta=10.0, eps=1.0), window=3)
        result = brute_force_min_action(cfg)
        assert result.min_value == approx(1.25)
        assert all(c == [1, 1, 1, 1] for c in result.final_counts)

    def test_three_generations(self):
        params = ModelParams(N=3, beta=1.0, eps=1.0)
        result = brute_force_min_action(OracleConfig(params))
        for counts in result.final_counts:
            assert counts in ([1] * 8, [1, 2, 2, 2, 1])
        for profile in result.argmin_profiles:
            assert total_action(profile, params).S_total == approx(result.min_value)
            assert verify_structural_claims(profile, params).all_hold
        assert result.min_value <= min(result.candidates.values()) + 1e-9
        assert result.candidate_gap >= -1e-12

    def test_refined_three_generations(self):
        params = ModelParams(N=3, beta=1.0, eps=1.0)
        coarse = brute_force_min_action(OracleConfig(params, refine=1))
        fine = brute_force_min_action(OracleConfig(params, refine=2))
        assert fine.min_value <= coarse.min_value + 1e-12
        assert fine.candidate_gap <= 0.05
        for profile in fine.argmin_profiles:
            report = verify_structural_claims(profile, params)
            assert report.grid_supported and report.smooth

    def test_refinement_never_raises_minimum(self):
        params = ModelParams(N=2, beta=10.0, eps=1.0)
        coarse = brute_force_min_action(OracleConfig(params, window=2, refine=1))
        fine = brute_force_min_action(OracleConfig(params, window=2, refine=2))
        assert fine.min_value <= coarse.min_value + 1e-12

    @pytest.mark.parametrize("N,beta", [(1, 1.0), (2, 10.0), (2, 1.0)])
    def test_reflection_closed(self, N, beta):
        result = brute_force_min_action(OracleConfig(ModelParams(N=N, beta=beta, eps=1.0)))
        finals = _final_sets(result)
        assert {tuple(np.round(sorted(-np.array(s)), 9)) for s in finals} == finals

    def test_budget(self):
        cfg = OracleConfig(ModelParams(N=4, beta=1.0, eps=1.0), window=2, budget=10)
        with pytest.raises(BudgetExceeded) as err:
            brute_force_min_action(cfg)
        assert err.value.state_space > 10

    def test_search_space_reported(self):
        cfg = OracleConfig(ModelParams(N=2, beta=1.0, eps=1.0), window=2)
        result = brute_force_min_action(cfg)
        assert result.search_space == cfg.search_space() >= result.transitions_evaluated


# == 3. Candidates ==

class TestCandidates:

    def test_keys(self):
        cfg = OracleConfig(ModelParams(N=3, beta=1.0, eps=1.0))
        assert set(snapped_candidate_actions(cfg)) == {"K=0", "K=1", "h**"}

    def test_no_h_star_star_off_multiples_of_three(self):
        cfg = OracleConfig(ModelParams(N=2, beta=1.0, eps=1.0))
        assert set(snapped_candidate_actions(cfg)) == {"K=0"}


# == 4. Structural claims ==

class TestStructuralClaims:

    def test_step_of_two_not_smooth(self):
        params = ModelParams(N=2, beta=1.0, eps=1.0)
        prof = TreeProfile.from_generations([[0.0], [0.5, 0.5], [0.5, 0.5, 0.5, 1.5]])
        report = verify_structural_claims(prof, params)
        assert report.grid_supported
        assert report.final_counts == (3, 1)
        assert not report.smooth
        assert not report.all_hold

    def test_off_grid(self):
        params = ModelParams(N=1, beta=1.0, eps=1.0)
        prof = TreeProfile.from_generations([[0.0], [0.3, 0.5]])
        assert not verify_structural_claims(prof, params).grid_supported

    def test_early_generation_too_wide(self):
        params = ModelParams(N=2, beta=1.0, eps=1.0)
        prof = TreeProfile.from_generations([[0.0], [-3.0, 3.0], [-0.5, 0.5, -1.5, 1.5]])
        assert not verify_structural_claims(prof, params).range_bounded_by_final

    def test_strong_repulsion_claims(self):
        params = ModelParams(N=2, beta=10.0, eps=1.0)
        result = brute_force_min_action(OracleConfig(params, window=3))
        for profile in result.argmin_profiles:
            assert verify_structural_claims(profile, params).all_hold
