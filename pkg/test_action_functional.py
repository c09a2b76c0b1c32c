"""
Unit tests for the action functional.

Core claims:
    - W_n matches hand values for symmetric and degenerate splits
    - Collisions use a strict inequality: distance exactly eps is free
    - Sort-then-window counting agrees with the pairwise reference
    - Occupation-based counts agree with position-based counts on the grid
    - CostBreakdown totals are the sums of their per-generation parts
"""

import numpy as np
import pytest
from pytest import approx

from action_functional import (
    CostBreakdown,
    interaction_count,
    interaction_count_bruteforce,
    interaction_from_occupation,
    interaction_per_generation,
    site_collisions,
    spreading_increment_cost,
    total_action,
)
from tree_core import ModelParams, OccupationProfile, TreeProfile


def _occ(counts, n):
    return OccupationProfile(offset=0, counts=np.array(counts), generation=n)


# == 1. Spreading term ==

class TestSpreading:

    @pytest.mark.parametrize("eps", [1.0, 0.3, 2.5])
    def test_symmetric_split(self, eps):
        prof = TreeProfile.from_generations([[0.0], [-eps / 2, eps / 2]])
        assert spreading_increment_cost(prof, 0) == approx(eps ** 2 / 4)

    def test_children_on_parent(self):
        prof = TreeProfile.from_generations([[0.0], [0.0, 0.0]])
        assert spreading_increment_cost(prof, 0) == 0.0

    def test_one_child_moves(self):
        prof = TreeProfile.from_generations([[0.0], [0.0, 1.0]])
        assert spreading_increment_cost(prof, 0) == approx(0.5)

    def test_generation_out_of_range(self):
        prof = TreeProfile.from_generations([[0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            spreading_increment_cost(prof, 1)


# == 2. Interaction counts ==

class TestInteractionCount:

    @pytest.mark.parametrize("n", [0, 1, 3, 5])
    def test_all_at_one_point(self, n):
        m = 1 << n
        assert interaction_count(np.zeros(m), 1.0) == m * (m - 1)

    def test_staircase_counts(self):
        occ = _occ([1, 2, 2, 2, 1], 3)
        assert interaction_count(occ.particle_positions(1.0), 1.0) == 6
        assert interaction_from_occupation(occ) == 6

    def test_single_particle(self):
        assert interaction_count([0.7], 1.0) == 0

    def test_distance_eps_is_free(self):
        assert interaction_count([-0.5, 0.5], 1.0) == 0
        assert interaction_count([0.0, 0.999], 1.0) == 2

    def test_uniform_occupation(self):
        assert interaction_from_occupation(_occ([2, 2, 2, 2], 3)) == 8
        assert interaction_from_occupation(_occ([1] * 8, 3)) == 0

    @pytest.mark.parametrize("n", [34, 40])
    def test_crowded_site_is_exact(self, n):
        a = 1 << n
        assert interaction_from_occupation(_occ([a], n)) == a * (a - 1)
        assert interaction_from_occupation(_occ([a >> 1, a >> 1], n)) == 2 * (a >> 1) * ((a >> 1) - 1)
        assert site_collisions([a]) > 0

    def test_matches_bruteforce_random(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            x = rng.normal(scale=2.0, size=rng.integers(1, 64))
            assert interaction_count(x, 0.8) == interaction_count_bruteforce(x, 0.8)

    def test_occupation_matches_positions_random(self):
        rng = np.random.default_rng(8)
        eps = 0.37
        for _ in range(50):
            counts = rng.integers(0, 5, size=rng.integers(1, 10))
            counts[0] = max(counts[0], 1)
            counts[-1] = max(counts[-1], 1)
            positions = eps * (np.repeat(np.arange(counts.size), counts) + 0.5)
            expected = sum(int(a) * (int(a) - 1) for a in counts)
            assert interaction_count(positions, eps) == expected
            assert interaction_count_bruteforce(positions, eps) == expected

    def test_merging_never_decreases(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            x = np.floor(rng.normal(scale=2.0, size=15)) + 0.5
            loner = np.append(x, 100.5)
            merged = np.append(x, x[rng.integers(0, 15)])
            assert interaction_count(merged, 1.0) >= interaction_count(loner, 1.0)


# == 3. Total action ==

class TestTotalAction:

    def test_children_together(self):
        p = ModelParams(N=1, beta=1.5, eps=1.0)
        cost = total_action(TreeProfile.from_generations([[0.0], [0.0, 0.0]]), p)
        assert cost.S_spr == 0.0
        assert cost.J == 2
        assert cost.S_total == approx(3.0)

    def test_children_split(self):
        p = ModelParams(N=1, beta=1.5, eps=1.0)
        cost = total_action(TreeProfile.from_generations([[0.0], [-0.5, 0.5]]), p)
        assert cost.J == 0
        assert cost.S_total == approx(0.25)

    def test_two_generations_collapsed(self):
        p = ModelParams(N=2, beta=2.0, eps=1.0)
        prof = TreeProfile.from_generations([[0.0], [0.0, 0.0], [0.0] * 4])
        cost = total_action(prof, p)
        assert cost.interaction_per_gen == (2, 12)
        assert cost.J == 14
        assert cost.S_total == approx(28.0)

    def test_depth_mismatch(self):
        p = ModelParams(N=2, beta=2.0, eps=1.0)
        with pytest.raises(ValueError):
            total_action(TreeProfile.from_generations([[0.0], [0.0, 0.0]]), p)

    def test_additivity(self):
        rng = np.random.default_rng(21)
        gens = [np.zeros(1)] + [rng.normal(size=1 << n) for n in range(1, 6)]
        p = ModelParams(N=5, beta=1.0, eps=0.5)
        cost = total_action(TreeProfile.from_generations(gens), p)
        assert cost.J == sum(cost.interaction_per_gen)
        assert cost.S_spr == approx(sum(cost.spr_per_gen), rel=1e-12)
        assert all(i % 2 == 0 for i in cost.interaction_per_gen)
        assert list(cost.interaction_per_gen) == interaction_per_generation(
            TreeProfile.from_generations(gens), 0.5)

    def test_breakdown_dict(self):
        cost = CostBreakdown.from_parts([0.25, 1.0], [0, 6], beta=2.0)
        d = cost.as_dict()
        assert d['J'] == 6
        assert d['S_total'] == approx(13.25)
