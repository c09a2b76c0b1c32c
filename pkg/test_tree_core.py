"""
Unit tests for tree indexing, parameters and occupation binning.

Core claims:
    - node_parent inverts node_children; the root has no parent
    - ModelParams enforces beta > eps^2/2 except for exploratory runs
    - TreeProfile stores read-only generations of size 2^n
    - occupation_of_generation conserves particles and rejects off-grid input
    - snap_to_grid never increases the number of colliding pairs
"""

import numpy as np
import pytest
from pytest import approx

from action_functional import interaction_count
from tree_core import (
    BudgetExceeded,
    ModelAssumptionError,
    ModelParams,
    NodeId,
    NoParent,
    OccupationProfile,
    OffGrid,
    SRBRWError,
    TreeProfile,
    is_smooth,
    node_children,
    node_mirror,
    node_parent,
    occupation_of_generation,
    snap_to_grid,
)


def _profile_with_generation(values):
    """Depth-n profile whose last generation is `values`, earlier ones at 0"""
    n = int(np.log2(len(values)))
    gens = [np.zeros(1 << k) for k in range(n)] + [np.asarray(values, dtype=float)]
    return TreeProfile.from_generations(gens)


# == 1. Model parameters ==

class TestModelParams:

    def test_valid_params(self):
        p = ModelParams(N=3, beta=1.0, eps=1.0)
        assert p.penalty_threshold == approx(0.5)
        assert p.staircase_depth(1) == 2

    def test_rejects_weak_penalty(self):
        with pytest.raises(ModelAssumptionError):
            ModelParams(N=3, beta=0.4, eps=1.0)

    def test_threshold_itself_rejected(self):
        with pytest.raises(ModelAssumptionError):
            ModelParams(N=3, beta=0.5, eps=1.0)

    def test_rejects_bad_depth_and_range(self):
        with pytest.raises(ModelAssumptionError):
            ModelParams(N=0, beta=1.0, eps=1.0)
        with pytest.raises(ModelAssumptionError):
            ModelParams(N=2, beta=1.0, eps=0.0)

    def test_exploratory_admits_zero_beta(self):
        p = ModelParams.exploratory(N=2, beta=0.0, eps=1.0)
        assert p.beta == 0.0
        assert not p.assumption_checked

    def test_errors_share_a_base(self):
        assert issubclass(ModelAssumptionError, SRBRWError)
        assert issubclass(ModelAssumptionError, ValueError)
        err = BudgetExceeded("too big", state_space=12345)
        assert err.state_space == 12345

    def test_staircase_depth_range(self):
        p = ModelParams(N=3, beta=1.0, eps=1.0)
        assert p.staircase_depth(0) == 3
        with pytest.raises(ValueError):
            p.staircase_depth(3)


# == 2. Node ids ==

class TestNodeId:

    def test_parent_examples(self):
        assert node_parent(NodeId(3, 5)) == NodeId(2, 2)
        assert node_parent(NodeId(1, 1)) == NodeId(0, 0)

    def test_root_has_no_parent(self):
        with pytest.raises(NoParent):
            node_parent(NodeId(0, 0))

    @pytest.mark.parametrize("depth", [0, 1, 2, 5])
    def test_parent_of_children(self, depth):
        for index in range(1 << depth):
            node = NodeId(depth, index)
            for child in node_children(node):
                assert node_parent(child) == node

    def test_bits_most_significant_first(self):
        node = NodeId.from_bits([1, 0, 1])
        assert node == NodeId(3, 5)
        assert node.bits == (1, 0, 1)

    def test_mirror_flips_bits(self):
        assert node_mirror(NodeId(3, 5)).bits == (0, 1, 0)
        assert node_mirror(node_mirror(NodeId(4, 9))) == NodeId(4, 9)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            NodeId(2, 4)


# == 3. Tree profiles ==

class TestTreeProfile:

    def test_generation_sizes_enforced(self):
        with pytest.raises(ValueError):
            TreeProfile.from_generations([[0.0], [1.0]])

    def test_values_read_only(self):
        prof = TreeProfile.from_generations([[0.0], [-0.5, 0.5]])
        with pytest.raises(ValueError):
            prof.generation(1)[0] = 3.0

    def test_increments_and_lookup(self):
        prof = TreeProfile.from_generations([[0.0], [-1.0, 1.0], [-1.5, -0.5, 0.5, 2.0]])
        assert list(prof.increments(2)) == [-0.5, 0.5, -0.5, 1.0]
        assert prof.at(NodeId(2, 3)) == 2.0
        assert prof.reflected().at(NodeId(2, 3)) == -2.0

    def test_root_has_no_increment(self):
        prof = TreeProfile.from_generations([[0.0], [-1.0, 1.0]])
        with pytest.raises(NoParent):
            prof.increments(0)


# == 4. Occupation profiles ==

class TestOccupation:

    def test_one_per_site(self):
        p = ModelParams(N=2, beta=1.0, eps=1.0)
        occ = occupation_of_generation(_profile_with_generation([-1.5, -0.5, 0.5, 1.5]), 2, p)
        assert occ.as_list() == [1, 1, 1, 1]
        assert occ.half_integer

    def test_two_per_site(self):
        p = ModelParams(N=3, beta=1.0, eps=1.0)
        x = [-1.5, -1.5, -0.5, -0.5, 0.5, 0.5, 1.5, 1.5]
        occ = occupation_of_generation(_profile_with_generation(x), 3, p)
        assert occ.as_list() == [2, 2, 2, 2]
        assert list(occ.particle_positions(1.0)) == x

    def test_integer_lattice_detected(self):
        p = ModelParams(N=3, beta=2.0, eps=2.0 ** 0.5 + 0.1)
        eps = p.eps
        x = [-2 * eps, -eps, -eps, 0.0, 0.0, eps, eps, 2 * eps]
        occ = occupation_of_generation(_profile_with_generation(x), 3, p)
        assert occ.as_list() == [1, 2, 2, 2, 1]
        assert not occ.half_integer
        assert occ.site_positions(eps)[0] == approx(-2 * eps)

    def test_off_grid(self):
        p = ModelParams(N=1, beta=1.0, eps=1.0)
        with pytest.raises(OffGrid):
            occupation_of_generation(_profile_with_generation([0.3, 1.5]), 1, p)

    def test_tolerance_cap(self):
        p = ModelParams(N=1, beta=1.0, eps=1.0)
        with pytest.raises(ValueError):
            occupation_of_generation(_profile_with_generation([-0.5, 0.5]), 1, p, tol=0.3)

    def test_conservation_random(self):
        rng = np.random.default_rng(3)
        p = ModelParams(N=5, beta=1.0, eps=0.7)
        for _ in range(20):
            x = p.eps * (rng.integers(-6, 6, size=32) + 0.5)
            occ = occupation_of_generation(_profile_with_generation(x), 5, p)
            assert int(occ.counts.sum()) == 32

    def test_padding_rejected(self):
        with pytest.raises(ValueError):
            OccupationProfile(offset=0, counts=np.array([0, 2, 2]), generation=2)

    def test_conservation_enforced(self):
        with pytest.raises(ValueError):
            OccupationProfile(offset=0, counts=np.array([1, 1, 1]), generation=2)


# == 5. Grid helpers ==

class TestGridHelpers:

    def test_smoothness(self):
        assert is_smooth([1, 2, 2, 2, 1])
        assert not is_smooth([3, 1])
        assert not is_smooth([2, 2])

    def test_snap_never_increases_collisions(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            x = rng.normal(scale=3.0, size=16)
            assert interaction_count(snap_to_grid(x, 1.0), 1.0) <= interaction_count(x, 1.0)

    def test_snap_lands_on_half_integers(self):
        y = snap_to_grid([0.2, -0.2, 1.7], 1.0)
        assert list(y) == [0.5, -0.5, 1.5]
