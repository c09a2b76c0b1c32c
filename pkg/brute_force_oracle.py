"""
Brute-Force Oracle: exhaustive minimisation of the action on a lattice

Responsibility:
- Enumerate every generation as a sorted multiset of lattice sites
- Backward dynamic programme over generations (interaction depends on one
  generation, spreading on two consecutive ones through the monotone pairing)
- Prune states whose own interaction already exceeds the best snapped candidate
- Report all argmin profiles and check the structural claims on them

Sites are eps*(1/2 + m/q) for -window*q <= m <= (window-1)*q, a set closed
under reflection; the root stays at 0.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from action_functional import total_action
from admissible_profiles import assign_children, build_trajectory
from cost_asymptotics import hstarstar_profile
from tree_core import (
    BudgetExceeded,
    ModelParams,
    NotRepresentable,
    OffGrid,
    ShapeMismatch,
    TreeProfile,
    is_smooth,
    occupation_of_generation,
)

logger = logging.getLogger(__name__)

ORACLE_MAX_DEPTH = 4
DEFAULT_BUDGET = 10 ** 9
# States kept per generation after pruning
STATE_CAP = 2_000_000
MAX_ARGMIN = 64


@dataclass(frozen=True)
class OracleConfig:
    """
    params: model parameters; N = params.N
    window: half-width of the lattice in grid sites (default 2^(N-1))
    refine: q, lattice spacing eps/q
    budget: cap on parent/child state pairs evaluated
    """
    params: ModelParams
    window: Optional[int] = None
    refine: int = 1
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        N = self.params.N
        if N > ORACLE_MAX_DEPTH:
            raise ValueError(f"oracle runs up to N={ORACLE_MAX_DEPTH}, got {N}")
        if N == ORACLE_MAX_DEPTH and self.refine != 1:
            raise ValueError(f"N={N} is searched on the eps-grid only (refine=1)")
        if self.refine < 1:
            raise ValueError(f"refine must be >= 1, got {self.refine}")
        if self.window is None:
            object.__setattr__(self, 'window', 1 << (N - 1))
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")

    @property
    def N(self) -> int:
        return self.params.N

    def lattice_indices(self) -> np.ndarray:
        q = self.refine
        return np.arange(-self.window * q, (self.window - 1) * q + 1)

    def lattice(self) -> np.ndarray:
        return self.params.eps * (0.5 + self.lattice_indices() / self.refine)

    def search_space(self) -> int:
        """Unpruned number of (parent, child) multiset pairs"""
        P = len(self.lattice_indices())
        sizes = [1] + [math.comb(P + (1 << n) - 1, 1 << n) for n in range(1, self.N + 1)]
        return sum(a * b for a, b in zip(sizes, sizes[1:]))


@dataclass(frozen=True)
class OracleResult:
    """
    min_value: least action on the lattice
    argmin_states: per optimal path, the sorted positions of generations 0..N
    argmin_profiles: the same paths as tree profiles (monotone parent-child pairing)
    upper_bound: best snapped candidate action used for pruning
    """
    min_value: float
    argmin_states: Tuple[Tuple[np.ndarray, ...], ...]
    argmin_profiles: Tuple[TreeProfile, ...]
    lattice: np.ndarray
    transitions_evaluated: int
    states_per_generation: Tuple[int, ...]
    search_space: int
    upper_bound: float = math.inf
    candidates: Dict[str, float] = field(default_factory=dict)

    @property
    def candidate_gap(self) -> float:
        """(best candidate - min) / min"""
        if not self.candidates:
            return math.inf
        return (min(self.candidates.values()) - self.min_value) / self.min_value

    @property
    def final_counts(self) -> List[List[int]]:
        out = []
        for states in self.argmin_states:
            _, counts = np.unique(states[-1], return_counts=True)
            out.append([int(c) for c in counts])
        return out


def snap_to_lattice(values: np.ndarray, cfg: OracleConfig) -> np.ndarray:
    """Nearest lattice site, clipped to the window"""
    q, eps = cfg.refine, cfg.params.eps
    idx = cfg.lattice_indices()
    m = np.clip(np.rint((np.asarray(values) / eps - 0.5) * q), idx[0], idx[-1])
    return eps * (0.5 + m / q)


def _snap_profile(profile: TreeProfile, cfg: OracleConfig) -> TreeProfile:
    gens = [np.zeros(1)] + [snap_to_lattice(profile.generation(n), cfg)
                            for n in range(1, profile.depth + 1)]
    return TreeProfile.from_generations(gens)


def snapped_candidate_actions(cfg: OracleConfig) -> Dict[str, float]:
    """
    Action of every constructed configuration projected onto the lattice

    Keys are 'K=<k>' for the trajectories h*_(2^k) that exist at this N and
    'h**' when 3 divides N. Each value is the action of a lattice
    configuration, hence an upper bound on the oracle minimum.
    """
    params = cfg.params
    out = {}
    for K in range(params.N):
        try:
            report = build_trajectory(params, K)
        except (NotRepresentable, ShapeMismatch):
            continue
        out[f"K={K}"] = total_action(_snap_profile(report.profile, cfg), params).S_total
    if params.N % 3 == 0:
        out["h**"] = total_action(_snap_profile(hstarstar_profile(params), cfg), params).S_total
    return out


def _enumerate_states(P: int, size: int, q: int, max_pairs: float) -> np.ndarray:
    """
    Sorted index multisets of `size` sites from range(P) with at most
    `max_pairs` unordered pairs closer than q
    """
    out = []
    prefix = []

    def extend(start: int, pairs: int):
        if len(prefix) == size:
            out.append(tuple(prefix))
            if len(out) > STATE_CAP:
                raise BudgetExceeded(f"more than {STATE_CAP} states with {size} particles",
                                     state_space=math.comb(P + size - 1, size))
            return
        for m in range(start, P):
            close = sum(1 for p in prefix if m - p < q)
            if pairs + close > max_pairs:
                continue
            prefix.append(m)
            extend(m, pairs + close)
            prefix.pop()

    extend(0, 0)
    return np.array(out, dtype=np.int64).reshape(len(out), size)


def _interaction(states: np.ndarray, q: int) -> np.ndarray:
    """Ordered colliding pairs per state, exact on lattice indices"""
    diff = np.abs(states[:, :, None] - states[:, None, :])
    return (diff < q).sum(axis=(1, 2)) - states.shape[1]


def _pair_costs(parent: np.ndarray, children: np.ndarray) -> np.ndarray:
    """1/2 sum (child - parent)^2 with child pairs (2k, 2k+1) on the k-th parent"""
    return 0.5 * np.sum((children - np.repeat(parent, 2)[None, :]) ** 2, axis=1)


def brute_force_min_action(cfg: OracleConfig) -> OracleResult:
    """
    Least action over all configurations on the refined lattice

    Args:
        cfg: lattice refinement, window and model parameters (N <= 4)

    Returns:
        OracleResult holding the minimum, every optimal path and the pruning
        bound taken from the snapped candidates
    """
    params = cfg.params
    N, beta, q = params.N, params.beta, cfg.refine
    sites = cfg.lattice()
    P = sites.size

    candidates = snapped_candidate_actions(cfg)
    upper = min(candidates.values()) if candidates else math.inf
    tol = 1e-9 * max(1.0, abs(upper)) if math.isfinite(upper) else 0.0
    max_pairs = math.inf if beta == 0 or not math.isfinite(upper) else (upper + tol) / (2 * beta)
    logger.info("oracle N=%d q=%d window=%d: %d sites, unpruned search space %d, bound %.6g",
                N, q, cfg.window, P, cfg.search_space(), upper)

    index_states = [np.zeros((1, 1), dtype=np.int64)]
    for n in range(1, N + 1):
        index_states.append(_enumerate_states(P, 1 << n, q, max_pairs))
    sizes = [len(s) for s in index_states]
    pairs = sum(a * b for a, b in zip(sizes, sizes[1:]))
    if pairs > cfg.budget:
        raise BudgetExceeded(f"{pairs} transitions exceed the budget {cfg.budget}", state_space=pairs)
    logger.info("oracle states per generation %s, %d transitions", sizes, pairs)

    positions = [np.zeros((1, 1))] + [sites[s] for s in index_states[1:]]
    penalty = [np.zeros(1)] + [beta * _interaction(s, q) for s in index_states[1:]]

    value = [None] * (N + 1)
    value[N] = penalty[N]
    for n in range(N - 1, -1, -1):
        best = np.array([np.min(_pair_costs(p, positions[n + 1]) + value[n + 1])
                         for p in positions[n]])
        value[n] = penalty[n] + best
    min_value = float(value[0][0])

    # Forward pass: every path that attains the minimum, in lexicographic order
    paths: List[List[int]] = []
    atol = 1e-9 * max(1.0, abs(min_value))

    def follow(n: int, k: int, trail: List[int]):
        if len(paths) >= MAX_ARGMIN:
            return
        if n == N:
            paths.append(trail)
            return
        total = penalty[n][k] + _pair_costs(positions[n][k], positions[n + 1]) + value[n + 1]
        for j in np.flatnonzero(total <= value[n][k] + atol):
            follow(n + 1, int(j), trail + [int(j)])

    follow(0, 0, [0])
    argmin_states = tuple(tuple(positions[n][k] for n, k in enumerate(path)) for path in paths)
    profiles = []
    for states in argmin_states:
        gens = [np.zeros(1)]
        for n in range(1, N + 1):
            gens.append(assign_children(gens[-1], states[n]))
        profiles.append(TreeProfile.from_generations(gens))

    logger.info("oracle minimum %.9g over %d optimal paths (best candidate %.9g)",
                min_value, len(paths), upper)
    return OracleResult(min_value=min_value, argmin_states=argmin_states,
                        argmin_profiles=tuple(profiles), lattice=sites,
                        transitions_evaluated=pairs, states_per_generation=tuple(sizes),
                        search_space=cfg.search_space(), upper_bound=upper,
                        candidates=candidates)


@dataclass(frozen=True)
class StructuralReport:
    grid_supported: bool
    smooth: bool
    range_bounded_by_final: bool
    final_counts: Optional[Tuple[int, ...]] = None

    @property
    def all_hold(self) -> bool:
        return self.grid_supported and self.smooth and self.range_bounded_by_final


def verify_structural_claims(argmin: TreeProfile, params: ModelParams) -> StructuralReport:
    """
    Final generation on one eps-lattice, its occupations smooth, and no
    earlier generation wider than the last
    """
    N = argmin.depth
    try:
        occ = occupation_of_generation(argmin, N, params)
    except OffGrid:
        occ = None
    ranges = [float(np.ptp(argmin.generation(n))) for n in range(N + 1)]
    bounded = all(r <= ranges[-1] + 1e-12 * params.eps for r in ranges)
    if occ is None:
        return StructuralReport(grid_supported=False, smooth=False, range_bounded_by_final=bounded)
    counts = tuple(occ.as_list())
    return StructuralReport(grid_supported=True, smooth=is_smooth(counts),
                            range_bounded_by_final=bounded, final_counts=counts)
