"""
Metropolis Sampler: the tilted branching random walk at small depth

Responsibility:
- Chain state on tree increments with a cached action
- Subtree-rigid Gaussian proposals accepted with min(1, exp(-dS))
- Thinned chain runs and empirical final-generation profiles
- Monte Carlo partition function under the untilted walk, with error bars
- The exact one-generation partition function and a finite detailed-balance kernel

The sampler explores the tilted law; nothing here claims it concentrates on
the minimisers. Positions are continuous, so collisions use the strict
|x - y| < eps with no rounding band (rtol=0).
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import erf

from action_functional import CostBreakdown, interaction_count, total_action
from admissible_profiles import build_trajectory
from tree_core import (
    ModelParams,
    NotRepresentable,
    ShapeMismatch,
    TreeProfile,
    is_smooth,
    snap_to_grid,
)

logger = logging.getLogger(__name__)

MIN_PARTITION_SAMPLES = 1000
BURN_IN_PER_NODE = 10_000
PARTITION_CHUNK = 100_000


def acceptance_probability(delta_S: float) -> float:
    return 1.0 if delta_S <= 0 else math.exp(-delta_S)


def _node_count(N: int) -> int:
    """Non-root nodes of T^(N)"""
    return (1 << (N + 1)) - 2


# -- Chain state -------------------------------------------------------------

@dataclass
class ChainState:
    """
    increments[n-1]: a(z) for the 2^n nodes of generation n
    positions[n]: X(n), prefix sums of the increments along each ancestry
    action: cached CostBreakdown of the current configuration
    """
    increments: List[np.ndarray]
    positions: List[np.ndarray]
    action: CostBreakdown
    rng: np.random.Generator = field(repr=False)

    @classmethod
    def from_increments(cls, increments: Sequence[Sequence[float]], params: ModelParams,
                        rng: np.random.Generator) -> "ChainState":
        inc = [np.array(a, dtype=float) for a in increments]
        if len(inc) != params.N:
            raise ValueError(f"need increments for generations 1..{params.N}, got {len(inc)}")
        positions = [np.zeros(1)]
        for n, a in enumerate(inc, start=1):
            if a.size != 1 << n:
                raise ValueError(f"generation {n} needs {1 << n} increments, got {a.size}")
            positions.append(np.repeat(positions[-1], 2) + a)
        spr = [0.5 * float(np.dot(a, a)) for a in inc]
        inter = [interaction_count(x, params.eps, rtol=0.0) for x in positions[1:]]
        return cls(increments=inc, positions=positions,
                   action=CostBreakdown.from_parts(spr, inter, params.beta), rng=rng)

    @classmethod
    def sample_brw(cls, params: ModelParams, seed: Optional[int]) -> "ChainState":
        """Start from one draw of the untilted walk"""
        rng = np.random.default_rng(seed)
        inc = [rng.standard_normal(1 << n) for n in range(1, params.N + 1)]
        return cls.from_increments(inc, params, rng)

    def profile(self) -> TreeProfile:
        """Tree profile rebuilt from the increments"""
        gens = [np.zeros(1)]
        for a in self.increments:
            gens.append(np.repeat(gens[-1], 2) + a)
        return TreeProfile.from_generations(gens)


def metropolis_step(state: ChainState, params: ModelParams, proposal_sigma: float) -> ChainState:
    """
    Perturb one increment, moving its whole subtree, and accept with min(1, exp(-dS))

    Returns a new state on acceptance and `state` itself on rejection.
    """
    if proposal_sigma <= 0:
        raise ValueError(f"proposal_sigma must be positive, got {proposal_sigma}")
    rng = state.rng
    N, eps, beta = params.N, params.eps, params.beta

    t = int(rng.integers(0, _node_count(N)))
    n = (t + 2).bit_length() - 1
    i = t + 2 - (1 << n)
    delta = proposal_sigma * rng.standard_normal()
    log_u = math.log1p(-rng.random())

    a_old = state.increments[n - 1]
    a_new = a_old.copy()
    a_new[i] += delta

    positions = list(state.positions)
    inter = list(state.action.interaction_per_gen)
    old_inter = sum(inter[n - 1:])
    for m in range(n, N + 1):
        width = 1 << (m - n)
        x = positions[m].copy()
        x[i * width:(i + 1) * width] += delta
        positions[m] = x
        inter[m - 1] = interaction_count(x, eps, rtol=0.0)

    spr = list(state.action.spr_per_gen)
    spr[n - 1] = 0.5 * float(np.dot(a_new, a_new))
    delta_S = spr[n - 1] - state.action.spr_per_gen[n - 1] + beta * (sum(inter[n - 1:]) - old_inter)
    if log_u > -delta_S:
        return state

    increments = list(state.increments)
    increments[n - 1] = a_new
    return ChainState(increments=increments, positions=positions,
                      action=CostBreakdown.from_parts(spr, inter, beta), rng=rng)


@dataclass(frozen=True)
class ChainRun:
    """Thinned samples of the final generation after burn-in"""
    samples: np.ndarray
    actions: np.ndarray
    acceptance_rate: float
    final_state: ChainState
    burn_in: int
    thin: int


def run_chain(params: ModelParams, n_steps: int, seed: Optional[int],
              burn_in: Optional[int] = None, thin: Optional[int] = None,
              proposal_sigma: float = 1.0, initial: Optional[ChainState] = None) -> ChainRun:
    """
    Burn in, then keep every `thin`-th state over `n_steps` further steps

    Args:
        params: model parameters (use ModelParams.exploratory for beta <= eps^2/2)
        n_steps: steps after burn-in
        seed: seed of the chain's generator
        burn_in: defaults to 10^4 steps per node
        thin: defaults to the number of nodes
        proposal_sigma: standard deviation of the subtree shift
        initial: start state; an untilted walk when omitted

    Returns:
        ChainRun with the kept final-generation samples, their actions and
        the acceptance rate
    """
    nodes = _node_count(params.N)
    burn_in = BURN_IN_PER_NODE * nodes if burn_in is None else burn_in
    thin = nodes if thin is None else thin
    if thin < 1 or n_steps < thin:
        raise ValueError(f"need 1 <= thin <= n_steps, got thin={thin}, n_steps={n_steps}")
    state = initial if initial is not None else ChainState.sample_brw(params, seed)

    for _ in range(burn_in):
        state = metropolis_step(state, params, proposal_sigma)

    accepted = 0
    samples, actions = [], []
    for step in range(1, n_steps + 1):
        nxt = metropolis_step(state, params, proposal_sigma)
        accepted += nxt is not state
        state = nxt
        if step % thin == 0:
            samples.append(state.positions[-1].copy())
            actions.append(state.action.S_total)

    rate = accepted / n_steps
    logger.info("chain N=%d beta=%g: %d steps after %d burn-in, acceptance %.3f, %d samples",
                params.N, params.beta, n_steps, burn_in, rate, len(samples))
    return ChainRun(samples=np.array(samples), actions=np.array(actions),
                    acceptance_rate=rate, final_state=state, burn_in=burn_in, thin=thin)


# -- Empirical profile -------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalProfile:
    """
    Exploratory summary of sampled final generations

    site_histogram maps grid index k (site eps(k + 1/2)) to its mean count.
    trajectory_counts is the final shape of the cheapest constructed
    trajectory at these parameters.
    """
    n_samples: int
    mean_range: float
    range_std: float
    site_histogram: Dict[int, float]
    smooth_fraction: float
    modal_counts: Tuple[int, ...]
    trajectory_counts: Tuple[int, ...]

    @property
    def matches_trajectory(self) -> bool:
        return self.modal_counts == self.trajectory_counts


def _best_trajectory_counts(params: ModelParams) -> Tuple[int, ...]:
    best = None
    for K in range(params.N):
        try:
            report = build_trajectory(params, K)
        except (NotRepresentable, ShapeMismatch):
            continue
        if best is None or report.costs.S_total < best.costs.S_total:
            best = report
    return best.final_shape.counts


def empirical_profile(run: ChainRun, params: ModelParams) -> EmpiricalProfile:
    eps = params.eps
    ranges = np.ptp(run.samples, axis=1)
    histogram: Counter = Counter()
    shapes: Counter = Counter()
    smooth = 0
    for x in run.samples:
        k = np.rint(snap_to_grid(x, eps) / eps - 0.5).astype(np.int64)
        counts = np.bincount(k - k.min())
        for site, c in zip(range(int(k.min()), int(k.max()) + 1), counts):
            histogram[site] += int(c)
        shape = tuple(int(c) for c in counts)
        shapes[shape] += 1
        smooth += is_smooth(shape)
    total = len(run.samples)
    return EmpiricalProfile(
        n_samples=total,
        mean_range=float(ranges.mean()),
        range_std=float(ranges.std()),
        site_histogram={site: c / total for site, c in sorted(histogram.items())},
        smooth_fraction=smooth / total,
        modal_counts=shapes.most_common(1)[0][0],
        trajectory_counts=_best_trajectory_counts(params),
    )


# -- Partition function ------------------------------------------------------

@dataclass(frozen=True)
class ChainEstimate:
    """Z_hat with its standard error; std_err is 0 when every weight coincides"""
    Z_hat: float
    std_err: float
    n_samples: int


@dataclass(frozen=True)
class CollisionEstimate:
    mean_J: float
    std_err: float
    n_samples: int
    typical_order: float


def _batch_interaction(x: np.ndarray, eps: float) -> np.ndarray:
    """Ordered colliding pairs for each row of x"""
    x = np.sort(x, axis=1)
    total = np.zeros(x.shape[0], dtype=np.int64)
    for k in range(1, x.shape[1]):
        close = (x[:, k:] - x[:, :-k]) < eps
        if not close.any():
            break
        total += close.sum(axis=1)
    return 2 * total


def _sample_collisions(N: int, eps: float, n_samples: int, seed: Optional[int]) -> np.ndarray:
    """J for n_samples independent untilted walks"""
    rng = np.random.default_rng(seed)
    out = np.empty(n_samples, dtype=np.int64)
    for start in range(0, n_samples, PARTITION_CHUNK):
        c = min(PARTITION_CHUNK, n_samples - start)
        x = np.zeros((c, 1))
        J = np.zeros(c, dtype=np.int64)
        for n in range(1, N + 1):
            x = np.repeat(x, 2, axis=1) + rng.standard_normal((c, 1 << n))
            J += _batch_interaction(x, eps)
        out[start:start + c] = J
    return out


def estimate_partition(params: ModelParams, n_samples: int, seed: Optional[int]) -> ChainEstimate:
    """
    Z_hat = mean of exp(-beta J) over untilted walks

    Args:
        params: model parameters
        n_samples: at least 1000 walks, drawn in chunks
        seed: seed of the sampling generator

    Returns:
        ChainEstimate with the sample mean and its standard error
    """
    if n_samples < MIN_PARTITION_SAMPLES:
        raise ValueError(f"need at least {MIN_PARTITION_SAMPLES} samples, got {n_samples}")
    w = np.exp(-params.beta * _sample_collisions(params.N, params.eps, n_samples, seed))
    est = ChainEstimate(Z_hat=float(w.mean()), std_err=float(w.std(ddof=1) / math.sqrt(n_samples)),
                        n_samples=n_samples)
    logger.info("partition N=%d beta=%g eps=%g: Z_hat=%.6g +- %.2g",
                params.N, params.beta, params.eps, est.Z_hat, est.std_err)
    return est


def exact_partition_one_generation(beta: float, eps: float) -> float:
    """1 - (1 - e^(-2 beta)) P(|G| < eps), G ~ N(0, 2) the sibling difference"""
    return 1.0 - (1.0 - math.exp(-2 * beta)) * float(erf(eps / 2))


def merge_estimates(estimates: Sequence[ChainEstimate]) -> ChainEstimate:
    """Inverse-variance weighted mean; exact (zero-error) estimates take precedence"""
    if not estimates:
        raise ValueError("nothing to merge")
    n = sum(e.n_samples for e in estimates)
    exact = [e for e in estimates if e.std_err == 0]
    if exact:
        return ChainEstimate(Z_hat=float(np.mean([e.Z_hat for e in exact])), std_err=0.0, n_samples=n)
    w = np.array([1 / e.std_err ** 2 for e in estimates])
    z = np.array([e.Z_hat for e in estimates])
    return ChainEstimate(Z_hat=float(np.dot(w, z) / w.sum()), std_err=float(1 / math.sqrt(w.sum())),
                         n_samples=n)


def mean_collision_time(N: int, eps: float, n_samples: int, seed: Optional[int]) -> CollisionEstimate:
    """E[J] under the untilted walk, next to the typical order eps 2^(2N) / N"""
    J = _sample_collisions(N, eps, n_samples, seed).astype(float)
    return CollisionEstimate(mean_J=float(J.mean()), std_err=float(J.std(ddof=1) / math.sqrt(n_samples)),
                             n_samples=n_samples, typical_order=eps * 4.0 ** N / N)


# -- Finite kernel -----------------------------------------------------------

def lattice_kernel(params: ModelParams, lattice: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Transition matrix and target law for one generation on a finite lattice

    States are the increment pairs (a_0, a_1) on the lattice. A step picks a
    child uniformly and proposes one of the other lattice values uniformly,
    accepted with acceptance_probability.
    """
    if params.N != 1:
        raise ValueError("the finite kernel is built for N=1")
    values = np.asarray(lattice, dtype=float)
    L = values.size
    if L < 2:
        raise ValueError("lattice needs at least two points")
    states = [(i, j) for i in range(L) for j in range(L)]
    index = {s: k for k, s in enumerate(states)}
    S = np.array([total_action(TreeProfile.from_generations([[0.0], [values[i], values[j]]]),
                               params).S_total for i, j in states])

    P = np.zeros((len(states), len(states)))
    for k, (i, j) in enumerate(states):
        for child in (0, 1):
            for v in range(L):
                if v == (i, j)[child]:
                    continue
                target = (v, j) if child == 0 else (i, v)
                P[k, index[target]] += 0.5 / (L - 1) * acceptance_probability(S[index[target]] - S[k])
        P[k, k] = 1.0 - P[k].sum()

    pi = np.exp(-(S - S.min()))
    return P, pi / pi.sum()
