"""
Admissible Profiles: staircase configurations and the optimal trajectory

Responsibility:
- Admissible shapes H_{r,d,n}: ramp 1..r, plateau of height r and width d, ramp r..1
- Grid minimiser (uniform split over 2^K sites) and the smooth restricted minimiser
- Staircase evolution between generations by monotone (quantile) transport
- The trajectory h*_r: Dirichlet phase to M = N - K, staircase phase to N
- Ranges along the trajectory and the choice of K

Centred shapes put site k of a range-L shape at eps*(k - (L-1)/2), so odd
ranges sit on eps*Z and even ranges on eps*(Z + 1/2).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from action_functional import (
    CostBreakdown,
    interaction_count,
    interaction_from_occupation,
    site_collisions,
    spreading_increment_cost,
)
from cost_asymptotics import total_cost_model
from dirichlet_solver import DirichletSolution, solve_recursive, standard_boundary
from tree_core import (
    DegenerateRegime,
    Infeasible,
    ModelParams,
    NotRepresentable,
    OccupationProfile,
    ShapeMismatch,
    TreeProfile,
    is_smooth,
)

logger = logging.getLogger(__name__)

# Largest Dirichlet phase solved node by node
DIRICHLET_SOLVE_CAP = 22
# Largest N for which the full tree profile is materialised
PROFILE_MATERIALISE_CAP = 20


# -- Shapes ------------------------------------------------------------------

def staircase_counts(r: int, d: int) -> List[int]:
    """[1..r, r repeated d times, r..1]"""
    ramp = list(range(1, r + 1))
    return ramp + [r] * d + ramp[::-1]


def centred_sites(L: int, eps: float = 1.0) -> np.ndarray:
    return eps * (np.arange(L) - (L - 1) / 2)


def centred_occupation(counts: Sequence[int], n: int) -> OccupationProfile:
    """OccupationProfile of a shape centred on 0"""
    L = len(counts)
    if L % 2 == 0:
        return OccupationProfile(offset=-(L // 2), counts=np.asarray(counts), generation=n)
    return OccupationProfile(offset=-((L - 1) // 2), counts=np.asarray(counts),
                             generation=n, half_integer=False)


@dataclass(frozen=True)
class AdmissibleShape:
    """
    Occupation shape of one generation

    counts defaults to the staircase of (r, d). The restricted minimiser may
    hand in a water-filled vector instead; `in_family` tells whether the
    shape is an exact H_{r,d,n}.
    """
    r: int
    d: int
    n: int
    counts: Tuple[int, ...] = field(default=None)
    lambda_star: Optional[float] = None

    def __post_init__(self):
        if self.counts is None:
            object.__setattr__(self, 'counts', tuple(staircase_counts(self.r, self.d)))
        counts = tuple(int(a) for a in self.counts)
        if sum(counts) != 1 << self.n:
            raise ValueError(f"shape holds {sum(counts)} particles, generation {self.n} needs {1 << self.n}")
        if not is_smooth(counts):
            raise ValueError(f"shape {counts} is not smooth")
        object.__setattr__(self, 'counts', counts)

    @property
    def L(self) -> int:
        return len(self.counts)

    @property
    def in_family(self) -> bool:
        return self.d >= 0 and list(self.counts) == staircase_counts(self.r, self.d)

    def occupation(self) -> OccupationProfile:
        return centred_occupation(self.counts, self.n)

    def site_positions(self, eps: float) -> np.ndarray:
        return centred_sites(self.L, eps)

    def interaction(self) -> int:
        return site_collisions(self.counts)


def build_admissible(r: int, n: int) -> AdmissibleShape:
    """H_{r,d,n} with d = 2^n/r - (r + 1)"""
    if r < 1 or (1 << n) % r != 0:
        raise NotRepresentable(f"r={r} does not divide 2^{n}")
    d = (1 << n) // r - (r + 1)
    if d < 0:
        raise NotRepresentable(f"r={r} too wide for generation {n} (d={d})")
    return AdmissibleShape(r=r, d=d, n=n)


def grid_minimiser(n: int, K: int, eps: float) -> OccupationProfile:
    """2^K centred sites holding 2^(n-K) particles each"""
    if not 0 <= K <= n:
        raise ValueError(f"need 0 <= K <= n, got K={K}, n={n}")
    return centred_occupation([1 << (n - K)] * (1 << K), n)


def restricted_minimiser(L: int, n: int) -> AdmissibleShape:
    """
    Minimise sum a(a-1) over smooth shapes on L sites holding 2^n particles

    Smoothness with zero padding caps site l at min(l, L+1-l); the convex
    objective is then minimised by filling every site to a common level,
    which lands on a_l = min((lambda*+1)/2, l, L+1-l) with
    lambda* = L - sqrt((L+1)^2 - 2^(n+2)). Leftover particles go to the
    most central plateau sites.
    """
    total = 1 << n
    if L < 1 or (L + 1) ** 2 < 4 * total:
        raise Infeasible(f"{total} particles do not fit smoothly on {L} sites")
    caps = np.minimum(np.arange(1, L + 1), np.arange(L, 0, -1))

    lo, hi = 0, int(caps.max())
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if int(np.minimum(caps, mid).sum()) <= total:
            lo = mid
        else:
            hi = mid - 1
    level = lo
    counts = np.minimum(caps, level)
    leftover = total - int(counts.sum())
    if leftover:
        eligible = np.flatnonzero(caps > level)
        centre = (L - 1) / 2
        eligible = eligible[np.argsort(np.abs(eligible - centre), kind='stable')]
        counts[eligible[:leftover]] += 1

    lambda_star = L - math.sqrt((L + 1) ** 2 - 4 * total)
    r = int(counts.max())
    return AdmissibleShape(r=r, d=L - 2 * r, n=n, counts=tuple(counts), lambda_star=lambda_star)


def smoothing_move_gain(counts: Sequence[int], site: int, direction: int) -> int:
    """
    Interaction drop when one particle moves from `site` to `site + direction`

    A step of size m = a_site - a_target yields 2(m - 1); sites outside the
    vector count as empty.
    """
    if direction not in (-1, 1):
        raise ValueError("direction must be -1 or +1")
    a = int(counts[site])
    if a < 1:
        raise ValueError(f"site {site} is empty")
    j = site + direction
    b = int(counts[j]) if 0 <= j < len(counts) else 0
    return 2 * (a - 1 - b)


# -- Transport ---------------------------------------------------------------

@dataclass(frozen=True)
class TransportMove:
    source: float
    displacement: float
    count: int


def monotone_transport(src_pos: Sequence[float], src_mass: Sequence[int],
                       tgt_pos: Sequence[float], tgt_mass: Sequence[int]
                       ) -> Tuple[List[TransportMove], float]:
    """
    Quadratic-cost matching of two sorted integer mass distributions

    Merges the cumulative mass functions and pairs equal quantiles; in one
    dimension this monotone coupling is optimal for any convex cost. Cost is
    1/2 sum count * displacement^2.
    """
    xs = np.asarray(src_pos, dtype=float)
    xt = np.asarray(tgt_pos, dtype=float)
    cws = np.cumsum(np.asarray(src_mass, dtype=np.int64))
    cwt = np.cumsum(np.asarray(tgt_mass, dtype=np.int64))
    if cws[-1] != cwt[-1]:
        raise ValueError(f"masses differ: {int(cws[-1])} vs {int(cwt[-1])}")

    qs = np.unique(np.concatenate((cws, cwt)))
    qs = qs[qs > 0]
    delta = np.diff(np.concatenate(([0], qs)))
    si = np.searchsorted(cws, qs, side='left')
    ti = np.searchsorted(cwt, qs, side='left')
    disp = xt[ti] - xs[si]

    cost = 0.5 * float(np.sum(delta * disp ** 2))
    moves = [TransportMove(float(xs[s]), float(x), int(m))
             for s, x, m in zip(si, disp, delta) if x != 0.0]
    return moves, cost


def predecessor_shape(target: AdmissibleShape) -> AdmissibleShape:
    """H_{r/2, d + r/2, n-1}, the staircase one generation earlier"""
    if not target.in_family or target.r % 2 or target.n < 1:
        raise ShapeMismatch(f"H_({target.r},{target.d},{target.n}) has no staircase predecessor")
    return AdmissibleShape(r=target.r // 2, d=target.d + target.r // 2, n=target.n - 1)


def statement_predecessor_defect(target: AdmissibleShape) -> int:
    """
    Particles missing from H_{r/2, d + r, n-1}, the wider predecessor form

    Equals -r^2/4: that shape holds r^2/4 particles too many.
    """
    half = target.r // 2
    held = half * (half + 1) + (target.d + target.r) * half
    return (1 << (target.n - 1)) - held


def evolve_forward(shape: AdmissibleShape, eps: float = 1.0,
                   target: Optional[AdmissibleShape] = None
                   ) -> Tuple[AdmissibleShape, List[TransportMove], float]:
    """
    Double every particle, then smooth into H_{2r, d - r, n+1}

    Returns the new shape, the moves of the monotone transport from the
    doubled shape and its spreading cost.
    """
    if not shape.in_family:
        raise ShapeMismatch(f"{shape.counts} is not a staircase shape")
    if shape.d < shape.r:
        raise ShapeMismatch(f"H_({shape.r},{shape.d},{shape.n}) has no staircase successor")
    if target is not None:
        before = predecessor_shape(target)
        if (before.r, before.d, before.n) != (shape.r, shape.d, shape.n):
            raise ShapeMismatch(f"input is not the predecessor of H_({target.r},{target.d},{target.n})")
    nxt = AdmissibleShape(r=2 * shape.r, d=shape.d - shape.r, n=shape.n + 1)

    doubled = [2 * a for a in shape.counts]
    moves, cost = monotone_transport(shape.site_positions(eps), doubled,
                                     nxt.site_positions(eps), nxt.counts)
    logger.debug("staircase n=%d -> %d: L %d -> %d, %d moves, cost %.6g",
                 shape.n, nxt.n, shape.L, nxt.L, len(moves), cost)
    return nxt, moves, cost


# -- Trajectory --------------------------------------------------------------

def staircase_occupations(N: int, K: int) -> List[AdmissibleShape]:
    """H_{2^(n-M), 2^M - 2^(n-M) - 1, n} for n = M..N, with M = N - K"""
    if not 0 <= K < N:
        raise ValueError(f"need 0 <= K < N, got K={K}, N={N}")
    M = N - K
    return [build_admissible(1 << (n - M), n) for n in range(M, N + 1)]


def range_sequence(N: int, K: int) -> List[int]:
    """L_n for n = M..N from L_{n-1} = L_n - r_n/2"""
    M = N - K
    ranges = [(1 << M) + (1 << K) - 1]
    for n in range(N, M, -1):
        ranges.append(ranges[-1] - (1 << (n - M)) // 2)
    return ranges[::-1]


def published_range_formula(N: int, K: int, n: int) -> float:
    """L_N - 2r_N + (1 - 2^-(N-n)) r_N/2 + 2^(-(N-n)+1) r_N"""
    r_N = 1 << K
    L_N = (1 << (N - K)) + r_N - 1
    shrink = 2.0 ** -(N - n)
    return L_N - 2 * r_N + (1 - shrink) * r_N / 2 + 2 * shrink * r_N


@dataclass(frozen=True)
class TrajectoryReport:
    """
    h*_r for r = 2^K: Dirichlet phase on T^(M), staircase phase from M to N

    shapes[i] and occupations[i] describe generation M + i; transport_moves[i]
    is the step from generation M + i to M + i + 1. profile is None above
    the materialisation cap.
    """
    params: ModelParams
    K: int
    M: int
    dirichlet_part: DirichletSolution
    shapes: Tuple[AdmissibleShape, ...]
    occupations: Tuple[OccupationProfile, ...]
    transport_moves: Tuple[Tuple[TransportMove, ...], ...]
    costs: CostBreakdown
    profile: Optional[TreeProfile] = None

    @property
    def r(self) -> int:
        return 1 << self.K

    @property
    def final_shape(self) -> AdmissibleShape:
        return self.shapes[-1]


def assign_children(parents: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Children of the k-th smallest parent take the (2k, 2k+1)-th smallest targets"""
    order = np.argsort(parents, kind='stable')
    children = np.empty(2 * parents.size)
    children[2 * order] = targets[0::2]
    children[2 * order + 1] = targets[1::2]
    return children


def build_trajectory(params: ModelParams, K: int) -> TrajectoryReport:
    """
    Build h*_r with r = 2^K and evaluate its cost generation by generation

    Args:
        params: model parameters; N sets the depth
        K: staircase length, 0 <= K < N (K = 0 is the pure Dirichlet profile)

    Returns:
        TrajectoryReport with the Dirichlet part, one shape and occupation per
        staircase generation, the transport moves and the CostBreakdown
    """
    if not 0 <= K < params.N:
        raise ValueError(f"need 0 <= K < N={params.N}, got {K}")
    N, eps = params.N, params.eps
    M = N - K
    if M > DIRICHLET_SOLVE_CAP:
        raise ValueError(f"Dirichlet phase M={M} above {DIRICHLET_SOLVE_CAP}; use staircase_occupations")

    dirichlet = solve_recursive(standard_boundary(M, eps))
    spr = [spreading_increment_cost(dirichlet.profile, n) for n in range(M)]
    inter = [interaction_count(dirichlet.profile.generation(n), eps) for n in range(1, M + 1)]

    shapes = [build_admissible(1, M)]
    moves_per_step = []
    for _ in range(K):
        nxt, moves, cost = evolve_forward(shapes[-1], eps)
        shapes.append(nxt)
        moves_per_step.append(tuple(moves))
        spr.append(cost)
        inter.append(interaction_from_occupation(nxt.occupation()))

    profile = None
    if N <= PROFILE_MATERIALISE_CAP:
        gens = list(dirichlet.profile.values)
        for shape in shapes[1:]:
            targets = np.repeat(shape.site_positions(eps), shape.counts)
            gens.append(assign_children(gens[-1], targets))
        profile = TreeProfile.from_generations(gens)

    costs = CostBreakdown.from_parts(spr, inter, params.beta)
    logger.info("trajectory N=%d K=%d: final L=%d, S_spr=%.6g, J=%d, S=%.6g",
                N, K, shapes[-1].L, costs.S_spr, costs.J, costs.S_total)
    return TrajectoryReport(params=params, K=K, M=M, dirichlet_part=dirichlet,
                            shapes=tuple(shapes),
                            occupations=tuple(s.occupation() for s in shapes),
                            transport_moves=tuple(moves_per_step),
                            costs=costs, profile=profile)


def optimal_K(params: ModelParams) -> Tuple[int, float]:
    """
    K minimising the cost model at r = 2^K, with r* = (3 eps^2/beta)^(1/3) 2^((N-4)/3)

    Ties go to the smaller K.
    """
    r_star = (3 * params.eps ** 2 / params.beta) ** (1 / 3) * 2.0 ** ((params.N - 4) / 3)
    if r_star < 1:
        raise DegenerateRegime(f"r* = {r_star:.4g} < 1 for N={params.N}, beta={params.beta}")
    values = [total_cost_model(2.0 ** K, params) for K in range(params.N)]
    best = min(range(params.N), key=lambda K: (values[K], K))
    return best, r_star
