"""
Tree Core: indexing and configuration types for the self-repellent BRW
Shared by every other module of the profile toolkit

Responsibility:
- Model parameters (N, beta, eps) and the standing assumption beta > eps^2/2
- Binary-tree node ids with z_1 as the most significant bit
- Position profiles on the truncated tree T^(N)
- Occupation profiles on the eps-grid, one generation at a time
- The error values raised across the package

Grid convention: site k sits at eps*(k + 1/2). Centred shapes of odd range
use the shifted lattice eps*k instead; OccupationProfile records which.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


# -- Errors ------------------------------------------------------------------

class SRBRWError(Exception):
    """Base class for every error raised by the profile toolkit"""


class ModelAssumptionError(SRBRWError, ValueError):
    """Parameters violate N >= 1, eps > 0 or beta > eps^2/2"""


class NoParent(SRBRWError, ValueError):
    """The root has no parent"""


class OffGrid(SRBRWError, ValueError):
    """A position is not on the eps-grid within tolerance"""


class NotRepresentable(SRBRWError, ValueError):
    """No admissible shape H_{r,d,n} exists for these integers"""


class Infeasible(SRBRWError, ValueError):
    """2^n particles cannot be placed smoothly on L sites"""


class ShapeMismatch(SRBRWError, ValueError):
    """Input shape is not the staircase predecessor of the target"""


class DegenerateRegime(SRBRWError, ValueError):
    """Predicted ramp width r* is below one site"""


class BudgetExceeded(SRBRWError, RuntimeError):
    """Brute-force search space larger than the configured budget"""

    def __init__(self, message: str, state_space: int):
        super().__init__(message)
        self.state_space = state_space


# -- Parameters --------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """
    The triple (N, beta, eps)

    N: number of generations (>= 1)
    beta: inverse temperature, penalty per ordered colliding pair
    eps: repulsion range (length units)

    Construction refuses beta <= eps^2/2 unless built through exploratory(),
    which the sampler uses for beta = 0 sanity runs.
    """
    N: int
    beta: float
    eps: float
    assumption_checked: bool = True

    MAX_DEPTH = 40

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ModelAssumptionError(f"N must be an integer >= 1, got {self.N}")
        if not self.eps > 0:
            raise ModelAssumptionError(f"eps must be positive, got {self.eps}")
        if self.beta < 0:
            raise ModelAssumptionError(f"beta must be non-negative, got {self.beta}")
        if self.assumption_checked and not self.beta > self.eps ** 2 / 2:
            raise ModelAssumptionError(
                f"requires beta > eps^2/2 (beta={self.beta}, eps^2/2={self.eps ** 2 / 2})"
            )

    @classmethod
    def exploratory(cls, N: int, beta: float, eps: float) -> "ModelParams":
        """Parameters for sampling runs that may sit below the penalty threshold"""
        return cls(N=N, beta=beta, eps=eps, assumption_checked=False)

    @property
    def penalty_threshold(self) -> float:
        return self.eps ** 2 / 2

    def staircase_depth(self, K: int) -> int:
        """M = N - K, the last generation of the Dirichlet phase"""
        if not 0 <= K < self.N:
            raise ValueError(f"K must satisfy 0 <= K < N={self.N}, got {K}")
        return self.N - K


# -- Node ids ----------------------------------------------------------------

@dataclass(frozen=True, order=True)
class NodeId:
    """Node z^(n) = (z_1 ... z_n); index holds z_1 as its most significant bit"""
    depth: int
    index: int

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        if not 0 <= self.index < (1 << self.depth):
            raise ValueError(f"index {self.index} outside [0, 2^{self.depth})")

    @property
    def bits(self) -> Tuple[int, ...]:
        """(z_1, ..., z_n)"""
        return tuple((self.index >> (self.depth - 1 - i)) & 1 for i in range(self.depth))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "NodeId":
        index = 0
        for b in bits:
            index = (index << 1) | (1 if b else 0)
        return cls(depth=len(bits), index=index)


def node_parent(node: NodeId) -> NodeId:
    if node.depth == 0:
        raise NoParent("the root has no parent")
    return NodeId(node.depth - 1, node.index >> 1)


def node_children(node: NodeId) -> Tuple[NodeId, NodeId]:
    return (NodeId(node.depth + 1, node.index << 1),
            NodeId(node.depth + 1, (node.index << 1) + 1))


def node_mirror(node: NodeId) -> NodeId:
    """Flip every bit: the reflection z -> 1 - z of the whole tree"""
    return NodeId(node.depth, ((1 << node.depth) - 1) ^ node.index)


def node_flip_first(node: NodeId) -> NodeId:
    """Flip z_1 only: swaps the two half-trees below the root"""
    if node.depth == 0:
        return node
    return NodeId(node.depth, node.index ^ (1 << (node.depth - 1)))


# -- Position profiles -------------------------------------------------------

@dataclass(frozen=True)
class TreeProfile:
    """
    Real-valued h on T^(depth); values[n] has 2^n entries ordered by index

    Arrays are stored read-only so a profile can be shared freely.
    """
    depth: int
    values: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.depth > ModelParams.MAX_DEPTH:
            raise ValueError(f"profile depth capped at {ModelParams.MAX_DEPTH}")
        if len(self.values) != self.depth + 1:
            raise ValueError(
                f"expected {self.depth + 1} generations, got {len(self.values)}"
            )
        frozen = []
        for n, gen in enumerate(self.values):
            arr = np.array(gen, dtype=float)
            if arr.shape != (1 << n,):
                raise ValueError(f"generation {n} must have {1 << n} entries, got {arr.shape}")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, 'values', tuple(frozen))

    @classmethod
    def from_generations(cls, generations: Sequence[Sequence[float]]) -> "TreeProfile":
        return cls(depth=len(generations) - 1, values=tuple(generations))

    def generation(self, n: int) -> np.ndarray:
        return self.values[n]

    def at(self, node: NodeId) -> float:
        return float(self.values[node.depth][node.index])

    def increments(self, n: int) -> np.ndarray:
        """a(z^(n)) = h(z^(n)) - h(z^(n-1)) for every node of generation n >= 1"""
        if n < 1:
            raise NoParent("increments start at generation 1")
        return self.values[n] - np.repeat(self.values[n - 1], 2)

    def reflected(self) -> "TreeProfile":
        return TreeProfile(self.depth, tuple(-g for g in self.values))


# -- Occupation profiles -----------------------------------------------------

@dataclass(frozen=True)
class OccupationProfile:
    """
    Occupation counts a_l on consecutive grid sites for one generation

    offset: grid index of the leftmost occupied site
    counts: non-negative integers, first and last >= 1
    half_integer: sites at eps*(k + 1/2) when True, at eps*k when False
    """
    offset: int
    counts: np.ndarray
    generation: int
    half_integer: bool = True

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size == 0:
            raise ValueError("counts must be a non-empty vector")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        if counts[0] < 1 or counts[-1] < 1:
            raise ValueError("first and last counts must be >= 1 (no padding zeros)")
        total = int(counts.sum())
        if total != 1 << self.generation:
            raise ValueError(
                f"generation {self.generation} holds {1 << self.generation} particles, counts sum to {total}"
            )
        counts.setflags(write=False)
        object.__setattr__(self, 'counts', counts)

    @property
    def range_sites(self) -> int:
        """L, the number of sites from first to last occupied"""
        return int(self.counts.size)

    def site_positions(self, eps: float) -> np.ndarray:
        shift = 0.5 if self.half_integer else 0.0
        return eps * (self.offset + np.arange(self.counts.size) + shift)

    def particle_positions(self, eps: float) -> np.ndarray:
        """Expanded, sorted list of all 2^n particle positions"""
        return np.repeat(self.site_positions(eps), self.counts)

    def as_list(self) -> List[int]:
        return [int(a) for a in self.counts]


def _bin_to_lattice(x: np.ndarray, eps: float, shift: float, tol: float) -> Optional[np.ndarray]:
    """Site indices k with |x - eps(k + shift)| <= tol, or None if any point misses"""
    k = np.rint(x / eps - shift).astype(np.int64)
    if np.all(np.abs(x - eps * (k + shift)) <= tol):
        return k
    return None


def occupation_of_generation(profile: TreeProfile, n: int, params: ModelParams,
                             tol: Optional[float] = None) -> OccupationProfile:
    """
    Bin generation n of a profile onto the eps-grid

    Tries the half-integer lattice first, then the integer lattice; the whole
    generation must sit on one of them. tol defaults to 1e-9*eps and may be
    raised up to eps/4.
    """
    eps = params.eps
    if tol is None:
        tol = 1e-9 * eps
    if tol > eps / 4:
        raise ValueError("grid tolerance may not exceed eps/4")
    x = profile.generation(n)
    for shift, half in ((0.5, True), (0.0, False)):
        k = _bin_to_lattice(x, eps, shift, tol)
        if k is not None:
            lo = int(k.min())
            counts = np.bincount(k - lo)
            return OccupationProfile(offset=lo, counts=counts, generation=n, half_integer=half)
    worst = float(np.max(np.abs(x / eps - 0.5 - np.rint(x / eps - 0.5))) * eps)
    raise OffGrid(f"generation {n}: a position lies {worst:.3g} from the nearest site (tol {tol:.3g})")


def snap_to_grid(positions: Sequence[float], eps: float) -> np.ndarray:
    """
    Project each position onto the nearest site eps*(k + 1/2)

    Points sharing a site afterwards were closer than eps before, so the
    interaction count never increases.
    """
    x = np.asarray(positions, dtype=float)
    return eps * (np.floor(x / eps) + 0.5)


def is_smooth(counts: Sequence[int]) -> bool:
    """Neighbouring sites differ by at most one, zero padding included"""
    padded = np.concatenate(([0], np.asarray(counts, dtype=np.int64), [0]))
    return bool(np.all(np.abs(np.diff(padded)) <= 1))
