"""
Dirichlet Solver: harmonic profiles on the truncated binary tree

Responsibility:
- Boundary data on the 2^M leaves (standard symmetric grid, linear grid)
- Solve h(z0) + h(z1) + h(parent) = 3h(z) with h(root) = 0 and pinned leaves
    * solve_recursive: subtree sums bottom-up, increments top-down
    * solve_closed_form: explicit weights b_n on the ancestral subtree sums
    * solve_quadratic_cg: conjugate gradients on the pinned spreading cost
- Explicit and approximate node values for the standard boundary
- Spacing, harmonicity and spreading-cost checks

The recursive solve is the reference; the other two are cross-checks.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from action_functional import spreading_increment_cost
from tree_core import ModelParams, NodeId, TreeProfile, node_flip_first

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirichletBoundary:
    """Leaf values u(z^(M)) ordered by node index"""
    M: int
    u: np.ndarray

    def __post_init__(self):
        if self.M < 1 or self.M > ModelParams.MAX_DEPTH:
            raise ValueError(f"M must lie in [1, {ModelParams.MAX_DEPTH}], got {self.M}")
        u = np.array(self.u, dtype=float)
        if u.shape != (1 << self.M,):
            raise ValueError(f"boundary needs {1 << self.M} leaf values, got {u.shape}")
        u.setflags(write=False)
        object.__setattr__(self, 'u', u)


@dataclass(frozen=True)
class DirichletSolution:
    """
    profile: h on T^(M)
    increments: a(z^(n)) per generation, with a(root) = 0
    subtree_sums: Sigma(z^(n)), the sum of u over the leaves below z^(n)
    b: b_n = 1/(2^(M-n+1) - 1) for n = 0..M
    """
    boundary: DirichletBoundary
    profile: TreeProfile
    increments: Tuple[np.ndarray, ...]
    subtree_sums: Tuple[np.ndarray, ...]
    b: np.ndarray

    @property
    def M(self) -> int:
        return self.boundary.M


# -- Boundaries --------------------------------------------------------------

def standard_boundary(M: int, eps: float) -> DirichletBoundary:
    """
    Single particles eps apart, symmetric about 0

    u = +eps(v + 1/2) below z_1 = 1 and -eps(v + 1/2) below z_1 = 0, where
    v = sum_{l>=2} 2^(M-l) z_l is the index within the half-tree.
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    half = 1 << (M - 1)
    v = np.arange(half, dtype=float) + 0.5
    return DirichletBoundary(M=M, u=eps * np.concatenate((-v, v)))


def linear_boundary(M: int, eps: float) -> DirichletBoundary:
    """u = eps(index - 2^(M-1) + 1/2): the same leaf multiset, increasing in index"""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    index = np.arange(1 << M, dtype=float)
    return DirichletBoundary(M=M, u=eps * (index - (1 << (M - 1)) + 0.5))


# -- Shared pieces -----------------------------------------------------------

def _subtree_sums(u: np.ndarray, M: int) -> List[np.ndarray]:
    sums = [None] * (M + 1)
    sums[M] = np.asarray(u, dtype=float)
    for n in range(M - 1, -1, -1):
        sums[n] = sums[n + 1].reshape(-1, 2).sum(axis=1)
    return sums


def _b_weights(M: int) -> np.ndarray:
    return 1.0 / (2.0 ** (M - np.arange(M + 1) + 1) - 1.0)


def _package(boundary: DirichletBoundary, generations: List[np.ndarray],
             sums: List[np.ndarray]) -> DirichletSolution:
    M = boundary.M
    generations[0] = np.zeros(1)
    generations[M] = boundary.u
    profile = TreeProfile(depth=M, values=tuple(generations))
    increments = [np.zeros(1)] + [profile.increments(n) for n in range(1, M + 1)]
    return DirichletSolution(boundary=boundary, profile=profile,
                             increments=tuple(increments),
                             subtree_sums=tuple(sums), b=_b_weights(M))


# -- Solvers -----------------------------------------------------------------

def solve_recursive(boundary: DirichletBoundary) -> DirichletSolution:
    """
    Sigma(z^(n)) = 2^(M-n) h(z^(n-1)) + (2^(M-n+1) - 1) a(z^(n)),
    solved for a generation by generation from the root
    """
    M = boundary.M
    sums = _subtree_sums(boundary.u, M)
    gens = [np.zeros(1)]
    for n in range(1, M + 1):
        parent = np.repeat(gens[n - 1], 2)
        a = (sums[n] - 2.0 ** (M - n) * parent) / (2.0 ** (M - n + 1) - 1.0)
        gens.append(parent + a)
    logger.debug("recursive Dirichlet solve done, M=%d", M)
    return _package(boundary, gens, sums)


def solve_closed_form(boundary: DirichletBoundary) -> DirichletSolution:
    """
    h(z^(n)) = b_n Sigma(z^(n))
               + sum_{l=1}^{n-1} b_{n-l+1} b_{n-l} / b_{n+1} * Sigma(z^(n-l))

    1/b_{n+1} = 2^(M-n) - 1 vanishes at n = M, which pins the leaves.
    """
    M = boundary.M
    sums = _subtree_sums(boundary.u, M)
    b = _b_weights(M)
    gens = [np.zeros(1)]
    for n in range(1, M + 1):
        h = b[n] * sums[n]
        inv_next = 2.0 ** (M - n) - 1.0
        for ell in range(1, n):
            weight = b[n - ell + 1] * b[n - ell] * inv_next
            h = h + weight * np.repeat(sums[n - ell], 1 << ell)
        gens.append(h)
    return _package(boundary, gens, sums)


def solve_quadratic_cg(boundary: DirichletBoundary, rtol: float = 1e-12) -> DirichletSolution:
    """
    Minimise the spreading cost with root and leaves pinned

    The gradient in an interior h(z) is 3h(z) - h(parent) - h(z0) - h(z1), so
    the minimiser solves the interior tree Laplacian, applied matrix-free.
    """
    M = boundary.M
    sums = _subtree_sums(boundary.u, M)
    if M == 1:
        return _package(boundary, [None, None], sums)

    sizes = [1 << n for n in range(1, M)]
    splits = np.cumsum(sizes)[:-1]
    dof = int(sum(sizes))

    def laplacian(x):
        gens = np.split(np.asarray(x, dtype=float).ravel(), splits)
        out = []
        for i, g in enumerate(gens):
            parent = np.repeat(gens[i - 1], 2) if i > 0 else np.zeros_like(g)
            below = gens[i + 1].reshape(-1, 2).sum(axis=1) if i + 1 < len(gens) else 0.0
            out.append(3.0 * g - parent - below)
        return np.concatenate(out)

    rhs = np.zeros(dof)
    rhs[dof - sizes[-1]:] = boundary.u.reshape(-1, 2).sum(axis=1)
    operator = LinearOperator((dof, dof), matvec=laplacian, dtype=float)
    x, info = cg(operator, rhs, rtol=rtol, atol=0.0, maxiter=20 * dof)
    if info != 0:
        logger.warning("conjugate gradients stopped early (info=%d, M=%d)", info, M)
    gens = [None] + np.split(x, splits) + [None]
    return _package(boundary, gens, sums)


# -- Explicit standard-boundary values ---------------------------------------

def explicit_standard_profile(M: int, n: int, z: NodeId, eps: float) -> float:
    """
    Exact closed expression for h(z^(n)) under the standard boundary

    Evaluated for z_1 = 1; the z_1 = 0 half follows from h -> -h under
    flipping z_1, which the standard boundary respects.
    """
    if not 0 <= n <= M:
        raise ValueError(f"need 0 <= n <= M, got n={n}, M={M}")
    if z.depth != n:
        raise ValueError(f"node depth {z.depth} differs from n={n}")
    if n == 0:
        return 0.0
    bits = z.bits
    if bits[0] == 0:
        return -explicit_standard_profile(M, n, node_flip_first(z), eps)
    if n == M:
        v = z.index - (1 << (M - 1))
        return eps * (v + 0.5)

    def c(ell):
        return 1.0 / ((1.0 - 2.0 ** (-M + n - ell)) * (1.0 - 2.0 ** (-M + n - ell - 1)))

    g = 1.0 / (1.0 - 2.0 ** (-M + n - 1))
    shrink = 1.0 - 2.0 ** (-M + n)
    z_k = {k: bits[k - 1] for k in range(2, n + 1)}

    level = 0.5 * eps * 2.0 ** (M - n - 1) * (g + shrink * sum(c(ell) for ell in range(1, n)))
    inner = g * sum(2.0 ** -k * z_k[k] for k in range(2, n + 1))
    inner += shrink * g * sum(2.0 ** -k * z_k[k] for k in range(2, n))
    inner -= 2.0 ** -n * sum(z_k[k] * shrink / (1.0 - 2.0 ** (-M + k - 1)) for k in range(2, n))
    return level + 0.5 * eps * 2.0 ** M * inner


def approximate_increment(M: int, n: int, z: NodeId, eps: float) -> float:
    """a-bar(z^(n)) = eps 2^(M-n-2) (2 - n + 2 sum_{k>=2} z_k), mirrored for z_1 = 0"""
    if not 1 <= n <= M or z.depth != n:
        raise ValueError(f"need 1 <= n <= M with a depth-n node, got n={n}")
    bits = z.bits
    sign = 1.0 if bits[0] == 1 else -1.0
    ones = sum(bits[1:])
    return sign * eps * 2.0 ** (M - n - 2) * (2 - n + 2 * ones)


# -- Checks ------------------------------------------------------------------

def harmonicity_residual(sol: DirichletSolution) -> float:
    """max |3h(z) - h(z0) - h(z1) - h(parent)| over interior nodes"""
    h = sol.profile.values
    worst = 0.0
    for n in range(1, sol.M):
        resid = 3.0 * h[n] - h[n + 1].reshape(-1, 2).sum(axis=1) - np.repeat(h[n - 1], 2)
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst


def min_gap_per_generation(sol: DirichletSolution) -> List[float]:
    """Smallest distance between two distinct nodes of generation n, n = 1..M"""
    return [float(np.min(np.diff(np.sort(sol.profile.generation(n)))))
            for n in range(1, sol.M + 1)]


def spacing_check(sol: DirichletSolution, eps: float) -> float:
    """Minimum gap over all generations; at least eps under the standard boundary"""
    gap = min(min_gap_per_generation(sol))
    if gap < eps * (1.0 - 1e-12):
        logger.warning("Dirichlet generation gap %.6g below eps=%.6g", gap, eps)
    return gap


def future_sign_check(M: int, n: int, ell: int) -> Tuple[float, float, float]:
    """
    (b_{n-l+1}/b_{n+1} - b_{n-l+1}/b_n, its negative closed form, the unsigned form)

    The difference equals -2^-l / (1 - 2^(-M+n-l)); the first two entries agree.
    """
    if not 1 <= ell < n < M:
        raise ValueError(f"need 1 <= l < n < M, got l={ell}, n={n}, M={M}")
    b = _b_weights(M)
    inv_next = 2.0 ** (M - n) - 1.0
    inv_here = 2.0 ** (M - n + 1) - 1.0
    lhs = b[n - ell + 1] * inv_next - b[n - ell + 1] * inv_here
    unsigned = 2.0 ** -ell / (1.0 - 2.0 ** (-M + n - ell))
    return lhs, -unsigned, unsigned


def alpha_identity_check(M: int, n: int, k: int) -> Tuple[float, float]:
    """1/(1-2^(-M+n-1)) - sum_{l=1}^{n-k} 2^-l c_l  against  2^(k-n)/(1-2^(-M+k-1))"""
    if not 1 <= k <= n <= M:
        raise ValueError(f"need 1 <= k <= n <= M, got k={k}, n={n}, M={M}")

    def c(ell):
        return 1.0 / ((1.0 - 2.0 ** (-M + n - ell)) * (1.0 - 2.0 ** (-M + n - ell - 1)))

    lhs = 1.0 / (1.0 - 2.0 ** (-M + n - 1)) - sum(2.0 ** -ell * c(ell) for ell in range(1, n - k + 1))
    rhs = 2.0 ** (k - n) / (1.0 - 2.0 ** (-M + k - 1))
    return lhs, rhs


# -- Spreading cost ----------------------------------------------------------

def dirichlet_spreading_cost(sol: DirichletSolution) -> float:
    """S_spr over T^(M), summed in generation order"""
    return float(sum(spreading_increment_cost(sol.profile, n) for n in range(sol.M)))


def spreading_cost_closed_form(M: int, eps: float) -> float:
    """
    Exact S_spr of the standard-boundary solution

    eps^2 [2^(2M-5)/(1-2^-M) + sum_{j=1}^{M-1} 2^(2M-j-5)/(1-2^(j-M))],
    from expanding the boundary in Haar functions; tends to eps^2 2^(2M-4).
    """
    total = 2.0 ** (2 * M - 5) / (1.0 - 2.0 ** -M)
    total += sum(2.0 ** (2 * M - j - 5) / (1.0 - 2.0 ** (j - M)) for j in range(1, M))
    return eps ** 2 * total


def spreading_bounds(M: int, eps: float) -> Tuple[float, float]:
    lower = eps ** 2 * 2.0 ** (2 * M - 6) / (1.0 - 2.0 ** -M) ** 2
    upper = eps ** 2 * (2.0 ** (M - 1) + 0.5) ** 2 / (1.0 - 2.0 ** -M)
    return lower, upper
