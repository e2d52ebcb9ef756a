"""Optimization-based quadrature weights for horizon-ball integrals.

Each node ``i`` gets one weight per neighbor such that the weighted sum
over the neighborhood reproduces, exactly, the integral over the full
horizon ball of every function in a small reproducing family: quadratic
polynomials in the bond vector, the singular bond-force integrands they
induce through the kernel, and the dilatation integrands.  Among all
weight vectors satisfying those constraints, the minimum Euclidean norm
solution is selected, which a rank-truncated least squares solve yields
directly.

All reproducing functions have the form ``z1**a * z2**b / |z|**s``, so
their ball integrals reduce to a radial power times a trigonometric
moment with a closed form (odd exponents integrate to zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import QuadratureError
from .pointcloud import Neighborhoods, PointCloud

__all__ = [
    "KernelSpec",
    "MomentDescriptor",
    "ConstraintBasis",
    "QuadratureFamily",
    "ball_monomial_moment",
    "exact_ball_moments",
    "assemble_constraints",
    "least_norm_weights",
    "compute_family",
    "verify_family",
]

#: Relative singular value cutoff for the rank truncation.
RANK_TOL = 1e-10

#: Per-point ceiling on ``|B w - g| / |g|`` before the run is aborted.
RESIDUAL_TOL = 1e-11

# Shifted quadratic monomials m(z) spanning p(y) - p(x) for quadratic p,
# as (exponent of z1, exponent of z2).
_SHIFTED_MONOMIALS = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


@dataclass(frozen=True)
class KernelSpec:
    """Horizon and kernel data for the singular influence function 1/r."""

    delta: float
    dim: int = 2

    def __post_init__(self):
        if self.delta <= 0.0:
            raise QuadratureError(f"horizon must be positive, got {self.delta}")
        if self.dim != 2:
            raise QuadratureError("only the plane-strain 2D kernel is supported")

    @property
    def weighted_volume(self) -> float:
        """The kernel-weighted ball volume ``int_B |z|^2 / |z| dz``."""
        return 2.0 * math.pi * self.delta**3 / 3.0

    def kernel(self, r: np.ndarray) -> np.ndarray:
        return 1.0 / r


def _double_factorial(n: int) -> int:
    # (-1)!! == 1 by convention, which makes the moment formula uniform.
    if n <= 0:
        return 1
    return n * _double_factorial(n - 2)


def ball_monomial_moment(a: int, b: int, s: int, delta: float) -> float:
    """Exact value of ``int_{|z|<delta} z1^a z2^b / |z|^s dz``.

    Splits into a radial power integral and the trigonometric moment
    ``int cos^a sin^b``, which vanishes unless both exponents are even.
    """
    if a < 0 or b < 0:
        raise ValueError("monomial exponents must be nonnegative")
    p = a + b + 2 - s
    if p <= 0:
        raise ValueError(f"moment z1^{a} z2^{b} / |z|^{s} is not integrable")
    if a % 2 or b % 2:
        return 0.0
    angular = (
        2.0
        * math.pi
        * _double_factorial(a - 1)
        * _double_factorial(b - 1)
        / _double_factorial(a + b)
    )
    return delta**p / p * angular


@dataclass(frozen=True)
class MomentDescriptor:
    """One scalar reproducing function ``z1^a z2^b / |z|^s`` and its moment."""

    a: int
    b: int
    s: int
    family: str
    moment: float

    def evaluate(self, z: np.ndarray, r: np.ndarray) -> np.ndarray:
        v = z[:, 0] ** self.a * z[:, 1] ** self.b
        if self.s:
            v = v / r**self.s
        return v


@dataclass(frozen=True)
class ConstraintBasis:
    """The full list of scalar constraints for one horizon."""

    delta: float
    descriptors: tuple[MomentDescriptor, ...]
    include_dilatation: bool

    @property
    def n_constraints(self) -> int:
        return len(self.descriptors)

    @property
    def moments(self) -> np.ndarray:
        return np.array([d.moment for d in self.descriptors])


def exact_ball_moments(spec: KernelSpec, include_dilatation: bool = True) -> ConstraintBasis:
    """Enumerate the reproducing family and its exact ball moments.

    The family has three groups:

    * ``P``: the six quadratic monomials themselves (plain volume
      integrals, ``s = 0``).
    * ``S``: entries of the tensor kernel ``z_i z_j m(z) / |z|^3`` for
      every component pair and every shifted monomial ``m``, which are
      exactly the bond-force integrands of quadratic displacements.
    * ``D``: the dilatation integrands ``z_k m(z) / |z|``.  The
      quadratic-``m`` members are not in the span of ``P`` and ``S``,
      so leaving them out (``include_dilatation=False``) reverts to the
      smaller literal reproducing space.
    """
    delta = spec.delta
    rows: list[MomentDescriptor] = []

    for a, b in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
        rows.append(MomentDescriptor(a, b, 0, "P", ball_monomial_moment(a, b, 0, delta)))

    for ma, mb in _SHIFTED_MONOMIALS:
        for i in (0, 1):
            for j in (0, 1):
                a = ma + (i == 0) + (j == 0)
                b = mb + (i == 1) + (j == 1)
                rows.append(
                    MomentDescriptor(a, b, 3, "S", ball_monomial_moment(a, b, 3, delta))
                )

    if include_dilatation:
        for ma, mb in _SHIFTED_MONOMIALS:
            for k in (0, 1):
                a = ma + (k == 0)
                b = mb + (k == 1)
                rows.append(
                    MomentDescriptor(a, b, 1, "D", ball_monomial_moment(a, b, 1, delta))
                )

    return ConstraintBasis(
        delta=delta, descriptors=tuple(rows), include_dilatation=include_dilatation
    )


def assemble_constraints(
    basis: ConstraintBasis, offsets: np.ndarray, distances: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the constraint matrix for one neighborhood.

    Row ``r``, column ``j`` holds the ``r``-th reproducing function at
    the bond vector ``z_j``; the right-hand side is the vector of exact
    ball moments.
    """
    n = offsets.shape[0]
    B = np.empty((basis.n_constraints, n))
    for r, d in enumerate(basis.descriptors):
        B[r] = d.evaluate(offsets, distances)
    return B, basis.moments


def least_norm_weights(
    B: np.ndarray, g: np.ndarray, rank_tol: float = RANK_TOL
) -> tuple[np.ndarray, dict]:
    """Minimum-norm solution of ``B w = g`` with singular value truncation.

    Singular values below ``rank_tol`` times the largest are dropped;
    the residual of the returned solution certifies whether the dropped
    directions actually carried right-hand side content.

    Returns
    -------
    w : (n,) array
    diag : dict
        ``rank``, ``residual`` (relative to ``|g|``), ``min_weight``,
        ``max_weight``.
    """
    w, _, rank, _ = np.linalg.lstsq(B, g, rcond=rank_tol)
    scale = np.linalg.norm(g)
    residual = np.linalg.norm(B @ w - g) / (scale if scale > 0.0 else 1.0)
    diag = {
        "rank": int(rank),
        "residual": float(residual),
        "min_weight": float(w.min()) if w.size else math.nan,
        "max_weight": float(w.max()) if w.size else math.nan,
    }
    return w, diag


@dataclass
class QuadratureFamily:
    """Per-node quadrature weights, pair-aligned with a Neighborhoods.

    ``weights`` matches ``nbrs.indices`` entry for entry; nodes outside
    the computed set hold NaN there.  The diagnostics arrays are indexed
    by node.
    """

    weights: np.ndarray
    computed: np.ndarray
    residual: np.ndarray
    rank: np.ndarray
    min_weight: np.ndarray
    max_weight: np.ndarray
    n_neighbors: np.ndarray
    basis: ConstraintBasis

    def weights_of(self, i: int, nbrs: Neighborhoods) -> np.ndarray:
        return self.weights[nbrs.pair_slice(i)]

    def weight_sums(self, nbrs: Neighborhoods) -> np.ndarray:
        """Total weight per node (NaN where weights were not computed)."""
        w = np.where(np.isnan(self.weights), 0.0, self.weights)
        total = np.bincount(nbrs.row_index, weights=w, minlength=nbrs.n_points)
        total[~self.computed] = np.nan
        return total


def compute_family(
    cloud: PointCloud,
    nbrs: Neighborhoods,
    spec: KernelSpec | None = None,
    include_dilatation: bool = True,
    rank_tol: float = RANK_TOL,
    residual_tol: float = RESIDUAL_TOL,
    needed: np.ndarray | None = None,
) -> QuadratureFamily:
    """Solve the per-node weight problems for every node that needs them.

    Weights are consumed by momentum rows, dilatation rows and damage
    sums, all of which live on nodes within one horizon of the unit
    square; those nodes have full balls by the collar construction, so
    the full-ball constraints are consistent there.  Outer collar nodes
    are skipped (their truncated balls cannot match full-ball moments
    and none of their weights are ever referenced).

    Parameters
    ----------
    needed : (N,) bool array, optional
        Override the default "within one horizon of the domain" node set.

    Raises
    ------
    QuadratureError
        If a needed node has no neighbors or its certified residual
        exceeds ``residual_tol``.
    """
    if spec is None:
        spec = KernelSpec(delta=cloud.delta)
    if needed is None:
        needed = cloud.center_distance_to_domain() <= cloud.delta * (1.0 + 1e-12)

    basis = exact_ball_moments(spec, include_dilatation=include_dilatation)
    n = cloud.n_points
    weights = np.full(nbrs.n_pairs, np.nan)
    residual = np.full(n, np.nan)
    rank = np.zeros(n, dtype=np.int64)
    wmin = np.full(n, np.nan)
    wmax = np.full(n, np.nan)
    counts = np.diff(nbrs.indptr)

    for i in np.nonzero(needed)[0]:
        sl = nbrs.pair_slice(i)
        if sl.start == sl.stop:
            raise QuadratureError(f"node {i} has an empty neighborhood")
        B, g = assemble_constraints(basis, nbrs.offsets[sl], nbrs.distances[sl])
        w, diag = least_norm_weights(B, g, rank_tol=rank_tol)
        if diag["residual"] > residual_tol:
            raise QuadratureError(
                f"node {i} failed the exactness certificate: relative residual "
                f"{diag['residual']:.3e} exceeds {residual_tol:g} "
                f"({sl.stop - sl.start} neighbors, rank {diag['rank']})"
            )
        weights[sl] = w
        residual[i] = diag["residual"]
        rank[i] = diag["rank"]
        wmin[i] = diag["min_weight"]
        wmax[i] = diag["max_weight"]

    return QuadratureFamily(
        weights=weights,
        computed=needed.copy(),
        residual=residual,
        rank=rank,
        min_weight=wmin,
        max_weight=wmax,
        n_neighbors=counts,
        basis=basis,
    )


def _shifted_coefficients(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Expand ``p(y) - p(x)`` in the shifted monomials of ``z = y - x``.

    ``coeffs`` is (2, 6) against the monomial basis
    ``[1, y1, y2, y1^2, y1*y2, y2^2]`` per displacement component.
    Returns (2, 5) coefficients against ``_SHIFTED_MONOMIALS``.
    """
    a0, a1, a2, a3, a4, a5 = coeffs.T
    out = np.empty((2, 5))
    out[:, 0] = a1 + 2.0 * a3 * x[0] + a4 * x[1]
    out[:, 1] = a2 + a4 * x[0] + 2.0 * a5 * x[1]
    out[:, 2] = a3
    out[:, 3] = a4
    out[:, 4] = a5
    return out


def _eval_quadratic(coeffs: np.ndarray, pts: np.ndarray) -> np.ndarray:
    basis = np.column_stack(
        [
            np.ones(len(pts)),
            pts[:, 0],
            pts[:, 1],
            pts[:, 0] ** 2,
            pts[:, 0] * pts[:, 1],
            pts[:, 1] ** 2,
        ]
    )
    return basis @ coeffs.T


def verify_family(
    family: QuadratureFamily,
    cloud: PointCloud,
    nbrs: Neighborhoods,
    probe_count: int = 100,
    seed: int = 0,
) -> dict:
    """Probe the weights with random quadratic vector fields.

    For each probe, a node with computed weights and a random quadratic
    displacement ``p`` are drawn; the weighted sums of the tensor-kernel
    integrand ``(z x z / |z|^3) (p(y) - p(x))`` and of the dilatation
    integrand ``z . (p(y) - p(x)) / |z|`` are compared against their
    closed-form ball integrals, assembled independently from the
    monomial moment table.  The dilatation identity is only checked when
    the family was built with the dilatation constraints; without them
    it holds for linear fields alone.

    Returns a dict with ``max_rel_residual`` (worst probe over both
    identities) and the per-identity maxima.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    candidates = np.nonzero(family.computed)[0]
    if candidates.size == 0:
        raise QuadratureError("no computed weights to verify")
    delta = family.basis.delta
    scale0 = math.pi * delta**3

    worst_tensor = 0.0
    worst_dil = 0.0
    for _ in range(probe_count):
        i = int(rng.choice(candidates))
        coeffs = rng.uniform(-1.0, 1.0, size=(2, 6))
        sl = nbrs.pair_slice(i)
        z = nbrs.offsets[sl]
        r = nbrs.distances[sl]
        w = family.weights[sl]
        x = cloud.positions[i]

        dp = _eval_quadratic(coeffs, cloud.positions[nbrs.indices[sl]]) - _eval_quadratic(
            coeffs, x[None, :]
        )

        zdp = np.einsum("pc,pc->p", z, dp)
        tensor_num = np.einsum("pa,p,p->a", z, zdp / r**3, w)
        dil_num = float(np.sum(zdp / r * w))

        alpha = _shifted_coefficients(coeffs, x)
        tensor_exact = np.zeros(2)
        dil_exact = 0.0
        for m, (ma, mb) in enumerate(_SHIFTED_MONOMIALS):
            for c in (0, 1):
                am = ma + (c == 0)
                bm = mb + (c == 1)
                dil_exact += alpha[c, m] * ball_monomial_moment(am, bm, 1, delta)
                for comp in (0, 1):
                    tensor_exact[comp] += alpha[c, m] * ball_monomial_moment(
                        am + (comp == 0), bm + (comp == 1), 3, delta
                    )

        scale = scale0 * max(1.0, float(np.abs(alpha).max()))
        worst_tensor = max(worst_tensor, float(np.abs(tensor_num - tensor_exact).max()) / scale)
        if family.basis.include_dilatation:
            worst_dil = max(worst_dil, abs(dil_num - dil_exact) / scale)

    return {
        "max_rel_residual": max(worst_tensor, worst_dil),
        "tensor_identity": worst_tensor,
        "dilatation_identity": worst_dil,
        "probes": probe_count,
    }
