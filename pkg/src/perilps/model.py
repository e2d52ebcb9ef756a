"""Discrete state-based peridynamic solid model on a point cloud.

The unknowns are the displacements of interior nodes plus a nonlocal
dilatation value at every node within one horizon of the unit square.
Momentum balance couples a dilatation (volumetric) force term with a
bond-stretch (deviatoric) term; the dilatation itself is defined by a
weighted bond sum and kept consistent through its own block of
equations rather than eliminated.

When bonds are severed (free surfaces modeled by bond breaking) the
bond sums lose their full-ball symmetry.  A per-node first-moment
tensor built from the surviving bonds restores exactness of the
dilatation for affine deformations; on intact full balls that tensor is
the identity and the correction is a no-op.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import AssemblyError, ConfigError
from .pointcloud import Neighborhoods, PointCloud
from .quadrature import QuadratureFamily

__all__ = [
    "LpsConstants",
    "MaterialField",
    "BondSet",
    "DilatationCorrection",
    "BlockSystem",
    "harmonic_pair",
    "break_bonds_crossing_circle",
    "damage_field",
    "compute_moment_tensors",
    "assemble_system",
    "apply_operator",
]

#: Condition threshold below which the moment tensor falls back to a
#: pseudo-inverse (smallest singular value relative to the largest).
MOMENT_COND_TOL = 1e-8


@dataclass(frozen=True)
class LpsConstants:
    """Dimension-dependent scaling constants of the solid model.

    ``c_alpha`` scales the dilatation force term, ``c_beta`` the bond
    force term, and ``weighted_volume`` is the kernel-weighted ball
    volume m(delta).  The 3D set is kept as data for reference; only
    the 2D plane-strain geometry is implemented.
    """

    c_alpha: float
    c_beta: float
    dim: int

    @classmethod
    def plane_strain(cls) -> "LpsConstants":
        return cls(c_alpha=2.0, c_beta=16.0, dim=2)

    @classmethod
    def three_dimensional(cls) -> "LpsConstants":
        return cls(c_alpha=3.0, c_beta=30.0, dim=3)

    def weighted_volume(self, delta: float) -> float:
        if self.dim == 2:
            return 2.0 * math.pi * delta**3 / 3.0
        return math.pi * delta**4


@dataclass
class MaterialField:
    """Per-node Lame parameters."""

    lam: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        if np.any(self.mu <= 0.0):
            raise ConfigError("shear modulus must be positive at every node")
        if np.any(self.lam < 0.0):
            raise ConfigError("first Lame parameter must be nonnegative")

    @classmethod
    def from_case(cls, case, cloud: PointCloud) -> "MaterialField":
        lam, mu = case.lame_fields(cloud.positions)
        return cls(lam=np.asarray(lam, dtype=float), mu=np.asarray(mu, dtype=float))


def harmonic_pair(a: float, b: float) -> float:
    """Harmonic mean of two positive moduli, ``2 / (1/a + 1/b)``."""
    if a <= 0.0 or b <= 0.0:
        raise ConfigError(f"harmonic pairing needs positive moduli, got {a}, {b}")
    return 2.0 * a * b / (a + b)


def _harmonic_mean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Vector version; tolerates zeros (limit value 0) for lam fields.
    s = a + b
    out = np.zeros_like(s)
    np.divide(2.0 * a * b, s, out=out, where=s > 0.0)
    return out


@dataclass
class BondSet:
    """Broken/intact state per directed bond plus a per-node present mask.

    ``broken`` is pair-aligned with a ``Neighborhoods``; ``present`` is
    False for nodes removed from the problem (hole interiors).  Weights
    of bonds that are broken or touch absent nodes are zeroed in
    ``modified_weights``.
    """

    broken: np.ndarray
    present: np.ndarray

    @classmethod
    def intact(cls, nbrs: Neighborhoods) -> "BondSet":
        return cls(
            broken=np.zeros(nbrs.n_pairs, dtype=bool),
            present=np.ones(nbrs.n_points, dtype=bool),
        )

    def with_present(self, present: np.ndarray) -> "BondSet":
        return BondSet(broken=self.broken.copy(), present=present.copy())

    def modified_weights(self, family: QuadratureFamily, nbrs: Neighborhoods) -> np.ndarray:
        w = np.where(np.isnan(family.weights), 0.0, family.weights)
        alive = (~self.broken) & self.present[nbrs.row_index] & self.present[nbrs.indices]
        return np.where(alive, w, 0.0)


def break_bonds_crossing_circle(
    bonds: BondSet, nbrs: Neighborhoods, cloud: PointCloud, circle
) -> BondSet:
    """Sever every bond whose open segment crosses the given circle.

    A bond breaks when its endpoints lie on opposite sides of the
    circle, or when both lie outside but the segment dips inside
    (double crossing).  Bonds with both endpoints inside remain intact;
    the nodes they join are typically removed from the problem anyway.
    Applying the operation twice changes nothing (the predicate is pure
    geometry).
    """
    pos = cloud.positions
    i = nbrs.row_index
    j = nbrs.indices
    di = circle.signed_distance(pos[i])
    dj = circle.signed_distance(pos[j])
    straddle = (di < 0.0) != (dj < 0.0)

    # Double crossings: both endpoints outside, nearest segment point inside.
    center = np.asarray(circle.center)
    seg = nbrs.offsets
    rel = center - pos[i]
    seg2 = nbrs.distances**2
    t = np.clip(np.einsum("pc,pc->p", rel, seg) / seg2, 0.0, 1.0)
    nearest = pos[i] + t[:, None] * seg
    dip = (
        (di > 0.0)
        & (dj > 0.0)
        & (np.hypot(*(nearest - center).T) < circle.radius)
    )

    return BondSet(broken=bonds.broken | straddle | dip, present=bonds.present.copy())


def hole_removal_mask(cloud: PointCloud, circle) -> np.ndarray:
    """Nodes to drop for a hole: strictly inside by center or by position.

    Center-inside nodes sit in the void by construction.  A jittered
    node whose center stays outside but whose position lands inside the
    circle would keep its unknowns even though every bond it carries
    crosses the hole boundary and breaks, which leaves a zero stiffness
    row and a singular system.  Both kinds are removed.
    """
    inside_position = circle.signed_distance(cloud.positions) < 0.0
    return cloud.hole_interior | inside_position


def damage_field(
    bonds: BondSet, family: QuadratureFamily, nbrs: Neighborhoods
) -> np.ndarray:
    """Per-node damage: one minus the surviving share of quadrature weight.

    Uses the ratio of summed post-break weights to summed intact
    weights.  Nodes without computed weights report NaN; a node whose
    intact weights sum to zero is fully damaged by convention.
    """
    w = np.where(np.isnan(family.weights), 0.0, family.weights)
    wt = bonds.modified_weights(family, nbrs)
    total = np.bincount(nbrs.row_index, weights=w, minlength=nbrs.n_points)
    alive = np.bincount(nbrs.row_index, weights=wt, minlength=nbrs.n_points)
    damage = np.where(total != 0.0, 1.0 - alive / np.where(total != 0.0, total, 1.0), 1.0)
    damage[~family.computed] = np.nan
    return damage


@dataclass
class DilatationCorrection:
    """First-moment tensors of surviving bonds and their (pseudo)inverses."""

    tensors: np.ndarray
    inverses: np.ndarray
    invertible: np.ndarray
    computed: np.ndarray


def compute_moment_tensors(
    cloud: PointCloud,
    nbrs: Neighborhoods,
    family: QuadratureFamily,
    bonds: BondSet,
    constants: LpsConstants,
    needed: np.ndarray | None = None,
) -> DilatationCorrection:
    """Assemble ``M_i = (d/m) sum_j K z (x) z w~`` for the needed nodes.

    On a full intact ball the moment constraints force ``M_i`` to the
    identity.  With bonds missing, ``M_i`` deviates and its inverse
    restores affine exactness of the dilatation.  Tensors whose
    smallest singular value falls below ``MOMENT_COND_TOL`` times the
    largest get a pseudo-inverse instead and are flagged.
    """
    n = cloud.n_points
    if needed is None:
        needed = family.computed
    wt = bonds.modified_weights(family, nbrs)
    i_pair = nbrs.row_index
    z = nbrs.offsets
    fac = constants.dim / constants.weighted_volume(cloud.delta) * wt / nbrs.distances

    M = np.zeros((n, 2, 2))
    M[:, 0, 0] = np.bincount(i_pair, weights=fac * z[:, 0] * z[:, 0], minlength=n)
    M[:, 0, 1] = np.bincount(i_pair, weights=fac * z[:, 0] * z[:, 1], minlength=n)
    M[:, 1, 1] = np.bincount(i_pair, weights=fac * z[:, 1] * z[:, 1], minlength=n)
    M[:, 1, 0] = M[:, 0, 1]

    a, b, c = M[:, 0, 0], M[:, 0, 1], M[:, 1, 1]
    det = a * c - b * b
    half_tr = 0.5 * (a + c)
    root = np.sqrt(np.maximum(0.25 * (a - c) ** 2 + b * b, 0.0))
    eig_lo = half_tr - root
    eig_hi = half_tr + root
    smax = np.maximum(np.abs(eig_lo), np.abs(eig_hi))
    smin = np.minimum(np.abs(eig_lo), np.abs(eig_hi))
    invertible = needed & (smax > 0.0) & (smin > MOMENT_COND_TOL * smax)

    inv = np.zeros_like(M)
    ok = invertible
    inv[ok, 0, 0] = c[ok] / det[ok]
    inv[ok, 1, 1] = a[ok] / det[ok]
    inv[ok, 0, 1] = -b[ok] / det[ok]
    inv[ok, 1, 0] = -b[ok] / det[ok]
    for idx in np.nonzero(needed & ~invertible)[0]:
        inv[idx] = np.linalg.pinv(M[idx], rcond=MOMENT_COND_TOL)

    return DilatationCorrection(
        tensors=M, inverses=inv, invertible=invertible, computed=needed.copy()
    )


@dataclass
class BlockSystem:
    """Sparse square system over interior displacements and dilatations.

    The first ``2 * n_u_points`` unknowns interleave (ux, uy) per
    interior node; the remaining ``n_theta`` are dilatation values.
    ``u_index`` and ``theta_index`` map node ids to slots (-1 where a
    node carries no unknown of that kind).
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    u_index: np.ndarray
    theta_index: np.ndarray
    n_u_points: int
    n_theta: int

    @property
    def n_unknowns(self) -> int:
        return 2 * self.n_u_points + self.n_theta

    def extract_u(self, x: np.ndarray) -> np.ndarray:
        """Scatter the solved displacements back onto the cloud (NaN elsewhere)."""
        n = len(self.u_index)
        u = np.full((n, 2), np.nan)
        has = self.u_index >= 0
        u[has, 0] = x[2 * self.u_index[has]]
        u[has, 1] = x[2 * self.u_index[has] + 1]
        return u

    def extract_theta(self, x: np.ndarray) -> np.ndarray:
        n = len(self.theta_index)
        th = np.full(n, np.nan)
        has = self.theta_index >= 0
        th[has] = x[2 * self.n_u_points + self.theta_index[has]]
        return th


def _pair_coefficients(
    cloud: PointCloud,
    nbrs: Neighborhoods,
    family: QuadratureFamily,
    bonds: BondSet,
    material: MaterialField,
    constants: LpsConstants,
    correction: DilatationCorrection,
):
    """Per-bond coefficient arrays shared by assembly and application.

    Returns the dilatation-force vector ``A`` (scales theta_i + theta_j),
    the bond-force factor such that the matrix contribution is
    ``s_fac * z (x) z`` acting on ``u_j - u_i``, and the corrected
    dilatation row vector ``c`` (so theta_i = sum_j c . (u_j - u_i)).
    """
    wt = bonds.modified_weights(family, nbrs)
    i_pair = nbrs.row_index
    j_pair = nbrs.indices
    z = nbrs.offsets
    r = nbrs.distances
    kernel = 1.0 / r
    m = constants.weighted_volume(cloud.delta)

    lam_p = _harmonic_mean(material.lam[i_pair], material.lam[j_pair])
    mu_p = _harmonic_mean(material.mu[i_pair], material.mu[j_pair])

    a_vec = (constants.c_alpha / m) * ((lam_p - mu_p) * kernel * wt)[:, None] * z
    s_fac = (constants.c_beta / m) * mu_p * kernel * wt / r**2

    c_fac = (constants.dim / m) * kernel * wt
    c_vec = c_fac[:, None] * np.einsum("pab,pb->pa", correction.inverses[i_pair], z)
    return wt, a_vec, s_fac, c_vec


def assemble_system(
    cloud: PointCloud,
    nbrs: Neighborhoods,
    family: QuadratureFamily,
    bonds: BondSet,
    material: MaterialField,
    constants: LpsConstants,
    correction: DilatationCorrection,
    dirichlet: np.ndarray,
    forcing: np.ndarray,
) -> BlockSystem:
    """Build the sparse block system with collar data folded into the RHS.

    Momentum rows are written for present interior nodes; dilatation
    rows for every present node within one horizon of the unit square.
    Displacements of collar nodes come from ``dirichlet`` (evaluated at
    their perturbed positions), which must be finite wherever it is
    referenced.
    """
    n = cloud.n_points
    present = bonds.present
    u_unknown = cloud.interior & present
    theta_mask = (
        (cloud.center_distance_to_domain() <= cloud.delta * (1.0 + 1e-12)) & present
    )
    if not np.all(family.computed[theta_mask]):
        raise AssemblyError("a dilatation node is missing quadrature weights")
    if not np.all(correction.computed[theta_mask]):
        raise AssemblyError("a dilatation node is missing its moment tensor")

    u_index = np.full(n, -1, dtype=np.int64)
    u_index[u_unknown] = np.arange(int(u_unknown.sum()))
    theta_index = np.full(n, -1, dtype=np.int64)
    theta_index[theta_mask] = np.arange(int(theta_mask.sum()))
    n_u = int(u_unknown.sum())
    n_theta = int(theta_mask.sum())
    n_tot = 2 * n_u + n_theta

    wt, a_vec, s_fac, c_vec = _pair_coefficients(
        cloud, nbrs, family, bonds, material, constants, correction
    )
    i_pair = nbrs.row_index
    j_pair = nbrs.indices
    z = nbrs.offsets

    live = wt != 0.0
    if np.any(live & ~(present[i_pair] & present[j_pair])):
        raise AssemblyError("a surviving bond references a removed node")

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    rhs = np.zeros(n_tot)

    # ---- momentum rows -------------------------------------------------
    mom = live & u_unknown[i_pair]
    mi, mj = i_pair[mom], j_pair[mom]
    if np.any(theta_index[mj] < 0):
        raise AssemblyError("a momentum row references a node with no dilatation")
    mrow_base = 2 * u_index[mi]
    za = z[mom]
    sf = s_fac[mom]
    av = a_vec[mom]

    sum_a = np.zeros((n, 2))
    sum_s = np.zeros((n, 2, 2))
    for a in (0, 1):
        sum_a[:, a] = np.bincount(mi, weights=av[:, a], minlength=n)
        for b in (0, 1):
            sum_s[:, a, b] = np.bincount(mi, weights=sf * za[:, a] * za[:, b], minlength=n)

    j_int = u_index[mj] >= 0
    for a in (0, 1):
        # theta_j coupling
        rows.append(mrow_base + a)
        cols.append(2 * n_u + theta_index[mj])
        vals.append(av[:, a])
        for b in (0, 1):
            block = sf * za[:, a] * za[:, b]
            rows.append(mrow_base[j_int] + a)
            cols.append(2 * u_index[mj[j_int]] + b)
            vals.append(block[j_int])
            np.add.at(
                rhs,
                mrow_base[~j_int] + a,
                -block[~j_int] * dirichlet[mj[~j_int], b],
            )

    int_ids = np.nonzero(u_unknown)[0]
    base = 2 * u_index[int_ids]
    for a in (0, 1):
        # theta_i coupling (summed over the ball)
        rows.append(base + a)
        cols.append(2 * n_u + theta_index[int_ids])
        vals.append(sum_a[int_ids, a])
        for b in (0, 1):
            rows.append(base + a)
            cols.append(base + b)
            vals.append(-sum_s[int_ids, a, b])
        rhs[base + a] += forcing[int_ids, a]

    # ---- dilatation rows ----------------------------------------------
    dil = live & theta_mask[i_pair]
    di, dj = i_pair[dil], j_pair[dil]
    drow = 2 * n_u + theta_index[di]
    cv = c_vec[dil]

    sum_c = np.zeros((n, 2))
    for b in (0, 1):
        sum_c[:, b] = np.bincount(di, weights=cv[:, b], minlength=n)

    j_int = u_index[dj] >= 0
    for b in (0, 1):
        rows.append(drow[j_int])
        cols.append(2 * u_index[dj[j_int]] + b)
        vals.append(-cv[j_int, b])
        np.add.at(rhs, drow[~j_int], cv[~j_int, b] * dirichlet[dj[~j_int], b])

    th_ids = np.nonzero(theta_mask)[0]
    trow = 2 * n_u + theta_index[th_ids]
    rows.append(trow)
    cols.append(trow)
    vals.append(np.ones(n_theta))
    th_int = u_index[th_ids] >= 0
    for b in (0, 1):
        rows.append(trow[th_int])
        cols.append(2 * u_index[th_ids[th_int]] + b)
        vals.append(sum_c[th_ids[th_int], b])
        rhs[trow[~th_int]] -= sum_c[th_ids[~th_int], b] * dirichlet[th_ids[~th_int], b]

    matrix = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_tot, n_tot),
    ).tocsr()

    return BlockSystem(
        matrix=matrix,
        rhs=rhs,
        u_index=u_index,
        theta_index=theta_index,
        n_u_points=n_u,
        n_theta=n_theta,
    )


def apply_operator(
    cloud: PointCloud,
    nbrs: Neighborhoods,
    family: QuadratureFamily,
    bonds: BondSet,
    material: MaterialField,
    constants: LpsConstants,
    correction: DilatationCorrection,
    u_all: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the discrete operator to a displacement given at all nodes.

    First evaluates the corrected dilatation wherever weights exist,
    then the momentum sums at present interior nodes.  This is the
    direct (matrix-free) route; it exists mainly so tests can confront
    the assembled matrix with an independent evaluation.

    Returns
    -------
    momentum : (N, 2) array, NaN at non-interior nodes
    theta : (N,) array, NaN where not computed
    """
    n = cloud.n_points
    wt, a_vec, s_fac, c_vec = _pair_coefficients(
        cloud, nbrs, family, bonds, material, constants, correction
    )
    i_pair = nbrs.row_index
    j_pair = nbrs.indices
    du = u_all[j_pair] - u_all[i_pair]

    theta = np.full(n, np.nan)
    contrib = np.einsum("pb,pb->p", c_vec, du)
    th = np.bincount(i_pair, weights=contrib, minlength=n)
    theta[family.computed] = th[family.computed]

    mom = np.full((n, 2), np.nan)
    # Dead bonds carry zero coefficients but may point at nodes with no
    # dilatation; zero those values instead of letting 0 * NaN spread.
    theta_fill = np.where(np.isnan(theta), 0.0, theta)
    th_sum = theta_fill[i_pair] + theta_fill[j_pair]
    z = nbrs.offsets
    sdu = s_fac * np.einsum("pb,pb->p", z, du)
    live_int = cloud.interior & bonds.present
    for a in (0, 1):
        dil_term = np.bincount(i_pair, weights=a_vec[:, a] * th_sum, minlength=n)
        bond_term = np.bincount(i_pair, weights=z[:, a] * sdu, minlength=n)
        mom[live_int, a] = dil_term[live_int] + bond_term[live_int]
    return mom, theta
