"""Point cloud generation and neighbor search."""

import numpy as np
import pytest

from perilps import (
    ConfigError,
    Disk,
    DomainSpec,
    build_neighborhoods,
    generate_perturbed_lattice,
    uniformity_metrics,
)


def brute_force_pairs(positions, radius):
    """All ordered pairs (i, j), i != j, with |x_j - x_i| <= radius."""
    diff = positions[None, :, :] - positions[:, None, :]
    d2 = np.einsum("ijc,ijc->ij", diff, diff)
    mask = (d2 <= radius**2) & (d2 > 0.0)
    return np.argwhere(mask)


def test_counts_at_n24():
    cloud = generate_perturbed_lattice(24, seed=1)
    assert cloud.n_points == 38 * 38 == 1444
    assert cloud.n_interior == 576
    assert cloud.h == pytest.approx(1.0 / 24)
    assert cloud.delta == pytest.approx(3.5 / 24)


def test_roles_follow_unperturbed_centers():
    """Interior means the cell center is in the open unit square."""
    cloud = generate_perturbed_lattice(12, seed=3)
    centers = cloud.unperturbed_centers()
    inside = np.all((centers > 0.0) & (centers < 1.0), axis=1)
    np.testing.assert_array_equal(cloud.interior, inside)


def test_interior_positions_stay_inside():
    # Jitter is at most 0.2 h per coordinate while the nearest center
    # sits 0.5 h from the boundary, leaving a 0.3 h margin.
    cloud = generate_perturbed_lattice(16, seed=5)
    pos = cloud.positions[cloud.interior]
    margin = 0.3 * cloud.h - 1e-12
    assert np.all(pos > margin)
    assert np.all(pos < 1.0 - margin)


def test_zero_perturbation_reproduces_centers():
    cloud = generate_perturbed_lattice(10, perturb_frac=0.0, seed=9)
    np.testing.assert_array_equal(cloud.positions, cloud.unperturbed_centers())


def test_same_seed_is_bitwise_identical():
    a = generate_perturbed_lattice(10, seed=42)
    b = generate_perturbed_lattice(10, seed=42)
    np.testing.assert_array_equal(a.positions, b.positions)


def test_different_seeds_differ():
    a = generate_perturbed_lattice(10, seed=0)
    b = generate_perturbed_lattice(10, seed=1)
    assert np.any(a.positions != b.positions)


def test_jitter_amplitude_bounded():
    cloud = generate_perturbed_lattice(20, perturb_frac=0.2, seed=11)
    offsets = cloud.positions - cloud.unperturbed_centers()
    assert np.abs(offsets).max() < 0.2 * cloud.h


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n": 7},
        {"n": 10, "perturb_frac": 0.5},
        {"n": 10, "perturb_frac": -0.1},
        {"n": 10, "delta_factor": 0.0},
        {"n": 8, "delta_factor": 4.0},
    ],
)
def test_invalid_configurations_raise(kwargs):
    with pytest.raises(ConfigError):
        generate_perturbed_lattice(**kwargs)


def test_narrow_collar_rejected():
    spec = DomainSpec(collar_width=3.0 / 16)  # under 2 * delta = 7/16... at n=16
    with pytest.raises(ConfigError):
        generate_perturbed_lattice(16, spec=spec)


def test_hole_and_inclusion_exclusive():
    with pytest.raises(ConfigError):
        DomainSpec(hole=Disk((0.5, 0.5), 0.2), inclusion=Disk((0.5, 0.5), 0.2))


def test_disk_requires_positive_radius():
    with pytest.raises(ConfigError):
        Disk((0.0, 0.0), 0.0)


def test_disk_signed_distance():
    disk = Disk((0.5, 0.5), 0.2)
    pts = np.array([[0.5, 0.5], [0.7, 0.5], [0.9, 0.5]])
    np.testing.assert_allclose(
        disk.signed_distance(pts), [-0.2, 0.0, 0.2], atol=1e-15
    )


def test_hole_flags_strict_interior_centers():
    disk = Disk((0.5, 0.5), 0.2)
    cloud = generate_perturbed_lattice(16, seed=2, spec=DomainSpec(hole=disk))
    centers = cloud.unperturbed_centers()
    expected = np.hypot(centers[:, 0] - 0.5, centers[:, 1] - 0.5) < 0.2
    np.testing.assert_array_equal(cloud.hole_interior, expected)
    assert cloud.hole_interior.any()


def test_neighborhoods_match_brute_force():
    cloud = generate_perturbed_lattice(8, seed=4)
    nbrs = build_neighborhoods(cloud)
    expected = brute_force_pairs(cloud.positions, cloud.delta)
    got = np.column_stack([nbrs.row_index, nbrs.indices])
    # both orderings are (i, j) lexicographic
    order = np.lexsort((expected[:, 1], expected[:, 0]))
    np.testing.assert_array_equal(got, expected[order])


def test_neighborhoods_are_symmetric():
    cloud = generate_perturbed_lattice(9, seed=6)
    nbrs = build_neighborhoods(cloud)
    pairs = set(zip(nbrs.row_index.tolist(), nbrs.indices.tolist()))
    assert all((j, i) in pairs for i, j in pairs)


def test_uniform_grid_interior_stencil_has_36_neighbors():
    """At delta = 3.5 h an unjittered node sees exactly 36 others."""
    offsets = [
        (di, dj)
        for di in range(-3, 4)
        for dj in range(-3, 4)
        if 0 < di * di + dj * dj <= 3.5**2
    ]
    assert len(offsets) == 36

    cloud = generate_perturbed_lattice(12, perturb_frac=0.0, seed=0)
    nbrs = build_neighborhoods(cloud)
    near = cloud.center_distance_to_domain() <= cloud.delta
    counts = np.diff(nbrs.indptr)
    assert np.all(counts[near] == 36)


def test_offsets_and_distances_consistent():
    cloud = generate_perturbed_lattice(8, seed=8)
    nbrs = build_neighborhoods(cloud)
    i, j = nbrs.row_index, nbrs.indices
    np.testing.assert_allclose(
        nbrs.offsets, cloud.positions[j] - cloud.positions[i], atol=0.0
    )
    np.testing.assert_allclose(
        nbrs.distances, np.hypot(nbrs.offsets[:, 0], nbrs.offsets[:, 1])
    )
    assert nbrs.distances.min() > 0.0
    assert nbrs.distances.max() <= cloud.delta * (1 + 1e-15)


def test_horizon_is_inclusive():
    """A pair at exactly the horizon distance is kept."""
    import dataclasses

    cloud = generate_perturbed_lattice(8, perturb_frac=0.0, seed=0)
    pos = cloud.positions.copy()
    # move node 1 to exactly delta to the right of node 0
    pos[1] = pos[0] + [cloud.delta, 0.0]
    moved = dataclasses.replace(cloud, positions=pos)
    nbrs = build_neighborhoods(moved)
    assert 1 in nbrs.neighbors_of(0)
    assert 0 in nbrs.neighbors_of(1)


def test_pair_slice_matches_neighbors():
    cloud = generate_perturbed_lattice(8, seed=12)
    nbrs = build_neighborhoods(cloud)
    for i in (0, 17, cloud.n_points - 1):
        sl = nbrs.pair_slice(i)
        np.testing.assert_array_equal(nbrs.indices[sl], nbrs.neighbors_of(i))
        np.testing.assert_array_equal(nbrs.row_index[sl], i)


def test_separation_bound_under_jitter():
    """Per-coordinate jitter of 0.2 h keeps nodes at least 0.6 h apart."""
    cloud = generate_perturbed_lattice(12, seed=13)
    nbrs = build_neighborhoods(cloud)
    assert nbrs.distances.min() >= 0.6 * cloud.h - 1e-12


def test_uniformity_metrics_uniform_grid():
    cloud = generate_perturbed_lattice(10, perturb_frac=0.0, seed=0)
    fill, separation = uniformity_metrics(cloud)
    assert separation == pytest.approx(cloud.h / 2)
    assert fill >= separation
    assert fill <= cloud.h


def test_uniformity_metrics_jittered():
    cloud = generate_perturbed_lattice(10, seed=21)
    fill, separation = uniformity_metrics(cloud)
    assert 0.0 < separation < fill < 2.0 * cloud.h
