import math

import numpy as np
import pytest

from cylattice import (
    ChungYaoLattice,
    Hyperplane,
    HyperplaneFamily,
    check_general_position,
    deboor_identity_residual,
    direction_vector,
    random_family,
    solve_vertex,
)
from cylattice.errors import DegenerateSubsetError, GeneralPositionError

from helpers import pairwise_dets, spread_family

UNIT_TRIANGLE = [
    Hyperplane([1.0, 0.0], 0.0),
    Hyperplane([0.0, 1.0], 0.0),
    Hyperplane([1.0, 1.0], 1.0),
]


def test_hyperplane_normalizes_input():
    h = Hyperplane([3.0, 4.0], 10.0)
    assert np.linalg.norm(h.normal) == pytest.approx(1.0, abs=1e-15)
    assert h.offset == pytest.approx(2.0)
    # same zero set: value at a point on the plane is still zero
    assert h.value([2.0, 1.0]) == pytest.approx(0.0, abs=1e-15)


def test_hyperplane_rejects_zero_normal():
    with pytest.raises(ValueError):
        Hyperplane([0.0, 0.0], 1.0)


def test_general_position_unit_triangle():
    report = check_general_position(UNIT_TRIANGLE)
    assert report.accepted
    # oracle: enumerate the three pair determinants directly
    dets = pairwise_dets([h.normal for h in UNIT_TRIANGLE])
    assert sorted(dets) == pytest.approx([1 / math.sqrt(2), 1 / math.sqrt(2), 1.0])
    assert report.min_det == pytest.approx(1 / math.sqrt(2), abs=1e-14)


def test_general_position_rejects_common_point():
    # three distinct lines through the origin: vertex map is constant
    planes = [
        Hyperplane([1.0, 0.0], 0.0),
        Hyperplane([0.0, 1.0], 0.0),
        Hyperplane([1.0, 1.0], 0.0),
    ]
    report = check_general_position(planes)
    assert not report.accepted
    assert report.colliding_pair is not None
    with pytest.raises(GeneralPositionError):
        HyperplaneFamily(planes)


def test_general_position_rejects_parallel_pair():
    planes = [
        Hyperplane([1.0, 0.0], 0.0),
        Hyperplane([1.0, 0.0], 1.0),
        Hyperplane([0.0, 1.0], 0.0),
    ]
    report = check_general_position(planes)
    assert not report.accepted
    assert report.degenerate_subset == (0, 1)


def test_solve_vertex_examples():
    assert solve_vertex(UNIT_TRIANGLE[:2]) == pytest.approx([0.0, 0.0])
    assert solve_vertex([UNIT_TRIANGLE[0], UNIT_TRIANGLE[2]]) == pytest.approx([0.0, 1.0])
    assert solve_vertex([UNIT_TRIANGLE[1], UNIT_TRIANGLE[2]]) == pytest.approx([1.0, 0.0])


def test_solve_vertex_residual_contract():
    rng = np.random.default_rng(5)
    for _ in range(50):
        normals = rng.standard_normal((3, 3))
        planes = [Hyperplane(n, c) for n, c in zip(normals, rng.uniform(-2, 2, 3))]
        try:
            theta = solve_vertex(planes)
        except DegenerateSubsetError:
            continue
        residual = max(abs(h.value(theta)) for h in planes)
        assert residual <= 1e-10 * (1.0 + np.linalg.norm(theta))


def test_solve_vertex_near_singular_raises():
    planes = [Hyperplane([1.0, 0.0], 0.0), Hyperplane([1.0, 1e-12], 1.0)]
    with pytest.raises(DegenerateSubsetError):
        solve_vertex(planes)


def test_direction_vector_planar_cases():
    assert direction_vector([np.array([1.0, 0.0])]) == pytest.approx([0.0, -1.0])
    assert direction_vector([np.array([0.0, 1.0])]) == pytest.approx([1.0, 0.0])


def test_direction_vector_three_dimensional():
    # cofactor expansion of det(v, e1, e2) gives v3, hence n_K = e3
    n_k = direction_vector([np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])])
    assert n_k == pytest.approx([0.0, 0.0, 1.0])


def test_direction_vector_dependent_normals_raise():
    with pytest.raises(DegenerateSubsetError):
        direction_vector([np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0])])


def test_direction_vector_properties():
    rng = np.random.default_rng(11)
    for n_dim in (2, 3):
        for d in (n_dim, n_dim + 2):
            family = spread_family(rng, n_dim, d)
            lattice = ChungYaoLattice(family)
            lines = lattice.line_subsets()
            for line in lines:
                norm = np.linalg.norm(line.direction)
                assert 0.0 < norm <= 1.0 + 1e-14
                for i in line.indices:
                    inner = abs(family.hyperplanes[i].normal @ line.direction)
                    assert inner <= 1e-12
            # distinct subsets give distinct directions
            for a in range(len(lines)):
                for b in range(a + 1, len(lines)):
                    assert np.linalg.norm(lines[a].direction - lines[b].direction) > 1e-8


def test_vertex_count_matches_binomial():
    rng = np.random.default_rng(3)
    for n_dim, d in [(2, 5), (3, 6), (1, 4)]:
        family = spread_family(rng, n_dim, d)
        lattice = ChungYaoLattice(family)
        assert len(lattice.vertices) == math.comb(d, n_dim)
        # equals dim P^{d-N}(R^N)
        assert math.comb(d, n_dim) == math.comb(n_dim + (d - n_dim), n_dim)


def test_deboor_identity_at_vertex_and_fixed_point():
    family = HyperplaneFamily(UNIT_TRIANGLE)
    lattice = ChungYaoLattice(family)
    theta = lattice.vertex((0, 1))
    assert deboor_identity_residual(lattice, (0, 1), theta) <= 1e-15
    assert deboor_identity_residual(lattice, (0, 1), np.array([1.0, 1.0])) <= 1e-12


def test_deboor_identity_random_sweep():
    rng = np.random.default_rng(17)
    for n_dim in (2, 3):
        family = spread_family(rng, n_dim, n_dim + 3)
        lattice = ChungYaoLattice(family)
        xs = rng.uniform(-10.0, 10.0, size=(100, n_dim))
        for subset in lattice.vertices:
            assert deboor_identity_residual(lattice, subset, xs) <= 1e-10


def test_line_subsets_counts_and_collinearity():
    rng = np.random.default_rng(23)
    # d = N: every line subset carries exactly one point
    family = spread_family(rng, 2, 2)
    lines = ChungYaoLattice(family).line_subsets()
    assert all(line.points.shape[0] == 1 for line in lines)

    # unit triangle: 3 line subsets with 2 points each
    lines = ChungYaoLattice(HyperplaneFamily(UNIT_TRIANGLE)).line_subsets()
    assert len(lines) == 3
    assert all(line.points.shape[0] == 2 for line in lines)

    # N=2, d=4: 4 subsets of 3 collinear points
    family = spread_family(rng, 2, 4)
    lines = ChungYaoLattice(family).line_subsets()
    assert len(lines) == 4
    for line in lines:
        assert line.points.shape[0] == 3
        for i in line.indices:
            assert np.max(np.abs(family.hyperplanes[i].value(line.points))) <= 1e-10


def test_sign_flip_leaves_vertices_unchanged():
    rng = np.random.default_rng(29)
    family = spread_family(rng, 2, 4)
    lattice = ChungYaoLattice(family)
    flipped_planes = list(family.hyperplanes)
    flipped_planes[1] = flipped_planes[1].flipped()
    flipped = ChungYaoLattice(HyperplaneFamily(flipped_planes))
    for subset, theta in lattice.vertices.items():
        assert np.max(np.abs(flipped.vertex(subset) - theta)) <= 1e-12


def test_random_family_is_seeded_and_valid():
    fam1 = random_family(np.random.default_rng(99), 2, 4)
    fam2 = random_family(np.random.default_rng(99), 2, 4)
    assert np.allclose(fam1.normal_matrix(), fam2.normal_matrix())
    assert fam1.report.accepted
    assert np.all(fam1.offsets() >= 0.2) and np.all(fam1.offsets() <= 1.0)


def test_one_dimensional_family():
    # points on the line as degree d-1 lattice
    planes = [Hyperplane([1.0], 0.3), Hyperplane([-1.0], -0.7), Hyperplane([1.0], 1.5)]
    family = HyperplaneFamily(planes)
    lattice = ChungYaoLattice(family)
    values = sorted(v[0] for v in lattice.vertex_array())
    assert values == pytest.approx([0.3, 0.7, 1.5])
    lines = lattice.line_subsets()
    assert len(lines) == 1 and lines[0].points.shape[0] == 3
    assert lines[0].direction == pytest.approx([1.0])
