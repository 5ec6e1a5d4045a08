"""Shared test fixtures and independent oracles.

The sweep generator builds well-conditioned families by jittering
pre-optimized direction sets (maximin N-subset determinant) instead of
raw rejection sampling, which keeps 200-family sweeps fast while staying
within desk-scale conditioning.  Oracles here are deliberately independent
of the library code paths they check: high-precision classical divided
differences via mpmath, nested central finite differences, and closed-form
monomial integrals.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from cylattice import ChungYaoLattice, HyperplaneFamily, cardinal_polynomial
from cylattice.errors import GeneralPositionError

# Direction sets maximizing the min |det| over N-subsets (hill-climbed once,
# frozen; jitter in the generator keeps families random but conditioned).
SPREAD_R3 = {
    5: np.array([
        [-0.204197, 0.773117, 0.600495],
        [-0.182734, -0.128046, 0.974788],
        [-0.588781, -0.745633, 0.31204],
        [-0.838166, -0.225649, -0.496548],
        [-0.631019, 0.701598, -0.331021],
    ]),
    6: np.array([
        [0.438428, 0.897418, 0.049214],
        [-0.603527, 0.747714, 0.276909],
        [-0.713042, -0.335337, 0.615727],
        [0.261897, 0.415656, 0.870999],
        [0.961132, 0.085598, 0.262485],
        [-0.246558, 0.719515, -0.649236],
    ]),
    7: np.array([
        [0.201663, -0.938211, -0.281234],
        [-0.827247, 0.438127, -0.351719],
        [-0.670386, -0.593597, 0.445224],
        [0.536904, 0.778807, 0.324336],
        [0.323181, -0.096323, 0.941422],
        [-0.930941, 0.177077, 0.319363],
        [-0.270005, 0.622499, 0.734569],
    ]),
}


def random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def spread_normals(rng: np.random.Generator, dimension: int, count: int,
                   jitter: float = 0.02) -> np.ndarray:
    if dimension == 1:
        return np.ones((count, 1))
    if dimension == 2:
        angles = np.pi * np.arange(count) / count \
            + rng.uniform(-jitter, jitter, count) * np.pi
        base = np.column_stack([np.cos(angles), np.sin(angles)])
    elif dimension == 3:
        if count <= 4:
            base = np.vstack([np.eye(3), np.ones((1, 3)) / math.sqrt(3.0)])[:count]
        else:
            base = SPREAD_R3[count].copy()
        base = base + jitter * rng.standard_normal(base.shape)
        base /= np.linalg.norm(base, axis=1)[:, None]
    else:
        raise ValueError("spread fixtures cover dimensions 1..3")
    return base @ random_rotation(rng, dimension).T


def spread_family(
    rng: np.random.Generator,
    dimension: int,
    count: int,
    max_norm: float = 3.0,
    offset_range: tuple[float, float] = (0.2, 1.0),
    min_rel_gap: float = 0.01,
    max_amp: float = 3e4,
    max_tries: int = 200,
) -> HyperplaneFamily:
    """Well-conditioned random family with all vertices inside max_norm.

    Scaling every offset by a common factor scales the lattice by the same
    factor while leaving the normals (hence all determinants) unchanged, so
    oversized draws are rescaled into the ball instead of rejected.  Draws
    with nearly concurrent hyperplanes (vertex gap below `min_rel_gap` times
    the diameter, or cardinal-coefficient amplification above `max_amp`) are
    redrawn: they are legitimately ill-conditioned for any interpolation
    method in coefficient space and would only measure roundoff, not
    correctness.  Empirically the coefficient error of reproducing a
    polynomial is about 2e-15 times the amplification.
    """
    for _ in range(max_tries):
        normals = spread_normals(rng, dimension, count)
        if dimension == 1:
            offsets = np.linspace(offset_range[0], offset_range[1], count) \
                + rng.uniform(-0.02, 0.02, count)
        else:
            offsets = rng.uniform(offset_range[0], offset_range[1], count)
        try:
            family = HyperplaneFamily.from_arrays(normals, offsets)
        except GeneralPositionError:
            continue
        lattice = ChungYaoLattice(family)
        norm = lattice.norm()
        if norm > max_norm:
            offsets = offsets * (max_norm * rng.uniform(0.6, 1.0) / norm)
            try:
                family = HyperplaneFamily.from_arrays(normals, offsets)
            except GeneralPositionError:
                continue
            lattice = ChungYaoLattice(family)
        pts = lattice.vertex_array()
        if len(pts) > 1:
            diffs = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
            diffs[np.diag_indices(len(pts))] = np.inf
            if float(diffs.min()) < min_rel_gap * lattice.diameter():
                continue
            amp: dict = {}
            for subset in lattice.vertices:
                for alpha, c in cardinal_polynomial(lattice, subset).coeffs.items():
                    amp[alpha] = amp.get(alpha, 0.0) + abs(c)
            if max(amp.values()) > max_amp:
                continue
        return family
    raise RuntimeError(f"could not draw a conditioned family N={dimension} d={count}")


def sweep(rng: np.random.Generator, families_per_case: int = 20,
          dims=(2, 3), extra_degrees: int = 4):
    """Yield (N, d, family) over the standard acceptance sweep."""
    for n_dim in dims:
        for d in range(n_dim, n_dim + extra_degrees + 1):
            for _ in range(families_per_case):
                yield n_dim, d, spread_family(rng, n_dim, d)


def random_poly_coeffs(rng: np.random.Generator, indices) -> dict:
    return {alpha: rng.uniform(-1.0, 1.0) for alpha in indices}


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def finite_difference_directional(func, x, vectors, h: float = 1e-5) -> float:
    """Nested central differences for D_{v_1}...D_{v_s} f(x) (test oracle only)."""
    x = np.asarray(x, dtype=float)
    if not vectors:
        return float(func(x))
    v = np.asarray(vectors[0], dtype=float)
    rest = vectors[1:]
    plus = finite_difference_directional(func, x + h * v, rest, h)
    minus = finite_difference_directional(func, x - h * v, rest, h)
    return (plus - minus) / (2.0 * h)


def classical_divided_difference(values_fn, nodes) -> float:
    """Newton divided difference at distinct nodes, in 50-digit arithmetic.

    `values_fn` maps an mpmath scalar to an mpmath scalar; independent of
    the simplex-integral implementation under test.
    """
    import mpmath as mp

    with mp.workdps(50):
        xs = [mp.mpf(repr(float(z))) for z in nodes]
        table = [values_fn(z) for z in xs]
        n = len(xs)
        for level in range(1, n):
            table = [
                (table[i + 1] - table[i]) / (xs[i + level] - xs[i])
                for i in range(n - level)
            ]
        return float(table[0])


def brute_force_vandermonde_3x3(points) -> float:
    """3x3 determinant of {1, x1, x2} rows by cofactor expansion (oracle)."""
    (a, b, c) = points
    m = [
        [1.0, 1.0, 1.0],
        [a[0], b[0], c[0]],
        [a[1], b[1], c[1]],
    ]
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def pairwise_dets(normals) -> list[float]:
    """|det| of every N-subset by direct enumeration (oracle for the report)."""
    normals = np.asarray(normals, dtype=float)
    n = normals.shape[1]
    return [
        abs(float(np.linalg.det(normals[list(idx)])))
        for idx in combinations(range(len(normals)), n)
    ]
