"""Hyperplane families, general position, and Chung-Yao lattice geometry.

A hyperplane is the zero set of an affine form ell(x) = <n, x> - c with a
unit normal n.  A family of d >= N hyperplanes in general position determines
C(d, N) lattice vertices (one per N-subset) and C(d, N-1) lattice lines (one
per (N-1)-subset), each carrying a direction vector defined through a
generalized cross product of the subset's normals.

Subsets are always handled in the ascending index order fixed by the family
at construction; that convention pins the sign of every direction vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, DegenerateSubsetError, GeneralPositionError

DEFAULT_GP_TOLERANCE = 1e-8
DEFAULT_DEDUP_TOLERANCE = 1e-8
MAX_DIMENSION = 8


@dataclass(frozen=True)
class Hyperplane:
    """The affine form ell(x) = <normal, x> - offset with ||normal|| = 1.

    Inputs with a non-unit normal are normalized at construction (the offset
    is divided by the same norm, so the zero set is unchanged); zero normals
    are rejected.
    """

    normal: np.ndarray
    offset: float

    def __init__(self, normal: Sequence[float], offset: float):
        n = np.array(normal, dtype=float)
        norm = float(np.linalg.norm(n))
        if not norm > 1e-14:
            raise ValueError("hyperplane normal must be nonzero")
        c = float(offset)
        if abs(norm - 1.0) > 1e-12:
            n = n / norm
            c = c / norm
        n.setflags(write=False)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", c)

    @property
    def dimension(self) -> int:
        return self.normal.size

    def value(self, x):
        """ell(x) = <normal, x> - offset; x may be (N,) or (M, N)."""
        return np.asarray(x, dtype=float) @ self.normal - self.offset

    def linear(self, v):
        """The linear part: <normal, v>."""
        return np.asarray(v, dtype=float) @ self.normal

    def flipped(self) -> "Hyperplane":
        """The same hyperplane with the opposite normalized equation."""
        return Hyperplane(-self.normal, -self.offset)


# ---------------------------------------------------------------------------
# General-position checking
# ---------------------------------------------------------------------------

@dataclass
class GeneralPositionReport:
    """Certificate or rejection report for a hyperplane family."""

    accepted: bool
    dimension: int
    count: int
    min_det: float = math.nan
    min_det_subset: tuple | None = None
    min_vertex_gap: float = math.nan
    colliding_pair: tuple | None = None
    degenerate_subset: tuple | None = None
    det_tolerance: float = DEFAULT_GP_TOLERANCE
    dedup_tolerance: float = DEFAULT_DEDUP_TOLERANCE

    def __str__(self):
        if self.accepted:
            return (
                f"general position: min |det| = {self.min_det:.3e} over N-subsets, "
                f"min vertex gap = {self.min_vertex_gap:.3e}"
            )
        if self.degenerate_subset is not None:
            return (
                f"rejected: subset {self.degenerate_subset} has |det| = "
                f"{self.min_det:.3e} <= {self.det_tolerance:.1e}"
            )
        if self.colliding_pair is not None:
            return (
                f"rejected: subsets {self.colliding_pair} produce coincident vertices "
                f"(gap {self.min_vertex_gap:.3e})"
            )
        return "rejected: no general-position family found within the retry budget"


def solve_vertex(hyperplanes: Sequence[Hyperplane], det_tolerance: float = DEFAULT_GP_TOLERANCE) -> np.ndarray:
    """Intersection point of N hyperplanes in R^N.

    Solves <n_i, x> = c_i with one step of iterative refinement; raises
    DegenerateSubsetError when the unit-normal determinant falls at or below
    the tolerance.
    """
    mat = np.stack([h.normal for h in hyperplanes])
    rhs = np.array([h.offset for h in hyperplanes])
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError(f"need N hyperplanes in R^N, got matrix shape {mat.shape}")
    det = float(np.linalg.det(mat))
    if abs(det) <= det_tolerance:
        raise DegenerateSubsetError(
            f"near-singular subset: |det| = {abs(det):.3e} <= {det_tolerance:.1e}"
        )
    x = np.linalg.solve(mat, rhs)
    x = x + np.linalg.solve(mat, rhs - mat @ x)
    return x


def check_general_position(
    hyperplanes: Sequence[Hyperplane],
    det_tolerance: float = DEFAULT_GP_TOLERANCE,
    dedup_tolerance: float = DEFAULT_DEDUP_TOLERANCE,
) -> GeneralPositionReport:
    """Check every N-subset determinant and the injectivity of the vertex map.

    Accepts iff (a) min over N-subsets of |det(unit normals)| exceeds
    `det_tolerance` and (b) all vertices are pairwise separated by more than
    `dedup_tolerance` relative to the lattice diameter.  The report names the
    offending subset or colliding pair on rejection.
    """
    hyperplanes = list(hyperplanes)
    dim = hyperplanes[0].dimension
    count = len(hyperplanes)
    report = GeneralPositionReport(
        accepted=False, dimension=dim, count=count,
        det_tolerance=det_tolerance, dedup_tolerance=dedup_tolerance,
    )
    for h in hyperplanes:
        if h.dimension != dim:
            raise ValueError("mixed hyperplane dimensions")
    if count < dim:
        raise ValueError(f"need at least {dim} hyperplanes in R^{dim}, got {count}")

    min_det = math.inf
    min_subset = None
    for subset in combinations(range(count), dim):
        mat = np.stack([hyperplanes[i].normal for i in subset])
        det = abs(float(np.linalg.det(mat)))
        if det < min_det:
            min_det, min_subset = det, subset
    report.min_det = min_det
    report.min_det_subset = min_subset
    if min_det <= det_tolerance:
        report.degenerate_subset = min_subset
        return report

    subsets = list(combinations(range(count), dim))
    vertices = [solve_vertex([hyperplanes[i] for i in s], det_tolerance) for s in subsets]
    pts = np.stack(vertices)
    diameter = 0.0
    min_gap = math.inf
    pair = None
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            gap = float(np.linalg.norm(pts[a] - pts[b]))
            diameter = max(diameter, gap)
            if gap < min_gap:
                min_gap, pair = gap, (subsets[a], subsets[b])
    if len(pts) == 1:
        min_gap = math.inf
    report.min_vertex_gap = min_gap
    if pair is not None and min_gap <= dedup_tolerance * max(1.0, diameter):
        report.colliding_pair = pair
        return report
    report.accepted = True
    return report


# ---------------------------------------------------------------------------
# Families and lattices
# ---------------------------------------------------------------------------

class HyperplaneFamily:
    """Ordered family of d >= N hyperplanes, verified in general position.

    The construction order is fixed; every subset inherits it.  Construction
    raises GeneralPositionError (with the report attached) on rejection.
    """

    def __init__(
        self,
        hyperplanes: Sequence[Hyperplane],
        det_tolerance: float = DEFAULT_GP_TOLERANCE,
        dedup_tolerance: float = DEFAULT_DEDUP_TOLERANCE,
    ):
        self.hyperplanes = tuple(hyperplanes)
        self.dimension = self.hyperplanes[0].dimension
        if self.dimension > MAX_DIMENSION:
            raise ValueError(f"dimension {self.dimension} exceeds supported maximum {MAX_DIMENSION}")
        self.det_tolerance = det_tolerance
        self.report = check_general_position(self.hyperplanes, det_tolerance, dedup_tolerance)
        if not self.report.accepted:
            raise GeneralPositionError(self.report)

    @classmethod
    def from_arrays(cls, normals, offsets, **kw) -> "HyperplaneFamily":
        planes = [Hyperplane(n, c) for n, c in zip(normals, offsets)]
        return cls(planes, **kw)

    @property
    def count(self) -> int:
        return len(self.hyperplanes)

    @property
    def degree(self) -> int:
        """Interpolation degree of the induced lattice: d - N."""
        return self.count - self.dimension

    def normal_matrix(self) -> np.ndarray:
        return np.stack([h.normal for h in self.hyperplanes])

    def offsets(self) -> np.ndarray:
        return np.array([h.offset for h in self.hyperplanes])

    def max_offset(self) -> float:
        return float(np.max(np.abs(self.offsets())))

    def subset(self, indices) -> list[Hyperplane]:
        return [self.hyperplanes[i] for i in indices]

    def __len__(self):
        return self.count

    def __repr__(self):
        return f"HyperplaneFamily(N={self.dimension}, d={self.count})"


def direction_vector(normals: Sequence[np.ndarray]) -> np.ndarray:
    """Direction n_K of the line shared by N-1 hyperplanes.

    Defined componentwise by det(e_j, n_1, ..., n_{N-1}) = (n_K)_j with the
    normals as columns, i.e. a generalized cross product via signed cofactors.
    For unit normals, 0 < ||n_K|| <= 1 by Hadamard's inequality; the zero
    vector signals linear dependence and raises.
    """
    normals = [np.asarray(n, dtype=float) for n in normals]
    dim = normals[0].size if normals else 1
    if len(normals) != dim - 1:
        raise ValueError(f"need N-1 = {dim - 1} normals, got {len(normals)}")
    if dim == 1:
        return np.array([1.0])
    cols = np.column_stack(normals)
    out = np.empty(dim)
    for j in range(dim):
        minor = np.delete(cols, j, axis=0)
        out[j] = (-1.0) ** j * float(np.linalg.det(minor))
    if float(np.linalg.norm(out)) <= 1e-14:
        raise DegenerateSubsetError("line subset has linearly dependent normals")
    return out


@dataclass(frozen=True)
class LineSubset:
    """The lattice points on the line shared by an (N-1)-subset K.

    `points` holds the d-N+1 vertices theta_H with K contained in H, ordered
    by the index completing K; `direction` is n_K.
    """

    indices: tuple[int, ...]
    direction: np.ndarray
    completing: tuple[int, ...]
    points: np.ndarray

    def point_list(self):
        return [self.points[i] for i in range(self.points.shape[0])]


class ChungYaoLattice:
    """All vertices theta_H of a family, indexed by ascending N-subsets."""

    def __init__(self, family: HyperplaneFamily):
        self.family = family
        self.degree = family.degree
        self.vertices: dict[tuple[int, ...], np.ndarray] = {}
        for subset in combinations(range(family.count), family.dimension):
            theta = solve_vertex(family.subset(subset), family.det_tolerance)
            residual = float(np.max(np.abs([h.value(theta) for h in family.subset(subset)])))
            if residual > 1e-10 * (1.0 + float(np.linalg.norm(theta))):
                raise ConsistencyError(
                    f"vertex residual {residual:.3e} too large for subset {subset}"
                )
            theta.setflags(write=False)
            self.vertices[subset] = theta

    @property
    def dimension(self) -> int:
        return self.family.dimension

    def vertex(self, subset) -> np.ndarray:
        return self.vertices[tuple(sorted(subset))]

    def vertex_array(self) -> np.ndarray:
        return np.stack(list(self.vertices.values()))

    def norm(self) -> float:
        """max ||theta|| over the lattice."""
        return float(np.max(np.linalg.norm(self.vertex_array(), axis=1)))

    def diameter(self) -> float:
        pts = self.vertex_array()
        if len(pts) == 1:
            return 0.0
        diffs = pts[:, None, :] - pts[None, :, :]
        return float(np.max(np.linalg.norm(diffs, axis=-1)))

    def direction(self, indices) -> np.ndarray:
        """n_K for an (N-1)-subset of family indices (ascending order)."""
        idx = tuple(sorted(indices))
        return direction_vector([self.family.hyperplanes[i].normal for i in idx])

    def line_subsets(self) -> list[LineSubset]:
        """One LineSubset per (N-1)-subset K, with collinearity verified."""
        fam = self.family
        out = []
        for k_idx in combinations(range(fam.count), fam.dimension - 1):
            direction = self.direction(k_idx)
            completing = tuple(j for j in range(fam.count) if j not in k_idx)
            pts = []
            for j in completing:
                theta = self.vertex(tuple(sorted(k_idx + (j,))))
                pts.append(theta)
            pts = np.stack(pts)
            if pts.shape[0] != fam.count - fam.dimension + 1:
                raise ConsistencyError(
                    f"line subset {k_idx} has {pts.shape[0]} points, "
                    f"expected {fam.count - fam.dimension + 1}"
                )
            scale = 1.0 + float(np.max(np.linalg.norm(pts, axis=1)))
            for i in k_idx:
                res = float(np.max(np.abs(fam.hyperplanes[i].value(pts))))
                if res > 1e-10 * scale:
                    raise ConsistencyError(
                        f"points of line subset {k_idx} leave hyperplane {i} "
                        f"(residual {res:.3e})"
                    )
            out.append(LineSubset(indices=k_idx, direction=direction,
                                  completing=completing, points=pts))
        return out

    def __repr__(self):
        return (
            f"ChungYaoLattice(N={self.dimension}, d={self.family.count}, "
            f"degree={self.degree}, {len(self.vertices)} vertices)"
        )


def build_lattice(family: HyperplaneFamily) -> ChungYaoLattice:
    return ChungYaoLattice(family)


def deboor_identity_residual(lattice: ChungYaoLattice, subset, x) -> float:
    """Residual of the exact affine decomposition of x in the n_{H \\ ell} basis.

    Returns || x - theta_H - sum_{ell in H} [ell(x) / ell~(n_{H\\ell})] n_{H\\ell} ||
    (max over the batch when x has shape (M, N)).  Zero in exact arithmetic
    for any x whenever H is in general position.
    """
    fam = lattice.family
    subset = tuple(sorted(subset))
    theta = lattice.vertex(subset)
    x = np.asarray(x, dtype=float)
    batched = x.ndim == 2
    pts = np.atleast_2d(x)
    recon = np.broadcast_to(theta, pts.shape).copy()
    for i in subset:
        rest = tuple(j for j in subset if j != i)
        n_k = direction_vector([fam.hyperplanes[j].normal for j in rest])
        denom = float(fam.hyperplanes[i].linear(n_k))
        coeff = fam.hyperplanes[i].value(pts) / denom
        recon = recon + coeff[:, None] * n_k
    del batched
    residuals = np.linalg.norm(pts - recon, axis=1)
    return float(np.max(residuals))


# ---------------------------------------------------------------------------
# Seeded random families
# ---------------------------------------------------------------------------

def random_family(
    rng: np.random.Generator,
    dimension: int,
    count: int,
    det_tolerance: float = DEFAULT_GP_TOLERANCE,
    min_subset_det: float = 0.0,
    max_lattice_norm: float = math.inf,
    min_vertex_gap: float = 0.0,
    offset_range: tuple[float, float] = (0.2, 1.0),
    max_tries: int = 2000,
) -> HyperplaneFamily:
    """Seeded generator of general-position families.

    Normals are uniform on the unit sphere and offsets uniform in
    `offset_range`; candidates are retried (up to `max_tries`) until general
    position holds and the optional conditioning knobs are met:
    `min_subset_det` floors every N-subset determinant, `max_lattice_norm`
    bounds max ||theta||, `min_vertex_gap` floors pairwise vertex distances.
    """
    lo, hi = offset_range
    for _ in range(max_tries):
        normals = rng.standard_normal((count, dimension))
        norms = np.linalg.norm(normals, axis=1)
        if np.any(norms < 1e-8):
            continue
        normals /= norms[:, None]
        offsets = rng.uniform(lo, hi, size=count)
        try:
            family = HyperplaneFamily.from_arrays(normals, offsets,
                                                  det_tolerance=det_tolerance)
        except GeneralPositionError:
            continue
        if family.report.min_det < min_subset_det:
            continue
        if math.isfinite(max_lattice_norm) or min_vertex_gap > 0.0:
            lattice = ChungYaoLattice(family)
            if lattice.norm() > max_lattice_norm:
                continue
            pts = lattice.vertex_array()
            if len(pts) > 1 and min_vertex_gap > 0.0:
                diffs = pts[:, None, :] - pts[None, :, :]
                gaps = np.linalg.norm(diffs, axis=-1)
                gaps[np.diag_indices(len(pts))] = math.inf
                if float(np.min(gaps)) < min_vertex_gap:
                    continue
        return family
    raise GeneralPositionError(GeneralPositionReport(
        accepted=False, dimension=dimension, count=count,
        det_tolerance=det_tolerance,
    ))
