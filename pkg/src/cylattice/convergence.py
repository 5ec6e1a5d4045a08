"""Convergence of interpolants of shrinking lattices toward Taylor polynomials.

A lattice sequence converges when (C1) all vertices tend to the origin and
(C2) the parallelotope volumes of every N-subset of unit normals stay
bounded away from zero.  Under (C2), (C1) is equivalent to (C3): the
hyperplane offsets tend to zero.  This module measures those statistics on
finite index ranges, generates the two worked example families (an affine
image of the unit triangle, and a flattening triangle that violates (C2)),
fits empirical error rates against the lattice norm, and evaluates the
explicit error bound that the convergence proof yields.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import CyLatticeError
from .geometry import (
    ChungYaoLattice,
    Hyperplane,
    HyperplaneFamily,
)
from .poly import MultiPoly, taylor
from .functions import SmoothFunction
from .chungyao import interpolate, pk_polynomial
from . import poly as _poly

DEFAULT_C2_THRESHOLD = 0.05
DEFAULT_DECAY_FACTOR = 0.1
DEFAULT_RADIUS = 0.5
DEFAULT_GRID_PER_AXIS = 21
DEFAULT_S_VALUES = (2, 4, 8, 16, 32, 64, 128, 256)


# ---------------------------------------------------------------------------
# Sequences of families
# ---------------------------------------------------------------------------

@dataclass
class LatticeSequence:
    """Generator of hyperplane families indexed by s (with t = t_of_s(s))."""

    generator: Callable[[int], HyperplaneFamily]
    label: str = ""
    t_of_s: Callable[[int], float] = lambda s: 1.0 / s

    def family(self, s: int) -> HyperplaneFamily:
        return self.generator(s)


def transform_family(family: HyperplaneFamily, matrix, offset) -> HyperplaneFamily:
    """Affine image of a family: each plane is re-normalized after mapping.

    For the transform x -> L x + b, the image of <n, x> = c has normal
    L^{-T} n (renormalized) and offset (c + <n, L^{-1} b>) divided by the
    same norm.  Raises on singular L.
    """
    mat = np.asarray(matrix, dtype=float)
    b = np.asarray(offset, dtype=float)
    if abs(float(np.linalg.det(mat))) <= 1e-300:
        raise np.linalg.LinAlgError("singular linear part")
    l_inv_b = np.linalg.solve(mat, b)
    # Hyperplane() renormalizes (w, c) jointly, which matches dividing both
    # by ||L^{-T} n|| in the transformed normalized equation.
    planes = [
        Hyperplane(np.linalg.solve(mat.T, h.normal),
                   h.offset + float(h.normal @ l_inv_b))
        for h in family.hyperplanes
    ]
    return HyperplaneFamily(planes, det_tolerance=family.det_tolerance)


def affine_sequence(
    base: HyperplaneFamily,
    matrix_fn: Callable[[float], np.ndarray],
    offset_fn: Callable[[float], np.ndarray],
    label: str = "affine",
    t_of_s: Callable[[int], float] = lambda s: 1.0 / s,
) -> LatticeSequence:
    """Sequence built by applying s-dependent affine maps to a base family."""

    def generate(s: int) -> HyperplaneFamily:
        t = t_of_s(s)
        return transform_family(base, matrix_fn(t), offset_fn(t))

    return LatticeSequence(generator=generate, label=label, t_of_s=t_of_s)


# ---------------------------------------------------------------------------
# Worked example families
# ---------------------------------------------------------------------------

def unit_triangle_family() -> HyperplaneFamily:
    """The three lines x1 = 0, x2 = 0, x1 + x2 = 1 (vertices of the unit triangle)."""
    return HyperplaneFamily([
        Hyperplane([1.0, 0.0], 0.0),
        Hyperplane([0.0, 1.0], 0.0),
        Hyperplane([1.0, 1.0], 1.0),
    ])


def triangle_family_from_points(points) -> HyperplaneFamily:
    """Three non-collinear points in the plane as a degree-1 lattice.

    Line k joins the two points other than k, so the vertex of lines
    {j, k} is exactly the remaining input point.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape != (3, 2):
        raise ValueError(f"need three points in the plane, got shape {pts.shape}")
    planes = []
    for k in range(3):
        a, b = [pts[i] for i in range(3) if i != k]
        direction = b - a
        normal = np.array([direction[1], -direction[0]])
        planes.append(Hyperplane(normal, float(normal @ a)))
    return HyperplaneFamily(planes)


def affine_triangle_sequence(u: Callable[[float], float] | None = None) -> LatticeSequence:
    """Unit triangle pushed to the origin by diag(t^2, -t^2 u(t)) x + (t, t).

    With u(t) -> 1 the image lattices satisfy both convergence conditions:
    one normal pair stays at a right angle while the other two angles tend
    to pi/4.  Default u(t) = 1 + t.
    """
    if u is None:
        u = lambda t: 1.0 + t
    base = unit_triangle_family()

    def matrix(t: float) -> np.ndarray:
        return np.array([[t * t, 0.0], [0.0, -t * t * u(t)]])

    def offset(t: float) -> np.ndarray:
        return np.array([t, t])

    return affine_sequence(base, matrix, offset, label="affine_triangle")


def degenerate_triangle_points(t: float, eps: float) -> np.ndarray:
    """The flattening triple (0,0), (t, t^(2+eps)), (2t, 0)."""
    return np.array([[0.0, 0.0], [t, t ** (2.0 + eps)], [2.0 * t, 0.0]])


def degenerate_sequence(eps: float) -> LatticeSequence:
    """Triangles collapsing onto a line: satisfies (C1) but not (C2).

    Interpolating x1^2 gives coefficients (x1: 2t, x2: -t^(-eps)); for
    eps > 0 the interpolants diverge, for eps = 0 they converge to -x2,
    which differs from the Taylor polynomial 0.
    """

    def generate(s: int) -> HyperplaneFamily:
        return triangle_family_from_points(degenerate_triangle_points(1.0 / s, eps))

    return LatticeSequence(generator=generate, label=f"degenerate_eps{eps:g}")


# ---------------------------------------------------------------------------
# Trend fitting
# ---------------------------------------------------------------------------

def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x over positive pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = (x > 0) & (y > 0)
    if mask.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)[0])


def decays_to_zero(values: Sequence[float], s_values: Sequence[int],
                   factor: float = DEFAULT_DECAY_FACTOR) -> bool:
    """Finite-range stand-in for 'tends to zero'.

    True when the statistic at the largest s is below `factor` times its
    value at the smallest s and the fitted log-log slope against s is
    negative.  A statistic that is identically zero counts as decayed.
    """
    vals = np.abs(np.asarray(values, dtype=float))
    if vals.size < 2:
        return False
    if vals[0] == 0.0:
        return bool(np.all(vals == 0.0))
    if vals[-1] == 0.0:
        return True
    if not vals[-1] < factor * vals[0]:
        return False
    slope = fit_loglog_slope(s_values, vals)
    return bool(slope < 0.0)


# ---------------------------------------------------------------------------
# Condition reports
# ---------------------------------------------------------------------------

@dataclass
class ConditionRow:
    s: int
    t: float
    lattice_norm: float = math.nan
    c2_volume: float = math.nan
    c3_offset: float = math.nan
    error: str = ""

    @property
    def valid(self) -> bool:
        return not self.error


@dataclass
class ConditionReport:
    """Per-index statistics for (C1), (C2), (C3) with finite-range verdicts."""

    rows: list[ConditionRow]
    c2_threshold: float
    decay_factor: float
    c1_pass: bool = False
    c2_pass: bool = False
    c3_pass: bool = False

    def valid_rows(self) -> list[ConditionRow]:
        return [r for r in self.rows if r.valid]

    @property
    def c2_min(self) -> float:
        rows = self.valid_rows()
        return min((r.c2_volume for r in rows), default=math.nan)


def check_conditions(
    seq: LatticeSequence,
    s_values: Sequence[int] = DEFAULT_S_VALUES,
    c2_threshold: float = DEFAULT_C2_THRESHOLD,
    decay_factor: float = DEFAULT_DECAY_FACTOR,
) -> ConditionReport:
    """Measure the three condition statistics across the index range.

    C1 statistic: max vertex norm; C2: min N-subset volume of unit normals;
    C3: max |offset|.  A family that fails to build is reported in its row
    rather than aborting the sweep.
    """
    rows = []
    for s in s_values:
        row = ConditionRow(s=s, t=seq.t_of_s(s))
        try:
            family = seq.family(s)
            lattice = ChungYaoLattice(family)
            row.lattice_norm = lattice.norm()
            row.c2_volume = family.report.min_det
            row.c3_offset = family.max_offset()
        except CyLatticeError as exc:
            row.error = str(exc)
        rows.append(row)
    report = ConditionReport(rows=rows, c2_threshold=c2_threshold,
                             decay_factor=decay_factor)
    valid = report.valid_rows()
    if len(valid) >= 2:
        s_ok = [r.s for r in valid]
        report.c1_pass = decays_to_zero([r.lattice_norm for r in valid], s_ok, decay_factor)
        report.c3_pass = decays_to_zero([r.c3_offset for r in valid], s_ok, decay_factor)
        report.c2_pass = all(r.c2_volume >= c2_threshold for r in valid)
    return report


@dataclass
class EquivalenceRow:
    s: int
    lattice_norm: float
    c2_volume: float
    c3_offset: float
    offset_below_norm: bool
    cramer_bound: float
    norm_below_cramer: bool


@dataclass
class EquivalenceReport:
    rows: list[EquivalenceRow]

    @property
    def all_ok(self) -> bool:
        return all(r.offset_below_norm and r.norm_below_cramer for r in self.rows)


def c1_c3_equivalence_probe(
    seq: LatticeSequence,
    s_values: Sequence[int] = DEFAULT_S_VALUES,
) -> EquivalenceReport:
    """Check the two inequalities tying lattice norms to offsets.

    max_i |c_i| <= ||Theta|| holds because every vertex realizes its plane's
    offset as an inner product with a unit vector; in the other direction
    Cramer's rule with unit-normal cofactors gives
    ||Theta|| <= N^{3/2} max|c| / (min N-subset determinant).
    """
    rows = []
    for s in s_values:
        family = seq.family(s)
        lattice = ChungYaoLattice(family)
        norm = lattice.norm()
        c2 = family.report.min_det
        c3 = family.max_offset()
        n = family.dimension
        cramer = n ** 1.5 * c3 / c2
        rows.append(EquivalenceRow(
            s=s, lattice_norm=norm, c2_volume=c2, c3_offset=c3,
            offset_below_norm=bool(c3 <= norm * (1.0 + 1e-9) + 1e-12),
            cramer_bound=cramer,
            norm_below_cramer=bool(norm <= cramer * (1.0 + 1e-9) + 1e-12),
        ))
    return EquivalenceReport(rows=rows)


# ---------------------------------------------------------------------------
# Affine transformation criterion
# ---------------------------------------------------------------------------

@dataclass
class AffineCriterionRow:
    s: int
    t: float
    delta_stat: float
    offset_stat: float
    lattice_norm: float
    c2_volume: float
    offset_crosscheck: float
    det_crosscheck: float


@dataclass
class AffineCriterionReport:
    """Both sides of the affine convergence criterion on a finite range."""

    rows: list[AffineCriterionRow]
    delta_cap: float
    c2_threshold: float
    side_a: bool = False
    side_b: bool = False

    @property
    def agree(self) -> bool:
        return self.side_a == self.side_b

    def max_crosscheck(self) -> float:
        return max(
            max((r.offset_crosscheck for r in self.rows), default=0.0),
            max((r.det_crosscheck for r in self.rows), default=0.0),
        )


def affine_criterion(
    base: HyperplaneFamily,
    matrix_fn: Callable[[float], np.ndarray],
    offset_fn: Callable[[float], np.ndarray],
    s_values: Sequence[int] = DEFAULT_S_VALUES,
    t_of_s: Callable[[int], float] = lambda s: 1.0 / s,
    c2_threshold: float = DEFAULT_C2_THRESHOLD,
    decay_factor: float = DEFAULT_DECAY_FACTOR,
    delta_cap: float | None = None,
) -> AffineCriterionReport:
    """Evaluate the two equivalent formulations of (C1) and (C2) for affine images.

    Side (a) measures the transformed lattices directly.  Side (b) uses only
    the transform data: the products |det L| prod ||L^{-T} n_i|| must stay
    bounded (by `delta_cap`, default 1 / c2_threshold) and the normalized
    offsets |c_i + <n_i, L^{-1} b>| / ||L^{-T} n_i|| must decay.  Each row
    also cross-checks the normalized transformed equation against the
    directly transformed family.
    """
    if delta_cap is None:
        delta_cap = 1.0 / c2_threshold
    n_dim = base.dimension
    rows = []
    tf_norms, tf_c2s, offset_stats, delta_stats = [], [], [], []
    for s in s_values:
        t = t_of_s(s)
        mat = np.asarray(matrix_fn(t), dtype=float)
        b = np.asarray(offset_fn(t), dtype=float)
        det_l = abs(float(np.linalg.det(mat)))
        l_inv_b = np.linalg.solve(mat, b)
        w = [np.linalg.solve(mat.T, h.normal) for h in base.hyperplanes]
        nu = np.array([float(np.linalg.norm(v)) for v in w])
        offsets = np.array([
            abs(h.offset + float(h.normal @ l_inv_b)) / nu[i]
            for i, h in enumerate(base.hyperplanes)
        ])
        offset_stat = float(np.max(offsets))
        delta_stat = 0.0
        transformed = transform_family(base, mat, b)
        lattice = ChungYaoLattice(transformed)
        det_crosscheck = 0.0
        for subset in combinations(range(base.count), n_dim):
            prod_nu = float(np.prod(nu[list(subset)]))
            stat = det_l * prod_nu
            delta_stat = max(delta_stat, stat)
            base_det = abs(float(np.linalg.det(
                np.stack([base.hyperplanes[i].normal for i in subset]))))
            tf_det = abs(float(np.linalg.det(
                np.stack([transformed.hyperplanes[i].normal for i in subset]))))
            det_crosscheck = max(det_crosscheck, abs(tf_det * stat - base_det))
        offset_crosscheck = abs(offset_stat - transformed.max_offset())
        rows.append(AffineCriterionRow(
            s=s, t=t, delta_stat=delta_stat, offset_stat=offset_stat,
            lattice_norm=lattice.norm(), c2_volume=transformed.report.min_det,
            offset_crosscheck=offset_crosscheck, det_crosscheck=det_crosscheck,
        ))
        tf_norms.append(lattice.norm())
        tf_c2s.append(transformed.report.min_det)
        offset_stats.append(offset_stat)
        delta_stats.append(delta_stat)
    report = AffineCriterionReport(rows=rows, delta_cap=delta_cap,
                                   c2_threshold=c2_threshold)
    s_list = list(s_values)
    report.side_a = (
        decays_to_zero(tf_norms, s_list, decay_factor)
        and min(tf_c2s) >= c2_threshold
    )
    report.side_b = (
        decays_to_zero(offset_stats, s_list, decay_factor)
        and max(delta_stats) <= delta_cap
    )
    return report


# ---------------------------------------------------------------------------
# Grids and derivative norm estimates
# ---------------------------------------------------------------------------

def ball_grid(dimension: int, radius: float = DEFAULT_RADIUS,
              per_axis: int = DEFAULT_GRID_PER_AXIS) -> np.ndarray:
    """Uniform grid on [-R, R]^N restricted to the closed ball of radius R."""
    axes = [np.linspace(-radius, radius, per_axis)] * dimension
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    return pts[np.linalg.norm(pts, axis=1) <= radius + 1e-12]


def _unit_directions(dimension: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if dimension == 1:
        return np.array([[1.0], [-1.0]])
    if dimension == 2:
        angles = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
        return np.column_stack([np.cos(angles), np.sin(angles)])
    vecs = rng.standard_normal((count, dimension))
    vecs /= np.linalg.norm(vecs, axis=1)[:, None]
    return np.vstack([vecs, np.eye(dimension)])


def derivative_norm_estimate(
    f: SmoothFunction,
    order: int,
    radius: float,
    n_points: int = 48,
    n_directions: int = 256,
    rng: np.random.Generator | None = None,
) -> float:
    """Estimated max over the ball of the norm of the order-th derivative.

    For symmetric multilinear forms on Euclidean space the norm is attained
    on the diagonal, so we maximize |f^(order)(a)(v, ..., v)| over sampled
    unit directions v and sampled points a (boundary sphere plus interior).
    Sampling makes this a slight underestimate; the explicit bounds it feeds
    are loose by orders of magnitude.
    """
    if rng is None:
        rng = np.random.default_rng(1234)
    dirs = _unit_directions(f.dimension, n_directions, rng)
    boundary = _unit_directions(f.dimension, n_points, rng) * radius
    interior = rng.uniform(-radius, radius, size=(n_points, f.dimension))
    interior = interior[np.linalg.norm(interior, axis=1) <= radius]
    points = np.vstack([boundary, interior, np.zeros((1, f.dimension))])
    worst = 0.0
    for a in points:
        form = _poly.derivative_form(f, a, order)
        vals = np.abs(form.diagonal.evaluate_many(dirs))
        worst = max(worst, float(np.max(vals)))
    return worst


# ---------------------------------------------------------------------------
# Explicit error bound
# ---------------------------------------------------------------------------

def observed_delta(lattice: ChungYaoLattice) -> float:
    """min |<n_i, n_K>| over line subsets K and planes i outside K.

    This is the uniform transversality constant of the convergence proof;
    it coincides with the minimal N-subset determinant of the family.
    """
    fam = lattice.family
    best = math.inf
    for line in lattice.line_subsets():
        for i in line.completing:
            best = min(best, abs(float(fam.hyperplanes[i].linear(line.direction))))
    return best


@dataclass
class BoundReport:
    """Pieces of the explicit interpolation-error bound, plus measurements."""

    radius: float
    delta: float
    lattice_norm: float
    hypotheses_ok: bool
    pk_bound: float = math.nan
    s2_bound: float = math.nan
    m1: float = math.nan
    m2: float = math.nan
    deriv_norm_m: float = math.nan
    deriv_norm_m1: float = math.nan
    total_bound: float = math.nan
    sampled_pk_max: float = math.nan
    pk_within_bound: bool = False
    measured_sup_error: float = math.nan
    error_within_bound: bool = False


def bound_evaluator(
    lattice: ChungYaoLattice,
    f: SmoothFunction,
    radius: float,
    delta: float | None = None,
    rng: np.random.Generator | None = None,
    n_samples: int = 1000,
    grid_per_axis: int = DEFAULT_GRID_PER_AXIS,
) -> BoundReport:
    """Assemble the explicit error bound and verify it against measurements.

    pk_bound = (2R/delta)^(d-N+1) caps every |P_K| on the ball (checked on
    sampled points); the total bound combines the two derivative norms with
    the geometric constants and must dominate the measured sup error of
    interpolant minus Taylor polynomial on the ball grid.  Requires the
    lattice inside B(0, R) and delta > 0.
    """
    if rng is None:
        rng = np.random.default_rng(20240)
    fam = lattice.family
    n_dim, d = fam.dimension, fam.count
    m = d - n_dim + 1
    if delta is None:
        delta = observed_delta(lattice)
    norm = lattice.norm()
    report = BoundReport(radius=radius, delta=delta, lattice_norm=norm,
                         hypotheses_ok=bool(delta > 0.0 and norm <= radius))
    if delta <= 0.0:
        raise ValueError("delta must be positive (condition C2 violated)")

    report.pk_bound = (2.0 * radius / delta) ** m
    report.m1 = radius ** (d - n_dim) * (1.0 + 2.0 / delta) ** (d - 1) / math.factorial(m)
    report.m2 = math.comb(d, n_dim - 1) * (2.0 * radius / delta) ** m / math.factorial(m)
    report.deriv_norm_m = derivative_norm_estimate(f, m, radius, rng=rng)
    report.s2_bound = report.deriv_norm_m / math.factorial(m) \
        * radius ** (d - n_dim) * (1.0 + 2.0 / delta) ** (d - 1) * norm
    report.deriv_norm_m1 = derivative_norm_estimate(f, m + 1, radius, rng=rng)
    report.total_bound = (
        report.m1 * report.deriv_norm_m + report.m2 * report.deriv_norm_m1
    ) * norm

    # Sampled sup of |P_K| over the ball.
    samples = rng.standard_normal((n_samples, n_dim))
    samples /= np.linalg.norm(samples, axis=1)[:, None]
    samples *= radius * rng.uniform(0.0, 1.0, size=n_samples)[:, None] ** (1.0 / n_dim)
    pk_max = 0.0
    for line in lattice.line_subsets():
        pk = pk_polynomial(fam, line.indices, direction=line.direction)
        pk_max = max(pk_max, float(np.max(np.abs(pk.evaluate_many(samples)))))
    report.sampled_pk_max = pk_max
    report.pk_within_bound = bool(
        report.hypotheses_ok and pk_max <= report.pk_bound * (1.0 + 1e-9)
    )

    interp = interpolate(lattice, f)
    target = taylor(f, np.zeros(n_dim), d - n_dim)
    grid = ball_grid(n_dim, radius, grid_per_axis)
    target_values = target.evaluate_many(grid)
    diff = interp.polynomial.evaluate_many(grid) - target_values
    report.measured_sup_error = float(np.max(np.abs(diff)))
    # Roundoff slack: a zero bound (derivatives identically zero) must still
    # accept expansion noise in the measured error.
    slack = 1e-10 * (1.0 + float(np.max(np.abs(target_values))))
    report.error_within_bound = bool(
        report.hypotheses_ok
        and report.measured_sup_error <= report.total_bound + slack
    )
    return report


# ---------------------------------------------------------------------------
# Convergence experiments
# ---------------------------------------------------------------------------

RESULT_COLUMNS = (
    "s", "t", "lattice_norm", "c2_volume", "c3_offset",
    "sup_error", "coeff_error", "bound_value", "c2_pass", "within_bound",
)


@dataclass
class ResultRow:
    s: int
    t: float
    lattice_norm: float = math.nan
    c2_volume: float = math.nan
    c3_offset: float = math.nan
    sup_error: float = math.nan
    coeff_error: float = math.nan
    bound_value: float = math.nan
    c2_pass: bool = False
    within_bound: bool = False
    error: str = ""

    @property
    def valid(self) -> bool:
        return not self.error

    def as_tuple(self):
        return (self.s, self.t, self.lattice_norm, self.c2_volume,
                self.c3_offset, self.sup_error, self.coeff_error,
                self.bound_value, int(self.c2_pass), int(self.within_bound))


@dataclass
class RateReport:
    """Per-index errors against the Taylor polynomial, with fitted slopes."""

    rows: list[ResultRow]
    degree: int
    target: MultiPoly
    slope_coeff: float = math.nan
    slope_sup: float = math.nan
    c2_threshold: float = DEFAULT_C2_THRESHOLD

    def valid_rows(self) -> list[ResultRow]:
        return [r for r in self.rows if r.valid]

    def errors_decay(self, factor: float = DEFAULT_DECAY_FACTOR) -> bool:
        rows = self.valid_rows()
        return decays_to_zero([r.coeff_error for r in rows],
                              [r.s for r in rows], factor)


def convergence_experiment(
    seq: LatticeSequence,
    f: SmoothFunction,
    s_values: Sequence[int] = DEFAULT_S_VALUES,
    radius: float = DEFAULT_RADIUS,
    grid_per_axis: int = DEFAULT_GRID_PER_AXIS,
    c2_threshold: float = DEFAULT_C2_THRESHOLD,
    threads: int = 1,
    with_bound: bool = True,
) -> RateReport:
    """Measure interpolant-versus-Taylor errors across the sequence.

    The primary metric is the max coefficient difference on the monomial
    basis (basis-independent comparison of the limit statement); the sup
    norm over the ball grid is secondary.  The explicit bound is evaluated
    at each index where its hypotheses hold.  Per-index work is independent
    and can be spread over threads; rows are assembled in index order.
    """
    first = seq.family(s_values[0])
    n_dim = first.dimension
    degree = first.degree
    target = taylor(f, np.zeros(n_dim), degree)
    target_scale = max(1.0, target.max_abs_coeff())
    grid = ball_grid(n_dim, radius, grid_per_axis)
    target_on_grid = target.evaluate_many(grid)

    def work(s: int) -> ResultRow:
        row = ResultRow(s=s, t=seq.t_of_s(s))
        try:
            family = seq.family(s)
            if family.degree != degree:
                raise ValueError("degree must not vary along the sequence")
            lattice = ChungYaoLattice(family)
            interp = interpolate(lattice, f)
            row.lattice_norm = lattice.norm()
            row.c2_volume = family.report.min_det
            row.c3_offset = family.max_offset()
            row.c2_pass = bool(row.c2_volume >= c2_threshold)
            row.coeff_error = interp.polynomial.coeff_distance(target) / target_scale
            values = interp.polynomial.evaluate_many(grid)
            row.sup_error = float(np.max(np.abs(values - target_on_grid)))
            if with_bound:
                delta = observed_delta(lattice)
                if delta > 0.0 and row.lattice_norm <= radius:
                    bound = bound_evaluator(
                        lattice, f, radius, delta=delta,
                        n_samples=200, grid_per_axis=grid_per_axis,
                    )
                    row.bound_value = bound.total_bound
                    row.within_bound = bool(row.sup_error <= bound.total_bound)
        except CyLatticeError as exc:
            row.error = str(exc)
        return row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, s_values))
    else:
        rows = [work(s) for s in s_values]

    report = RateReport(rows=rows, degree=degree, target=target,
                        c2_threshold=c2_threshold)
    valid = report.valid_rows()
    report.slope_coeff = fit_loglog_slope(
        [r.lattice_norm for r in valid], [r.coeff_error for r in valid])
    report.slope_sup = fit_loglog_slope(
        [r.lattice_norm for r in valid], [r.sup_error for r in valid])
    return report
