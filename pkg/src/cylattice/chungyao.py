"""Chung-Yao interpolation, cardinal polynomials, and remainder formulas.

The interpolation operator at a lattice of C(d, N) vertices reproduces every
polynomial of degree d - N.  Its error against a smooth function decomposes
over the lattice lines: for each (N-1)-subset K a product polynomial P_K
weights a divided difference taken along the line direction n_K.  The same
product polynomials, in homogeneous form and over truncated families, drive
a Newton-like staged identity for symmetric multilinear forms that converts
the interpolation error into a Taylor-remainder decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateSubsetError
from .geometry import (
    ChungYaoLattice,
    HyperplaneFamily,
    LineSubset,
    direction_vector,
)
from .poly import MultiPoly, SymmetricForm, taylor
from .functions import SmoothFunction
from .divdiff import PointTuple, divided_difference


# ---------------------------------------------------------------------------
# Cardinal polynomials and the interpolation operator
# ---------------------------------------------------------------------------

def cardinal_polynomial(lattice: ChungYaoLattice, subset) -> MultiPoly:
    """Fundamental polynomial of the vertex theta_H: 1 there, 0 elsewhere.

    The product of the affine forms not containing the vertex, normalized by
    their values at it.  A vanishing denominator means the vertex lies on an
    extra hyperplane, contradicting general position.
    """
    fam = lattice.family
    subset = tuple(sorted(subset))
    theta = lattice.vertex(subset)
    scale = 1.0 + float(np.linalg.norm(theta))
    poly = MultiPoly.constant(fam.dimension, 1.0)
    denominator = 1.0
    for j in range(fam.count):
        if j in subset:
            continue
        h = fam.hyperplanes[j]
        value = float(h.value(theta))
        if abs(value) <= 1e-12 * scale:
            raise DegenerateSubsetError(
                f"vertex {subset} lies on hyperplane {j}; cardinal polynomial undefined"
            )
        poly = poly * MultiPoly.affine(h.normal, h.offset)
        denominator *= value
    return poly.scale(1.0 / denominator)


@dataclass
class Interpolant:
    """Lagrange interpolant at a Chung-Yao lattice, expanded to coefficients.

    `values` keeps the per-vertex data; `polynomial` is the expanded sum of
    cardinal polynomials, degree at most d - N.
    """

    lattice: ChungYaoLattice
    polynomial: MultiPoly
    values: dict

    def __call__(self, x):
        return self.polynomial(x)

    def evaluate_factored(self, x) -> float:
        """Evaluate through the factored cardinal products (cross-check path)."""
        fam = self.lattice.family
        x = np.asarray(x, dtype=float)
        terms = []
        for subset, fx in self.values.items():
            theta = self.lattice.vertex(subset)
            factor = fx
            for j in range(fam.count):
                if j in subset:
                    continue
                h = fam.hyperplanes[j]
                factor *= float(h.value(x)) / float(h.value(theta))
            terms.append(factor)
        return math.fsum(terms)

    def vertex_residual(self) -> float:
        """Max relative mismatch of the expanded polynomial at the vertices."""
        worst = 0.0
        scale = max(1.0, max(abs(v) for v in self.values.values()))
        for subset, fx in self.values.items():
            err = abs(self.polynomial.evaluate(self.lattice.vertex(subset)) - fx)
            worst = max(worst, err / scale)
        return worst


def _values_at_vertices(lattice: ChungYaoLattice, f) -> dict:
    values = {}
    for subset, theta in lattice.vertices.items():
        if isinstance(f, dict):
            values[subset] = float(f[subset])
        elif isinstance(f, SmoothFunction):
            values[subset] = float(f.evaluate(theta))
        else:
            values[subset] = float(f(theta))
    return values


def interpolate(lattice: ChungYaoLattice, f) -> Interpolant:
    """Lagrange interpolation of f (function, callable, or vertex-value dict).

    Returns the expanded polynomial sum of f(theta_H) times the cardinal
    polynomial of H.  Each coefficient is accumulated with compensated
    summation in ascending subset order: the cardinal coefficients can be
    orders of magnitude larger than their sum, and a plain running total
    loses the cancelled digits.
    """
    values = _values_at_vertices(lattice, f)
    contributions: dict[tuple, list[float]] = {}
    for subset in sorted(values):
        card = cardinal_polynomial(lattice, subset)
        weight = values[subset]
        for alpha, c in card.coeffs.items():
            if c != 0.0:
                contributions.setdefault(alpha, []).append(weight * c)
    poly = MultiPoly.zero(lattice.dimension, max(lattice.degree, 0))
    for alpha, parts in contributions.items():
        poly.coeffs[alpha] = math.fsum(parts)
    return Interpolant(lattice=lattice, polynomial=poly, values=values)


# ---------------------------------------------------------------------------
# Product polynomials over (possibly truncated) families
# ---------------------------------------------------------------------------

def pk_polynomial(
    family: HyperplaneFamily,
    k_indices,
    upto: int | None = None,
    homogeneous: bool = False,
    direction: np.ndarray | None = None,
) -> MultiPoly:
    """Product polynomial of the line subset K over the first `upto` planes.

    prod over ell in the truncation (excluding K) of ell(x) / ell~(n_K); the
    homogeneous variant replaces each numerator by its linear part, making a
    homogeneous polynomial that is 1 at n_K and 0 at every other n_K'.
    An empty product is the constant 1.
    """
    k_indices = tuple(sorted(k_indices))
    upto = family.count if upto is None else upto
    if upto > family.count:
        raise ValueError(f"truncation {upto} exceeds family size {family.count}")
    if any(i >= upto for i in k_indices):
        raise ValueError(f"subset {k_indices} not inside truncation of size {upto}")
    if direction is None:
        direction = direction_vector(
            [family.hyperplanes[i].normal for i in k_indices]
        )
    poly = MultiPoly.constant(family.dimension, 1.0)
    denominator = 1.0
    for j in range(upto):
        if j in k_indices:
            continue
        h = family.hyperplanes[j]
        denom = float(h.linear(direction))
        if abs(denom) <= 1e-14:
            raise DegenerateSubsetError(
                f"hyperplane {j} is parallel to the line of subset {k_indices}"
            )
        if homogeneous:
            poly = poly * MultiPoly.linear(h.normal)
        else:
            poly = poly * MultiPoly.affine(h.normal, h.offset)
        denominator *= denom
    return poly.scale(1.0 / denominator)


# ---------------------------------------------------------------------------
# de Boor's remainder formula
# ---------------------------------------------------------------------------

@dataclass
class RemainderTerm:
    indices: tuple[int, ...]
    pk_value: float
    divided_difference: float

    @property
    def product(self) -> float:
        return self.pk_value * self.divided_difference


@dataclass
class RemainderDecomposition:
    """f(x) split into interpolant value plus per-line correction terms."""

    point: np.ndarray
    function_value: float
    interpolant_value: float
    terms: list[RemainderTerm]

    def correction(self) -> float:
        return math.fsum(t.product for t in self.terms)

    def reconstruction(self) -> float:
        return self.interpolant_value + self.correction()

    def residual(self) -> float:
        return abs(self.function_value - self.reconstruction())

    def relative_residual(self) -> float:
        scale = max(1.0, abs(self.function_value))
        return self.residual() / scale


def deboor_remainder(
    lattice: ChungYaoLattice,
    f: SmoothFunction,
    x,
    quad_degree: int | None = None,
    interpolant: Interpolant | None = None,
    lines: list[LineSubset] | None = None,
) -> RemainderDecomposition:
    """Exact decomposition f(x) = L[f](x) + sum over K of P_K(x) [Theta_K, x | n_K...]f.

    Each correction term pairs the degree d-N+1 product polynomial of a line
    subset with the order d-N+1 divided difference of f along its direction.
    Requires f of smoothness class d-N+1 on the hull of the lattice and x.
    Pass `interpolant`/`lines` to reuse work across evaluation points.
    """
    fam = lattice.family
    m = fam.count - fam.dimension + 1
    x = np.asarray(x, dtype=float)
    if interpolant is None:
        interpolant = interpolate(lattice, f)
    if lines is None:
        lines = lattice.line_subsets()
    terms = []
    for line in lines:
        pk = pk_polynomial(fam, line.indices, direction=line.direction)
        tup = PointTuple(np.vstack([line.points, x[None, :]]))
        dd = divided_difference(f, tup, [line.direction] * m, quad_degree)
        terms.append(RemainderTerm(indices=line.indices,
                                   pk_value=pk.evaluate(x),
                                   divided_difference=dd))
    return RemainderDecomposition(
        point=x,
        function_value=float(f.evaluate(x)),
        interpolant_value=interpolant.polynomial.evaluate(x),
        terms=terms,
    )


def remainder_sign_flip_deviation(
    lattice: ChungYaoLattice,
    f: SmoothFunction,
    x,
    quad_degree: int | None = None,
) -> float:
    """Max change of any correction term when every n_K is forcibly negated.

    Flipping n_K multiplies P_K and the divided difference by (-1)^(d-N+1)
    each, so the products must be unchanged; returns the worst deviation.
    """
    fam = lattice.family
    m = fam.count - fam.dimension + 1
    x = np.asarray(x, dtype=float)
    worst = 0.0
    for line in lattice.line_subsets():
        tup = PointTuple(np.vstack([line.points, x[None, :]]))
        plain = (
            pk_polynomial(fam, line.indices, direction=line.direction).evaluate(x)
            * divided_difference(f, tup, [line.direction] * m, quad_degree)
        )
        flipped = (
            pk_polynomial(fam, line.indices, direction=-line.direction).evaluate(x)
            * divided_difference(f, tup, [-line.direction] * m, quad_degree)
        )
        worst = max(worst, abs(plain - flipped))
    return worst


# ---------------------------------------------------------------------------
# Identities for symmetric multilinear forms
# ---------------------------------------------------------------------------

def homogeneous_representation(family: HyperplaneFamily, phi: SymmetricForm, v) -> float:
    """Represent phi on the diagonal through the n_K interpolation lattice.

    Evaluates sum over K of P~_K(v) * phi(n_K, ..., n_K), which equals
    phi(v, ..., v) for every symmetric form of order d - N + 1.
    """
    m = family.count - family.dimension + 1
    if phi.order != m:
        raise ValueError(f"form order {phi.order} does not match d - N + 1 = {m}")
    v = np.asarray(v, dtype=float)
    total = []
    for k_idx in combinations(range(family.count), family.dimension - 1):
        n_k = direction_vector([family.hyperplanes[i].normal for i in k_idx])
        pk = pk_polynomial(family, k_idx, homogeneous=True, direction=n_k)
        total.append(pk.evaluate(v) * phi(*([n_k] * m)))
    return math.fsum(total)


@dataclass
class NewtonTerm:
    stage: int
    indices: tuple[int, ...]
    pk_value: float
    form_value: float

    @property
    def product(self) -> float:
        return self.pk_value * self.form_value


@dataclass
class NewtonStage:
    """Precomputed data of one (stage, K) term of the staged identity."""

    stage: int
    indices: tuple[int, ...]
    pk: MultiPoly
    direction: np.ndarray
    vertex: np.ndarray | None  # absent at the final stage


def newton_stage_data(
    family: HyperplaneFamily,
    lattice: ChungYaoLattice | None = None,
) -> list[NewtonStage]:
    """All (stage, K) data of the staged identity, reusable across x and phi."""
    n_dim = family.dimension
    d = family.count
    if lattice is None:
        lattice = ChungYaoLattice(family)
    stages = []
    for stage in range(n_dim, d + 2):
        for k_idx in combinations(range(stage - 1), n_dim - 1):
            n_k = direction_vector([family.hyperplanes[i].normal for i in k_idx])
            pk = pk_polynomial(family, k_idx, upto=stage - 1, direction=n_k)
            vertex = None
            if stage <= d:
                vertex = lattice.vertex(tuple(sorted(k_idx + (stage - 1,))))
            stages.append(NewtonStage(stage=stage, indices=k_idx, pk=pk,
                                      direction=n_k, vertex=vertex))
    return stages


@dataclass
class NewtonDecomposition:
    """Staged expansion of phi(x, ..., x) over truncated families."""

    point: np.ndarray
    target: float
    terms: list[NewtonTerm]

    def total(self) -> float:
        return math.fsum(t.product for t in self.terms)

    def residual(self) -> float:
        return abs(self.target - self.total())

    def stage_terms(self, stage: int) -> list[NewtonTerm]:
        return [t for t in self.terms if t.stage == stage]


def newton_identity(
    family: HyperplaneFamily,
    phi: SymmetricForm,
    x,
    lattice: ChungYaoLattice | None = None,
    stages: list[NewtonStage] | None = None,
) -> NewtonDecomposition:
    """Staged decomposition of phi(x^(d-N+1)) over the family truncations.

    Stage i (from N to d+1) sums, over the (N-1)-subsets K of the first i-1
    hyperplanes, the truncated product polynomial at x times phi evaluated on
    d-i copies of x, the vertex of K extended by plane i, and i-N copies of
    n_K.  Empty argument groups drop out exactly as the conventions state;
    at stage d+1 only the n_K arguments remain.  Pass precomputed `stages`
    (from :func:`newton_stage_data`) when sweeping many x or phi.
    """
    n_dim = family.dimension
    d = family.count
    m = d - n_dim + 1
    if phi.order != m:
        raise ValueError(f"form order {phi.order} does not match d - N + 1 = {m}")
    x = np.asarray(x, dtype=float)
    if stages is None:
        stages = newton_stage_data(family, lattice)
    terms = []
    for data in stages:
        if data.vertex is None:
            args = [data.direction] * (data.stage - n_dim)
        else:
            args = [x] * (d - data.stage) + [data.vertex] \
                + [data.direction] * (data.stage - n_dim)
        terms.append(NewtonTerm(
            stage=data.stage,
            indices=data.indices,
            pk_value=data.pk.evaluate(x),
            form_value=phi(*args),
        ))
    return NewtonDecomposition(point=x, target=phi(*([x] * m)), terms=terms)


@dataclass
class TechObservation:
    indices: tuple[int, ...]
    value: float


@dataclass
class TechObservationReport:
    """Vanishing check of homogeneous products at cross-subset directions."""

    k_prime: tuple[int, ...]
    direction_subset: tuple[int, ...]
    entries: list[TechObservation]

    @property
    def vacuous(self) -> bool:
        return not self.entries

    def max_abs(self) -> float:
        return max((abs(e.value) for e in self.entries), default=0.0)


def techobserv_check(family: HyperplaneFamily, k_prime) -> TechObservationReport:
    """For K' of size N-2 (within the first d of d+1 planes), check that the
    homogeneous product of every K not containing K' vanishes at the
    direction of K' extended by the last plane.

    K' contained in K is excluded (the value is generally nonzero there).
    """
    n_dim = family.dimension
    if n_dim < 2:
        raise ValueError("needs dimension >= 2")
    d = family.count - 1
    if d < n_dim:
        raise ValueError(f"needs at least {n_dim + 1} hyperplanes, got {family.count}")
    k_prime = tuple(sorted(k_prime))
    if len(k_prime) != n_dim - 2 or any(i >= d for i in k_prime):
        raise ValueError(
            f"k_prime must be an (N-2)-subset of the first {d} hyperplanes"
        )
    target_subset = k_prime + (d,)
    n_target = direction_vector([family.hyperplanes[i].normal for i in target_subset])
    entries = []
    for k_idx in combinations(range(d), n_dim - 1):
        if set(k_prime) <= set(k_idx):
            continue
        value = pk_polynomial(family, k_idx, upto=d, homogeneous=True).evaluate(n_target)
        entries.append(TechObservation(indices=k_idx, value=value))
    return TechObservationReport(
        k_prime=k_prime, direction_subset=target_subset, entries=entries
    )


# ---------------------------------------------------------------------------
# Taylor remainder decomposition
# ---------------------------------------------------------------------------

@dataclass
class TaylorTerm:
    stage: int
    indices: tuple[int, ...]
    pk_value: float
    integral: float

    @property
    def product(self) -> float:
        return self.pk_value * self.integral


@dataclass
class TaylorDecomposition:
    """f(x) - T(f)(x) expanded through the staged identity."""

    point: np.ndarray
    lhs: float
    terms: list[TaylorTerm]

    def total(self) -> float:
        return math.fsum(t.product for t in self.terms)

    def residual(self) -> float:
        return abs(self.lhs - self.total())


def taylor_error_decomposition(
    family: HyperplaneFamily,
    f: SmoothFunction,
    x,
    quad_degree: int | None = None,
    lattice: ChungYaoLattice | None = None,
) -> TaylorDecomposition:
    """Decompose the Taylor remainder of f at the origin over the family.

    The left side is f(x) minus the degree d-N Taylor polynomial at 0; each
    term integrates the order d-N+1 derivative over the hull of d-N+1 copies
    of the origin and x, applied to the staged argument pattern of the
    Newton-like identity.
    """
    n_dim = family.dimension
    d = family.count
    m = d - n_dim + 1
    x = np.asarray(x, dtype=float)
    base_points = PointTuple(np.vstack([np.zeros((m, n_dim)), x[None, :]]))
    terms = []
    for data in newton_stage_data(family, lattice):
        if data.vertex is None:
            vectors = [data.direction] * (data.stage - n_dim)
        else:
            vectors = [x] * (d - data.stage) + [data.vertex] \
                + [data.direction] * (data.stage - n_dim)
        integral = divided_difference(f, base_points, vectors, quad_degree)
        terms.append(TaylorTerm(
            stage=data.stage,
            indices=data.indices,
            pk_value=data.pk.evaluate(x),
            integral=integral,
        ))
    taylor_poly = taylor(f, np.zeros(n_dim), d - n_dim)
    lhs = float(f.evaluate(x)) - taylor_poly.evaluate(x)
    return TaylorDecomposition(point=x, lhs=lhs, terms=terms)
