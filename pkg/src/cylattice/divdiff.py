"""Multivariate divided differences as integrals over the standard simplex.

The divided difference [a_0, ..., a_s | v_1, ..., v_s]f averages the s-th
directional derivative of f over the convex hull of the points, parametrized
by the standard simplex:

    integral over Delta_s of f^(s)(a_0 + sum xi_i (a_i - a_0))(v_1, ..., v_s).

Coincident points are legal and need no special casing (the integral lives
on the parameter simplex).  Polynomial integrands take an exact path
(compose with the affine parametrization, then integrate monomials in closed
form); everything else goes through Grundmann-Moller quadrature of
selectable exactness degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ConfigError, DerivativeOrderError, DomainError
from .poly import MultiPoly, substitute
from .functions import PolynomialFunction, SmoothFunction

MAX_RULE_INDEX = 40
MAX_SIMPLEX_DIM = 10


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def grundmann_moller_rule(dimension: int, index: int) -> tuple[np.ndarray, np.ndarray]:
    """Grundmann-Moller rule of the given index on the standard simplex.

    Exact for polynomials of total degree 2*index + 1.  Returns (nodes,
    weights) with nodes of shape (m, dimension); weights sum to the simplex
    volume 1/dimension! and carry both signs.  Coinciding nodes across
    generation levels are merged through exact rational arithmetic.
    """
    if dimension < 0 or dimension > MAX_SIMPLEX_DIM:
        raise ConfigError(f"simplex dimension {dimension} outside supported range")
    if index < 0 or index > MAX_RULE_INDEX:
        raise ConfigError(f"rule index {index} outside supported range")
    if dimension == 0:
        return np.zeros((1, 0)), np.ones(1)

    n = dimension
    dd = 2 * index + 1
    table: dict[tuple[Fraction, ...], Fraction] = {}
    for i in range(index + 1):
        denom = dd + n - 2 * i
        weight = (
            Fraction(-1) ** i
            * Fraction(denom) ** dd
            / (Fraction(4) ** index * math.factorial(i) * math.factorial(dd + n - i))
        )
        for beta in _compositions(index - i, n + 1):
            # Barycentric point (2 beta_j + 1) / denom; drop the coordinate
            # attached to the origin vertex.
            point = tuple(Fraction(2 * b + 1, denom) for b in beta[1:])
            table[point] = table.get(point, Fraction(0)) + weight
    points = np.array([[float(c) for c in pt] for pt in table], dtype=float)
    weights = np.array([float(w) for w in table.values()])
    return points, weights


def rule_for_degree(dimension: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Smallest Grundmann-Moller rule exact to at least `degree`."""
    index = max(0, math.ceil((degree - 1) / 2))
    return grundmann_moller_rule(dimension, index)


@dataclass(frozen=True)
class StandardSimplex:
    """A quadrature rule on Delta_s, tagged with its exactness degree."""

    dimension: int
    exactness: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def with_degree(cls, dimension: int, degree: int) -> "StandardSimplex":
        nodes, weights = rule_for_degree(dimension, degree)
        index = max(0, math.ceil((degree - 1) / 2))
        return cls(dimension=dimension, exactness=max(degree, 2 * index + 1),
                   nodes=nodes, weights=weights)

    def volume(self) -> float:
        return float(np.sum(self.weights))


@dataclass(frozen=True)
class PointTuple:
    """An ordered tuple of points a_0, ..., a_s; repetitions allowed."""

    points: np.ndarray

    def __init__(self, points):
        arr = np.atleast_2d(np.asarray(points, dtype=float))
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @property
    def order(self) -> int:
        """s = number of points minus one."""
        return self.points.shape[0] - 1

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def base(self) -> np.ndarray:
        return self.points[0]

    def spans(self) -> np.ndarray:
        return self.points[1:] - self.points[0]

    def hull_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.points, axis=1)))


def _as_point_tuple(points) -> PointTuple:
    return points if isinstance(points, PointTuple) else PointTuple(points)


def monomial_simplex_integral(beta: Sequence[int]) -> float:
    """Exact integral of xi^beta over the standard simplex of matching dim.

    Uses the Dirichlet formula: integral = prod(beta_i!) / (s + |beta|)!.
    """
    s = len(beta)
    num = 1
    for b in beta:
        num *= math.factorial(b)
    return num / math.factorial(s + sum(beta))


def simplex_integral_poly(p: MultiPoly, points) -> float:
    """Exact integral of a polynomial over the hull parametrization of A.

    Substitutes the affine map xi -> a_0 + sum xi_i (a_i - a_0) into p and
    integrates the resulting polynomial in xi monomial by monomial.
    """
    tup = _as_point_tuple(points)
    s = tup.order
    if s == 0:
        return p.evaluate(tup.base())
    base = tup.base()
    spans = tup.spans()
    replacements = [
        MultiPoly.affine(spans[:, j], -base[j])  # <spans_j, xi> + base_j
        for j in range(tup.dimension)
    ]
    q = substitute(p, replacements)
    total = [
        c * monomial_simplex_integral(beta)
        for beta, c in q.nonzero_items()
    ]
    return math.fsum(total)


def simplex_integral(g, points, degree: int, rule: StandardSimplex | None = None) -> float:
    """Quadrature of g over the hull parametrization of the point tuple.

    g must accept a batch of points of shape (m, N) and return (m,) values;
    MultiPoly instances are routed to the exact path instead.  The rule is
    exact to at least `degree`.
    """
    if isinstance(g, MultiPoly):
        return simplex_integral_poly(g, points)
    tup = _as_point_tuple(points)
    s = tup.order
    if s == 0:
        return float(np.asarray(g(tup.points)).reshape(-1)[0])
    if rule is None:
        rule = StandardSimplex.with_degree(s, degree)
    u = tup.base() + rule.nodes @ tup.spans()
    values = np.asarray(g(u), dtype=float)
    return float(rule.weights @ values)


def default_quadrature_degree(order: int) -> int:
    """Default exactness degree for an order-s divided difference."""
    return 2 * order + 5


def divided_difference(
    f: SmoothFunction,
    points,
    vectors: Sequence[Sequence[float]],
    quad_degree: int | None = None,
) -> float:
    """[a_0, ..., a_s | v_1, ..., v_s]f, symmetric and multilinear in the vectors.

    Polynomial f is integrated exactly; transcendental catalog members use
    Grundmann-Moller quadrature with exactness `quad_degree` (default
    2s + 5).  Raises DerivativeOrderError when f lacks order-s derivatives
    and DomainError when the hull leaves f's declared domain.
    """
    tup = _as_point_tuple(points)
    vectors = [np.asarray(v, dtype=float) for v in vectors]
    s = len(vectors)
    if tup.order != s:
        raise ValueError(
            f"point tuple of order {tup.order} does not match {s} direction vectors"
        )
    if s > f.max_order:
        raise DerivativeOrderError(
            f"divided difference of order {s} exceeds declared smoothness {f.max_order}"
        )
    if tup.hull_radius() > f.domain_radius:
        raise DomainError(
            f"hull radius {tup.hull_radius():.3g} outside declared domain "
            f"radius {f.domain_radius:.3g}"
        )
    if s == 0:
        return float(f.evaluate(tup.base()))
    if isinstance(f, PolynomialFunction):
        return simplex_integral_poly(f.derivative_poly(vectors), tup)
    degree = default_quadrature_degree(s) if quad_degree is None else quad_degree
    return simplex_integral(lambda u: f.directional_derivative(u, vectors), tup, degree)


def divided_difference_continuity_probe(
    f: SmoothFunction,
    points,
    vectors,
    scale: float,
    samples: int = 24,
    rng: np.random.Generator | None = None,
    quad_degree: int | None = None,
) -> float:
    """Max divided-difference deviation under perturbations of size <= scale.

    Both the point group and the vector group are perturbed; the return value
    shrinks to zero with `scale` for fixed smooth f, which is the continuity
    property the convergence argument leans on.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    tup = _as_point_tuple(points)
    vectors = [np.asarray(v, dtype=float) for v in vectors]
    reference = divided_difference(f, tup, vectors, quad_degree)
    if scale == 0.0:
        return 0.0
    worst = 0.0
    for _ in range(samples):
        dp = rng.uniform(-1.0, 1.0, size=tup.points.shape)
        dp *= scale / max(1.0, float(np.max(np.linalg.norm(dp, axis=1))))
        dv = [rng.uniform(-1.0, 1.0, size=v.shape) for v in vectors]
        dv = [d * scale / max(1.0, float(np.linalg.norm(d))) for d in dv]
        value = divided_difference(
            f,
            PointTuple(tup.points + dp),
            [v + d for v, d in zip(vectors, dv)],
            quad_degree,
        )
        worst = max(worst, abs(value - reference))
    return worst
