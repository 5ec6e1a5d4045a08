"""Dense multivariate polynomial algebra.

Polynomials are stored on the graded-lexicographic monomial basis up to a
fixed total-degree bound.  The module also provides Taylor projectors,
Vandermonde determinants, and polarization of homogeneous polynomials into
symmetric multilinear forms.  Everything here is exact up to floating-point
rounding: no quadrature, no truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


# ---------------------------------------------------------------------------
# Multi-index enumeration
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int):
    """Yield tuples of `parts` non-negative ints summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def multi_indices(dimension: int, max_degree: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices with |alpha| <= max_degree in graded-lex order.

    The count is C(dimension + max_degree, max_degree).
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if max_degree < 0:
        raise ValueError(f"max_degree must be >= 0, got {max_degree}")
    out = []
    for k in range(max_degree + 1):
        out.extend(_compositions(k, dimension))
    return tuple(out)


@lru_cache(maxsize=None)
def homogeneous_indices(dimension: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices with |alpha| == degree, lex order.

    The count is C(dimension + degree - 1, degree), the dimension of the
    space of homogeneous polynomials of that degree.
    """
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    return tuple(_compositions(degree, dimension))


def basis_vector(dimension: int, i: int) -> np.ndarray:
    e = np.zeros(dimension)
    e[i] = 1.0
    return e


def _factorial_alpha(alpha: Iterable[int]) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


# ---------------------------------------------------------------------------
# Dense multivariate polynomials
# ---------------------------------------------------------------------------

class MultiPoly:
    """Polynomial in `dimension` variables, dense up to a total-degree bound.

    Coefficients live in a dict keyed by exponent tuples; every index with
    |alpha| <= degree is present.  Point evaluation is a direct monomial sum
    accumulated with compensated summation (`math.fsum`), not Horner.
    """

    __slots__ = ("dimension", "degree", "coeffs")

    def __init__(self, dimension: int, degree: int, coeffs: dict | None = None):
        self.dimension = int(dimension)
        self.degree = int(degree)
        table = multi_indices(self.dimension, self.degree)
        dense = {alpha: 0.0 for alpha in table}
        if coeffs:
            for alpha, c in coeffs.items():
                key = tuple(int(a) for a in alpha)
                if key not in dense:
                    raise ValueError(
                        f"index {key} outside degree bound {self.degree} "
                        f"in dimension {self.dimension}"
                    )
                dense[key] = float(c)
        self.coeffs = dense

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dimension: int, degree: int = 0) -> "MultiPoly":
        return cls(dimension, degree)

    @classmethod
    def constant(cls, dimension: int, value: float) -> "MultiPoly":
        return cls(dimension, 0, {(0,) * dimension: value})

    @classmethod
    def monomial(cls, dimension: int, alpha: Sequence[int], coeff: float = 1.0) -> "MultiPoly":
        alpha = tuple(int(a) for a in alpha)
        return cls(dimension, sum(alpha), {alpha: coeff})

    @classmethod
    def affine(cls, normal: Sequence[float], offset: float) -> "MultiPoly":
        """The affine form <normal, x> - offset as a degree-1 polynomial."""
        normal = np.asarray(normal, dtype=float)
        n = normal.size
        coeffs = {(0,) * n: -float(offset)}
        for i, c in enumerate(normal):
            alpha = [0] * n
            alpha[i] = 1
            coeffs[tuple(alpha)] = float(c)
        return cls(n, 1, coeffs)

    @classmethod
    def linear(cls, normal: Sequence[float]) -> "MultiPoly":
        """The linear form <normal, x>."""
        return cls.affine(normal, 0.0)

    # -- structure ----------------------------------------------------------

    def nonzero_items(self):
        return [(a, c) for a, c in self.coeffs.items() if c != 0.0]

    def coefficient(self, alpha: Sequence[int]) -> float:
        return self.coeffs.get(tuple(int(a) for a in alpha), 0.0)

    def total_degree(self) -> int:
        degs = [sum(a) for a, c in self.coeffs.items() if c != 0.0]
        return max(degs) if degs else 0

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.coeffs.values())

    def is_homogeneous(self, degree: int) -> bool:
        return all(sum(a) == degree for a, c in self.coeffs.items() if c != 0.0)

    def homogeneous_component(self, degree: int) -> "MultiPoly":
        part = {a: c for a, c in self.coeffs.items() if sum(a) == degree}
        return MultiPoly(self.dimension, degree, part)

    def max_abs_coeff(self) -> float:
        return max(abs(c) for c in self.coeffs.values()) if self.coeffs else 0.0

    def coeff_distance(self, other: "MultiPoly") -> float:
        """Max absolute coefficient difference, over the union of indices."""
        keys = set(self.coeffs) | set(other.coeffs)
        return max(abs(self.coefficient(a) - other.coefficient(a)) for a in keys)

    # -- arithmetic ---------------------------------------------------------

    def _binary(self, other: "MultiPoly", sign: float) -> "MultiPoly":
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        deg = max(self.degree, other.degree)
        out = MultiPoly(self.dimension, deg)
        for a, c in self.coeffs.items():
            out.coeffs[a] = c
        for a, c in other.coeffs.items():
            out.coeffs[a] = out.coeffs[a] + sign * c
        return out

    def __add__(self, other):
        if isinstance(other, MultiPoly):
            return self._binary(other, 1.0)
        return self._binary(MultiPoly.constant(self.dimension, other), 1.0)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        if isinstance(other, MultiPoly):
            return self._binary(other, -1.0)
        return self._binary(MultiPoly.constant(self.dimension, other), -1.0)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, factor: float) -> "MultiPoly":
        out = MultiPoly(self.dimension, self.degree)
        for a, c in self.coeffs.items():
            out.coeffs[a] = factor * c
        return out

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(float(other))
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        left = self.nonzero_items()
        right = other.nonzero_items()
        ldeg = max((sum(a) for a, _ in left), default=0)
        rdeg = max((sum(a) for a, _ in right), default=0)
        out = MultiPoly(self.dimension, ldeg + rdeg)
        acc = out.coeffs
        for a, ca in left:
            for b, cb in right:
                key = tuple(x + y for x, y in zip(a, b))
                acc[key] = acc[key] + ca * cb
        return out

    def __rmul__(self, other):
        return self.scale(float(other))

    def __pow__(self, exponent: int) -> "MultiPoly":
        if exponent < 0:
            raise ValueError("negative exponent")
        out = MultiPoly.constant(self.dimension, 1.0)
        for _ in range(exponent):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------

    def partial(self, i: int) -> "MultiPoly":
        """Partial derivative with respect to variable i."""
        out = MultiPoly(self.dimension, max(self.degree - 1, 0))
        for a, c in self.coeffs.items():
            if c == 0.0 or a[i] == 0:
                continue
            b = list(a)
            b[i] -= 1
            out.coeffs[tuple(b)] += c * a[i]
        return out

    def directional(self, v: Sequence[float]) -> "MultiPoly":
        """Formal directional derivative D_v p = sum_i v_i dp/dx_i."""
        v = np.asarray(v, dtype=float)
        out = MultiPoly(self.dimension, max(self.degree - 1, 0))
        for a, c in self.coeffs.items():
            if c == 0.0:
                continue
            for i in range(self.dimension):
                if a[i] == 0 or v[i] == 0.0:
                    continue
                b = list(a)
                b[i] -= 1
                out.coeffs[tuple(b)] += c * a[i] * v[i]
        return out

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, x: Sequence[float]) -> float:
        x = np.asarray(x, dtype=float)
        terms = []
        for a, c in self.coeffs.items():
            if c == 0.0:
                continue
            mono = 1.0
            for xi, ai in zip(x, a):
                if ai:
                    mono *= float(xi) ** ai
            terms.append(c * mono)
        return math.fsum(terms)

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.array([self.evaluate(p) for p in points])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return self.evaluate_many(x)
        return self.evaluate(x)

    def __repr__(self):
        nz = len(self.nonzero_items())
        return f"MultiPoly(dim={self.dimension}, degree<={self.degree}, {nz} terms)"


def substitute(p: MultiPoly, replacements: Sequence[MultiPoly]) -> MultiPoly:
    """Compose p with polynomial expressions for each of its variables.

    Returns q where q(y) = p(r_1(y), ..., r_N(y)).  All replacement
    polynomials must share one dimension (the new variable space).
    """
    if len(replacements) != p.dimension:
        raise ValueError("need one replacement per variable")
    new_dim = replacements[0].dimension
    for r in replacements:
        if r.dimension != new_dim:
            raise ValueError("replacement dimension mismatch")
    # Cache powers of each replacement up to the largest exponent used.
    max_pow = [0] * p.dimension
    for a, c in p.nonzero_items():
        for i, ai in enumerate(a):
            max_pow[i] = max(max_pow[i], ai)
    powers = []
    for i, r in enumerate(replacements):
        row = [MultiPoly.constant(new_dim, 1.0)]
        for _ in range(max_pow[i]):
            row.append(row[-1] * r)
        powers.append(row)
    out = MultiPoly.zero(new_dim)
    for a, c in p.nonzero_items():
        term = MultiPoly.constant(new_dim, c)
        for i, ai in enumerate(a):
            if ai:
                term = term * powers[i][ai]
        out = out + term
    return out


# ---------------------------------------------------------------------------
# Taylor projector and Vandermonde determinants
# ---------------------------------------------------------------------------

def taylor(f, center: Sequence[float], order: int) -> MultiPoly:
    """Taylor polynomial of f at `center` to the given order.

    The result is re-expanded on the monomial basis about the origin, so its
    coefficients are directly comparable with any other MultiPoly.  Requires
    f to expose exact directional derivatives up to `order` (see
    :mod:`cylattice.functions`); polynomials are reproduced exactly.
    """
    center = np.asarray(center, dtype=float)
    n = f.dimension
    # Powers of (x_i - center_i), shared across terms.
    shifted = [MultiPoly.affine(basis_vector(n, i), center[i]) for i in range(n)]
    powers = []
    for i in range(n):
        row = [MultiPoly.constant(n, 1.0)]
        for _ in range(order):
            row.append(row[-1] * shifted[i])
        powers.append(row)
    out = MultiPoly.zero(n, order)
    for alpha in multi_indices(n, order):
        dirs = []
        for i, ai in enumerate(alpha):
            dirs.extend([basis_vector(n, i)] * ai)
        deriv = f.directional_derivative(center, dirs)
        coeff = float(deriv) / _factorial_alpha(alpha)
        if coeff == 0.0:
            continue
        term = MultiPoly.constant(n, coeff)
        for i, ai in enumerate(alpha):
            if ai:
                term = term * powers[i][ai]
        out = out + term
    return out


def vandermonde(points: Sequence[Sequence[float]], basis: Sequence[MultiPoly]) -> float:
    """det(f_i(a_j)) for basis functions f_i and points a_j.

    Nonzero exactly when the points form an interpolation lattice for the
    span of the basis.
    """
    if len(points) != len(basis):
        raise ValueError(
            f"need as many points as basis functions, got {len(points)} vs {len(basis)}"
        )
    m = len(points)
    mat = np.empty((m, m))
    for i, f in enumerate(basis):
        for j, a in enumerate(points):
            mat[i, j] = f.evaluate(a)
    return float(np.linalg.det(mat))


# ---------------------------------------------------------------------------
# Polarization and symmetric multilinear forms
# ---------------------------------------------------------------------------

def polarize(p: MultiPoly, vectors: Sequence[Sequence[float]]) -> float:
    """Value of the symmetric multilinear form with diagonal p.

    For p homogeneous of degree m and m vectors, returns
    (1/m!) D_{v_1} ... D_{v_m} p, which is the unique symmetric m-linear
    form phi with phi(v, ..., v) = p(v).  Exact (formal differentiation).
    """
    m = len(vectors)
    if not p.is_homogeneous(m):
        raise ValueError(f"polynomial is not homogeneous of degree {m}")
    q = p
    for v in vectors:
        q = q.directional(v)
    return q.coefficient((0,) * p.dimension) / math.factorial(m)


@dataclass(frozen=True)
class SymmetricForm:
    """Symmetric m-linear form stored through its diagonal restriction.

    `diagonal` is the homogeneous polynomial p(v) = phi(v, ..., v); values on
    general argument lists are recovered by polarization.
    """

    order: int
    dimension: int
    diagonal: MultiPoly

    def __post_init__(self):
        if self.diagonal.dimension != self.dimension:
            raise ValueError("diagonal polynomial dimension mismatch")
        if not self.diagonal.is_homogeneous(self.order):
            raise ValueError(f"diagonal is not homogeneous of degree {self.order}")

    @classmethod
    def from_polynomial(cls, p: MultiPoly) -> "SymmetricForm":
        return cls(order=p.total_degree(), dimension=p.dimension, diagonal=p)

    def __call__(self, *vectors) -> float:
        if len(vectors) != self.order:
            raise ValueError(f"expected {self.order} vectors, got {len(vectors)}")
        if self.order == 0:
            return self.diagonal.coefficient((0,) * self.dimension)
        arrs = [np.asarray(v, dtype=float) for v in vectors]
        if all(np.array_equal(arrs[0], v) for v in arrs[1:]):
            return self.diagonal.evaluate(arrs[0])
        return polarize(self.diagonal, arrs)

    def on(self, vectors: Sequence[Sequence[float]]) -> float:
        """Same as calling, with the arguments packed in one sequence."""
        return self(*vectors)


def derivative_form(f, a: Sequence[float], m: int) -> SymmetricForm:
    """The m-th total derivative of f at a, as a symmetric m-linear form.

    The diagonal polynomial is p(v) = sum_{|beta|=m} (m!/beta!) d^beta f(a) v^beta,
    so that calling the form on (v, ..., v) gives f^(m)(a)(v, ..., v).
    """
    a = np.asarray(a, dtype=float)
    n = f.dimension
    coeffs = {}
    for beta in homogeneous_indices(n, m):
        dirs = []
        for i, bi in enumerate(beta):
            dirs.extend([basis_vector(n, i)] * bi)
        deriv = float(f.directional_derivative(a, dirs))
        coeffs[beta] = deriv * math.factorial(m) / _factorial_alpha(beta)
    p = MultiPoly(n, m, coeffs)
    return SymmetricForm(order=m, dimension=n, diagonal=p)
