"""Evaluatable functions with exact directional derivatives.

The interpolation and remainder machinery needs f(x) and the iterated
directional derivatives D_{v_1}...D_{v_s} f(x) in closed form.  This module
provides a small catalog: polynomials, exp/sin/cos of affine forms, products
and linear combinations of catalog members.  No numerical differentiation
happens here; finite differences exist only as a test oracle.

All `evaluate` / `directional_derivative` methods accept a single point of
shape (N,) or a batch of shape (M, N) and return a float or an (M,) array
accordingly, which keeps simplex quadrature vectorized.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import ConfigError, DerivativeOrderError
from .poly import MultiPoly

_INF = math.inf


class SmoothFunction:
    """Base class: a function with directional derivatives up to `max_order`."""

    dimension: int
    max_order: float = _INF
    domain_radius: float = _INF

    def evaluate(self, x):
        raise NotImplementedError

    def directional_derivative(self, x, vectors: Sequence[Sequence[float]]):
        """D_{v_1} ... D_{v_s} f evaluated at x (s = len(vectors))."""
        raise NotImplementedError

    def _check_order(self, s: int):
        if s > self.max_order:
            raise DerivativeOrderError(
                f"derivative order {s} exceeds declared smoothness {self.max_order}"
            )

    def __call__(self, x):
        return self.evaluate(x)


def _as_points(x, dimension: int):
    """Normalize x to (points, batched) with points of shape (M, N)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        if arr.size != dimension:
            raise ValueError(f"point has size {arr.size}, expected {dimension}")
        return arr[None, :], False
    if arr.ndim == 2 and arr.shape[1] == dimension:
        return arr, True
    raise ValueError(f"bad point array shape {arr.shape} for dimension {dimension}")


def _unbatch(values: np.ndarray, batched: bool):
    return values if batched else float(values[0])


class PolynomialFunction(SmoothFunction):
    """A MultiPoly wrapped as a smooth function (derivatives are formal)."""

    def __init__(self, poly: MultiPoly):
        self.poly = poly
        self.dimension = poly.dimension

    @classmethod
    def monomial(cls, dimension: int, alpha: Sequence[int]) -> "PolynomialFunction":
        return cls(MultiPoly.monomial(dimension, alpha))

    def derivative_poly(self, vectors) -> MultiPoly:
        q = self.poly
        for v in vectors:
            q = q.directional(v)
        return q

    def evaluate(self, x):
        points, batched = _as_points(x, self.dimension)
        return _unbatch(self.poly.evaluate_many(points), batched)

    def directional_derivative(self, x, vectors):
        self._check_order(len(vectors))
        points, batched = _as_points(x, self.dimension)
        return _unbatch(self.derivative_poly(vectors).evaluate_many(points), batched)

    def __repr__(self):
        return f"PolynomialFunction({self.poly!r})"


class _AffineComposed(SmoothFunction):
    """Base for g(<c, x> + shift) with g from a one-dimensional family."""

    def __init__(self, coeffs: Sequence[float], shift: float = 0.0, amplitude: float = 1.0):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.shift = float(shift)
        self.amplitude = float(amplitude)
        self.dimension = self.coeffs.size

    def _argument(self, points: np.ndarray) -> np.ndarray:
        return points @ self.coeffs + self.shift

    def _outer(self, z: np.ndarray, order: int) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, x):
        points, batched = _as_points(x, self.dimension)
        return _unbatch(self.amplitude * self._outer(self._argument(points), 0), batched)

    def directional_derivative(self, x, vectors):
        self._check_order(len(vectors))
        points, batched = _as_points(x, self.dimension)
        factor = self.amplitude
        for v in vectors:
            factor *= float(np.asarray(v, dtype=float) @ self.coeffs)
        vals = factor * self._outer(self._argument(points), len(vectors))
        return _unbatch(vals, batched)


class ExpAffine(_AffineComposed):
    """amplitude * exp(<coeffs, x> + shift); all derivatives in closed form."""

    def _outer(self, z, order):
        return np.exp(z)

    def __repr__(self):
        return f"ExpAffine(coeffs={self.coeffs.tolist()}, shift={self.shift})"


class SinAffine(_AffineComposed):
    """amplitude * sin(<coeffs, x> + shift)."""

    def _outer(self, z, order):
        return np.sin(z + order * math.pi / 2.0)


class CosAffine(_AffineComposed):
    """amplitude * cos(<coeffs, x> + shift)."""

    def _outer(self, z, order):
        return np.cos(z + order * math.pi / 2.0)


class Product(SmoothFunction):
    """Pointwise product of two catalog members (Leibniz rule, exact)."""

    def __init__(self, left: SmoothFunction, right: SmoothFunction):
        if left.dimension != right.dimension:
            raise ValueError("dimension mismatch")
        self.left = left
        self.right = right
        self.dimension = left.dimension
        self.max_order = min(left.max_order, right.max_order)
        self.domain_radius = min(left.domain_radius, right.domain_radius)

    def evaluate(self, x):
        return self.left.evaluate(x) * self.right.evaluate(x)

    def directional_derivative(self, x, vectors):
        self._check_order(len(vectors))
        s = len(vectors)
        idx = range(s)
        total = 0.0
        for k in range(s + 1):
            for subset in combinations(idx, k):
                rest = tuple(i for i in idx if i not in subset)
                lval = self.left.directional_derivative(x, [vectors[i] for i in subset])
                rval = self.right.directional_derivative(x, [vectors[i] for i in rest])
                total = total + lval * rval
        return total


class LinearCombination(SmoothFunction):
    """sum_k weight_k * f_k for catalog members f_k."""

    def __init__(self, terms: Sequence[tuple[float, SmoothFunction]]):
        if not terms:
            raise ValueError("empty combination")
        self.terms = [(float(w), f) for w, f in terms]
        self.dimension = self.terms[0][1].dimension
        for _, f in self.terms:
            if f.dimension != self.dimension:
                raise ValueError("dimension mismatch")
        self.max_order = min(f.max_order for _, f in self.terms)
        self.domain_radius = min(f.domain_radius for _, f in self.terms)

    def evaluate(self, x):
        total = 0.0
        for w, f in self.terms:
            total = total + w * f.evaluate(x)
        return total

    def directional_derivative(self, x, vectors):
        self._check_order(len(vectors))
        total = 0.0
        for w, f in self.terms:
            total = total + w * f.directional_derivative(x, vectors)
        return total


class RestrictedOrder(SmoothFunction):
    """Wrapper declaring a finite smoothness class for an inner function.

    Used to exercise capability errors: derivative requests beyond the
    declared order raise even if the wrapped function could provide them.
    """

    def __init__(self, inner: SmoothFunction, max_order: int):
        self.inner = inner
        self.dimension = inner.dimension
        self.max_order = int(max_order)
        self.domain_radius = inner.domain_radius

    def evaluate(self, x):
        return self.inner.evaluate(x)

    def directional_derivative(self, x, vectors):
        self._check_order(len(vectors))
        return self.inner.directional_derivative(x, vectors)


# ---------------------------------------------------------------------------
# Named catalog for configuration files
# ---------------------------------------------------------------------------

def function_from_spec(spec: dict, dimension: int) -> SmoothFunction:
    """Build a catalog function from a config dict ({"name": ..., params}).

    Unknown names are rejected with ConfigError.
    """
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("function spec must be an object with a 'name' field")
    name = spec["name"]
    if name == "exp_sum":
        return ExpAffine(np.ones(dimension))
    if name == "exp_affine":
        return ExpAffine(spec.get("coeffs", np.ones(dimension)), spec.get("shift", 0.0))
    if name == "sin_affine":
        return SinAffine(spec.get("coeffs", np.ones(dimension)), spec.get("shift", 0.0))
    if name == "cos_affine":
        return CosAffine(spec.get("coeffs", np.ones(dimension)), spec.get("shift", 0.0))
    if name == "monomial":
        alpha = spec.get("alpha")
        if alpha is None or len(alpha) != dimension:
            raise ConfigError("monomial needs an 'alpha' list matching the dimension")
        return PolynomialFunction.monomial(dimension, alpha)
    if name == "polynomial":
        terms = spec.get("terms")
        if not terms:
            raise ConfigError("polynomial needs a nonempty 'terms' list of [alpha..., coeff]")
        coeffs = {}
        for row in terms:
            *alpha, c = row
            if len(alpha) != dimension:
                raise ConfigError(f"polynomial term {row} has wrong arity")
            coeffs[tuple(int(a) for a in alpha)] = float(c)
        degree = max(sum(a) for a in coeffs)
        return PolynomialFunction(MultiPoly(dimension, degree, coeffs))
    if name == "product":
        factors = spec.get("factors")
        if not factors or len(factors) < 2:
            raise ConfigError("product needs at least two 'factors'")
        out = function_from_spec(factors[0], dimension)
        for sub in factors[1:]:
            out = Product(out, function_from_spec(sub, dimension))
        return out
    raise ConfigError(f"unknown function name {name!r}")
