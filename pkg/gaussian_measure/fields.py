"""
Random fields on the Gaussian space R^n.

A RandomField is an immutable expression tree evaluated vectorially on an
(N, n) array of points. Nodes that are differentiable expose an exact gradient
as another tree, so identities such as integration by parts, Otto's adjoint
or the translation increment can be checked without symbolic algebra.
"""
import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from numbers import Real
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite_e

from core.exceptions import DimensionMismatchError, DomainError, MissingGradientError
from .scalar_maps import get_scalar_map

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


def as_points(points, dim: int) -> np.ndarray:
    """Coerce scalars, single points and batches to an (N, dim) float array."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionMismatchError(f"Expected points of dimension {dim}, got array of shape {arr.shape}")
    return arr


class RandomField(ABC):
    """Scalar function on R^dim, seen as a random variable under the Gaussian measure."""

    dim: int

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Values at an (N, dim) array of points."""

    @abstractmethod
    def gradient(self) -> Optional[Tuple["RandomField", ...]]:
        """Exact gradient as dim fields, or None when the tree is not differentiable."""

    @abstractmethod
    def to_json(self) -> dict:
        """Expression-grammar representation (see gaussian_measure.expressions)."""

    def __call__(self, points) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return np.asarray(self.evaluate(as_points(points, self.dim)), dtype=float)

    @property
    def differentiable(self) -> bool:
        return self.gradient() is not None

    def partial(self, axis: int) -> "RandomField":
        if not 0 <= axis < self.dim:
            raise DomainError(f"Axis {axis} out of range for a field of dimension {self.dim}")
        grad = self.gradient()
        if grad is None:
            raise MissingGradientError(f"{self.describe()} has no exact gradient")
        return grad[axis]

    def describe(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"

    # Arithmetic builds Affine / Product nodes.

    def _check_dim(self, other: "RandomField"):
        if other.dim != self.dim:
            raise DimensionMismatchError(f"Cannot combine fields of dimension {self.dim} and {other.dim}")

    def __add__(self, other):
        if isinstance(other, Real):
            return Affine(((1.0, self),), float(other), self.dim)
        self._check_dim(other)
        return Affine(((1.0, self), (1.0, other)), 0.0, self.dim)

    __radd__ = __add__

    def __neg__(self):
        return Affine(((-1.0, self),), 0.0, self.dim)

    def __sub__(self, other):
        if isinstance(other, Real):
            return Affine(((1.0, self),), -float(other), self.dim)
        self._check_dim(other)
        return Affine(((1.0, self), (-1.0, other)), 0.0, self.dim)

    def __rsub__(self, other):
        return Affine(((-1.0, self),), float(other), self.dim)

    def __mul__(self, other):
        if isinstance(other, Real):
            return Affine(((float(other), self),), 0.0, self.dim)
        self._check_dim(other)
        return Product((self, other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Real):
            return NotImplemented
        return Affine(((1.0 / float(other), self),), 0.0, self.dim)

    def __pow__(self, exponent):
        return Power(self, int(exponent))


def _zero_gradient(dim: int) -> Tuple[RandomField, ...]:
    return tuple(Constant(0.0, dim) for _ in range(dim))


@dataclass(frozen=True)
class Constant(RandomField):
    value: float
    dim: int = 1

    def evaluate(self, points):
        return np.full(points.shape[0], float(self.value))

    def gradient(self):
        return _zero_gradient(self.dim)

    def to_json(self):
        return {"op": "const", "value": float(self.value)}

    def describe(self):
        return f"{self.value:g}"


@dataclass(frozen=True)
class Coordinate(RandomField):
    index: int
    dim: int = 1

    def __post_init__(self):
        if not 0 <= self.index < self.dim:
            raise DomainError(f"Coordinate index {self.index} out of range for dimension {self.dim}")

    def evaluate(self, points):
        return points[:, self.index].copy()

    def gradient(self):
        return tuple(Constant(1.0 if j == self.index else 0.0, self.dim) for j in range(self.dim))

    def to_json(self):
        return {"op": "coord", "index": self.index}

    def describe(self):
        return "x" if self.dim == 1 else f"x{self.index + 1}"


def _normalize_terms(terms, dim: int) -> Tuple[Tuple[MultiIndex, float], ...]:
    merged: Dict[MultiIndex, float] = {}
    for index, coeff in (terms.items() if isinstance(terms, dict) else terms):
        index = tuple(int(a) for a in index)
        if len(index) != dim or any(a < 0 for a in index):
            raise DomainError(f"Multi-index {index} invalid for dimension {dim}")
        merged[index] = merged.get(index, 0.0) + float(coeff)
    return tuple(sorted((k, v) for k, v in merged.items() if v != 0.0))


@dataclass(frozen=True)
class Polynomial(RandomField):
    """Finite sum of monomials c_beta x^beta, closed under the Gaussian calculus."""

    terms: Tuple[Tuple[MultiIndex, float], ...]
    dim: int = 1

    @classmethod
    def from_terms(cls, terms, dim: int = 1) -> "Polynomial":
        return cls(_normalize_terms(terms, dim), dim)

    @classmethod
    def constant(cls, value: float, dim: int = 1) -> "Polynomial":
        return cls.from_terms({(0,) * dim: value}, dim)

    @classmethod
    def squared_norm(cls, dim: int = 1) -> "Polynomial":
        return cls.from_terms({tuple(2 if j == i else 0 for j in range(dim)): 1.0 for i in range(dim)}, dim)

    @property
    def coefficients(self) -> Dict[MultiIndex, float]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(index) for index, _ in self.terms), default=0)

    def evaluate(self, points):
        out = np.zeros(points.shape[0])
        for index, coeff in self.terms:
            out += coeff * np.prod(points ** np.asarray(index, dtype=float), axis=1)
        return out

    def partial_polynomial(self, axis: int) -> "Polynomial":
        out = {}
        for index, coeff in self.terms:
            if index[axis] > 0:
                lowered = tuple(a - 1 if j == axis else a for j, a in enumerate(index))
                out[lowered] = out.get(lowered, 0.0) + coeff * index[axis]
        return Polynomial.from_terms(out, self.dim)

    def divergence_polynomial(self, axis: int) -> "Polynomial":
        """delta_i p = x_i p - d_i p, exactly."""
        raised = {}
        for index, coeff in self.terms:
            up = tuple(a + 1 if j == axis else a for j, a in enumerate(index))
            raised[up] = raised.get(up, 0.0) + coeff
        return Polynomial.from_terms(raised, self.dim).plus(self.partial_polynomial(axis).scaled(-1.0))

    def plus(self, other: "Polynomial") -> "Polynomial":
        self._check_dim(other)
        merged = dict(self.terms)
        for index, coeff in other.terms:
            merged[index] = merged.get(index, 0.0) + coeff
        return Polynomial.from_terms(merged, self.dim)

    def scaled(self, factor: float) -> "Polynomial":
        return Polynomial.from_terms({k: factor * v for k, v in self.terms}, self.dim)

    def times(self, other: "Polynomial") -> "Polynomial":
        self._check_dim(other)
        out = {}
        for (a, ca), (b, cb) in itertools.product(self.terms, other.terms):
            index = tuple(x + y for x, y in zip(a, b))
            out[index] = out.get(index, 0.0) + ca * cb
        return Polynomial.from_terms(out, self.dim)

    def gradient(self):
        return tuple(self.partial_polynomial(i) for i in range(self.dim))

    def to_json(self):
        return {"op": "poly", "terms": [[list(index), coeff] for index, coeff in self.terms]}

    def describe(self):
        return "poly(" + " + ".join(f"{c:g}*x^{list(i)}" for i, c in self.terms) + ")" if self.terms else "0"


@dataclass(frozen=True)
class HermiteAtom(RandomField):
    """Finite series sum c_alpha H_alpha in probabilists' Hermite polynomials."""

    terms: Tuple[Tuple[MultiIndex, float], ...]
    dim: int = 1

    @classmethod
    def from_terms(cls, terms, dim: int = 1) -> "HermiteAtom":
        return cls(_normalize_terms(terms, dim), dim)

    @property
    def degree(self) -> int:
        return max((sum(index) for index, _ in self.terms), default=0)

    def evaluate(self, points):
        if not self.terms:
            return np.zeros(points.shape[0])
        top = max(max(index) for index, _ in self.terms)
        # H_k(x_i) for k <= top via the three-term recurrence
        tables = [hermite_e.hermevander(points[:, axis], top) for axis in range(self.dim)]
        out = np.zeros(points.shape[0])
        for index, coeff in self.terms:
            term = np.full(points.shape[0], coeff)
            for axis, k in enumerate(index):
                term = term * tables[axis][:, k]
            out += term
        return out

    def gradient(self):
        grads = []
        for axis in range(self.dim):
            out = {}
            for index, coeff in self.terms:
                if index[axis] > 0:
                    lowered = tuple(a - 1 if j == axis else a for j, a in enumerate(index))
                    out[lowered] = out.get(lowered, 0.0) + coeff * index[axis]
            grads.append(HermiteAtom.from_terms(out, self.dim))
        return tuple(grads)

    def to_json(self):
        return {"op": "hermite", "terms": [[list(index), coeff] for index, coeff in self.terms]}

    def describe(self):
        return "herm(" + " + ".join(f"{c:g}*H{list(i)}" for i, c in self.terms) + ")" if self.terms else "0"


@dataclass(frozen=True)
class Affine(RandomField):
    terms: Tuple[Tuple[float, RandomField], ...]
    offset: float = 0.0
    dim: int = 1

    def evaluate(self, points):
        out = np.full(points.shape[0], float(self.offset))
        for weight, field in self.terms:
            if weight != 0.0:
                out = out + weight * field.evaluate(points)
        return out

    def gradient(self):
        grads = [field.gradient() for _, field in self.terms]
        if any(g is None for g in grads):
            return None
        return tuple(
            Affine(tuple((w, g[axis]) for (w, _), g in zip(self.terms, grads)), 0.0, self.dim)
            for axis in range(self.dim)
        )

    def to_json(self):
        return {
            "op": "affine",
            "terms": [[w, field.to_json()] for w, field in self.terms],
            "offset": float(self.offset),
        }

    def describe(self):
        parts = [f"{w:g}*{f.describe()}" for w, f in self.terms]
        if self.offset:
            parts.append(f"{self.offset:g}")
        return "(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class Product(RandomField):
    factors: Tuple[RandomField, ...]

    def __post_init__(self):
        if not self.factors:
            raise DomainError("Product needs at least one factor")
        dims = {f.dim for f in self.factors}
        if len(dims) != 1:
            raise DimensionMismatchError(f"Product factors have mixed dimensions {sorted(dims)}")

    @property
    def dim(self):
        return self.factors[0].dim

    def evaluate(self, points):
        out = np.ones(points.shape[0])
        for factor in self.factors:
            out = out * factor.evaluate(points)
        return out

    def gradient(self):
        grads = [f.gradient() for f in self.factors]
        if any(g is None for g in grads):
            return None
        components = []
        for axis in range(self.dim):
            terms = []
            for k, g in enumerate(grads):
                rest = self.factors[:k] + self.factors[k + 1:]
                terms.append((1.0, Product((g[axis],) + rest)))
            components.append(Affine(tuple(terms), 0.0, self.dim))
        return tuple(components)

    def to_json(self):
        return {"op": "product", "factors": [f.to_json() for f in self.factors]}

    def describe(self):
        return "*".join(f.describe() for f in self.factors)


@dataclass(frozen=True)
class Power(RandomField):
    base: RandomField
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise DomainError("Only non-negative integer powers are supported")

    @property
    def dim(self):
        return self.base.dim

    def evaluate(self, points):
        return self.base.evaluate(points) ** self.exponent

    def gradient(self):
        if self.exponent == 0:
            return _zero_gradient(self.dim)
        grad = self.base.gradient()
        if grad is None:
            return None
        outer = Power(self.base, self.exponent - 1)
        return tuple(Product((outer, g)) * float(self.exponent) for g in grad)

    def to_json(self):
        return {"op": "power", "base": self.base.to_json(), "exponent": self.exponent}

    def describe(self):
        return f"{self.base.describe()}^{self.exponent}"


@dataclass(frozen=True)
class Compose(RandomField):
    """G o f for a registered scalar map G."""

    map_name: str
    inner: RandomField

    def __post_init__(self):
        get_scalar_map(self.map_name)

    @property
    def dim(self):
        return self.inner.dim

    @property
    def scalar_map(self):
        return get_scalar_map(self.map_name)

    def evaluate(self, points):
        return self.scalar_map(self.inner.evaluate(points))

    def gradient(self):
        derivative = self.scalar_map.derivative
        grad = self.inner.gradient()
        if derivative is None or grad is None:
            return None
        outer = Compose(derivative, self.inner)
        return tuple(Product((outer, g)) for g in grad)

    def to_json(self):
        return {"op": "map", "name": self.map_name, "arg": self.inner.to_json()}

    def describe(self):
        return f"{self.map_name}({self.inner.describe()})"


@dataclass(frozen=True)
class Where(RandomField):
    """if_true where lhs <= rhs, if_false elsewhere; min and max are built from it."""

    lhs: RandomField
    rhs: RandomField
    if_true: RandomField
    if_false: RandomField

    @property
    def dim(self):
        return self.lhs.dim

    def evaluate(self, points):
        mask = self.lhs.evaluate(points) <= self.rhs.evaluate(points)
        return np.where(mask, self.if_true.evaluate(points), self.if_false.evaluate(points))

    def gradient(self):
        # a.e. gradient: the switching set {lhs = rhs} is null for the fields used here
        gt, gf = self.if_true.gradient(), self.if_false.gradient()
        if gt is None or gf is None:
            return None
        return tuple(Where(self.lhs, self.rhs, a, b) for a, b in zip(gt, gf))

    def to_json(self):
        return {
            "op": "where",
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "if_true": self.if_true.to_json(),
            "if_false": self.if_false.to_json(),
        }

    def describe(self):
        branches = f"{self.if_true.describe()}, {self.if_false.describe()}"
        return f"where({self.lhs.describe()}<={self.rhs.describe()}, {branches})"


@dataclass(frozen=True)
class Truncate(RandomField):
    """f * 1(|x| <= radius)."""

    inner: RandomField
    radius: float

    @property
    def dim(self):
        return self.inner.dim

    def evaluate(self, points):
        inside = np.linalg.norm(points, axis=1) <= self.radius
        return np.where(inside, self.inner.evaluate(points), 0.0)

    def gradient(self):
        return None

    def to_json(self):
        return {"op": "truncate", "arg": self.inner.to_json(), "radius": float(self.radius)}

    def describe(self):
        return f"{self.inner.describe()}*1(|x|<={self.radius:g})"


@dataclass(frozen=True)
class Translate(RandomField):
    """tau_h f(x) = f(x - h)."""

    inner: RandomField
    shift: Tuple[float, ...]

    def __post_init__(self):
        if len(self.shift) != self.inner.dim:
            raise DimensionMismatchError(f"Shift of length {len(self.shift)} for a field of dimension {self.inner.dim}")

    @property
    def dim(self):
        return self.inner.dim

    def evaluate(self, points):
        return self.inner.evaluate(points - np.asarray(self.shift, dtype=float))

    def gradient(self):
        grad = self.inner.gradient()
        if grad is None:
            return None
        return tuple(Translate(g, self.shift) for g in grad)

    def to_json(self):
        return {"op": "translate", "arg": self.inner.to_json(), "shift": list(self.shift)}

    def describe(self):
        return f"tau_{list(self.shift)}{self.inner.describe()}"


# Constructors used across the package


def coordinate(index: int = 0, dim: int = 1) -> Coordinate:
    return Coordinate(index, dim)


def constant(value: float, dim: int = 1) -> Constant:
    return Constant(float(value), dim)


def compose(map_name: str, inner: RandomField) -> Compose:
    return Compose(map_name, inner)


def field_min(f: RandomField, g: RandomField) -> Where:
    return Where(f, g, f, g)


def field_max(f: RandomField, g: RandomField) -> Where:
    return Where(f, g, g, f)


def translate(f: RandomField, shift: Sequence[float]) -> Translate:
    return Translate(f, tuple(float(h) for h in np.atleast_1d(shift)))


def truncate(f: RandomField, radius: float) -> Truncate:
    return Truncate(f, float(radius))


def bump(center: Sequence[float], scale: float = 1.0) -> RandomField:
    """Tensor bump prod_i (1 - y_i^2)^3_+ with y = (x - center) / scale; C^2 with compact support."""
    center = tuple(float(c) for c in np.atleast_1d(center))
    dim = len(center)
    if scale <= 0:
        raise DomainError("Bump scale must be positive")
    factors = tuple(
        Compose("bump3", Affine(((1.0 / scale, Coordinate(i, dim)),), -c / scale, dim))
        for i, c in enumerate(center)
    )
    return factors[0] if dim == 1 else Product(factors)


def linear(coefficients: Sequence[float], offset: float = 0.0) -> Polynomial:
    coefficients = [float(c) for c in coefficients]
    dim = len(coefficients)
    terms = {tuple(1 if j == i else 0 for j in range(dim)): c for i, c in enumerate(coefficients)}
    terms[(0,) * dim] = offset
    return Polynomial.from_terms(terms, dim)


def divergence_field(f: RandomField, axis: int) -> RandomField:
    """delta_i f = x_i f - d_i f, kept exact for polynomial and Hermite trees."""
    if isinstance(f, Polynomial):
        return f.divergence_polynomial(axis)
    if isinstance(f, HermiteAtom):
        raised = {}
        for index, coeff in f.terms:
            up = tuple(a + 1 if j == axis else a for j, a in enumerate(index))
            raised[up] = raised.get(up, 0.0) + coeff
        return HermiteAtom.from_terms(raised, f.dim)
    return Product((Coordinate(axis, f.dim), f)) - f.partial(axis)


def laplacian(f: RandomField) -> RandomField:
    grad = f.gradient()
    if grad is None:
        raise MissingGradientError(f"{f.describe()} has no exact gradient")
    return Affine(tuple((1.0, g.partial(i)) for i, g in enumerate(grad)), 0.0, f.dim)


def delta_gradient(g: RandomField) -> RandomField:
    """delta . grad g = x . grad g - Laplacian g."""
    grad = g.gradient()
    if grad is None:
        raise MissingGradientError(f"{g.describe()} has no exact gradient")
    return Affine(tuple((1.0, divergence_field(component, i)) for i, component in enumerate(grad)), 0.0, g.dim)


def directional(grad: Sequence[RandomField], h: Sequence[float]) -> RandomField:
    """grad f . h as a field."""
    grad = tuple(grad)
    return Affine(tuple((float(hi), g) for hi, g in zip(h, grad)), 0.0, grad[0].dim)
