"""
Hermite series in probabilists' normalization.

H_0 = 1, H_1 = x, H_{k+1} = x H_k - k H_{k-1}; E[H_a H_b] = a! 1(a = b).
Multi-indices act axis by axis: H_alpha(x) = prod_i H_{alpha_i}(x_i).
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import hermite_e

from core.exceptions import DimensionMismatchError, DomainError
from gaussian_measure.fields import HermiteAtom, MultiIndex, Polynomial, as_points

logger = logging.getLogger(__name__)


def as_multi_index(alpha: Union[int, Sequence[int]], dim: int = None) -> MultiIndex:
    index = (int(alpha),) if np.isscalar(alpha) else tuple(int(a) for a in alpha)
    if any(a < 0 for a in index):
        raise DomainError(f"Multi-index {index} has a negative entry")
    if dim is not None and len(index) != dim:
        raise DimensionMismatchError(f"Multi-index {index} does not match dimension {dim}")
    return index


def multi_factorial(alpha: MultiIndex) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def multi_indices(dim: int, degree: int) -> Iterator[MultiIndex]:
    """All alpha with |alpha| <= degree, graded then lexicographic."""
    for total in range(degree + 1):
        yield from _compositions(total, dim)


def _compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


@lru_cache(maxsize=None)
def _monomial_in_hermite(k: int) -> Tuple[float, ...]:
    """x^k = sum_j a_j H_j(x)."""
    return tuple(hermite_e.poly2herme([0.0] * k + [1.0]))


@lru_cache(maxsize=None)
def _hermite_in_monomial(k: int) -> Tuple[float, ...]:
    """H_k(x) = sum_j b_j x^j."""
    return tuple(hermite_e.herme2poly([0.0] * k + [1.0]))


def _change_basis(terms, dim: int, table) -> Dict[MultiIndex, float]:
    out: Dict[MultiIndex, float] = {}
    for index, coeff in terms:
        factors = [table(k) for k in index]
        for target in np.ndindex(*(len(f) for f in factors)):
            weight = coeff * math.prod(f[j] for f, j in zip(factors, target))
            if weight != 0.0:
                out[target] = out.get(target, 0.0) + weight
    return out


@dataclass(frozen=True)
class HermiteSeries:
    """Finitely supported coefficients alpha -> c_alpha of sum c_alpha H_alpha."""

    dim: int
    coeffs: Tuple[Tuple[MultiIndex, float], ...]

    @classmethod
    def from_dict(cls, coeffs: Dict, dim: int = 1) -> "HermiteSeries":
        merged: Dict[MultiIndex, float] = {}
        for alpha, c in coeffs.items():
            alpha = as_multi_index(alpha, dim)
            merged[alpha] = merged.get(alpha, 0.0) + float(c)
        return cls(dim, tuple(sorted((a, c) for a, c in merged.items() if c != 0.0)))

    @classmethod
    def zero(cls, dim: int = 1) -> "HermiteSeries":
        return cls(dim, ())

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "HermiteSeries":
        return cls.from_dict(_change_basis(p.terms, p.dim, _monomial_in_hermite), p.dim)

    def as_dict(self) -> Dict[MultiIndex, float]:
        return dict(self.coeffs)

    def coefficient(self, alpha) -> float:
        return self.as_dict().get(as_multi_index(alpha, self.dim), 0.0)

    @property
    def degree(self) -> int:
        return max((sum(a) for a, _ in self.coeffs), default=0)

    def to_field(self) -> HermiteAtom:
        return HermiteAtom.from_terms(self.coeffs, self.dim)

    def to_polynomial(self) -> Polynomial:
        return Polynomial.from_terms(_change_basis(self.coeffs, self.dim, _hermite_in_monomial), self.dim)

    def __call__(self, points) -> np.ndarray:
        return self.to_field().evaluate(as_points(points, self.dim))

    def norm_squared(self) -> float:
        """E[s^2] = sum alpha! c_alpha^2."""
        return math.fsum(multi_factorial(a) * c * c for a, c in self.coeffs)

    def plus(self, other: "HermiteSeries") -> "HermiteSeries":
        if other.dim != self.dim:
            raise DimensionMismatchError(f"Cannot add Hermite series of dimension {self.dim} and {other.dim}")
        merged = self.as_dict()
        for a, c in other.coeffs:
            merged[a] = merged.get(a, 0.0) + c
        return HermiteSeries.from_dict(merged, self.dim)

    def scaled(self, factor: float) -> "HermiteSeries":
        return HermiteSeries.from_dict({a: factor * c for a, c in self.coeffs}, self.dim)

    def truncated(self, degree: int) -> "HermiteSeries":
        return HermiteSeries(self.dim, tuple((a, c) for a, c in self.coeffs if sum(a) <= degree))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "coefficients": [{"alpha": list(a), "value": c} for a, c in self.coeffs],
        }


def hermite(alpha, dim: int = None) -> HermiteSeries:
    """H_alpha built as delta^alpha 1, iterating the divergence on the constant polynomial."""
    alpha = as_multi_index(alpha, dim)
    p = Polynomial.constant(1.0, len(alpha))
    for axis, k in enumerate(alpha):
        for _ in range(k):
            p = p.divergence_polynomial(axis)
    return HermiteSeries.from_polynomial(p)


def monomial_to_hermite(p: Polynomial) -> HermiteSeries:
    return HermiteSeries.from_polynomial(p)


def hermite_to_monomial(series: HermiteSeries) -> Polynomial:
    return series.to_polynomial()
