"""
Finite sample spaces with strictly positive weights.

Every expectation is a compensated sum (math.fsum), so the oracle values
carry no quadrature error; the only error left is floating point rounding.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite_e
from scipy.special import factorial

from core.exceptions import DimensionMismatchError, NonPositiveDensityError
from gaussian_measure.fields import HermiteAtom, RandomField, Truncate
from gaussian_measure.integrators import GaussianIntegrator

logger = logging.getLogger(__name__)

MAX_ATOMS = 10_000


def fsum_dot(weights: np.ndarray, values: np.ndarray) -> float:
    products = np.asarray(weights, dtype=float) * np.asarray(values, dtype=float)
    try:
        return math.fsum(products.tolist())
    except OverflowError:
        return float("inf")


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    weights: np.ndarray
    atoms: Tuple = ()
    # (N, dim) coordinates when the space quantizes a Gaussian
    points: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_weights(cls, weights: Sequence[float], atoms: Sequence = None, points=None) -> "FiniteSpace":
        weights = np.asarray(weights, dtype=float).ravel()
        if weights.size == 0:
            raise NonPositiveDensityError("A finite space needs at least one atom")
        if np.any(~np.isfinite(weights)) or np.any(weights <= 0):
            raise NonPositiveDensityError(f"Weights must be finite and strictly positive, got {weights.tolist()}")
        if weights.size > MAX_ATOMS:
            logger.warning(f"Finite space with {weights.size} atoms exceeds the oracle's intended size {MAX_ATOMS}")
        total = math.fsum(weights.tolist())
        atoms = tuple(atoms) if atoms is not None else tuple(range(weights.size))
        if len(atoms) != weights.size:
            raise DimensionMismatchError(f"{len(atoms)} atom labels for {weights.size} weights")
        return cls(weights / total, atoms, points)

    @classmethod
    def uniform(cls, size: int) -> "FiniteSpace":
        return cls.from_weights(np.ones(size))

    @classmethod
    def from_gaussian_quadrature(cls, integrator: GaussianIntegrator) -> "FiniteSpace":
        """The quantized Gaussian: quadrature nodes as atoms, quadrature weights as probabilities."""
        points, weights = integrator.nodes
        return cls.from_weights(weights, points=points)

    @property
    def size(self) -> int:
        return int(self.weights.size)

    def vector(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float).ravel()
        if values.size != self.size:
            raise DimensionMismatchError(f"Vector of length {values.size} on a space of {self.size} atoms")
        return values

    def evaluate(self, f: RandomField) -> np.ndarray:
        if self.points is None:
            raise DimensionMismatchError("This finite space has no coordinates to evaluate a field on")
        return f(self.points)

    def interpolant(self, values) -> RandomField:
        """Hermite series through the atoms of a quantized 1-D Gaussian, zero past the outer atoms.

        On n Gauss-Hermite atoms the coefficients c_k = sum_i w_i v_i H_k(x_i) / k!, k < n,
        reproduce v exactly at every atom.
        """
        if self.points is None or self.points.shape[1] != 1:
            raise DimensionMismatchError("Interpolation needs the atoms of a quantized one-dimensional Gaussian")
        values = self.vector(values)
        x = self.points[:, 0]
        table = hermite_e.hermevander(x, self.size - 1)
        coefficients = (self.weights * values) @ table / factorial(np.arange(self.size))
        series = HermiteAtom.from_terms({(k,): float(c) for k, c in enumerate(coefficients)})
        return Truncate(series, float(np.max(np.abs(x))) + 1.0)

    def expect(self, values) -> float:
        return fsum_dot(self.weights, self.vector(values))

    def reweighted(self, density) -> "FiniteSpace":
        """The space with weights w * p, for a density p with respect to w."""
        density = self.vector(density)
        if np.any(density <= 0):
            raise NonPositiveDensityError("Density has zero-probability atoms")
        return FiniteSpace.from_weights(self.weights * density, self.atoms, self.points)

    def density_from_probabilities(self, probabilities) -> np.ndarray:
        probabilities = self.vector(probabilities)
        if np.any(probabilities <= 0):
            raise NonPositiveDensityError(f"Probabilities must be strictly positive, got {probabilities.tolist()}")
        return probabilities / math.fsum(probabilities.tolist()) / self.weights

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "atoms": [str(a) for a in self.atoms]}
