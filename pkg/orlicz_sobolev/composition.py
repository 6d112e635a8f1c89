"""Closure of the Orlicz-Sobolev space under Lipschitz maps, lattice operations and neurons."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from core.exceptions import DimensionMismatchError, DomainError, UnboundedDerivativeError
from gaussian_measure.fields import Affine, Compose, Product, RandomField, field_max, field_min
from gaussian_measure.integrators import GaussianIntegrator
from gaussian_measure.scalar_maps import get_scalar_map

from .sobolev import SobolevReport, WeakDerivativeReport, sobolev_integrator, sobolev_membership, weak_derivative_check

logger = logging.getLogger(__name__)


def lipschitz_constant(map_name: str) -> float:
    scalar_map = get_scalar_map(map_name)
    if scalar_map.lipschitz is None or scalar_map.derivative is None:
        raise UnboundedDerivativeError(f"{map_name} has no bounded derivative")
    return scalar_map.lipschitz


@dataclass
class CompositionReport:
    map_name: str
    lipschitz: float
    inner: SobolevReport
    composed: SobolevReport
    chain: List[WeakDerivativeReport]

    @property
    def closed(self) -> bool:
        return not self.inner.member or self.composed.member

    @property
    def max_chain_residual(self) -> float:
        return max(report.max_residual for report in self.chain)

    def chain_passed(self, tol: float) -> bool:
        """The chain rule holds along every axis."""
        return all(report.passed(tol) for report in self.chain)

    def to_dict(self):
        return {
            "map": self.map_name,
            "lipschitz": self.lipschitz,
            "inner": self.inner.to_dict(),
            "composed": self.composed.to_dict(),
            "chain": [report.to_dict() for report in self.chain],
            "closed": self.closed,
        }


def lipschitz_composition(map_name: str, f: RandomField,
                          integrator: Optional[GaussianIntegrator] = None) -> CompositionReport:
    """G o f stays in the space, with weak derivative G'(f) d_i f along every axis i."""
    lipschitz = lipschitz_constant(map_name)
    integrator = integrator or sobolev_integrator(f.dim)
    scalar_map = get_scalar_map(map_name)
    composed = Compose(map_name, f)
    outer = Compose(scalar_map.derivative, f)
    chain = [
        weak_derivative_check(composed, axis, integrator=integrator, derivative=Product((outer, f.partial(axis))))
        for axis in range(f.dim)
    ]
    report = CompositionReport(
        map_name=map_name,
        lipschitz=lipschitz,
        inner=sobolev_membership(f, integrator),
        composed=sobolev_membership(composed, integrator),
        chain=chain,
    )
    logger.info(f"{map_name} o {f.describe()}: chain residual {report.max_chain_residual:.3g} over {f.dim} axes")
    return report


def min_max_membership(f: RandomField, g: RandomField, integrator: Optional[GaussianIntegrator] = None) -> dict:
    integrator = integrator or sobolev_integrator(f.dim)
    return {
        "min": sobolev_membership(field_min(f, g), integrator),
        "max": sobolev_membership(field_max(f, g), integrator),
    }


def neuron(weights, biases: Sequence[float], amplitudes: Sequence[float], map_name: str,
           inputs: Sequence[RandomField]) -> RandomField:
    """sum_i a_i G(sum_j W_ij f_j - b_i)."""
    lipschitz_constant(map_name)
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    if weights.shape != (len(biases), len(inputs)) or len(amplitudes) != len(biases):
        raise DimensionMismatchError(
            f"Weights {weights.shape}, {len(biases)} biases, {len(amplitudes)} amplitudes and {len(inputs)} inputs"
        )
    dim = inputs[0].dim
    units = []
    for row, b, a in zip(weights, biases, amplitudes):
        pre = Affine(tuple((float(w), f) for w, f in zip(row, inputs)), -float(b), dim)
        units.append((float(a), Compose(map_name, pre)))
    return Affine(tuple(units), 0.0, dim)


def neuron_membership(weights, biases: Sequence[float], amplitudes: Sequence[float], map_name: str,
                      inputs: Sequence[RandomField], integrator: Optional[GaussianIntegrator] = None) -> SobolevReport:
    f = neuron(weights, biases, amplitudes, map_name, inputs)
    return sobolev_membership(f, integrator or sobolev_integrator(f.dim))


@dataclass(frozen=True)
class IncrementBound:
    map_name: str
    lipschitz: float
    worst_excess: float

    @property
    def holds(self) -> bool:
        return self.worst_excess <= 0.0

    def to_dict(self):
        return {"map": self.map_name, "lipschitz": self.lipschitz, "worst_excess": self.worst_excess,
                "holds": self.holds}


def lipschitz_increment_check(map_name: str, h: Sequence[float], points) -> IncrementBound:
    """max over points of |G(x - h) - G(x)| - K |h|, coordinatewise on R^d."""
    lipschitz = lipschitz_constant(map_name)
    scalar_map = get_scalar_map(map_name)
    h = np.atleast_1d(np.asarray(h, dtype=float))
    x = np.asarray(points, dtype=float)
    # a flat array of scalars is a list of points on the line
    x = x.reshape(-1, 1) if x.ndim <= 1 and h.size == 1 else np.atleast_2d(x)
    if h.size != x.shape[1]:
        raise DomainError(f"Increment of length {h.size} for points of dimension {x.shape[1]}")
    # slack for rounding in G at large arguments
    excess = np.abs(scalar_map(x - h) - scalar_map(x)) - lipschitz * np.abs(h) - 1e-12
    return IncrementBound(map_name, lipschitz, float(np.max(excess)))
