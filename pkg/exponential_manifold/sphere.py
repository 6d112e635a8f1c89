"""
Three representations of a curve of densities through its velocity.

  bundle   (p, u)       u = d/dt log p, centered under p
  sphere   (P, Pdot)    P = 2 sqrt(p) on the sphere of radius 2 in L^2(gamma)
  tangent  (p, pdot)    pdot = u p

The Fisher inner product E_p[u1 u2] reads E_gamma[Pdot1 Pdot2] on the sphere
and E_gamma[pdot1 pdot2 / p] on the tangent side.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.conf import get_setting
from core.exceptions import DomainError, NonPositiveDensityError
from gaussian_measure.fields import Compose, Constant, Product, RandomField
from gaussian_measure.integrators import GaussianIntegrator

logger = logging.getLogger(__name__)

DIRECTIONS = ("sphere_to_bundle", "bundle_to_sphere", "bundle_to_tangent", "tangent_to_bundle")


def _require_positive(field: RandomField, integrator: GaussianIntegrator, label: str):
    points, _ = integrator.nodes
    values = field(points)
    if np.any(~(values > 0)):
        raise NonPositiveDensityError(f"{label} {field.describe()} is not strictly positive on the integration nodes")


def _is_constant(field: RandomField, value: float) -> bool:
    return isinstance(field, Constant) and field.value == value


def _reciprocal(field: RandomField) -> RandomField:
    if isinstance(field, Constant):
        return Constant(1.0 / field.value, field.dim)
    return Compose("reciprocal", field)


def _sqrt(field: RandomField) -> RandomField:
    if isinstance(field, Constant):
        return Constant(float(np.sqrt(field.value)), field.dim)
    return Compose("sqrt", field)


def _scaled(field: RandomField, factor: float) -> RandomField:
    if isinstance(field, Constant):
        return Constant(field.value * factor, field.dim)
    return field * factor


def _times(a: RandomField, b: RandomField) -> RandomField:
    if _is_constant(a, 1.0):
        return b
    if _is_constant(b, 1.0):
        return a
    if isinstance(a, Constant):
        return b * a.value
    if isinstance(b, Constant):
        return a * b.value
    return Product((a, b))


@dataclass(frozen=True)
class Conversion:
    direction: str
    point: RandomField
    velocity: RandomField
    mass: float
    centering: float

    def conserves(self, tol: Optional[float] = None) -> bool:
        tol = get_setting("TOLERANCE") if tol is None else tol
        return abs(self.mass - 1.0) <= tol and abs(self.centering) <= tol

    def to_dict(self):
        return {
            "direction": self.direction,
            "point": self.point.to_json(),
            "velocity": self.velocity.to_json(),
            "mass": self.mass,
            "centering": self.centering,
            "conserved": self.conserves(),
        }


def sphere_to_bundle(P: RandomField, P_dot: RandomField):
    """(P, Pdot) -> (P^2/4, 2 Pdot / P)."""
    square = Constant(P.value ** 2, P.dim) if isinstance(P, Constant) else Product((P, P))
    return _scaled(square, 0.25), _scaled(_times(P_dot, _reciprocal(P)), 2.0)


def bundle_to_sphere(p: RandomField, u: RandomField):
    """(p, u) -> (2 sqrt p, u sqrt p)."""
    root = _sqrt(p)
    return _scaled(root, 2.0), _times(u, root)


def bundle_to_tangent(p: RandomField, u: RandomField):
    return p, _times(u, p)


def tangent_to_bundle(p: RandomField, p_dot: RandomField):
    return p, _times(p_dot, _reciprocal(p))


def as_bundle(direction: str, point: RandomField, velocity: RandomField):
    """The (p, u) pair behind an input given in the source representation of direction."""
    if direction == "sphere_to_bundle":
        return sphere_to_bundle(point, velocity)
    if direction == "tangent_to_bundle":
        return tangent_to_bundle(point, velocity)
    return point, velocity


def sphere_convert(direction: str, point: RandomField, velocity: RandomField,
                   integrator: GaussianIntegrator) -> Conversion:
    """Convert a (point, velocity) pair and report mass and centering in bundle terms."""
    if direction not in DIRECTIONS:
        raise DomainError(f'Unknown direction "{direction}"; expected one of {", ".join(DIRECTIONS)}')
    if point.dim != velocity.dim:
        raise DomainError("Point and velocity must share a dimension")

    _require_positive(point, integrator, "Point")
    if direction == "sphere_to_bundle":
        p, u = sphere_to_bundle(point, velocity)
        out = (p, u)
    elif direction == "bundle_to_sphere":
        p, u = point, velocity
        out = bundle_to_sphere(point, velocity)
    elif direction == "bundle_to_tangent":
        p, u = point, velocity
        out = bundle_to_tangent(point, velocity)
    else:
        p, u = tangent_to_bundle(point, velocity)
        out = (p, u)

    mass = integrator.expect(p)
    centering = integrator.expect_under(u, p)
    logger.info(f"{direction}: mass {mass.value:.6g}, E_p[u] {centering.value:.3g}")
    return Conversion(direction, out[0], out[1], mass.value, centering.value)


@dataclass(frozen=True)
class FisherRoutes:
    bundle: float
    sphere: float
    tangent: float

    @property
    def max_difference(self) -> float:
        values = (self.bundle, self.sphere, self.tangent)
        return max(values) - min(values)

    def to_dict(self):
        return {"bundle": self.bundle, "sphere": self.sphere, "tangent": self.tangent,
                "max_difference": self.max_difference}


def fisher_routes(p: RandomField, u1: RandomField, u2: RandomField, integrator: GaussianIntegrator) -> FisherRoutes:
    """E_p[u1 u2] computed in the bundle, on the sphere and in the tangent representation."""
    _require_positive(p, integrator, "Density")
    bundle = integrator.expect_under(_times(u1, u2), p).value
    _, s1 = bundle_to_sphere(p, u1)
    _, s2 = bundle_to_sphere(p, u2)
    sphere = integrator.expect(_times(s1, s2)).value
    _, t1 = bundle_to_tangent(p, u1)
    _, t2 = bundle_to_tangent(p, u2)
    tangent = integrator.expect(_times(_times(t1, t2), _reciprocal(p))).value
    return FisherRoutes(bundle, sphere, tangent)
