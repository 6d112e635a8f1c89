"""
Points of the maximal exponential model around the standard Gaussian.

A point is q = exp(u - K1(u)) with u centered under gamma and
K1(u) = log E_gamma[e^u] finite; u is the global chart of q.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.conf import get_setting
from core.exceptions import DomainError, NonPositiveDensityError, NotCenteredError, OutsideProperDomainError
from gaussian_measure.fields import Compose, Constant, RandomField
from gaussian_measure.integrators import GaussianIntegrator

logger = logging.getLogger(__name__)

OUTSIDE_DOMAIN = "outside proper domain"


@dataclass(frozen=True)
class K1Result:
    value: float
    finite: bool = True
    verdict: str = ""
    mean: float = 0.0

    def to_dict(self):
        if not self.finite:
            return {"value": {"diverged": True}, "verdict": self.verdict, "mean": self.mean}
        return {"value": self.value, "mean": self.mean}


def _centering_scale(u: RandomField, integrator: GaussianIntegrator) -> float:
    estimate = integrator.sample(u).expect(np.abs)
    return max(1.0, estimate.value) if estimate.finite else 1.0


def mean(u: RandomField, integrator: GaussianIntegrator, weight: Optional[RandomField] = None) -> float:
    estimate = integrator.expect(u) if weight is None else integrator.expect_under(u, weight)
    if estimate.diverged:
        raise DomainError(f"{u.describe()} has no finite mean")
    return estimate.value


def center(u: RandomField, integrator: GaussianIntegrator, weight: Optional[RandomField] = None) -> RandomField:
    """u - E[u], under gamma or under weight * gamma."""
    return u - mean(u, integrator, weight)


def require_centered(u: RandomField, integrator: GaussianIntegrator, weight: Optional[RandomField] = None,
                     tol: Optional[float] = None) -> float:
    tol = get_setting("TOLERANCE") if tol is None else tol
    m = mean(u, integrator, weight)
    if abs(m) > tol * _centering_scale(u, integrator):
        where = "the reference Gaussian" if weight is None else weight.describe()
        raise NotCenteredError(f"{u.describe()} has mean {m:.6g} under {where}; pass auto_center to recenter it")
    return m


def k1(u: RandomField, integrator: GaussianIntegrator, auto_center: bool = False) -> K1Result:
    """K1(u) = log E_gamma[e^u] for a centered u, or the outside-domain verdict."""
    if isinstance(u, Constant):
        # constant statistics sit at the reference point
        if not auto_center:
            require_centered(u, integrator)
        return K1Result(0.0, mean=float(u.value))
    if auto_center:
        m = mean(u, integrator)
        u = u - m
    else:
        m = require_centered(u, integrator)
    estimate = integrator.expect(Compose("exp", u))
    if estimate.diverged:
        logger.warning(f"K1({u.describe()}) diverged: {estimate.reason}")
        return K1Result(float("inf"), False, OUTSIDE_DOMAIN, m)
    return K1Result(math.log(estimate.value), mean=m)


@dataclass(frozen=True)
class ExpModelPoint:
    u: RandomField
    k1: float
    centered: bool = True

    @classmethod
    def reference(cls, dim: int = 1) -> "ExpModelPoint":
        return cls(Constant(0.0, dim), 0.0)

    @classmethod
    def from_statistic(cls, u: RandomField, integrator: GaussianIntegrator, auto_center: bool = False) -> "ExpModelPoint":
        if auto_center:
            u = center(u, integrator)
        result = k1(u, integrator)
        if not result.finite:
            raise OutsideProperDomainError(f"K1 is infinite at {u.describe()}")
        return cls(u, result.value)

    @property
    def dim(self) -> int:
        return self.u.dim

    def log_density(self) -> RandomField:
        return self.u - self.k1

    def density(self) -> RandomField:
        return Compose("exp", self.log_density())

    def expect(self, f: RandomField, integrator: GaussianIntegrator):
        """E_q[f] as an Estimate."""
        return integrator.expect_under(f, self.density())

    def mass(self, integrator: GaussianIntegrator) -> float:
        return self.expect(Constant(1.0, self.dim), integrator).value

    def to_dict(self):
        return {"u": self.u.describe(), "k1": self.k1}


def check_positive(q: RandomField, integrator: GaussianIntegrator):
    points, _ = integrator.nodes
    values = np.concatenate([q(points), q(integrator.probe_points)])
    bad = ~(values > 0)
    # probe points far in the tail may underflow to 0 for genuinely positive densities
    if np.any(bad[: len(points)]) or np.any(values[len(points):] < 0) or np.any(np.isnan(values)):
        raise NonPositiveDensityError(f"{q.describe()} is not strictly positive on the integration nodes")


def chart(q: RandomField, integrator: GaussianIntegrator, tol: Optional[float] = None) -> RandomField:
    """Global chart u = log q - E_gamma[log q] of a density q with respect to gamma."""
    tol = get_setting("TOLERANCE") if tol is None else tol
    check_positive(q, integrator)
    mass = integrator.expect(q)
    if mass.diverged or abs(mass.value - 1.0) > max(tol, mass.error_bound):
        raise DomainError(f"{q.describe()} integrates to {mass.to_verdict()} under gamma, expected 1")
    return center(Compose("log", q), integrator)


def relative_cumulant(p: ExpModelPoint, u: RandomField, integrator: GaussianIntegrator,
                      auto_center: bool = False) -> K1Result:
    """K_p(u) = log E_p[e^u] for u centered under p."""
    density = p.density()
    if isinstance(u, Constant):
        if not auto_center:
            require_centered(u, integrator, density)
        return K1Result(0.0, mean=float(u.value))
    if auto_center:
        m = mean(u, integrator, density)
        u = u - m
    else:
        m = require_centered(u, integrator, density)
    estimate = integrator.expect_under(Compose("exp", u), density)
    if estimate.diverged:
        return K1Result(float("inf"), False, OUTSIDE_DOMAIN, m)
    return K1Result(math.log(estimate.value), mean=m)


@dataclass(frozen=True)
class CompositionReport:
    point: ExpModelPoint
    k1_direct: float
    k1_chain: float

    @property
    def residual(self) -> float:
        return abs(self.k1_direct - self.k1_chain)

    def to_dict(self):
        return {"point": self.point.to_dict(), "k1_direct": self.k1_direct, "k1_chain": self.k1_chain,
                "residual": self.residual}


def compose_point(p: ExpModelPoint, u: RandomField, integrator: GaussianIntegrator) -> CompositionReport:
    """q = e^(u - K_p(u)) p expressed in the global chart, u_q = u_p + u - E_gamma[u]."""
    kp = relative_cumulant(p, u, integrator)
    if not kp.finite:
        raise OutsideProperDomainError(f"K_p is infinite at {u.describe()}")
    shift = mean(u, integrator)
    point = ExpModelPoint.from_statistic(p.u + u - shift, integrator)
    return CompositionReport(point, point.k1, p.k1 + kp.value - shift)


@dataclass(frozen=True)
class BundleElement:
    """(q, v) with v centered under q."""

    base: ExpModelPoint
    v: RandomField

    @classmethod
    def at(cls, base: ExpModelPoint, v: RandomField, integrator: GaussianIntegrator,
           auto_center: bool = False) -> "BundleElement":
        if auto_center:
            v = center(v, integrator, base.density())
        else:
            require_centered(v, integrator, base.density())
        return cls(base, v)

    def inner(self, other: "BundleElement", integrator: GaussianIntegrator) -> float:
        """E_q[v w]."""
        return self.base.expect(self.v * other.v, integrator).value
