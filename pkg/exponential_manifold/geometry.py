"""
Divergences and metrics at a point of the exponential model.

All gradients are exact field gradients; the integrals are Gaussian
expectations, so p gamma weighting is written as E_gamma[... p].
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

from core.conf import get_setting
from core.exceptions import DomainError, OutsideProperDomainError
from gaussian_measure.fields import Affine, Compose, Product, RandomField, divergence_field
from gaussian_measure.integrators import GaussianIntegrator
from orlicz_norms.norms import luxemburg_norm
from young_functions.young import cosh2
from .model import ExpModelPoint, k1

logger = logging.getLogger(__name__)


def _gradient_dot(f: RandomField, g: RandomField) -> RandomField:
    """grad f . grad g as a field."""
    return Affine(tuple((1.0, f.partial(i) * g.partial(i)) for i in range(f.dim)), 0.0, f.dim)


def _weighted(field: RandomField, p: ExpModelPoint, integrator: GaussianIntegrator) -> float:
    estimate = integrator.expect(field * p.density())
    if estimate.diverged:
        raise OutsideProperDomainError(f"E_gamma[{field.describe()} p] diverged")
    return estimate.value


@dataclass(frozen=True)
class HyvarinenReport:
    value: float
    otto_form: float

    def to_dict(self):
        return {"value": self.value, "otto_form": self.otto_form}


def hyvarinen(p: ExpModelPoint, q: ExpModelPoint, integrator: GaussianIntegrator) -> HyvarinenReport:
    """1/2 E_gamma[|grad log p - grad log q|^2 p], also as 1/2 <<l_p - l_q, l_p - l_q>>_p."""
    diff = p.u - q.u
    value = 0.5 * _weighted(_gradient_dot(diff, diff), p, integrator)
    ell = p.log_density() - q.log_density()
    otto = 0.5 * otto_inner(ell, ell, p, integrator).value
    return HyvarinenReport(max(value, 0.0), otto)


@dataclass(frozen=True)
class OttoReport:
    value: float
    adjoint: Optional[float] = None

    @property
    def adjoint_residual(self) -> Optional[float]:
        return None if self.adjoint is None else abs(self.value - self.adjoint)

    def to_dict(self):
        return {"value": self.value, "adjoint": self.adjoint, "adjoint_residual": self.adjoint_residual}


def otto_inner(f: RandomField, g: RandomField, p: ExpModelPoint, integrator: GaussianIntegrator,
               adjoint: bool = False) -> OttoReport:
    """<<f, g>>_p = E_gamma[grad f . grad g p]; optionally also E_gamma[f delta . grad(g p)]."""
    value = _weighted(_gradient_dot(f, g), p, integrator)
    other = None
    if adjoint:
        density = p.density()
        flux = Affine(
            tuple((1.0, divergence_field(Product((g.partial(i), density)), i)) for i in range(g.dim)),
            0.0,
            g.dim,
        )
        estimate = integrator.expect(f * flux)
        other = estimate.value if estimate.finite else float("inf")
    return OttoReport(value, other)


@dataclass(frozen=True)
class LogSobolevReport:
    entropy: float
    energy: float
    otto_energy: float

    @property
    def slack(self) -> float:
        return self.energy - self.entropy

    def holds(self, tol: Optional[float] = None) -> bool:
        tol = get_setting("TOLERANCE") if tol is None else tol
        return self.slack >= -tol

    def to_dict(self):
        return {"entropy": self.entropy, "energy": self.energy, "otto_energy": self.otto_energy,
                "slack": self.slack, "holds": self.holds()}


def log_sobolev_check(p: ExpModelPoint, integrator: GaussianIntegrator) -> LogSobolevReport:
    """E_gamma[p log p] <= 2 E_gamma[|grad sqrt p|^2], with 1/2 <<log p, log p>>_p as a second route."""
    log_p = p.log_density()
    entropy = _weighted(log_p, p, integrator)
    root = Compose("exp", log_p * 0.5)
    energy = 2.0 * integrator.expect(_gradient_dot(root, root)).value
    otto = 0.5 * otto_inner(log_p, log_p, p, integrator).value
    return LogSobolevReport(entropy, energy, otto)


@dataclass(frozen=True)
class TransportReport:
    value: float
    bound: float
    holds: bool

    def to_dict(self):
        return {"value": self.value, "bound": self.bound, "holds": self.holds}


def transport_bound(f: RandomField, u: RandomField, t: float, integrator: GaussianIntegrator,
                    tol: Optional[float] = None) -> TransportReport:
    """E_gamma[Phi(((t-1)/t) f/||f||) e^(u - K1(u))] <= e^(-K1(u)) (2(t-1)/t + e^(K1(tu))/t) - 1, Phi = cosh2."""
    if t <= 1:
        raise DomainError(f"The transport bound needs t > 1, got {t:g}")
    tol = get_setting("TOLERANCE") if tol is None else tol
    norm = luxemburg_norm(f, cosh2(), integrator)
    if not norm.finite:
        raise DomainError(f"{f.describe()} is not in L^cosh2")
    k_u, k_tu = k1(u, integrator), k1(u * t, integrator)
    if not (k_u.finite and k_tu.finite):
        raise OutsideProperDomainError(f"K1 is infinite at {u.describe()} or at t times it")
    a = (t - 1.0) / t
    phi = cosh2()
    density = Compose("exp", u - k_u.value)
    scaled = f * (a / norm.value) if norm.value > 0 else f * 0.0
    value = integrator.sample(scaled, density).expect(phi.Phi).value
    bound = math.exp(-k_u.value) * (2.0 * a + math.exp(k_tu.value) / t) - 1.0
    return TransportReport(value, bound, value <= bound + tol)
