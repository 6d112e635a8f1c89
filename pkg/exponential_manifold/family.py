"""
Finite-dimensional exponential families p(theta) = exp(sum theta_i u_i - kappa(theta)).

The Fisher information is computed twice: as the covariance of the scores
u_i - d_i kappa under p(theta), and as the Hessian of kappa by central
differences refined with one Richardson step.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from core.exceptions import DimensionMismatchError, DomainError, OutsideProperDomainError
from gaussian_measure.fields import Affine, RandomField
from gaussian_measure.integrators import GaussianIntegrator
from .model import BundleElement, ExpModelPoint, k1, require_centered

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3


def richardson(coarse: float, fine: float, order: int = 2, ratio: float = 2.0):
    """Eliminate the h^order error term from estimates at steps h and h / ratio."""
    factor = ratio ** order
    return (factor * fine - coarse) / (factor - 1.0)


@dataclass(frozen=True)
class ExpFamily:
    stats: Tuple[RandomField, ...]

    @classmethod
    def create(cls, stats: Sequence[RandomField], integrator: GaussianIntegrator) -> "ExpFamily":
        stats = tuple(stats)
        if not stats:
            raise DomainError("An exponential family needs at least one statistic")
        dims = {u.dim for u in stats}
        if len(dims) != 1:
            raise DimensionMismatchError(f"Statistics live in different dimensions {sorted(dims)}")
        for u in stats:
            require_centered(u, integrator)
        return cls(stats)

    @property
    def size(self) -> int:
        return len(self.stats)

    @property
    def dim(self) -> int:
        return self.stats[0].dim

    def theta(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.shape != (self.size,):
            raise DimensionMismatchError(f"theta has {theta.size} entries for {self.size} statistics")
        return theta

    def statistic(self, theta) -> RandomField:
        theta = self.theta(theta)
        return Affine(tuple((float(t), u) for t, u in zip(theta, self.stats)), 0.0, self.dim)

    def kappa(self, theta, integrator: GaussianIntegrator) -> float:
        result = k1(self.statistic(theta), integrator, auto_center=True)
        if not result.finite:
            raise OutsideProperDomainError(f"kappa is infinite at theta={self.theta(theta).tolist()}")
        return result.value

    def point(self, theta, integrator: GaussianIntegrator) -> ExpModelPoint:
        return ExpModelPoint(self.statistic(theta), self.kappa(theta, integrator))


def hessian(func: Callable[[np.ndarray], float], theta: np.ndarray, step: float = DEFAULT_STEP) -> np.ndarray:
    """Central-difference Hessian with one Richardson step (h and h/2)."""
    d = theta.size
    eye = np.eye(d)

    def central(i, j, h):
        ei, ej = eye[i] * h, eye[j] * h
        if i == j:
            return (func(theta + ei) - 2.0 * func(theta) + func(theta - ei)) / (h * h)
        return (func(theta + ei + ej) - func(theta + ei - ej) - func(theta - ei + ej) + func(theta - ei - ej)) / (4 * h * h)

    out = np.empty((d, d))
    for i, j in itertools.combinations_with_replacement(range(d), 2):
        out[i, j] = out[j, i] = richardson(central(i, j, step), central(i, j, step / 2.0))
    return out


def derivative(func: Callable[[np.ndarray], float], theta: np.ndarray, axis: int, step: float = DEFAULT_STEP) -> float:
    e = np.eye(theta.size)[axis]

    def central(h):
        return (func(theta + h * e) - func(theta - h * e)) / (2.0 * h)

    return richardson(central(step), central(step / 2.0))


@dataclass
class FisherReport:
    theta: np.ndarray
    kappa: float
    gradient: np.ndarray
    covariance: np.ndarray
    hessian: np.ndarray
    step: float

    @property
    def max_difference(self) -> float:
        return float(np.max(np.abs(self.covariance - self.hessian)))

    @property
    def symmetric(self) -> bool:
        return bool(np.allclose(self.covariance, self.covariance.T, rtol=0, atol=1e-12))

    @property
    def positive_semidefinite(self) -> bool:
        return bool(np.min(np.linalg.eigvalsh(0.5 * (self.covariance + self.covariance.T))) >= -1e-10)

    def to_dict(self):
        return {
            "theta": self.theta,
            "kappa": self.kappa,
            "gradient": self.gradient,
            "fisher_covariance": self.covariance,
            "fisher_hessian": self.hessian,
            "max_difference": self.max_difference,
            "symmetric": self.symmetric,
            "positive_semidefinite": self.positive_semidefinite,
            "step": self.step,
        }


def cumulant_and_fisher(family: ExpFamily, theta, integrator: GaussianIntegrator,
                        step: float = DEFAULT_STEP) -> FisherReport:
    theta = family.theta(theta)
    point = family.point(theta, integrator)
    density = point.density()
    gradient = np.array([integrator.expect_under(u, density).value for u in family.stats])
    scores = [u - g for u, g in zip(family.stats, gradient)]
    d = family.size
    covariance = np.empty((d, d))
    for i, j in itertools.combinations_with_replacement(range(d), 2):
        covariance[i, j] = covariance[j, i] = integrator.expect_under(scores[i] * scores[j], density).value

    def kappa(t):
        try:
            return family.kappa(t, integrator)
        except OutsideProperDomainError:
            raise OutsideProperDomainError(
                f"Finite-difference stencil left the proper domain at theta={np.round(t, 12).tolist()}"
            )

    report = FisherReport(theta, point.k1, gradient, covariance, hessian(kappa, theta, step), step)
    logger.info(f"Fisher information at theta={theta.tolist()}: two routes differ by {report.max_difference:.3e}")
    return report


@dataclass(frozen=True)
class DerivativeCheck:
    finite_difference: Tuple[float, ...]
    covariance: Tuple[float, ...]

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(np.subtract(self.finite_difference, self.covariance))))

    def to_dict(self):
        return {"finite_difference": list(self.finite_difference), "covariance": list(self.covariance),
                "residual": self.residual}


def expectation_derivative_check(family: ExpFamily, theta, f: RandomField, integrator: GaussianIntegrator,
                                 step: float = DEFAULT_STEP) -> DerivativeCheck:
    """d_i E_p(theta)[f] by finite differences against E_p[(f - E_p f)(u_i - d_i kappa)]."""
    theta = family.theta(theta)
    point = family.point(theta, integrator)
    density = point.density()

    def expectation(t):
        return integrator.expect_under(f, family.point(t, integrator).density()).value

    mean_f = integrator.expect_under(f, density).value
    numeric, covariance = [], []
    for i, u in enumerate(family.stats):
        numeric.append(derivative(expectation, theta, i, step))
        g = integrator.expect_under(u, density).value
        covariance.append(integrator.expect_under((f - mean_f) * (u - g), density).value)
    return DerivativeCheck(tuple(numeric), tuple(covariance))


def score(family: ExpFamily, theta, integrator: GaussianIntegrator) -> List[BundleElement]:
    """Fisher scores u_i - d_i kappa as bundle elements at p(theta)."""
    point = family.point(theta, integrator)
    density = point.density()
    return [BundleElement(point, u - integrator.expect_under(u, density).value) for u in family.stats]
