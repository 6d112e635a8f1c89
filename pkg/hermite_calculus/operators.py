"""
Derivative and divergence on the Gaussian space, with the adjoint relation

    E[f d_i g] = E[delta_i f g],    delta_i f = x_i f - d_i f,

and Fourier-Hermite expansions c_alpha = E[f H_alpha] / alpha!.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import pandas as pd

from core.exceptions import DimensionMismatchError, DomainError
from gaussian_measure.fields import (
    HermiteAtom,
    Polynomial,
    RandomField,
    delta_gradient,
    divergence_field,
    laplacian,
)
from gaussian_measure.integrators import GaussianIntegrator
from .series import HermiteSeries, multi_factorial, multi_indices

logger = logging.getLogger(__name__)

__all__ = [
    "partial",
    "divergence",
    "delta_gradient",
    "laplacian",
    "ibp_check",
    "expand",
    "expansion_table",
]


def _check_axis(axis: int, dim: int):
    if not 0 <= axis < dim:
        raise DimensionMismatchError(f"Axis {axis} is out of range for dimension {dim}")


def _shift(index, axis, step):
    return tuple(a + step if j == axis else a for j, a in enumerate(index))


def partial(axis: int, s: Union[HermiteSeries, RandomField]):
    """d_i H_alpha = alpha_i H_{alpha - e_i} on series; the exact gradient on fields."""
    _check_axis(axis, s.dim)
    if isinstance(s, HermiteSeries):
        return HermiteSeries.from_dict(
            {_shift(a, axis, -1): a[axis] * c for a, c in s.coeffs if a[axis] > 0},
            s.dim,
        )
    return s.partial(axis)


def divergence(axis: int, f: Union[HermiteSeries, RandomField]):
    """delta_i f = x_i f - d_i f; on series delta_i H_alpha = H_{alpha + e_i}."""
    _check_axis(axis, f.dim)
    if isinstance(f, HermiteSeries):
        return HermiteSeries.from_dict({_shift(a, axis, 1): c for a, c in f.coeffs}, f.dim)
    return divergence_field(f, axis)


@dataclass(frozen=True)
class IbpReport:
    lhs: float
    rhs: float
    residual: float
    finite: bool = True

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "residual": self.residual, "finite": self.finite}


def ibp_check(f: RandomField, g: RandomField, axis: int, integrator: GaussianIntegrator) -> IbpReport:
    """|E[f d_i g] - E[delta_i f g]|."""
    _check_axis(axis, f.dim)
    lhs = integrator.expect(f * g.partial(axis))
    rhs = integrator.expect(divergence_field(f, axis) * g)
    if lhs.diverged or rhs.diverged:
        logger.warning(f"Integration by parts for {f.describe()}, {g.describe()}: a side diverged")
        return IbpReport(float("inf"), float("inf"), float("inf"), finite=False)
    return IbpReport(lhs.value, rhs.value, abs(lhs.value - rhs.value))


@dataclass(frozen=True)
class ExpansionResult:
    series: HermiteSeries
    degree: int
    second_moment: float
    parseval: float
    error: float
    finite: bool = True
    verdict: str = ""
    coefficient_errors: dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        if not self.finite:
            return {"degree": self.degree, "finite": False, "verdict": self.verdict}
        return {
            "degree": self.degree,
            "series": self.series.to_dict(),
            "second_moment": self.second_moment,
            "parseval": self.parseval,
            "error": self.error,
        }


def expansion_integrator(f: RandomField, degree: int) -> GaussianIntegrator:
    """Gauss-Hermite rule exact for the expansion of a polynomial f, else the default rule."""
    if isinstance(f, (Polynomial, HermiteAtom)):
        order = max(degree, f.degree) + 2
        return GaussianIntegrator.quadrature(dim=f.dim, order=max(order, 4))
    return GaussianIntegrator.default(f.dim)


def expand(f: RandomField, degree: int, integrator: Optional[GaussianIntegrator] = None) -> ExpansionResult:
    """Truncated Fourier-Hermite expansion of f in L^2(gamma) up to total degree `degree`."""
    if degree < 0:
        raise DomainError(f"Expansion degree must be >= 0, got {degree}")
    integrator = integrator or expansion_integrator(f, degree)
    sample = integrator.sample(f)
    second = sample.expect(lambda v: v * v)
    if second.diverged:
        logger.warning(f"{f.describe()} has no finite second moment, no Hermite expansion")
        return ExpansionResult(HermiteSeries.zero(f.dim), degree, float("inf"), 0.0, float("inf"), False,
                               "not in L^2(gamma)")

    coeffs, errors = {}, {}
    for alpha in multi_indices(f.dim, degree):
        estimate = integrator.expect(f * HermiteAtom.from_terms({alpha: 1.0}, f.dim))
        coeffs[alpha] = estimate.value / multi_factorial(alpha)
        errors[alpha] = estimate.error_bound
    series = HermiteSeries.from_dict(coeffs, f.dim)
    residual = integrator.expect((f - series.to_field()) ** 2)
    logger.info(f"Expanded {f.describe()} to degree {degree}: L2 error {residual.value:.3e}")
    return ExpansionResult(
        series=series,
        degree=degree,
        second_moment=second.value,
        parseval=series.norm_squared(),
        error=residual.value,
        coefficient_errors=errors,
    )


def expansion_table(f: RandomField, d_max: int, integrator: Optional[GaussianIntegrator] = None) -> pd.DataFrame:
    """Reconstruction error, Parseval sum and E[f^2] per degree 0..d_max."""
    integrator = integrator or expansion_integrator(f, d_max)
    rows = []
    for d in range(d_max + 1):
        result = expand(f, d, integrator)
        if not result.finite:
            break
        rows.append({
            "degree": d,
            "error": result.error,
            "parseval": result.parseval,
            "second_moment": result.second_moment,
        })
    return pd.DataFrame(rows, columns=["degree", "error", "parseval", "second_moment"])
