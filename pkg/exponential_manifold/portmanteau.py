"""Portmanteau conditions for two densities: exact on a finite set, by quadrature under the Gaussian."""
import logging
import math
from typing import Optional, Sequence

from core.conf import get_setting
from core.exceptions import DimensionMismatchError, DomainError
from finite_oracle.exact import PortmanteauReport, arc_conditions, exact_portmanteau
from finite_oracle.space import FiniteSpace
from gaussian_measure.fields import Compose, RandomField
from gaussian_measure.integrators import GaussianIntegrator
from orlicz_norms.norms import luxemburg_norm
from young_functions.young import YoungFunction, cosh2

logger = logging.getLogger(__name__)


def portmanteau_check(p: Sequence[float], q: Sequence[float], phi: Optional[YoungFunction] = None,
                      seed: Optional[int] = None) -> PortmanteauReport:
    """p and q are probabilities of the same atoms; zero atoms are rejected."""
    if len(p) != len(q):
        raise DimensionMismatchError(f"p has {len(p)} atoms and q has {len(q)}")
    space = FiniteSpace.uniform(len(p))
    p_density = space.density_from_probabilities(p)
    q_density = space.density_from_probabilities(q)
    return exact_portmanteau(space, p_density, q_density, phi=phi, seed=seed)


def gaussian_portmanteau(log_p: RandomField, log_q: RandomField, vectors: Sequence[RandomField],
                         integrator: GaussianIntegrator, phi: Optional[YoungFunction] = None,
                         tol: Optional[float] = None) -> PortmanteauReport:
    """The same conditions for densities p = exp(log_p), q = exp(log_q) of the Gaussian measure.

    Every expectation goes through the integrator: Z(t) = E[exp((1 - t) log_p + t log_q)]
    and the Luxemburg norms of the vectors under p and q as weights.
    """
    tol = get_setting("TOLERANCE") if tol is None else tol
    phi = phi or cosh2()
    p, q = Compose("exp", log_p), Compose("exp", log_q)
    for name, density in (("p", p), ("q", q)):
        mass = integrator.expect(density)
        if not mass.finite or abs(mass.value - 1.0) > tol:
            raise DomainError(f"Density {name} has mass {mass.value:.12g}, expected 1")

    def log_partition(t: float) -> float:
        estimate = integrator.expect(Compose("exp", (1.0 - t) * log_p + t * log_q))
        return math.log(estimate.value) if estimate.finite and estimate.value > 0 else float("inf")

    arc = arc_conditions(log_partition, tol)

    ratios = []
    for v in vectors:
        norm_q = luxemburg_norm(v, phi, integrator, weight=q).value
        if norm_q > 0:
            ratios.append(luxemburg_norm(v, phi, integrator, weight=p).value / norm_q)
    if not ratios:
        raise DomainError("Norm comparison needs at least one vector that is not zero")
    lower, upper = min(ratios), max(ratios)
    logger.info(f"Portmanteau by quadrature on {len(vectors)} vectors: constants [{lower:.6g}, {upper:.6g}]")

    return PortmanteauReport(
        lower=lower,
        upper=upper,
        equivalent_norms=math.isfinite(upper) and lower > 0,
        probes=len(vectors),
        **arc,
    )
