"""
Closed-form norms, cumulants and model operations on a FiniteSpace.

These are the reference values the Gaussian pipeline is checked against:
the same bracketing and bisection as orlicz_norms.luxemburg_norm, but on
finite sums that need no divergence detection.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect
from scipy.special import logsumexp

from core.conf import get_setting
from core.exceptions import DomainError, NonPositiveDensityError, NotCenteredError
from young_functions.young import YoungFunction, cosh2
from .space import FiniteSpace

logger = logging.getLogger(__name__)

ROOT_RTOL = 1e-14
MAX_DOUBLINGS = 200
ARC_GRID = tuple(np.linspace(0.0, 1.0, 11))
ARC_EXTENSION = 0.5
INTEGRABILITY_EXPONENTS = (1.25, 1.5, 2.0)


# Norms


def exact_luxemburg(f, phi: YoungFunction, space: FiniteSpace) -> float:
    """rho with sum_i w_i Phi(|f_i| / rho) = 1."""
    f = np.abs(space.vector(f))
    if not np.any(f):
        return 0.0

    def excess(rho):
        value = space.expect(phi.Phi(f / rho))
        return value - 1.0 if math.isfinite(value) else 1.0

    hi = 1.0
    for _ in range(MAX_DOUBLINGS):
        if excess(hi) <= 0.0:
            break
        hi *= 2.0
    else:
        raise DomainError(f"No finite gauge for a vector with max |f| = {f.max():g} under {phi.name}")
    if hi > 1.0:
        lo = hi / 2.0
    else:
        lo = hi
        while excess(lo) < 0.0:
            lo /= 2.0

    g_lo, g_hi = excess(lo), excess(hi)
    if g_hi == 0.0:
        return hi
    if g_lo == 0.0:
        return lo
    return float(bisect(excess, lo, hi, xtol=1e-300, rtol=ROOT_RTOL, maxiter=get_setting("BISECTION_MAXITER")))


# Exponential model


def check_centered(space: FiniteSpace, u, tol: Optional[float] = None) -> np.ndarray:
    u = space.vector(u)
    tol = get_setting("TOLERANCE") if tol is None else tol
    mean = space.expect(u)
    if abs(mean) > tol * max(1.0, space.expect(np.abs(u))):
        raise NotCenteredError(f"Statistic has mean {mean:.3e} under the reference weights")
    return u


def exact_k1(space: FiniteSpace, u) -> float:
    """K(u) = log sum_i w_i exp(u_i)."""
    u = check_centered(space, u)
    return float(logsumexp(u, b=space.weights))


def exact_density(space: FiniteSpace, u) -> np.ndarray:
    return np.exp(space.vector(u) - exact_k1(space, u))


def exact_chart(space: FiniteSpace, q) -> np.ndarray:
    """u = log q - E[log q]."""
    q = space.vector(q)
    if np.any(q <= 0):
        raise NonPositiveDensityError("Density has zero-probability atoms")
    log_q = np.log(q)
    return log_q - space.expect(log_q)


def exact_relative_cumulant(space: FiniteSpace, u_p, u) -> float:
    """K_p(u) = log E_p[e^u], for u centered under p = exp(u_p - K(u_p))."""
    p_space = space.reweighted(exact_density(space, u_p))
    u = check_centered(p_space, u)
    return float(logsumexp(u, b=p_space.weights))


@dataclass(frozen=True)
class ExactModel:
    k1: float
    density: np.ndarray
    chart: np.ndarray
    mass: float

    def to_dict(self):
        return {"k1": self.k1, "density": self.density, "chart": self.chart, "mass": self.mass}


def exact_model(space: FiniteSpace, u) -> ExactModel:
    u = check_centered(space, u)
    k = exact_k1(space, u)
    density = np.exp(u - k)
    return ExactModel(k, density, exact_chart(space, density), space.expect(density))


@dataclass(frozen=True)
class ExactFisher:
    kappa: float
    gradient: np.ndarray
    covariance: np.ndarray
    hessian: np.ndarray

    @property
    def max_difference(self) -> float:
        return float(np.max(np.abs(self.covariance - self.hessian)))

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "gradient": self.gradient,
            "fisher_covariance": self.covariance,
            "fisher_hessian": self.hessian,
            "max_difference": self.max_difference,
        }


def exact_fisher(space: FiniteSpace, stats: Sequence, theta: Sequence[float]) -> ExactFisher:
    """kappa(theta) = K(sum theta_i u_i) with its gradient and both forms of the information matrix."""
    stats = np.vstack([check_centered(space, u) for u in stats])
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (stats.shape[0],):
        raise DomainError(f"theta has {theta.size} entries for {stats.shape[0]} statistics")
    p_space = space.reweighted(exact_density(space, theta @ stats))
    d = stats.shape[0]
    gradient = np.array([p_space.expect(u) for u in stats])
    centered = stats - gradient[:, None]
    covariance = np.empty((d, d))
    hessian = np.empty((d, d))
    for i, j in itertools.product(range(d), repeat=2):
        covariance[i, j] = p_space.expect(centered[i] * centered[j])
        # d^2 kappa / d theta_i d theta_j differentiated term by term
        hessian[i, j] = p_space.expect(stats[i] * stats[j]) - gradient[i] * gradient[j]
    return ExactFisher(exact_k1(space, theta @ stats), gradient, covariance, hessian)


# Portmanteau


@dataclass
class PortmanteauReport:
    arc_grid: List[float]
    log_partition: List[float]
    arc_connected: bool
    log_convex: bool
    integrability: Dict[str, float]
    mutually_integrable: bool
    lower: float
    upper: float
    equivalent_norms: bool
    extension: Tuple[float, float] = (0.0, 0.0)
    probes: int = 0

    @property
    def all_conditions(self) -> bool:
        return self.arc_connected and self.log_convex and self.mutually_integrable and self.equivalent_norms

    def to_dict(self):
        return {
            "arc": {
                "t": self.arc_grid,
                "log_Z": self.log_partition,
                "connected": self.arc_connected,
                "log_convex": self.log_convex,
                "extension": list(self.extension),
            },
            "integrability": self.integrability,
            "mutually_integrable": self.mutually_integrable,
            "norm_constants": {"lower": self.lower, "upper": self.upper, "probes": self.probes},
            "equivalent_norms": self.equivalent_norms,
            "all_conditions": self.all_conditions,
        }


def _log_partition(space: FiniteSpace, log_p: np.ndarray, log_q: np.ndarray, t: float) -> float:
    """log Z(t) = log E[p^(1-t) q^t]."""
    return float(logsumexp((1.0 - t) * log_p + t * log_q, b=space.weights))


def comparison_vectors(size: int, seed: int) -> List[np.ndarray]:
    """Indicators, differences of indicators and Gaussian vectors on size atoms."""
    eye = np.eye(size)
    vectors = [eye[i] for i in range(size)]
    vectors += [eye[i] - eye[j] for i, j in itertools.combinations(range(size), 2)]
    rng = np.random.default_rng(seed)
    vectors += [v for v in rng.standard_normal((4 * size, size))]
    return vectors


def arc_conditions(log_partition: Callable[[float], float], tol: float) -> dict:
    """Arc and integrability conditions from t -> log Z(t) = log E[p^(1-t) q^t]."""
    # (1) open exponential arc: Z finite past both ends, log Z convex on the grid
    grid = [float(t) for t in ARC_GRID]
    log_z = [log_partition(t) for t in grid]
    extension = (log_partition(-ARC_EXTENSION), log_partition(1.0 + ARC_EXTENSION))
    connected = all(math.isfinite(v) for v in log_z + list(extension))
    log_convex = all(
        log_z[(i + j) // 2] <= 0.5 * (log_z[i] + log_z[j]) + tol
        for i, j in itertools.combinations(range(len(grid)), 2)
        if (i + j) % 2 == 0
    )

    # (3) p/q in L^a(q) and q/p in L^a(p) for some a > 1, as E_q[(p/q)^a] = Z(1 - a)
    integrability = {}
    for a in INTEGRABILITY_EXPONENTS:
        integrability[f"E_q[(p/q)^{a:g}]"] = math.exp(log_partition(1.0 - a))
        integrability[f"E_p[(q/p)^{a:g}]"] = math.exp(log_partition(a))
    return {
        "arc_grid": grid,
        "log_partition": log_z,
        "arc_connected": connected,
        "log_convex": log_convex,
        "extension": extension,
        "integrability": integrability,
        "mutually_integrable": all(math.isfinite(v) for v in integrability.values()),
    }


def exact_portmanteau(space: FiniteSpace, p, q, phi: Optional[YoungFunction] = None, seed: Optional[int] = None,
                      tol: Optional[float] = None) -> PortmanteauReport:
    """Exponential arc, mutual integrability and norm equivalence for two densities on a finite space."""
    tol = get_setting("TOLERANCE") if tol is None else tol
    phi = phi or cosh2()
    seed = get_setting("SEED") if seed is None else seed
    p, q = space.vector(p), space.vector(q)
    if np.any(p <= 0) or np.any(q <= 0):
        raise NonPositiveDensityError("Portmanteau conditions need strictly positive densities")
    for name, density in (("p", p), ("q", q)):
        mass = space.expect(density)
        if abs(mass - 1.0) > tol:
            raise DomainError(f"Density {name} has mass {mass:.12g}, expected 1")
    log_p, log_q = np.log(p), np.log(q)
    arc = arc_conditions(lambda t: _log_partition(space, log_p, log_q, t), tol)

    # (2) equal Orlicz spaces: ||v||_p / ||v||_q bounded above and below
    q_space, p_space = space.reweighted(q), space.reweighted(p)
    ratios = []
    vectors = comparison_vectors(space.size, seed)
    for v in vectors:
        norm_q = exact_luxemburg(v, phi, q_space)
        if norm_q > 0:
            ratios.append(exact_luxemburg(v, phi, p_space) / norm_q)
    lower, upper = min(ratios), max(ratios)
    logger.info(f"Portmanteau on {space.size} atoms: constants [{lower:.6g}, {upper:.6g}]")

    return PortmanteauReport(
        lower=lower,
        upper=upper,
        equivalent_norms=math.isfinite(upper) and lower > 0,
        probes=len(vectors),
        **arc,
    )
