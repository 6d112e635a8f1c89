"""
The Gaussian Orlicz-Sobolev space W1 L(cosh2)1,2(gamma).

f is a member when f is sub-exponential (finite cosh2 norm) and every weak
partial derivative is sub-Gaussian (finite norm under the squared cosh2).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from core.conf import get_setting
from core.exceptions import DomainError, MissingGradientError
from gaussian_measure.fields import Affine, RandomField, bump, directional, divergence_field, translate
from gaussian_measure.integrators import GaussianIntegrator
from orlicz_norms.norms import NormResult, luxemburg_norm
from young_functions.young import cosh2, squared

logger = logging.getLogger(__name__)

NOT_MEMBER = "not in W1 L(cosh2)1,2"
BUMP_CENTERS = (-1.5, -0.5, 0.0, 0.5, 1.5)
INCREMENT_ALPHAS = (2.0, 4.0, 8.0)
S_NODES = 16
SUPERLINEAR_RATIO = 0.6
ZERO_REMAINDER = 1e-12


# Tensor panel rules per dimension; the panel edges stay on the half-integers
# so kinks at 0 and the bump supports fall on edges.
SOBOLEV_PANELS = {
    2: {"panel_half_width": 10.0},
    3: {"panel_half_width": 6.0, "panel_width": 0.5, "panel_nodes": 6},
}


def sobolev_integrator(dim: int = 1) -> GaussianIntegrator:
    """Panel rule up to three dimensions (kinks and fast growth), the default rule above."""
    if dim == 1:
        return GaussianIntegrator.panel(1)
    if dim in SOBOLEV_PANELS:
        return GaussianIntegrator.panel(dim, **SOBOLEV_PANELS[dim])
    return GaussianIntegrator.default(dim)


@dataclass
class SobolevReport:
    f_norm: NormResult
    grad_norms: List[NormResult]

    @property
    def member(self) -> bool:
        return self.f_norm.finite and all(g.finite for g in self.grad_norms)

    @property
    def total(self) -> float:
        if not self.member:
            return float("inf")
        return self.f_norm.value + sum(g.value for g in self.grad_norms)

    @property
    def verdict(self) -> Optional[str]:
        return None if self.member else NOT_MEMBER

    def to_dict(self):
        return {
            "member": self.member,
            "total": self.total,
            "f_norm": self.f_norm.to_dict(),
            "grad_norms": [g.to_dict() for g in self.grad_norms],
        }


def sobolev_membership(f: RandomField, integrator: Optional[GaussianIntegrator] = None,
                       weight: Optional[RandomField] = None) -> SobolevReport:
    """Norm of f under cosh2 and of each partial under squared cosh2, under gamma or weight * gamma."""
    integrator = integrator or sobolev_integrator(f.dim)
    partials = [f.partial(i) for i in range(f.dim)]
    f_norm = luxemburg_norm(f, cosh2(), integrator, weight)
    sq = squared(cosh2())
    report = SobolevReport(f_norm, [luxemburg_norm(g, sq, integrator, weight) for g in partials])
    if not report.member:
        logger.warning(f"{f.describe()} is {NOT_MEMBER}")
    return report


# Weak derivatives


def bump_presets(dim: int = 1, centers: Sequence[float] = BUMP_CENTERS, scale: float = 1.0) -> List[RandomField]:
    """Bumps (1 - y^2)^3_+ centered along the first axis."""
    return [bump([c] + [0.0] * (dim - 1), scale) for c in centers]


@dataclass
class WeakDerivativeReport:
    axis: int
    residuals: List[float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def passed(self, tol: Optional[float] = None) -> bool:
        tol = get_setting("TOLERANCE") if tol is None else tol
        return self.max_residual <= tol

    def to_dict(self):
        return {"axis": self.axis, "residuals": self.residuals, "max_residual": self.max_residual}


def weak_derivative_check(f: RandomField, axis: int = 0, bumps: Optional[Sequence[RandomField]] = None,
                          integrator: Optional[GaussianIntegrator] = None,
                          derivative: Optional[RandomField] = None) -> WeakDerivativeReport:
    """max over bumps phi of |E[d_i f phi] - E[f delta_i phi]|, d_i f the exact or the claimed derivative."""
    integrator = integrator or sobolev_integrator(f.dim)
    bumps = bump_presets(f.dim) if bumps is None else bumps
    derivative = f.partial(axis) if derivative is None else derivative
    residuals = []
    for phi in bumps:
        left = integrator.expect(derivative * phi)
        right = integrator.expect(f * divergence_field(phi, axis))
        if not (left.finite and right.finite):
            raise DomainError(f"Pairing of {f.describe()} with a bump did not converge")
        residuals.append(abs(left.value - right.value))
    return WeakDerivativeReport(axis, residuals)


# Translations


def lebesgue_norm(f: RandomField, alpha: float, integrator: GaussianIntegrator) -> float:
    """(E_gamma |f|^alpha)^(1/alpha)."""
    estimate = integrator.sample(f).expect(lambda v: np.abs(v) ** alpha)
    return estimate.value ** (1.0 / alpha) if estimate.finite else float("inf")


def _unit_interval_rule(count: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(count)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _gradient(f: RandomField):
    grad = f.gradient()
    if grad is None:
        raise MissingGradientError(f"{f.describe()} has no exact gradient")
    return grad


def first_order_remainder(f: RandomField, h: Sequence[float], t: float) -> RandomField:
    """tau_{-th} f - f - t grad f . h."""
    h = np.asarray(h, dtype=float)
    return translate(f, -t * h) - f - directional(_gradient(f), h) * t


def increment_integral(f: RandomField, h: Sequence[float], t: float, s_nodes: int = S_NODES) -> RandomField:
    """t int_0^1 (tau_{-sth} grad f - grad f) . h ds, by Gauss-Legendre in s."""
    h = np.asarray(h, dtype=float)
    grad_h = directional(_gradient(f), h)
    nodes, weights = _unit_interval_rule(s_nodes)
    terms = tuple((float(t * w), translate(grad_h, -s * t * h) - grad_h) for s, w in zip(nodes, weights))
    return Affine(terms, 0.0, f.dim)


@dataclass
class IncrementRow:
    alpha: float
    identity_residual: float
    remainder: float
    remainder_half: float

    @property
    def ratio(self) -> float:
        if self.remainder <= ZERO_REMAINDER:
            return 0.0
        return self.remainder_half / self.remainder

    @property
    def superlinear(self) -> bool:
        return self.ratio <= SUPERLINEAR_RATIO

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "identity_residual": self.identity_residual,
            "remainder": self.remainder,
            "remainder_half": self.remainder_half,
            "ratio": self.ratio,
            "superlinear": self.superlinear,
        }


@dataclass
class IncrementReport:
    t: float
    h: Tuple[float, ...]
    rows: List[IncrementRow] = field(default_factory=list)

    @property
    def max_identity_residual(self) -> float:
        return max(row.identity_residual for row in self.rows)

    def passed(self, tol: Optional[float] = None) -> bool:
        tol = get_setting("TOLERANCE") if tol is None else tol
        return self.max_identity_residual <= tol and all(row.superlinear for row in self.rows)

    def to_dict(self):
        return {"t": self.t, "h": list(self.h), "rows": [row.to_dict() for row in self.rows],
                "max_identity_residual": self.max_identity_residual, "passed": self.passed()}


def translation_increment_check(f: RandomField, h: Sequence[float], t: float,
                                integrator: Optional[GaussianIntegrator] = None,
                                alphas: Sequence[float] = INCREMENT_ALPHAS,
                                s_nodes: int = S_NODES) -> IncrementReport:
    """First increment identity in L^alpha(gamma) and the o(t) decay of the first-order remainder."""
    integrator = integrator or GaussianIntegrator.default(f.dim)
    h = tuple(float(v) for v in np.atleast_1d(h))
    if len(h) != f.dim:
        raise DomainError(f"Direction of length {len(h)} for a field of dimension {f.dim}")
    remainder = first_order_remainder(f, h, t)
    remainder_half = first_order_remainder(f, h, t / 2.0)
    identity = remainder - increment_integral(f, h, t, s_nodes)
    report = IncrementReport(t, h)
    for alpha in alphas:
        report.rows.append(IncrementRow(
            alpha=float(alpha),
            identity_residual=lebesgue_norm(identity, alpha, integrator),
            remainder=lebesgue_norm(remainder, alpha, integrator),
            remainder_half=lebesgue_norm(remainder_half, alpha, integrator),
        ))
    return report


# Local embedding


def _ball_rule(dim: int, radius: float, panels: int = 64, per_panel: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """Lebesgue rule on the ball |x| < radius: composite Gauss-Legendre on the cube, masked to the ball."""
    t, w = leggauss(per_panel)
    edges = np.linspace(-radius, radius, panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    if dim == 1:
        return nodes.reshape(-1, 1), weights
    grids = np.meshgrid(*([nodes] * dim), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    wgrid = np.prod(np.stack([g.ravel() for g in np.meshgrid(*([weights] * dim), indexing="ij")], axis=1), axis=1)
    inside = np.linalg.norm(points, axis=1) < radius
    return points[inside], wgrid[inside]


@dataclass(frozen=True)
class EmbeddingReport:
    lhs: float
    rhs: float
    rhs_homogeneous: float
    norm: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + self.tol)

    @property
    def homogeneous_passed(self) -> bool:
        return self.lhs <= self.rhs_homogeneous * (1.0 + self.tol)

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "rhs_homogeneous": self.rhs_homogeneous, "norm": self.norm,
                "pass": self.passed, "homogeneous_pass": self.homogeneous_passed}


def local_embedding_bound(f: RandomField, rho: float, k: int, integrator: Optional[GaussianIntegrator] = None,
                          tol: Optional[float] = None) -> EmbeddingReport:
    """int_{B_rho} |f|^2k dx against (2 pi)^(n/2) (2k)! e^(rho^2/2) ||f||, and against the same with ||f||^2k."""
    if rho <= 0 or k < 1:
        raise DomainError(f"Need rho > 0 and k >= 1, got rho={rho:g}, k={k}")
    tol = get_setting("TOLERANCE") if tol is None else tol
    integrator = integrator or sobolev_integrator(f.dim)
    norm = luxemburg_norm(f, cosh2(), integrator)
    if not norm.finite:
        raise DomainError(f"{f.describe()} is not in L^cosh2")
    points, weights = _ball_rule(f.dim, rho)
    lhs = float(np.sum(np.abs(f(points)) ** (2 * k) * weights))
    constant = (2.0 * math.pi) ** (f.dim / 2.0) * math.factorial(2 * k) * math.exp(rho * rho / 2.0)
    return EmbeddingReport(lhs, constant * norm.value, constant * norm.value ** (2 * k), norm.value, tol)


# Continuous version


@dataclass(frozen=True)
class ContinuityProbe:
    radii: Tuple[float, ...]
    oscillations: Tuple[float, ...]
    tol: float

    @property
    def continuous(self) -> bool:
        return self.oscillations[-1] <= self.tol

    def to_dict(self):
        return {"radii": list(self.radii), "oscillations": list(self.oscillations), "continuous": self.continuous}


def continuity_probe(f: RandomField, x0: Sequence[float], radii: Sequence[float] = (1e-1, 1e-2, 1e-3, 1e-4),
                     tol: float = 1e-3, seed: Optional[int] = None) -> ContinuityProbe:
    """Oscillation max |f(x) - f(x0)| over points at distance r from x0, for shrinking r."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.size != f.dim:
        raise DomainError(f"Point of dimension {x0.size} for a field of dimension {f.dim}")
    rng = np.random.default_rng(get_setting("SEED") if seed is None else seed)
    directions = np.vstack([np.eye(f.dim), -np.eye(f.dim), rng.standard_normal((8, f.dim))])
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    center = f(x0.reshape(1, -1))[0]
    oscillations = []
    for r in radii:
        oscillations.append(float(np.max(np.abs(f(x0 + r * directions) - center))))
    return ContinuityProbe(tuple(float(r) for r in radii), tuple(oscillations), tol)
