"""
Expectation engine for the standard Gaussian measure on R^n.

Three backends share one interface:
    quadrature   tensorized Gauss-Hermite rule (probabilists' weight e^{-x^2/2})
    panel        composite Gauss-Legendre panels on [-L, L]^n against the Gaussian density
    monte_carlo  seeded standard normal samples

Every estimate carries an error bound (fine minus coarse rule, or the standard
error for Monte Carlo) and a divergence verdict. An integral is declared
diverged when the integrand is not finite at a node, when the sum exceeds the
divergence guard, when refining the rule makes the value explode, or when the
weighted integrand fails to decay along the probe rays at large radius.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss

from core.conf import get_setting
from core.exceptions import DimensionMismatchError, DomainError, NegativeWeightError
from .fields import RandomField

logger = logging.getLogger(__name__)

BACKENDS = ("quadrature", "panel", "monte_carlo")

# fine value this many times larger than the coarse one means no stabilization
REFINEMENT_BLOWUP = 1e3


@dataclass(frozen=True)
class Estimate:
    value: float
    error_bound: float
    diverged: bool = False
    reason: str = ""

    @classmethod
    def divergent(cls, reason: str) -> "Estimate":
        return cls(float("inf"), float("inf"), True, reason)

    @property
    def finite(self) -> bool:
        return not self.diverged

    def to_verdict(self) -> dict:
        return {"diverged": True} if self.diverged else {"finite": self.value}


def _tensor_rule(nodes: np.ndarray, weights: np.ndarray, dim: int) -> Tuple[np.ndarray, np.ndarray]:
    if dim == 1:
        return nodes.reshape(-1, 1), weights.copy()
    grids = np.meshgrid(*([nodes] * dim), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([weights] * dim), indexing="ij")
    return points, np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)


def gauss_hermite_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and probability weights of the order-point rule for N(0, 1)."""
    nodes, weights = hermegauss(order)
    return nodes, weights / weights.sum()


def gauss_legendre_panels(half_width: float, width: float, per_panel: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [-half_width, half_width] weighted by the N(0, 1) density."""
    count = int(round(2 * half_width / width))
    edges = -half_width + width * np.arange(count + 1)
    t, w = leggauss(per_panel)
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + 0.5 * width * t[None, :]).ravel()
    weights = (0.5 * width * np.tile(w, count)) * np.exp(-0.5 * nodes ** 2) / np.sqrt(2 * np.pi)
    return nodes, weights / weights.sum()


def _probe_directions(dim: int) -> np.ndarray:
    axes = [sign * np.eye(dim)[i] for i in range(dim) for sign in (1.0, -1.0)]
    if 1 < dim <= 6:
        diagonals = [np.asarray(s) / np.sqrt(dim) for s in itertools.product((1.0, -1.0), repeat=dim)]
        axes.extend(diagonals)
    return np.asarray(axes)


@dataclass(frozen=True)
class GaussianIntegrator:
    dim: int = 1
    backend: str = "quadrature"
    order: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    divergence_guard: Optional[float] = None
    tail_radii: Optional[Tuple[float, ...]] = None
    panel_width: Optional[float] = None
    panel_half_width: Optional[float] = None
    panel_nodes: Optional[int] = None

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError(f"Dimension must be at least 1, got {self.dim}")
        if self.backend not in BACKENDS:
            raise DomainError(f'Unknown integrator backend "{self.backend}"; expected one of {", ".join(BACKENDS)}')
        defaults = {
            "order": get_setting("QUADRATURE_ORDER"),
            "samples": get_setting("MONTE_CARLO_SAMPLES"),
            "seed": get_setting("SEED"),
            "divergence_guard": get_setting("DIVERGENCE_GUARD"),
            "tail_radii": tuple(get_setting("TAIL_PROBE_RADII")),
            "panel_width": get_setting("PANEL_WIDTH"),
            "panel_half_width": get_setting("PANEL_HALF_WIDTH"),
            "panel_nodes": get_setting("PANEL_NODES"),
        }
        for name, value in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)
        if self.order < 2:
            raise DomainError(f"Quadrature order must be at least 2, got {self.order}")
        if len(self.tail_radii) < 2:
            raise DomainError("At least two tail probe radii are required")

    # Factories

    @classmethod
    def quadrature(cls, dim: int = 1, order: Optional[int] = None, **kwargs) -> "GaussianIntegrator":
        return cls(dim=dim, backend="quadrature", order=order, **kwargs)

    @classmethod
    def panel(cls, dim: int = 1, **kwargs) -> "GaussianIntegrator":
        return cls(dim=dim, backend="panel", **kwargs)

    @classmethod
    def monte_carlo(cls, dim: int = 1, samples: Optional[int] = None, seed: Optional[int] = None, **kwargs) -> "GaussianIntegrator":
        return cls(dim=dim, backend="monte_carlo", samples=samples, seed=seed, **kwargs)

    @classmethod
    def default(cls, dim: int = 1) -> "GaussianIntegrator":
        """Gauss-Hermite for n <= 3, Monte Carlo above (tensor cost grows as m^n)."""
        return cls.quadrature(dim) if dim <= 3 else cls.monte_carlo(dim)

    def with_dim(self, dim: int) -> "GaussianIntegrator":
        return GaussianIntegrator(
            dim=dim, backend=self.backend, order=self.order, samples=self.samples, seed=self.seed,
            divergence_guard=self.divergence_guard, tail_radii=self.tail_radii, panel_width=self.panel_width,
            panel_half_width=self.panel_half_width, panel_nodes=self.panel_nodes,
        )

    def describe(self) -> dict:
        info = {"backend": self.backend, "dim": self.dim}
        if self.backend == "quadrature":
            info["order"] = self.order
        elif self.backend == "panel":
            info.update(width=self.panel_width, half_width=self.panel_half_width, nodes=self.panel_nodes)
        else:
            info.update(samples=self.samples, seed=self.seed)
        return info

    # Rules

    @cached_property
    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Fine rule: (points of shape (N, dim), probability weights)."""
        if self.backend == "quadrature":
            return _tensor_rule(*gauss_hermite_rule(self.order), self.dim)
        if self.backend == "panel":
            return _tensor_rule(
                *gauss_legendre_panels(self.panel_half_width, self.panel_width, self.panel_nodes), self.dim
            )
        rng = np.random.default_rng(self.seed)
        points = rng.standard_normal((self.samples, self.dim))
        return points, np.full(self.samples, 1.0 / self.samples)

    @cached_property
    def coarse_nodes(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        if self.backend == "quadrature":
            return _tensor_rule(*gauss_hermite_rule(max(self.order // 2, 2)), self.dim)
        if self.backend == "panel":
            return _tensor_rule(
                *gauss_legendre_panels(self.panel_half_width, self.panel_width, max(self.panel_nodes // 2, 2)),
                self.dim,
            )
        return None

    @cached_property
    def probe_points(self) -> np.ndarray:
        """(rays * radii, dim) points on the tail probe rays, radius varying fastest."""
        directions = _probe_directions(self.dim)
        radii = np.asarray(self.tail_radii, dtype=float)
        return (directions[:, None, :] * radii[None, :, None]).reshape(-1, self.dim)

    # Expectations

    def _check(self, f: RandomField):
        if f.dim != self.dim:
            raise DimensionMismatchError(f"Field of dimension {f.dim} given to an integrator of dimension {self.dim}")

    def sample(self, f: RandomField, weight: Optional[RandomField] = None) -> "FieldSample":
        """Evaluate f once on every node so that many transforms of it can be integrated."""
        self._check(f)
        points, weights = self.nodes
        coarse = self.coarse_nodes
        probes = self.probe_points
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            values = f.evaluate(points)
            coarse_values = f.evaluate(coarse[0]) if coarse is not None else None
            probe_values = f.evaluate(probes)
            coarse_weights = coarse[1] if coarse is not None else None
            probe_log_weight = np.zeros(len(probes))
            if weight is not None:
                self._check(weight)
                p = weight.evaluate(points)
                if np.any(p < 0):
                    raise NegativeWeightError(f"Weight {weight.describe()} is negative at {int(np.sum(p < 0))} nodes")
                weights = weights * p
                if coarse is not None:
                    coarse_weights = coarse_weights * weight.evaluate(coarse[0])
                probe_log_weight = np.log(np.abs(weight.evaluate(probes)))
        return FieldSample(
            integrator=self,
            values=values,
            weights=weights,
            coarse_values=coarse_values,
            coarse_weights=coarse_weights,
            probe_values=probe_values,
            probe_log_weight=probe_log_weight,
        )

    def expect(self, f: RandomField) -> Estimate:
        return self.sample(f).expect()

    def expect_under(self, f: RandomField, p: RandomField) -> Estimate:
        return self.sample(f, weight=p).expect()


@dataclass
class FieldSample:
    integrator: GaussianIntegrator
    values: np.ndarray
    weights: np.ndarray
    coarse_values: Optional[np.ndarray]
    coarse_weights: Optional[np.ndarray]
    probe_values: np.ndarray
    probe_log_weight: np.ndarray = field(repr=False)

    def _tail_diverges(self, transformed: np.ndarray) -> bool:
        radii = np.asarray(self.integrator.tail_radii, dtype=float)
        g = transformed.reshape(-1, len(radii))
        if np.any(np.isinf(g[:, -1])):
            return True
        with np.errstate(divide="ignore", invalid="ignore"):
            score = np.log(np.abs(g)) - 0.5 * radii[None, :] ** 2 + self.probe_log_weight.reshape(g.shape)
        if np.any(np.isposinf(score[:, -1])):
            return True
        last, before = score[:, -1], score[:, -2]
        comparable = np.isfinite(last) & np.isfinite(before)
        return bool(np.any(last[comparable] >= before[comparable]))

    def expect(self, transform: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> Estimate:
        """Expectation of transform(f), or of f itself."""
        guard = self.integrator.divergence_guard
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            g = transform(self.values) if transform else self.values
            terms = g * self.weights
            if not np.all(np.isfinite(terms)):
                return Estimate.divergent("integrand is not finite at the integration nodes")
            total = float(np.sum(terms))
            if abs(total) > guard:
                return Estimate.divergent(f"partial sum exceeds the divergence guard {guard:g}")
            probes = transform(self.probe_values) if transform else self.probe_values
            if self._tail_diverges(np.asarray(probes, dtype=float)):
                return Estimate.divergent("weighted integrand does not decay along the tail probe rays")

            if self.coarse_values is None:
                n = len(g)
                spread = float(np.std(g * self.weights * n)) if n > 1 else 0.0
                return Estimate(total, spread / np.sqrt(n))

            coarse_g = transform(self.coarse_values) if transform else self.coarse_values
            coarse_total = float(np.sum(coarse_g * self.coarse_weights))
        if not np.isfinite(coarse_total):
            return Estimate.divergent("coarse rule is not finite")
        if abs(total) > REFINEMENT_BLOWUP * max(abs(coarse_total), 1.0):
            logger.warning(f"Refinement grew from {coarse_total:.6g} to {total:.6g}, reporting divergence")
            return Estimate.divergent("quadrature refinement grows without stabilizing")
        return Estimate(total, abs(total - coarse_total))


def expect(integrator: GaussianIntegrator, f: RandomField) -> Estimate:
    return integrator.expect(f)


def expect_under(integrator: GaussianIntegrator, f: RandomField, p: RandomField) -> Estimate:
    return integrator.expect_under(f, p)
