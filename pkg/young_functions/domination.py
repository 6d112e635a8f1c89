"""
Eventual domination Phi_1 < Phi_2: Phi_1(x) <= Phi_2(k x) for all x >= x_bar.

The comparison is made in log space over a geometric probe grid, so the
answer is a certificate over [x_bar, x_max] and not a proof.
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .young import YoungFunction

logger = logging.getLogger(__name__)

DEFAULT_K_GRID = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0)
DEFAULT_THRESHOLDS = (0.0, 1.0, 10.0, 100.0, 1000.0)
LOG_SLACK = 1e-12


@dataclass(frozen=True)
class DominationCertificate:
    dominated: str
    dominating: str
    dominates: bool
    k: Optional[float]
    x_threshold: Optional[float]
    probe_range: Tuple[float, float]
    probes: int
    k_grid: Tuple[float, ...] = field(default=DEFAULT_K_GRID)
    thresholds: Tuple[float, ...] = field(default=DEFAULT_THRESHOLDS)

    def to_dict(self):
        return asdict(self)


def _probe(x_threshold: float, x_max: float, probes: int) -> np.ndarray:
    grid = np.geomspace(max(x_threshold, 1e-6), x_max, probes)
    return np.concatenate([[0.0], grid]) if x_threshold == 0 else grid


def eventually_dominates(
    phi_1: YoungFunction,
    phi_2: YoungFunction,
    k_grid: Optional[Sequence[float]] = None,
    x_thresholds: Optional[Sequence[float]] = None,
    x_max: float = 1e6,
    probes: int = 400,
) -> DominationCertificate:
    """Smallest threshold (then smallest k) for which Phi_1(x) <= Phi_2(k x) on the probe grid."""
    k_grid = tuple(float(k) for k in (k_grid or DEFAULT_K_GRID))
    x_thresholds = tuple(sorted(float(x) for x in (x_thresholds if x_thresholds is not None else DEFAULT_THRESHOLDS)))
    if not k_grid or not x_thresholds:
        raise ValueError("eventually_dominates needs non-empty k and threshold grids")

    for x_bar in x_thresholds:
        if x_bar >= x_max:
            continue
        x = _probe(x_bar, x_max, probes)
        lhs = phi_1.log_Phi(x)
        for k in k_grid:
            rhs = phi_2.log_Phi(k * x)
            with np.errstate(invalid="ignore"):
                ok = (lhs <= rhs + LOG_SLACK) | (lhs == -np.inf)
            if np.all(ok):
                logger.info(f"{phi_1.name} < {phi_2.name} with k={k:g} from x={x_bar:g}")
                return DominationCertificate(
                    phi_1.name, phi_2.name, True, k, x_bar, (x_bar, x_max), len(x), k_grid, x_thresholds
                )
    return DominationCertificate(
        phi_1.name, phi_2.name, False, None, None, (x_thresholds[0], x_max), probes, k_grid, x_thresholds
    )


def equivalent(phi_1: YoungFunction, phi_2: YoungFunction, **kwargs):
    """Mutual eventual domination; returns both certificates."""
    forward = eventually_dominates(phi_1, phi_2, **kwargs)
    backward = eventually_dominates(phi_2, phi_1, **kwargs)
    return forward.dominates and backward.dominates, forward, backward
