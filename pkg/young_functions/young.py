"""
Young functions: even convex Phi(x) = int_0^|x| phi with phi strictly increasing.

Built-in closed forms

    power:a     x^a / a                   phi(x) = x^(a-1)
    exp2        e^x - 1 - x               phi(x) = e^x - 1
    exp2*       (1+y) log(1+y) - y        psi(y) = log(1+y)
    cosh2       cosh x - 1                phi(x) = sinh x
    cosh2*      y asinh y - sqrt(1+y^2) + 1
    gauss2      e^(x^2/2) - 1             phi(x) = x e^(x^2/2)
    sq:<name>   Phi(x^2)                  2 x phi(x^2)

Everything else (custom phi tables, conjugates without a closed form) is
handled numerically: psi = phi^-1 by bisection, Psi by adaptive quadrature.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad_vec
from scipy.interpolate import PchipInterpolator

from core.conf import get_setting
from core.exceptions import DomainError

logger = logging.getLogger(__name__)

LOG2 = np.log(2.0)


@dataclass(frozen=True, eq=False)
class YoungFunction:
    name: str
    kind: str
    Phi_plus: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    phi_plus: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    log_Phi_plus: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    alpha: Optional[float] = None
    base: Optional["YoungFunction"] = None

    def _prepare(self, x):
        return np.abs(np.asarray(x, dtype=float))

    def __call__(self, x):
        return self.Phi(x)

    def Phi(self, x):
        """Phi(|x|), vectorized."""
        with np.errstate(over="ignore", invalid="ignore"):
            return self.Phi_plus(self._prepare(x))

    def phi(self, x):
        """The right derivative phi(|x|)."""
        with np.errstate(over="ignore", invalid="ignore"):
            return self.phi_plus(self._prepare(x))

    def log_Phi(self, x):
        """log Phi(|x|), computed without overflow for the built-ins."""
        x = self._prepare(x)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if self.log_Phi_plus is not None:
                return self.log_Phi_plus(x)
            return np.log(self.Phi_plus(x))

    def to_json(self):
        return {"name": self.name, "kind": self.kind}

    def __repr__(self):
        return f"YoungFunction({self.name})"


# Built-ins


def power(alpha: float) -> YoungFunction:
    alpha = float(alpha)
    if not alpha > 1.0:
        raise DomainError(f"Power Young function needs an exponent > 1, got {alpha:g}")
    return YoungFunction(
        name=f"power:{alpha:g}",
        kind="power",
        Phi_plus=lambda x: x ** alpha / alpha,
        phi_plus=lambda x: x ** (alpha - 1.0),
        log_Phi_plus=lambda x: alpha * np.log(x) - np.log(alpha),
        alpha=alpha,
    )


def _exp2_log(x):
    small = np.log(np.expm1(np.minimum(x, 1.0)) - np.minimum(x, 1.0))
    large = x + np.log1p(-(1.0 + x) * np.exp(-x))
    return np.where(x > 1.0, large, small)


def exp2() -> YoungFunction:
    return YoungFunction(
        name="exp2",
        kind="exp2",
        Phi_plus=lambda x: np.expm1(x) - x,
        phi_plus=np.expm1,
        log_Phi_plus=_exp2_log,
    )


def exp2_conj() -> YoungFunction:
    return YoungFunction(
        name="exp2*",
        kind="exp2_conj",
        Phi_plus=lambda y: (1.0 + y) * np.log1p(y) - y,
        phi_plus=np.log1p,
    )


def cosh2() -> YoungFunction:
    return YoungFunction(
        name="cosh2",
        kind="cosh2",
        # 2 sinh^2(x/2) avoids the cancellation of cosh(x) - 1 near 0
        Phi_plus=lambda x: 2.0 * np.sinh(0.5 * x) ** 2,
        phi_plus=np.sinh,
        log_Phi_plus=lambda x: x - LOG2 + 2.0 * np.log(-np.expm1(-x)),
    )


def cosh2_conj() -> YoungFunction:
    return YoungFunction(
        name="cosh2*",
        kind="cosh2_conj",
        Phi_plus=lambda y: y * np.arcsinh(y) - y * y / (np.sqrt(1.0 + y * y) + 1.0),
        phi_plus=np.arcsinh,
    )


def gauss2() -> YoungFunction:
    return YoungFunction(
        name="gauss2",
        kind="gauss2",
        Phi_plus=lambda x: np.expm1(0.5 * x * x),
        phi_plus=lambda x: x * np.exp(0.5 * x * x),
        log_Phi_plus=lambda x: 0.5 * x * x + np.log(-np.expm1(-0.5 * x * x)),
    )


def squared(base: YoungFunction) -> YoungFunction:
    """Phi_bar(x) = Phi(x^2), again a Young function."""
    return YoungFunction(
        name=f"sq:{base.name}",
        kind="squared",
        Phi_plus=lambda x: base.Phi_plus(x * x),
        phi_plus=lambda x: 2.0 * x * base.phi_plus(x * x),
        log_Phi_plus=lambda x: base.log_Phi(x * x),
        base=base,
    )


def custom(grid, phi_values, name: str = "custom") -> YoungFunction:
    """Young function from phi tabulated on an increasing grid starting at 0.

    phi is interpolated with a shape-preserving cubic (PCHIP) and extended
    linearly past the last node; Phi is the exact antiderivative.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(phi_values, dtype=float)
    if grid.ndim != 1 or grid.shape != values.shape or len(grid) < 3:
        raise DomainError("A custom phi needs matching 1-D grid and value arrays with at least 3 points")
    if grid[0] != 0.0 or values[0] != 0.0:
        raise DomainError("A custom phi table must start at phi(0) = 0")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("The custom phi grid must be strictly increasing")
    if np.any(np.diff(values) <= 0):
        raise DomainError("The custom phi values must be strictly increasing")

    interpolant = PchipInterpolator(grid, values, extrapolate=False)
    primitive = interpolant.antiderivative()
    x_end, phi_end = grid[-1], values[-1]
    Phi_end = float(primitive(x_end))
    slope = float(interpolant.derivative()(x_end))
    if slope <= 0:
        slope = max((values[-1] - values[-2]) / (grid[-1] - grid[-2]), np.finfo(float).tiny)

    def phi_plus(x):
        beyond = x - x_end
        inside = interpolant(np.minimum(x, x_end))
        return np.where(beyond > 0, phi_end + slope * beyond, inside)

    def Phi_plus(x):
        beyond = x - x_end
        inside = primitive(np.minimum(x, x_end))
        return np.where(beyond > 0, Phi_end + phi_end * beyond + 0.5 * slope * beyond ** 2, inside)

    return YoungFunction(name=name, kind="custom", Phi_plus=Phi_plus, phi_plus=phi_plus)


# Conjugation


def invert_monotone(func, y, rtol: Optional[float] = None, maxiter: Optional[int] = None):
    """Vectorized bisection for func(x) = y on [0, inf) with func increasing."""
    rtol = get_setting("INVERSION_RTOL") if rtol is None else rtol
    maxiter = get_setting("BISECTION_MAXITER") if maxiter is None else maxiter
    y = np.asarray(y, dtype=float)
    lo = np.zeros_like(y)
    hi = np.ones_like(y)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(2048):
            short = func(hi) < y
            if not np.any(short):
                break
            lo = np.where(short, hi, lo)
            hi = np.where(short, 2.0 * hi, hi)
        for _ in range(maxiter):
            mid = 0.5 * (lo + hi)
            below = func(mid) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all((hi - lo <= rtol * hi) | (y <= 0)):
                break
    return np.where(y > 0, 0.5 * (lo + hi), 0.0)


def numeric_conjugate(base: YoungFunction) -> YoungFunction:
    """Conjugate with psi = phi^-1 by bisection and Psi(y) = int_0^y psi by adaptive quadrature."""

    def psi_plus(y):
        return invert_monotone(base.phi_plus, y)

    def Psi_plus(y):
        y = np.asarray(y, dtype=float)
        flat = np.atleast_1d(y).ravel()
        integral, _ = quad_vec(lambda t: flat * psi_plus(flat * t), 0.0, 1.0, epsabs=0.0, epsrel=1e-11)
        return np.asarray(integral).reshape(y.shape)

    return YoungFunction(
        name=f"conj:{base.name}",
        kind="conjugate",
        Phi_plus=Psi_plus,
        phi_plus=psi_plus,
        base=base,
    )


def probe_grid(lo: float = 1e-3, hi: float = 1e2, count: int = 400) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(lo, hi, count)])


def check_strictly_increasing(phi: YoungFunction):
    grid = probe_grid()
    values = phi.phi(grid)
    finite = np.isfinite(values)
    if values[0] != 0.0 or np.any(np.diff(values[finite]) <= 0):
        raise DomainError(f"phi of {phi.name} is not strictly increasing from phi(0) = 0 on the probe grid")


_CLOSED_CONJUGATES = {
    "exp2": exp2_conj,
    "exp2_conj": exp2,
    "cosh2": cosh2_conj,
    "cosh2_conj": cosh2,
}


def conjugate(phi: YoungFunction) -> YoungFunction:
    """The conjugate Young function Psi with psi = phi^-1; closed form when one is known."""
    if phi.kind == "power":
        return power(phi.alpha / (phi.alpha - 1.0))
    if phi.kind in _CLOSED_CONJUGATES:
        return _CLOSED_CONJUGATES[phi.kind]()
    if phi.kind == "conjugate":
        return phi.base
    check_strictly_increasing(phi)
    logger.info(f"No closed-form conjugate for {phi.name}, using numeric inversion")
    return numeric_conjugate(phi)


@dataclass(frozen=True)
class YoungLegendreReport:
    young_function: str
    x: float
    y: float
    young_gap: float
    legendre_residual: float
    holds: bool


def check_young_legendre(phi: YoungFunction, x: float, y: float, tol: Optional[float] = None) -> YoungLegendreReport:
    """Young's inequality gap Phi(x) + Psi(y) - xy and the Legendre residual at y = phi(x)."""
    if x < 0 or y < 0:
        raise DomainError(f"Young/Legendre check needs x, y >= 0, got x={x:g}, y={y:g}")
    tol = get_setting("TOLERANCE") if tol is None else tol
    psi = conjugate(phi)
    px = float(phi.Phi(x))
    slope = float(phi.phi(x))
    gap = px + float(psi.Phi(y)) - x * y
    residual = px + float(psi.Phi(slope)) - x * slope
    scale = max(1.0, x * slope, x * y)
    holds = gap >= -tol * scale and abs(residual) <= tol * scale
    return YoungLegendreReport(phi.name, float(x), float(y), gap, residual, holds)
