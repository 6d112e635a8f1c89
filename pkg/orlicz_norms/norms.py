"""
Norms on Orlicz spaces over the Gaussian space.

luxemburg_norm  gauge rho with E[Phi(|f|/rho)] = 1, by bracketing and bisection
dual_norm       Amemiya form inf_k (1 + E[Phi(k|f|)]) / k of the Orlicz norm
moment_norm     max_k ((2k)!^-1 E[f^2k])^(1/2k), equivalent norm on L^cosh2

Infinity is never returned as a float: a field outside the space gets a
result with finite=False and a verdict string.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import bisect, minimize_scalar

from core.conf import get_setting
from core.exceptions import DomainError
from gaussian_measure.fields import RandomField, truncate
from gaussian_measure.integrators import FieldSample, GaussianIntegrator
from young_functions.young import YoungFunction, conjugate, cosh2, squared

logger = logging.getLogger(__name__)

ROOT_RTOL = 1e-14
MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class NormResult:
    value: float
    method: str
    bracket: Tuple[float, float]
    residual: float
    finite: bool = True
    verdict: str = ""

    @classmethod
    def outside(cls, method: str, verdict: str) -> "NormResult":
        return cls(float("inf"), method, (float("inf"), float("inf")), float("inf"), False, verdict)

    def to_dict(self) -> dict:
        if not self.finite:
            return {"value": {"diverged": True}, "method": self.method, "verdict": self.verdict}
        return {
            "value": self.value,
            "method": self.method,
            "bracket": list(self.bracket),
            "residual": self.residual,
        }


def _is_zero(sample: FieldSample) -> bool:
    return bool(np.all(sample.values == 0) and np.all(sample.probe_values == 0))


class ModularIntegral:
    """rho -> E[Phi(|f|/rho)] on a field sampled once."""

    def __init__(self, sample: FieldSample, phi: YoungFunction):
        self.sample = sample
        self.phi = phi
        self.calls = 0

    def __call__(self, rho: float):
        self.calls += 1
        phi = self.phi
        return self.sample.expect(lambda v: phi.Phi(np.abs(v) / rho))

    def excess(self, rho: float) -> float:
        """E[Phi(|f|/rho)] - 1, with +1 for a diverged integral."""
        estimate = self(rho)
        return 1.0 if estimate.diverged else estimate.value - 1.0


def luxemburg_norm(
    f: RandomField,
    phi: YoungFunction,
    integrator: GaussianIntegrator,
    weight: Optional[RandomField] = None,
) -> NormResult:
    """Luxemburg norm of f in L^Phi(gamma), or in L^Phi(p gamma) when a weight p is given."""
    method = "luxemburg-bisection"
    sample = integrator.sample(f, weight)
    if _is_zero(sample):
        return NormResult(0.0, "zero", (0.0, 0.0), 0.0)

    modular = ModularIntegral(sample, phi)

    # rho_hi doubles from 1 until the modular drops to <= 1
    hi = 1.0
    for _ in range(MAX_DOUBLINGS):
        estimate = modular(hi)
        if not estimate.diverged and estimate.value <= 1.0:
            break
        hi *= 2.0
    else:
        logger.warning(f"{f.describe()} is not in L^{phi.name}: modular diverged up to rho={hi:g}")
        return NormResult.outside(method, f"not in L^{phi.name}")

    if hi > 1.0:
        lo = hi / 2.0
    else:
        lo = hi
        for _ in range(MAX_DOUBLINGS):
            lo /= 2.0
            estimate = modular(lo)
            if estimate.diverged or estimate.value >= 1.0:
                break
        else:
            # f vanishes on the integration nodes up to underflow
            return NormResult(0.0, "zero", (0.0, lo), 0.0)

    g_lo, g_hi = modular.excess(lo), modular.excess(hi)
    if g_hi == 0.0:
        rho = hi
    elif g_lo == 0.0:
        rho = lo
    else:
        rho = bisect(
            modular.excess,
            lo,
            hi,
            xtol=1e-300,
            rtol=ROOT_RTOL,
            maxiter=get_setting("BISECTION_MAXITER"),
        )
    final = modular(rho)
    residual = abs(final.value - 1.0) if final.finite else float("inf")
    logger.info(f"Luxemburg norm of {f.describe()} under {phi.name}: {rho:.12g} after {modular.calls} integrals")
    return NormResult(float(rho), method, (float(lo), float(hi)), float(residual))


def _amemiya(sample: FieldSample, phi: YoungFunction, k: float) -> float:
    estimate = sample.expect(lambda v: phi.Phi(k * np.abs(v)))
    return float("inf") if estimate.diverged else (1.0 + estimate.value) / k


def dual_norm(
    f: RandomField,
    phi: YoungFunction,
    integrator: GaussianIntegrator,
    weight: Optional[RandomField] = None,
) -> NormResult:
    """Orlicz norm in the Amemiya form inf_k (1 + E[Phi(k|f|)]) / k, by golden-section search in log k."""
    method = "amemiya-golden-section"
    lux = luxemburg_norm(f, phi, integrator, weight)
    if not lux.finite:
        return NormResult.outside(method, lux.verdict)
    if lux.value == 0.0:
        return NormResult(0.0, "zero", (0.0, 0.0), 0.0)

    sample = integrator.sample(f, weight)

    def objective(t):
        return _amemiya(sample, phi, math.exp(t))

    # step in log k from 1/(2 rho) until the objective turns up on both sides
    step = math.log(2.0)
    ts = [math.log(0.5 / lux.value) + j * step for j in range(-4, 12)]
    values = [objective(t) for t in ts]
    best = int(np.argmin(values))
    for _ in range(64):
        if best == 0:
            ts.insert(0, ts[0] - step)
            values.insert(0, objective(ts[0]))
            best = int(np.argmin(values))
        elif best == len(ts) - 1:
            ts.append(ts[-1] + step)
            values.append(objective(ts[-1]))
            best = int(np.argmin(values))
        else:
            break

    bracket = (ts[best - 1], ts[best], ts[best + 1])
    result = minimize_scalar(objective, bracket=bracket, method="golden", tol=1e-10)
    value = float(min(result.fun, values[best]))
    k_star = math.exp(result.x if result.fun <= values[best] else ts[best])
    logger.info(f"Amemiya norm of {f.describe()} under {phi.name}: {value:.12g} at k={k_star:.6g}")
    return NormResult(
        value,
        method,
        (float(lux.value), float(2.0 * lux.value)),
        float(abs(value - objective(math.log(k_star)))),
    )


@dataclass(frozen=True)
class MomentNormResult:
    value: float
    attained_k: int
    k_max: int
    terms: Tuple[float, ...]
    finite: bool = True
    verdict: str = ""

    def to_dict(self) -> dict:
        data = asdict(self)
        if not self.finite:
            data["value"] = {"diverged": True}
        return data


def moment_norm(
    f: RandomField,
    integrator: GaussianIntegrator,
    k_max: Optional[int] = None,
    weight: Optional[RandomField] = None,
) -> MomentNormResult:
    """max over 1 <= k <= k_max of ((2k)!^-1 E[f^2k])^(1/2k), a lower bound of the full supremum."""
    if k_max is None:
        k_max = get_setting("MOMENT_K_MAX")
    if k_max < 1:
        raise DomainError(f"k_max must be at least 1, got {k_max}")
    sample = integrator.sample(f, weight)
    terms: List[float] = []
    for k in range(1, k_max + 1):
        estimate = sample.expect(lambda v, p=2 * k: v ** p)
        if estimate.diverged:
            logger.warning(f"{f.describe()}: moment of order {2 * k} diverged")
            return MomentNormResult(float("inf"), k, k_max, tuple(terms), False, f"not sub-exponential at order {k}")
        moment = max(estimate.value, 0.0)
        terms.append(math.exp((math.log(moment) - math.lgamma(2 * k + 1)) / (2 * k)) if moment > 0 else 0.0)
    best = int(np.argmax(terms))
    return MomentNormResult(terms[best], best + 1, k_max, tuple(terms))


@dataclass
class TailCertificate:
    rho: float
    table: object = field(repr=False)
    vacuous: bool = False
    finite: bool = True
    verdict: str = ""

    @property
    def all_passed(self) -> bool:
        return bool(self.finite and self.table["passed"].all())

    def to_dict(self) -> dict:
        return {
            "rho": self.rho if self.finite else {"diverged": True},
            "vacuous": self.vacuous,
            "all_passed": self.all_passed,
            "rows": self.table,
            "verdict": self.verdict,
        }


TAIL_CONSTANT = 4.0


def tail_certificate(
    f: RandomField,
    integrator: GaussianIntegrator,
    t_grid: Sequence[float],
    rho: Optional[float] = None,
    norm_integrator: Optional[GaussianIntegrator] = None,
) -> TailCertificate:
    """Check gamma(|f| > t) <= 4 exp(-t / rho) with rho the cosh2 Luxemburg norm."""

    if rho is None:
        lux = luxemburg_norm(f, cosh2(), norm_integrator or integrator)
        if not lux.finite:
            empty = pd.DataFrame(columns=["t", "empirical_tail", "bound", "passed"])
            return TailCertificate(float("inf"), empty, finite=False, verdict=lux.verdict)
        rho = lux.value

    sample = integrator.sample(f)
    rows = []
    for t in t_grid:
        tail = sample.expect(lambda v, t=t: (np.abs(v) > t).astype(float)).value
        bound = TAIL_CONSTANT * math.exp(-t / rho) if rho > 0 else 0.0
        rows.append({"t": float(t), "empirical_tail": tail, "bound": bound, "passed": bool(tail <= bound)})
    table = pd.DataFrame(rows, columns=["t", "empirical_tail", "bound", "passed"])
    failures = int((~table["passed"]).sum()) if len(table) else 0
    if failures:
        logger.warning(f"Tail certificate for {f.describe()} failed at {failures} points, suspect integration error")
    return TailCertificate(float(rho), table, vacuous=rho == 0)


@dataclass(frozen=True)
class OrliczClassReport:
    in_M: bool
    max_finite_lambda: Optional[float]
    min_diverged_lambda: Optional[float]
    estimates: Tuple[Tuple[float, dict], ...]

    def to_dict(self) -> dict:
        return {
            "in_M": self.in_M,
            "max_finite_lambda": self.max_finite_lambda,
            "min_diverged_lambda": self.min_diverged_lambda,
            "estimates": [{"lambda": lam, "mgf": verdict} for lam, verdict in self.estimates],
        }


DEFAULT_LAMBDAS = (0.1, 0.2, 0.3, 0.4, 0.45, 0.49, 0.51, 0.6, 1.0, 2.0, 5.0)


def orlicz_class_member(
    f: RandomField,
    integrator: GaussianIntegrator,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
) -> OrliczClassReport:
    """Is E[exp(lambda |f|)] finite for every probed lambda?"""
    lambdas = [float(lam) for lam in lambdas]
    if not lambdas or any(lam <= 0 for lam in lambdas) or any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambda grid must be non-empty, positive and increasing")
    sample = integrator.sample(f)
    estimates = []
    finite_lambdas, diverged_lambdas = [], []
    for lam in lambdas:
        estimate = sample.expect(lambda v, lam=lam: np.exp(lam * np.abs(v)))
        estimates.append((lam, estimate.to_verdict()))
        (diverged_lambdas if estimate.diverged else finite_lambdas).append(lam)
    return OrliczClassReport(
        in_M=not diverged_lambdas,
        max_finite_lambda=max(finite_lambdas) if finite_lambdas else None,
        min_diverged_lambda=min(diverged_lambdas) if diverged_lambdas else None,
        estimates=tuple(estimates),
    )


def truncation_convergence(
    f: RandomField,
    phi: YoungFunction,
    integrator: GaussianIntegrator,
    radii: Sequence[float],
    lam: float,
):
    """Table of E[Phi(lambda (f - f_N))] with f_N = f 1(|x| <= N)."""

    rows = []
    for radius in radii:
        remainder = f - truncate(f, radius)
        estimate = integrator.sample(remainder).expect(lambda v: phi.Phi(lam * v))
        rows.append({
            "N": float(radius),
            "value": None if estimate.diverged else estimate.value,
            "diverged": estimate.diverged,
        })
    return pd.DataFrame(rows, columns=["N", "value", "diverged"])


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    holds: bool
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def holder_check(
    u: RandomField,
    v: RandomField,
    phi: YoungFunction,
    integrator: GaussianIntegrator,
    tol: Optional[float] = None,
) -> InequalityReport:
    """|E[u v]| <= 2 ||u||_Phi ||v||_Phi*."""

    tol = get_setting("TOLERANCE") if tol is None else tol
    psi = conjugate(phi)
    lhs = abs(integrator.expect(u * v).value)
    norm_u = luxemburg_norm(u, phi, integrator)
    norm_v = luxemburg_norm(v, psi, integrator)
    rhs = 2.0 * norm_u.value * norm_v.value
    return InequalityReport(lhs, rhs, lhs <= rhs * (1 + tol), {"norm_u": norm_u.value, "norm_v": norm_v.value})


def product_bound_check(
    f: RandomField,
    g: RandomField,
    phi: YoungFunction,
    integrator: GaussianIntegrator,
    tol: Optional[float] = None,
) -> InequalityReport:
    """With f, g scaled to unit norm in L^Phi_bar, the product has ||f g||_Phi <= 1."""

    tol = get_setting("TOLERANCE") if tol is None else tol
    phi_bar = squared(phi)
    norm_f = luxemburg_norm(f, phi_bar, integrator).value
    norm_g = luxemburg_norm(g, phi_bar, integrator).value
    product = (f / norm_f) * (g / norm_g)
    value = luxemburg_norm(product, phi, integrator).value
    return InequalityReport(value, 1.0, value <= 1.0 + tol, {"norm_f": norm_f, "norm_g": norm_g})


def mgf_from_tail(c1: float, c2: float, lam: float) -> float:
    """Bound E[exp(lambda |f|)] <= 1 + C1 lambda / (C2 - lambda) from gamma(|f| > t) <= C1 exp(-C2 t)."""
    if lam >= c2:
        return float("inf")
    return 1.0 + c1 * lam / (c2 - lam)


def mgf_tail_report(f: RandomField, integrator: GaussianIntegrator, lambdas: Sequence[float], rho: Optional[float] = None):
    """Moment generating function next to the bound implied by the tail certificate constants."""

    if rho is None:
        rho = luxemburg_norm(f, cosh2(), integrator).value
    sample = integrator.sample(f)
    rows = []
    for lam in lambdas:
        estimate = sample.expect(lambda v, lam=lam: np.exp(lam * np.abs(v)))
        bound = mgf_from_tail(TAIL_CONSTANT, 1.0 / rho, lam) if rho > 0 else 1.0
        mgf = None if estimate.diverged else estimate.value
        rows.append({
            "lambda": float(lam),
            "mgf": mgf,
            "bound": None if math.isinf(bound) else bound,
            "passed": bool(math.isinf(bound) or (mgf is not None and mgf <= bound * (1 + 1e-12))),
        })
    return pd.DataFrame(rows, columns=["lambda", "mgf", "bound", "passed"])
