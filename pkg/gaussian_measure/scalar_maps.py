"""
Scalar maps G: R -> R usable inside random-field expressions.

Each map knows the name of its derivative (so gradients of compositions stay
exact) and, when G' is bounded, the Lipschitz constant sup |G'|.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
from scipy.special import expit

from core.exceptions import ExpressionError


@dataclass(frozen=True)
class ScalarMap:
    name: str
    func: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[str]
    lipschitz: Optional[float]

    def __call__(self, values):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return self.func(np.asarray(values, dtype=float))


def _bump(y):
    inside = np.clip(1.0 - y * y, 0.0, None)
    return inside ** 3


def _bump_prime(y):
    inside = np.clip(1.0 - y * y, 0.0, None)
    return -6.0 * y * inside ** 2


def _bump_second(y):
    inside = np.clip(1.0 - y * y, 0.0, None)
    return -6.0 * inside ** 2 + 24.0 * y * y * inside


def _sech2(x):
    return 1.0 / np.cosh(x) ** 2


SCALAR_MAPS: Dict[str, ScalarMap] = {
    m.name: m
    for m in [
        ScalarMap("identity", lambda x: x, "one", 1.0),
        ScalarMap("one", np.ones_like, "zero", 0.0),
        ScalarMap("zero", np.zeros_like, "zero", 0.0),
        ScalarMap("relu", lambda x: np.maximum(x, 0.0), "heaviside", 1.0),
        # Jump at 0: no bounded weak derivative.
        ScalarMap("heaviside", lambda x: (x > 0).astype(float), None, None),
        ScalarMap("softplus", lambda x: np.logaddexp(0.0, x), "sigmoid", 1.0),
        ScalarMap("sigmoid", expit, "sigmoid_prime", 0.25),
        ScalarMap("sigmoid_prime", lambda x: expit(x) * (1.0 - expit(x)), None, 1.0 / (6.0 * np.sqrt(3.0))),
        ScalarMap("tanh", np.tanh, "sech2", 1.0),
        ScalarMap("sech2", _sech2, "sech2_prime", 4.0 / (3.0 * np.sqrt(3.0))),
        ScalarMap("sech2_prime", lambda x: -2.0 * np.tanh(x) * _sech2(x), None, None),
        ScalarMap("abs", np.abs, "sign", 1.0),
        ScalarMap("sign", np.sign, None, None),
        ScalarMap("exp", np.exp, "exp", None),
        ScalarMap("log", np.log, "reciprocal", None),
        ScalarMap("reciprocal", lambda x: 1.0 / x, "neg_reciprocal_sq", None),
        ScalarMap("neg_reciprocal_sq", lambda x: -1.0 / (x * x), None, None),
        ScalarMap("sqrt", np.sqrt, "half_rsqrt", None),
        ScalarMap("half_rsqrt", lambda x: 0.5 / np.sqrt(x), None, None),
        ScalarMap("bump3", _bump, "bump3_prime", 96.0 / (25.0 * np.sqrt(5.0))),
        ScalarMap("bump3_prime", _bump_prime, "bump3_second", 6.0),
        ScalarMap("bump3_second", _bump_second, None, None),
    ]
}


def get_scalar_map(name: str) -> ScalarMap:
    try:
        return SCALAR_MAPS[name]
    except KeyError:
        raise ExpressionError(f'Unknown scalar map "{name}"; known: {", ".join(sorted(SCALAR_MAPS))}')
