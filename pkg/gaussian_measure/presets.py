"""
Named random fields accepted wherever an expression is expected.

Single-variable presets ("x^2", "H3", "tanh(x)", ...) act on the first
coordinate; "x1".."xn", "|x|^2", "x1*x2" and "bump" use the full dimension.
"""
import re
from typing import Callable, Dict

from core.exceptions import ExpressionError
from .fields import (
    Compose,
    Constant,
    HermiteAtom,
    Polynomial,
    RandomField,
    bump,
    coordinate,
    linear,
)


def _monomial(power: int, dim: int, axis: int = 0) -> Polynomial:
    return Polynomial.from_terms({tuple(power if j == axis else 0 for j in range(dim)): 1.0}, dim)


def _hermite(k: int, dim: int, scale: float = 1.0) -> HermiteAtom:
    return HermiteAtom.from_terms({tuple(k if j == 0 else 0 for j in range(dim)): scale}, dim)


def _norm(dim: int) -> RandomField:
    if dim == 1:
        return Compose("abs", coordinate(0, 1))
    return Compose("sqrt", Polynomial.squared_norm(dim))


def _pair_product(dim: int) -> Polynomial:
    if dim < 2:
        raise ExpressionError('Preset "x1*x2" needs dimension at least 2')
    return Polynomial.from_terms({tuple(1 if j < 2 else 0 for j in range(dim)): 1.0}, dim)


PRESETS: Dict[str, Callable[[int], RandomField]] = {
    "0": lambda dim: Constant(0.0, dim),
    "1": lambda dim: Constant(1.0, dim),
    "x": lambda dim: coordinate(0, dim),
    "x^2": lambda dim: _monomial(2, dim),
    "x^3": lambda dim: _monomial(3, dim),
    "x^4": lambda dim: _monomial(4, dim),
    "2x+1": lambda dim: linear([2.0] + [0.0] * (dim - 1), 1.0),
    "|x|": _norm,
    "|x|^2": Polynomial.squared_norm,
    "exp(x^2)": lambda dim: Compose("exp", _monomial(2, dim)),
    "exp(x)": lambda dim: Compose("exp", coordinate(0, dim)),
    "H2/2": lambda dim: _hermite(2, dim, 0.5),
    "H2/4": lambda dim: _hermite(2, dim, 0.25),
    "H3/6": lambda dim: _hermite(3, dim, 1.0 / 6.0),
    "relu(x)": lambda dim: Compose("relu", coordinate(0, dim)),
    "tanh(x)": lambda dim: Compose("tanh", coordinate(0, dim)),
    "softplus(x)": lambda dim: Compose("softplus", coordinate(0, dim)),
    "sign(x)": lambda dim: Compose("sign", coordinate(0, dim)),
    "heaviside(x)": lambda dim: Compose("heaviside", coordinate(0, dim)),
    "x1*x2": _pair_product,
    "bump": lambda dim: bump([0.0] * dim, 1.0),
}

_COORDINATE = re.compile(r"^x(\d+)$")
_HERMITE = re.compile(r"^H(\d+)$")


def preset_names():
    return sorted(PRESETS) + ["x<i>", "H<k>"]


def resolve_preset(name: str, dim: int = 1) -> RandomField:
    """Field for a preset name in dimension dim."""
    name = name.strip()
    if name in PRESETS:
        return PRESETS[name](dim)
    match = _COORDINATE.match(name)
    if match:
        index = int(match.group(1)) - 1
        if not 0 <= index < dim:
            raise ExpressionError(f'Preset "{name}" needs dimension at least {index + 1}, got {dim}')
        return coordinate(index, dim)
    match = _HERMITE.match(name)
    if match:
        return _hermite(int(match.group(1)), dim)
    raise ExpressionError(f'Unknown preset "{name}"; known presets: {", ".join(preset_names())}')
