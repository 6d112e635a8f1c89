"""
Name grammar for Young functions, shared by the CLI and config files.

    power:<a>   exp2   cosh2   gauss2
    <name>*     conjugate (closed form for the built-ins, numeric otherwise)
    sq:<name>   squared variant Phi(x^2)
    conj:<name> numeric conjugate of any Young function
"""
import logging
from functools import lru_cache

from core.exceptions import DomainError
from .young import conjugate, cosh2, custom, exp2, gauss2, numeric_conjugate, power, squared

logger = logging.getLogger(__name__)

BUILTINS = {
    "exp2": exp2,
    "cosh2": cosh2,
    "gauss2": gauss2,
}


@lru_cache(maxsize=64)
def young_function(name: str):
    """Resolve a Young function name such as "power:2", "exp2*" or "sq:cosh2"."""
    name = name.strip()
    if not name:
        raise DomainError("Empty Young function name")
    if name.startswith("sq:"):
        return squared(young_function(name[3:]))
    if name.startswith("conj:"):
        return numeric_conjugate(young_function(name[5:]))
    if name.endswith("*"):
        return conjugate(young_function(name[:-1]))
    if name.startswith("power:"):
        try:
            alpha = float(name[6:])
        except ValueError:
            raise DomainError(f'Malformed power exponent in "{name}"')
        return power(alpha)
    if name in BUILTINS:
        return BUILTINS[name]()
    raise DomainError(
        f'Unknown Young function "{name}"; use power:<a>, exp2, cosh2, gauss2, a trailing "*", sq:<name> or conj:<name>'
    )


def young_function_from_table(grid, phi_values, name="custom"):
    return custom(grid, phi_values, name=name)
