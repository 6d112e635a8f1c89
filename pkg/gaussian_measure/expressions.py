"""
JSON expression grammar for random fields.

A node is either a preset name / number (string or number) or an object with
an "op" key:

    {"op": "const", "value": 2.5}
    {"op": "coord", "index": 0}
    {"op": "poly", "terms": [[[2], 1.0], [[0], -1.0]]}
    {"op": "hermite", "terms": [[[3], 1.0]]}
    {"op": "sqnorm"}
    {"op": "affine", "terms": [[2.0, <node>], ...], "offset": 1.0}
    {"op": "product", "factors": [<node>, ...]}
    {"op": "power", "base": <node>, "exponent": 3}
    {"op": "map", "name": "tanh", "arg": <node>}
    {"op": "where", "lhs": <node>, "rhs": <node>, "if_true": <node>, "if_false": <node>}
    {"op": "min" | "max", "args": [<node>, <node>]}
    {"op": "truncate", "arg": <node>, "radius": 5}
    {"op": "translate", "arg": <node>, "shift": [0.5]}
    {"op": "bump", "center": [0.0], "scale": 1.0}
    {"op": "preset", "name": "H2/4"}
"""
import json
import logging
from numbers import Real

from core.exceptions import DimensionMismatchError, ExpressionError, OrliczError
from .fields import (
    Affine,
    Compose,
    Constant,
    Coordinate,
    HermiteAtom,
    Polynomial,
    Power,
    Product,
    RandomField,
    Where,
    bump,
    field_max,
    field_min,
    translate,
    truncate,
)
from .presets import resolve_preset

logger = logging.getLogger(__name__)


def _require(node: dict, key: str):
    try:
        return node[key]
    except KeyError:
        raise ExpressionError(f'Expression node "{node.get("op")}" is missing the "{key}" key')


def _terms(node: dict, dim: int):
    terms = []
    for entry in _require(node, "terms"):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ExpressionError(f"Malformed term {entry!r}: expected [multi_index, coefficient]")
        index, coeff = entry
        index = [index] if isinstance(index, int) else list(index)
        if len(index) != dim:
            raise DimensionMismatchError(f"Multi-index {index} does not match dimension {dim}")
        terms.append((tuple(index), float(coeff)))
    return terms


def field_from_json(node, dim: int = 1) -> RandomField:
    """Build a RandomField of dimension dim from a parsed JSON node."""
    if isinstance(node, bool):
        raise ExpressionError(f"Boolean {node!r} is not a field")
    if isinstance(node, Real):
        return Constant(float(node), dim)
    if isinstance(node, str):
        return parse_field(node, dim)
    if not isinstance(node, dict):
        raise ExpressionError(f"Cannot interpret {node!r} as a field expression")

    op = _require(node, "op")
    try:
        if op == "const":
            return Constant(float(_require(node, "value")), dim)
        if op == "coord":
            return Coordinate(int(_require(node, "index")), dim)
        if op == "poly":
            return Polynomial.from_terms(_terms(node, dim), dim)
        if op == "hermite":
            return HermiteAtom.from_terms(_terms(node, dim), dim)
        if op == "sqnorm":
            return Polynomial.squared_norm(dim)
        if op == "affine":
            terms = tuple((float(w), field_from_json(sub, dim)) for w, sub in _require(node, "terms"))
            return Affine(terms, float(node.get("offset", 0.0)), dim)
        if op == "product":
            return Product(tuple(field_from_json(sub, dim) for sub in _require(node, "factors")))
        if op == "power":
            return Power(field_from_json(_require(node, "base"), dim), int(_require(node, "exponent")))
        if op == "map":
            return Compose(str(_require(node, "name")), field_from_json(_require(node, "arg"), dim))
        if op == "where":
            return Where(*(field_from_json(_require(node, key), dim) for key in ("lhs", "rhs", "if_true", "if_false")))
        if op in ("min", "max"):
            args = _require(node, "args")
            if len(args) != 2:
                raise ExpressionError(f'"{op}" takes exactly two arguments')
            f, g = (field_from_json(a, dim) for a in args)
            return field_min(f, g) if op == "min" else field_max(f, g)
        if op == "truncate":
            return truncate(field_from_json(_require(node, "arg"), dim), float(_require(node, "radius")))
        if op == "translate":
            shift = _require(node, "shift")
            shift = [shift] if isinstance(shift, Real) else shift
            return translate(field_from_json(_require(node, "arg"), dim), shift)
        if op == "bump":
            center = node.get("center", [0.0] * dim)
            center = [center] if isinstance(center, Real) else center
            if len(center) != dim:
                raise DimensionMismatchError(f"Bump center {center} does not match dimension {dim}")
            return bump(center, float(node.get("scale", 1.0)))
        if op == "preset":
            return resolve_preset(str(_require(node, "name")), dim)
    except OrliczError:
        raise
    except (TypeError, ValueError) as exc:
        raise ExpressionError(f'Malformed "{op}" node: {exc}')
    raise ExpressionError(f'Unknown expression op "{op}"')


def parse_field(text: str, dim: int = 1) -> RandomField:
    """Accept a preset name, a number, or an expression JSON document."""
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        try:
            node = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ExpressionError(f"Malformed expression JSON: {exc.msg} at position {exc.pos}")
        return field_from_json(node, dim)
    try:
        return Constant(float(text), dim)
    except ValueError:
        return resolve_preset(text, dim)
