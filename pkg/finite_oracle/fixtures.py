"""
Oracle fixtures: exact finite-space values next to the inputs that produced them.

Each fixture is one JSON document

    {"name", "operation", "space", "inputs", "expected", "tolerance"}

where "space" is a quantized Gaussian (Gauss-Hermite nodes as atoms).
replay_fixture() recomputes the same quantity with the quadrature pipeline,
so the two can be compared at the fixture tolerance; portmanteau densities
and vectors enter it as Hermite interpolants of their atom values.
"""
import itertools
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import numpy as np

from core.conf import get_setting
from core.exceptions import DomainError
from exponential_manifold.model import k1
from exponential_manifold.portmanteau import gaussian_portmanteau
from gaussian_measure.expressions import field_from_json, parse_field
from gaussian_measure.fields import RandomField
from gaussian_measure.integrators import GaussianIntegrator
from orlicz_norms.norms import luxemburg_norm
from young_functions.registry import young_function
from .exact import comparison_vectors, exact_k1, exact_luxemburg, exact_portmanteau
from .space import FiniteSpace

logger = logging.getLogger(__name__)

FIXTURE_TOLERANCE = 1e-10
QUADRATURE_ORDERS = (16, 24, 32, 48, 64)

# (field, Young function): integrands that decay along the tail rays for every
# gauge met while bracketing, so the pipeline never reports a divergence the
# finite sum does not have.
LUXEMBURG_CASES = (
    [(f, f"power:{alpha:g}") for alpha in (1.5, 2.0, 3.0) for f in ("x", "2x+1", "tanh(x)", "H2/2")]
    + [(f, phi) for phi in ("cosh2", "exp2") for f in ("x", "2x+1", "tanh(x)")]
    + [("tanh(x)", "gauss2"), ("x", "power:4")]
)

# statistics as (a, b, c) in a x + b H2 + c tanh(x)
K1_CASES = (
    [(a, 0.0, 0.0) for a in (-1.0, -0.5, 0.3, 0.7, 1.2, 2.0)]
    + [(0.0, b, 0.0) for b in (-0.5, -0.2, 0.1, 0.2, 0.25)]
    + [(0.0, 0.0, c) for c in (0.5, 1.0, 2.0)]
    + [(0.5, 0.1, 0.0), (-0.3, 0.2, 0.0), (1.0, -0.25, 0.0)]
    + [(0.0, 0.2, 1.0), (0.0, 0.1, -2.0), (0.0, -0.3, 0.5)]
)

PORTMANTEAU_SIZES = (2, 3, 3, 4, 4, 5, 5, 6, 8, 10)


def _k1_statistic(a: float, b: float, c: float) -> RandomField:
    terms = {"x": a, "H2": b, "tanh(x)": c}
    parts = [[w, name] for name, w in terms.items() if w != 0.0]
    return field_from_json({"op": "affine", "terms": parts, "offset": 0.0}, 1)


def quantized_gaussian(order: int) -> FiniteSpace:
    return FiniteSpace.from_gaussian_quadrature(GaussianIntegrator.quadrature(1, order))


def _space_dict(space: FiniteSpace, order: int) -> dict:
    data = space.to_dict()
    data.update(kind="gauss-hermite", dim=1, order=order, points=space.points[:, 0].tolist())
    return data


def space_from_dict(data: dict) -> FiniteSpace:
    points = np.asarray(data["points"], dtype=float).reshape(-1, 1) if "points" in data else None
    return FiniteSpace.from_weights(data["weights"], points=points)


def luxemburg_fixtures(orders: Iterable[int]) -> List[dict]:
    fixtures = []
    for (name, phi_name), order in zip(LUXEMBURG_CASES, orders):
        space = quantized_gaussian(order)
        f = parse_field(name)
        values = space.evaluate(f)
        fixtures.append({
            "name": f"luxemburg {name} {phi_name} gh{order}",
            "operation": "luxemburg",
            "space": _space_dict(space, order),
            "inputs": {"f": f.to_json(), "phi": phi_name, "values": values.tolist()},
            "expected": exact_luxemburg(values, young_function(phi_name), space),
        })
    return fixtures


def k1_fixtures(orders: Iterable[int]) -> List[dict]:
    fixtures = []
    for (a, b, c), order in zip(K1_CASES, orders):
        space = quantized_gaussian(order)
        u = _k1_statistic(a, b, c)
        values = space.evaluate(u)
        fixtures.append({
            "name": f"k1 {u.describe()} gh{order}",
            "operation": "k1",
            "space": _space_dict(space, order),
            "inputs": {"u": u.to_json(), "values": values.tolist()},
            "expected": exact_k1(space, values),
        })
    return fixtures


def portmanteau_fixtures(seed: int) -> List[dict]:
    rng = np.random.default_rng(seed)
    fixtures = []
    for index, size in enumerate(PORTMANTEAU_SIZES):
        p = rng.dirichlet(np.ones(size))
        q = rng.dirichlet(np.ones(size))
        # keep every atom visibly positive
        p, q = (v + 0.01 for v in (p, q))
        p, q = p / p.sum(), q / q.sum()
        space = quantized_gaussian(size)
        report = exact_portmanteau(space, space.density_from_probabilities(p), space.density_from_probabilities(q),
                                   seed=seed + index)
        fixtures.append({
            "name": f"portmanteau {size} atoms #{index} gh{size}",
            "operation": "portmanteau",
            "space": _space_dict(space, size),
            "inputs": {"p": p.tolist(), "q": q.tolist(), "seed": seed + index},
            "expected": {
                "lower": report.lower,
                "upper": report.upper,
                "log_Z": report.log_partition,
                "log_convex": report.log_convex,
                "all_conditions": report.all_conditions,
            },
        })
    return fixtures


def generate_fixtures(seed: Optional[int] = None) -> List[dict]:
    """The 50 oracle fixtures, deterministic in seed."""
    seed = get_setting("SEED") if seed is None else seed
    fixtures = (
        luxemburg_fixtures(itertools.cycle(QUADRATURE_ORDERS))
        + k1_fixtures(itertools.cycle(QUADRATURE_ORDERS))
        + portmanteau_fixtures(seed)
    )
    for fixture in fixtures:
        fixture["tolerance"] = FIXTURE_TOLERANCE
    logger.info(f"Generated {len(fixtures)} oracle fixtures with seed {seed}")
    return fixtures


def write_fixtures(directory, seed: Optional[int] = None, fixtures: Optional[List[dict]] = None) -> List[Path]:
    fixtures = generate_fixtures(seed) if fixtures is None else fixtures
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for index, fixture in enumerate(fixtures):
        path = directory / f"{index:02d}_{fixture['operation']}.json"
        path.write_text(json.dumps(fixture, indent=2, sort_keys=True))
        paths.append(path)
    return paths


def load_fixtures(directory) -> List[dict]:
    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        raise DomainError(f"No fixtures found in {directory}")
    return [json.loads(path.read_text()) for path in paths]


def _replay_portmanteau(fixture: dict) -> dict:
    """Atom values become Hermite interpolants, so Z(t) and the norms are Gaussian quadratures."""
    order, inputs = fixture["space"]["order"], fixture["inputs"]
    space = quantized_gaussian(order)
    log_p, log_q = (
        space.interpolant(np.log(space.density_from_probabilities(inputs[name]))) for name in ("p", "q")
    )
    vectors = [space.interpolant(v) for v in comparison_vectors(space.size, inputs["seed"])]
    report = gaussian_portmanteau(log_p, log_q, vectors, GaussianIntegrator.quadrature(1, order))
    return {
        "lower": report.lower,
        "upper": report.upper,
        "log_Z": report.log_partition,
        "all_conditions": report.all_conditions,
    }


def replay_fixture(fixture: dict):
    """The pipeline's value for a fixture: a float, or a dict for portmanteau fixtures."""
    operation, inputs = fixture["operation"], fixture["inputs"]
    if operation == "portmanteau":
        return _replay_portmanteau(fixture)

    space = fixture["space"]
    integrator = GaussianIntegrator.quadrature(space["dim"], space["order"])
    if operation == "luxemburg":
        f = field_from_json(inputs["f"], space["dim"])
        return luxemburg_norm(f, young_function(inputs["phi"]), integrator).value
    if operation == "k1":
        return k1(field_from_json(inputs["u"], space["dim"]), integrator).value
    raise DomainError(f'Unknown fixture operation "{operation}"')


def replay_exact(fixture: dict):
    """Recompute the oracle value from the fixture document alone."""
    space = space_from_dict(fixture["space"])
    inputs = fixture["inputs"]
    if fixture["operation"] == "luxemburg":
        return exact_luxemburg(inputs["values"], young_function(inputs["phi"]), space)
    if fixture["operation"] == "k1":
        return exact_k1(space, inputs["values"])
    if fixture["operation"] == "portmanteau":
        p, q = (space.density_from_probabilities(inputs[name]) for name in ("p", "q"))
        report = exact_portmanteau(space, p, q, seed=inputs["seed"])
        return {"lower": report.lower, "upper": report.upper, "log_Z": report.log_partition}
    raise DomainError(f'Unknown fixture operation "{fixture["operation"]}"')


def summarize(fixtures: List[dict]) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for fixture in fixtures:
        counts[fixture["operation"]] = counts.get(fixture["operation"], 0) + 1
    return counts
