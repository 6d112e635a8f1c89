import json
import math
import shutil
import tempfile
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from scipy.optimize import brentq

from core.exceptions import DimensionMismatchError, DomainError, NonPositiveDensityError, NotCenteredError
from exponential_manifold.family import ExpFamily, cumulant_and_fisher
from exponential_manifold.portmanteau import gaussian_portmanteau
from gaussian_measure.expressions import parse_field
from gaussian_measure.fields import HermiteAtom
from gaussian_measure.integrators import GaussianIntegrator
from young_functions.young import cosh2, power
from .exact import (
    comparison_vectors,
    exact_chart,
    exact_fisher,
    exact_k1,
    exact_luxemburg,
    exact_model,
    exact_portmanteau,
    exact_relative_cumulant,
)
from .fixtures import generate_fixtures, load_fixtures, replay_exact, replay_fixture
from .space import FiniteSpace


class FiniteSpaceTests(SimpleTestCase):
    def test_weights_are_normalized(self):
        space = FiniteSpace.from_weights([1.0, 2.0, 1.0])
        np.testing.assert_allclose(space.weights, [0.25, 0.5, 0.25])
        self.assertEqual(math.fsum(space.weights.tolist()), 1.0)
        self.assertEqual(space.atoms, (0, 1, 2))

    def test_rejects_non_positive_weights(self):
        for weights in ([0.5, 0.0, 0.5], [1.0, -1.0], []):
            with self.assertRaises(NonPositiveDensityError):
                FiniteSpace.from_weights(weights)

    def test_vector_length(self):
        with self.assertRaises(DimensionMismatchError):
            FiniteSpace.uniform(3).expect([1.0, 2.0])

    def test_density_from_probabilities(self):
        space = FiniteSpace.uniform(4)
        density = space.density_from_probabilities([0.4, 0.3, 0.2, 0.1])
        np.testing.assert_allclose(density, [1.6, 1.2, 0.8, 0.4])
        self.assertAlmostEqual(space.expect(density), 1.0, places=15)

    def test_quantized_gaussian(self):
        integrator = GaussianIntegrator.quadrature(1, 16)
        space = FiniteSpace.from_gaussian_quadrature(integrator)
        self.assertEqual(space.size, 16)
        self.assertAlmostEqual(space.expect(space.evaluate(parse_field("x^2"))), 1.0, places=13)

    def test_interpolant_through_gauss_hermite_atoms(self):
        space = FiniteSpace.from_gaussian_quadrature(GaussianIntegrator.quadrature(1, 8))
        values = np.log([0.3, 2.0, 1.5, 0.7, 0.2, 4.0, 1.1, 0.9])
        f = space.interpolant(values)
        np.testing.assert_allclose(space.evaluate(f), values, atol=1e-12)
        self.assertEqual(f(np.array([[25.0]])).tolist(), [0.0])

    def test_interpolant_needs_atom_coordinates(self):
        with self.assertRaises(DimensionMismatchError):
            FiniteSpace.uniform(3).interpolant([1.0, 2.0, 3.0])


class ExactLuxemburgTests(SimpleTestCase):
    def test_zero_vector(self):
        self.assertEqual(exact_luxemburg([0.0, 0.0], cosh2(), FiniteSpace.uniform(2)), 0.0)

    def test_constant_vector_power_two(self):
        value = exact_luxemburg([1.0, 1.0], power(2.0), FiniteSpace.uniform(2))
        self.assertAlmostEqual(value, 1.0 / math.sqrt(2.0), places=14)

    def test_two_point_cosh2(self):
        value = exact_luxemburg([2.0, 0.0], cosh2(), FiniteSpace.uniform(2))
        root = brentq(lambda rho: 0.5 * math.cosh(2.0 / rho) - 0.5 - 1.0, 0.5, 5.0, xtol=1e-15)
        self.assertAlmostEqual(value, root, delta=1e-12)
        self.assertAlmostEqual(value, 2.0 / math.acosh(3.0), delta=1e-12)

    def test_homogeneity(self):
        space = FiniteSpace.from_weights([0.1, 0.2, 0.3, 0.4])
        f = np.array([1.0, -2.0, 0.5, 3.0])
        for phi in (cosh2(), power(1.5)):
            self.assertAlmostEqual(exact_luxemburg(3 * f, phi, space), 3 * exact_luxemburg(f, phi, space), delta=1e-12)


class ExactModelTests(SimpleTestCase):
    def test_reference_point(self):
        space = FiniteSpace.from_weights([0.2, 0.3, 0.5])
        model = exact_model(space, [0.0, 0.0, 0.0])
        self.assertAlmostEqual(model.k1, 0.0, places=15)
        np.testing.assert_allclose(model.density, 1.0)

    def test_two_point_cumulant(self):
        self.assertAlmostEqual(exact_k1(FiniteSpace.uniform(2), [1.0, -1.0]), math.log(math.cosh(1.0)), places=14)
        self.assertAlmostEqual(exact_k1(FiniteSpace.uniform(2), [1.0, -1.0]), 0.43378, places=5)

    def test_chart_inverts_density(self):
        space = FiniteSpace.from_weights([0.2, 0.3, 0.5])
        u = np.array([1.0, 0.5, -0.7])
        model = exact_model(space, u)
        self.assertAlmostEqual(model.mass, 1.0, places=14)
        np.testing.assert_allclose(exact_chart(space, model.density), u, atol=1e-14)

    def test_uncentered(self):
        with self.assertRaises(NotCenteredError):
            exact_model(FiniteSpace.uniform(2), [1.0, 0.0])

    def test_relative_cumulant_chain(self):
        space = FiniteSpace.from_weights([0.1, 0.2, 0.3, 0.4])
        u_p = np.array([1.0, 0.5, 0.0, -0.5])
        u = np.array([0.3, -1.0, 2.0, 0.1])
        p_space = space.reweighted(np.exp(u_p - exact_k1(space, u_p)))
        u = u - p_space.expect(u)
        shift = space.expect(u)
        direct = exact_k1(space, u_p + u - shift)
        chained = exact_k1(space, u_p) + exact_relative_cumulant(space, u_p, u) - shift
        self.assertAlmostEqual(direct, chained, places=13)


class ExactFisherTests(SimpleTestCase):
    def test_variance_at_origin(self):
        fisher = exact_fisher(FiniteSpace.uniform(2), [[1.0, -1.0]], [0.0])
        self.assertAlmostEqual(fisher.covariance[0, 0], 1.0, places=15)

    def test_two_routes(self):
        rng = np.random.default_rng(3)
        space = FiniteSpace.from_weights(rng.uniform(0.5, 1.5, 7))
        stats = []
        for _ in range(3):
            u = rng.standard_normal(7)
            stats.append(u - space.expect(u))
        fisher = exact_fisher(space, stats, [0.3, -0.2, 0.5])
        self.assertLess(fisher.max_difference, 1e-12)
        self.assertGreater(np.min(np.linalg.eigvalsh(fisher.covariance)), 0.0)

    def test_agrees_with_pipeline_on_quantized_gaussian(self):
        integrator = GaussianIntegrator.quadrature(1, 32)
        space = FiniteSpace.from_gaussian_quadrature(integrator)
        stats = [parse_field("x"), HermiteAtom.from_terms({(2,): 1.0 / math.sqrt(2.0)})]
        theta = [0.2, 0.1]
        exact = exact_fisher(space, [space.evaluate(u) for u in stats], theta)
        report = cumulant_and_fisher(ExpFamily.create(stats, integrator), theta, integrator)
        np.testing.assert_allclose(report.covariance, exact.covariance, atol=1e-10)
        self.assertAlmostEqual(report.kappa, exact.kappa, delta=1e-12)


class ExactPortmanteauTests(SimpleTestCase):
    def test_equal_densities(self):
        space = FiniteSpace.from_weights([0.2, 0.3, 0.5])
        report = exact_portmanteau(space, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
        self.assertEqual((report.lower, report.upper), (1.0, 1.0))
        np.testing.assert_allclose(report.log_partition, 0.0, atol=1e-15)

    def test_three_point_arc(self):
        space = FiniteSpace.uniform(3)
        p = space.density_from_probabilities([0.5, 0.3, 0.2])
        q = space.density_from_probabilities([0.2, 0.3, 0.5])
        report = exact_portmanteau(space, p, q)
        self.assertEqual(len(report.arc_grid), 11)
        self.assertTrue(report.arc_connected)
        self.assertTrue(report.log_convex)
        self.assertAlmostEqual(report.log_partition[0], 0.0, places=14)
        self.assertAlmostEqual(report.log_partition[-1], 0.0, places=14)
        self.assertTrue(report.all_conditions)

    def test_rejects_zero_atom(self):
        space = FiniteSpace.uniform(2)
        with self.assertRaises(NonPositiveDensityError):
            exact_portmanteau(space, [1.0, 1.0], [2.0, 0.0])

    def test_quadrature_route_agrees_with_exact(self):
        space = FiniteSpace.from_gaussian_quadrature(GaussianIntegrator.quadrature(1, 6))
        p = space.density_from_probabilities([0.1, 0.2, 0.25, 0.2, 0.15, 0.1])
        q = space.density_from_probabilities([0.3, 0.1, 0.1, 0.2, 0.1, 0.2])
        exact = exact_portmanteau(space, p, q, seed=3)
        vectors = [space.interpolant(v) for v in comparison_vectors(space.size, 3)]
        pipeline = gaussian_portmanteau(
            space.interpolant(np.log(p)), space.interpolant(np.log(q)), vectors, GaussianIntegrator.quadrature(1, 6)
        )
        self.assertTrue(pipeline.all_conditions)
        self.assertAlmostEqual(pipeline.lower, exact.lower, delta=1e-10)
        self.assertAlmostEqual(pipeline.upper, exact.upper, delta=1e-10)
        np.testing.assert_allclose(pipeline.log_partition, exact.log_partition, atol=1e-12)

    def test_quadrature_route_rejects_unnormalized_density(self):
        space = FiniteSpace.from_gaussian_quadrature(GaussianIntegrator.quadrature(1, 4))
        log_p = space.interpolant(np.log(np.full(4, 2.0)))
        with self.assertRaises(DomainError):
            gaussian_portmanteau(log_p, log_p, [space.interpolant([1.0, 0.0, 0.0, 0.0])],
                                 GaussianIntegrator.quadrature(1, 4))


class TiltedFiberTests(SimpleTestCase):
    """gamma and p gamma with p = exp(0.3 x - 0.045) carry the same Orlicz space."""

    def setUp(self):
        self.space = FiniteSpace.from_gaussian_quadrature(GaussianIntegrator.quadrature(1, 32))
        self.density = np.exp(0.3 * self.space.points[:, 0] - 0.045)

    def test_portmanteau_conditions(self):
        report = exact_portmanteau(self.space, np.ones(self.space.size), self.density)
        self.assertTrue(report.all_conditions)
        self.assertTrue(0.5 < report.lower <= 1.0 <= report.upper < 2.0)

    def test_norm_ratios_of_fields(self):
        fiber = self.space.reweighted(self.density)
        for name in ("x", "2x+1", "x^2", "tanh(x)"):
            with self.subTest(f=name):
                values = self.space.evaluate(parse_field(name))
                ratio = exact_luxemburg(values, cosh2(), fiber) / exact_luxemburg(values, cosh2(), self.space)
                self.assertTrue(0.5 < ratio < 2.0)


class FixtureTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.directory = tempfile.mkdtemp()
        out = StringIO()
        call_command("gen_fixtures", "--output", cls.directory, stdout=out)
        cls.summary = json.loads(out.getvalue())
        cls.fixtures = load_fixtures(cls.directory)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.directory, ignore_errors=True)
        super().tearDownClass()

    def test_counts(self):
        self.assertEqual(self.summary["count"], 50)
        self.assertEqual(self.summary["operations"], {"k1": 20, "luxemburg": 20, "portmanteau": 10})
        self.assertEqual(len(self.fixtures), 50)

    def test_fixture_format(self):
        for fixture in self.fixtures:
            self.assertEqual(set(fixture), {"name", "operation", "space", "inputs", "expected", "tolerance"})
            self.assertEqual(fixture["tolerance"], 1e-10)

    def test_pipeline_matches_oracle(self):
        for fixture in self.fixtures:
            with self.subTest(fixture=fixture["name"]):
                value = replay_fixture(fixture)
                if fixture["operation"] == "portmanteau":
                    self.assertTrue(value["all_conditions"])
                    self.assertAlmostEqual(value["lower"], fixture["expected"]["lower"], delta=fixture["tolerance"])
                    self.assertAlmostEqual(value["upper"], fixture["expected"]["upper"], delta=fixture["tolerance"])
                    np.testing.assert_allclose(value["log_Z"], fixture["expected"]["log_Z"], atol=fixture["tolerance"])
                else:
                    self.assertAlmostEqual(value, fixture["expected"], delta=fixture["tolerance"])

    def test_oracle_reproducible_from_document(self):
        for fixture in self.fixtures:
            with self.subTest(fixture=fixture["name"]):
                value = replay_exact(fixture)
                if fixture["operation"] == "portmanteau":
                    self.assertAlmostEqual(value["lower"], fixture["expected"]["lower"], places=12)
                    self.assertAlmostEqual(value["upper"], fixture["expected"]["upper"], places=12)
                else:
                    self.assertAlmostEqual(value, fixture["expected"], places=13)

    def test_portmanteau_fixtures_live_on_quantized_gaussians(self):
        for fixture in self.fixtures:
            if fixture["operation"] == "portmanteau":
                self.assertEqual(fixture["space"]["kind"], "gauss-hermite")
                self.assertEqual(fixture["space"]["order"], len(fixture["inputs"]["p"]))

    def test_portmanteau_instances(self):
        for fixture in self.fixtures:
            if fixture["operation"] != "portmanteau":
                continue
            self.assertTrue(fixture["expected"]["all_conditions"])
            self.assertTrue(fixture["expected"]["log_convex"])
            self.assertLessEqual(fixture["expected"]["lower"], 1.0)
            self.assertGreaterEqual(fixture["expected"]["upper"], 1.0)

    def test_deterministic(self):
        first = json.dumps(generate_fixtures(seed=7), sort_keys=True)
        second = json.dumps(generate_fixtures(seed=7), sort_keys=True)
        self.assertEqual(first, second)
