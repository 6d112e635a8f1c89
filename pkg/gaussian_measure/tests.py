import json
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DimensionMismatchError, ExpressionError, MissingGradientError, NegativeWeightError
from .expressions import field_from_json, parse_field
from .fields import (
    Compose,
    Constant,
    HermiteAtom,
    Polynomial,
    bump,
    coordinate,
    field_max,
    field_min,
    translate,
    truncate,
)
from .integrators import GaussianIntegrator, expect, expect_under
from .serializers import ExpressionField, IntegratorSerializer


def double_factorial(n):
    return math.prod(range(n, 0, -2)) if n > 0 else 1


class FieldEvaluationTests(SimpleTestCase):
    def test_scalar_and_batch_points(self):
        f = parse_field("x^2")
        self.assertEqual(f(3.0).tolist(), [9.0])
        self.assertEqual(f([1.0, 2.0]).tolist(), [1.0, 4.0])

    def test_dimension_mismatch(self):
        f = parse_field("|x|^2", 2)
        with self.assertRaises(DimensionMismatchError):
            f(np.zeros((3, 3)))
        with self.assertRaises(DimensionMismatchError):
            parse_field("x", 1) + parse_field("x1", 2)

    def test_hermite_atom_matches_recurrence(self):
        x = np.linspace(-3, 3, 13)
        h = [np.ones_like(x), x]
        for k in range(1, 6):
            h.append(x * h[k] - k * h[k - 1])
        for k in range(7):
            np.testing.assert_allclose(parse_field(f"H{k}")(x), h[k], atol=1e-10)

    def test_gradients_agree_with_central_differences(self):
        points = np.array([[-1.3], [-0.2], [0.4], [1.7]])
        step = 1e-5
        for name in ["x^3", "H4", "tanh(x)", "softplus(x)", "H2/4", "2x+1", "exp(x)"]:
            f = parse_field(name)
            exact = f.partial(0)(points)
            numeric = (f(points + step) - f(points - step)) / (2 * step)
            np.testing.assert_allclose(exact, numeric, rtol=1e-6, atol=1e-6, err_msg=name)

    def test_product_rule_in_two_dimensions(self):
        f = parse_field("x1*x2", 2) * parse_field("tanh(x)", 2)
        point = np.array([[0.3, -1.1]])
        step = 1e-5
        for axis in range(2):
            e = np.zeros((1, 2))
            e[0, axis] = step
            numeric = (f(point + e) - f(point - e)) / (2 * step)
            np.testing.assert_allclose(f.partial(axis)(point), numeric, rtol=1e-6)

    def test_truncation_has_no_gradient(self):
        f = truncate(parse_field("x^2"), 5.0)
        self.assertEqual(f([4.0, 6.0]).tolist(), [16.0, 0.0])
        with self.assertRaises(MissingGradientError):
            f.partial(0)

    def test_translation(self):
        f = translate(parse_field("x^2"), [1.0])
        self.assertEqual(f(3.0).tolist(), [4.0])
        self.assertEqual(f.partial(0)(3.0).tolist(), [4.0])

    def test_min_max(self):
        f, g = coordinate(), Constant(0.5)
        self.assertEqual(field_min(f, g)([0.0, 1.0]).tolist(), [0.0, 0.5])
        self.assertEqual(field_max(f, g)([0.0, 1.0]).tolist(), [0.5, 1.0])
        self.assertEqual(field_max(f, g).partial(0)([0.0, 1.0]).tolist(), [0.0, 1.0])

    def test_min_max_describe(self):
        f, g = coordinate(), Constant(0.5)
        self.assertEqual(field_min(f, g).describe(), "where(x<=0.5, x, 0.5)")
        self.assertEqual(field_max(f, g).describe(), "where(x<=0.5, 0.5, x)")
        self.assertIn("where(", field_min(f, g).partial(0).describe())

    def test_bump_support(self):
        b = bump([0.5], 0.5)
        self.assertEqual(b([0.5]).tolist(), [1.0])
        self.assertEqual(b([-0.1, 1.1]).tolist(), [0.0, 0.0])

    def test_polynomial_divergence(self):
        one = Polynomial.constant(1.0)
        self.assertEqual(one.divergence_polynomial(0).coefficients, {(1,): 1.0})
        x = one.divergence_polynomial(0)
        self.assertEqual(x.divergence_polynomial(0).coefficients, {(0,): -1.0, (2,): 1.0})


class ExpressionGrammarTests(SimpleTestCase):
    def test_json_round_trip(self):
        node = {
            "op": "affine",
            "terms": [[2.0, {"op": "map", "name": "tanh", "arg": "x"}], [1.0, {"op": "hermite", "terms": [[[2], 0.5]]}]],
            "offset": 1.0,
        }
        f = field_from_json(node)
        g = field_from_json(json.loads(json.dumps(f.to_json())))
        x = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(f(x), 2 * np.tanh(x) + 0.5 * (x ** 2 - 1) + 1)
        np.testing.assert_allclose(f(x), g(x))

    def test_numbers_and_json_strings(self):
        self.assertEqual(parse_field("2.5")(0.0).tolist(), [2.5])
        f = parse_field('{"op": "truncate", "arg": "x^2", "radius": 5}')
        self.assertEqual(f([1.0, 6.0]).tolist(), [1.0, 0.0])

    def test_unknown_preset_message(self):
        with self.assertRaisesMessage(ExpressionError, 'Unknown preset "cosine"'):
            parse_field("cosine")

    def test_malformed_json_message(self):
        with self.assertRaisesMessage(ExpressionError, "Malformed expression JSON"):
            parse_field('{"op": "coord", ')

    def test_unknown_op_and_map(self):
        with self.assertRaises(ExpressionError):
            field_from_json({"op": "integral"})
        with self.assertRaises(ExpressionError):
            field_from_json({"op": "map", "name": "gamma", "arg": "x"})

    def test_coordinate_out_of_range(self):
        with self.assertRaises(ExpressionError):
            parse_field("x3", 2)

    def test_expression_serializer_field(self):
        field = ExpressionField(dim=1)
        self.assertIsInstance(field.to_internal_value("H3"), HermiteAtom)
        with self.assertRaises(Exception):
            field.to_internal_value("nope")


class QuadratureTests(SimpleTestCase):
    def test_gaussian_moments_are_exact(self):
        integrator = GaussianIntegrator.quadrature(order=10)
        for k in range(1, 10):
            estimate = expect(integrator, parse_field(f'{{"op": "poly", "terms": [[[{2 * k}], 1.0]]}}'))
            self.assertAlmostEqual(estimate.value / double_factorial(2 * k - 1), 1.0, delta=1e-10)

    def test_second_and_fourth_moment(self):
        integrator = GaussianIntegrator.default()
        self.assertAlmostEqual(expect(integrator, parse_field("x^2")).value, 1.0, places=12)
        self.assertAlmostEqual(expect(integrator, parse_field("x^4")).value, 3.0, places=11)

    def test_exp_x_squared_diverges(self):
        for integrator in (GaussianIntegrator.quadrature(), GaussianIntegrator.panel()):
            estimate = expect(integrator, parse_field("exp(x^2)"))
            self.assertTrue(estimate.diverged)
            self.assertEqual(estimate.to_verdict(), {"diverged": True})

    def test_subcritical_mgf_is_finite(self):
        integrator = GaussianIntegrator.panel()
        f = Compose("exp", parse_field("x^2") * 0.25)
        self.assertAlmostEqual(expect(integrator, f).value, math.sqrt(2.0), places=8)

    def test_linearity(self):
        integrator = GaussianIntegrator.quadrature(order=32)
        f, g = parse_field("tanh(x)") + parse_field("x^2"), parse_field("H3")
        lhs = expect(integrator, 2.0 * f - 3.0 * g).value
        rhs = 2.0 * expect(integrator, f).value - 3.0 * expect(integrator, g).value
        self.assertAlmostEqual(lhs, rhs, places=12)

    def test_two_dimensional_tensor_rule(self):
        integrator = GaussianIntegrator.quadrature(dim=2, order=16)
        self.assertAlmostEqual(expect(integrator, parse_field("|x|^2", 2)).value, 2.0, places=12)
        self.assertAlmostEqual(expect(integrator, parse_field("x1*x2", 2)).value, 0.0, places=12)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            expect(GaussianIntegrator.quadrature(dim=2, order=8), parse_field("x"))

    def test_error_bound_reported(self):
        f, truth = parse_field("|x|"), math.sqrt(2 / math.pi)
        estimate = expect(GaussianIntegrator.quadrature(order=16), f)
        coarse = expect(GaussianIntegrator.quadrature(order=8), f)
        # the kink at 0 keeps Gauss-Hermite slow: about 0.021 off at 16 nodes
        self.assertAlmostEqual(estimate.value, truth, delta=0.03)
        self.assertGreater(estimate.error_bound, 0.0)
        self.assertAlmostEqual(estimate.error_bound, abs(estimate.value - coarse.value), places=12)
        finer = expect(GaussianIntegrator.quadrature(order=32), f)
        self.assertLess(abs(finer.value - truth), abs(estimate.value - truth))

    def test_panel_handles_kinks(self):
        estimate = expect(GaussianIntegrator.panel(), parse_field("|x|"))
        self.assertAlmostEqual(estimate.value, math.sqrt(2 / math.pi), places=10)


class WeightedExpectationTests(SimpleTestCase):
    def test_normalization(self):
        integrator = GaussianIntegrator.default()
        self.assertAlmostEqual(expect_under(integrator, Constant(1.0), Constant(1.0)).value, 1.0, places=12)
        self.assertAlmostEqual(expect_under(integrator, parse_field("x^2"), Constant(1.0)).value, 1.0, places=12)

    def test_tilted_mean(self):
        theta = 0.5
        p = Compose("exp", coordinate() * theta - theta ** 2 / 2)
        estimate = expect_under(GaussianIntegrator.default(), coordinate(), p)
        self.assertAlmostEqual(estimate.value, 0.5, places=10)

    def test_negative_weight(self):
        with self.assertRaises(NegativeWeightError):
            expect_under(GaussianIntegrator.default(), Constant(1.0), coordinate())


class MonteCarloTests(SimpleTestCase):
    def test_second_moment_within_five_standard_errors(self):
        estimate = expect(GaussianIntegrator.monte_carlo(samples=1_000_000, seed=7), parse_field("x^2"))
        self.assertLess(abs(estimate.value - 1.0), 5 * estimate.error_bound)

    def test_reproducible_under_seed(self):
        a = expect(GaussianIntegrator.monte_carlo(dim=4, samples=10_000, seed=11), parse_field("|x|^2", 4))
        b = expect(GaussianIntegrator.monte_carlo(dim=4, samples=10_000, seed=11), parse_field("|x|^2", 4))
        self.assertEqual(a.value, b.value)

    def test_default_switches_backend(self):
        self.assertEqual(GaussianIntegrator.default(3).backend, "quadrature")
        self.assertEqual(GaussianIntegrator.default(4).backend, "monte_carlo")


class IntegratorSerializerTests(SimpleTestCase):
    def test_defaults(self):
        serializer = IntegratorSerializer(data={"n": 2})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        integrator = serializer.save()
        self.assertEqual(integrator.dim, 2)
        self.assertEqual(integrator.backend, "quadrature")
        self.assertEqual(integrator.order, 64)

    def test_rejects_unknown_backend(self):
        serializer = IntegratorSerializer(data={"n": 1, "backend": "sparse_grid"})
        self.assertFalse(serializer.is_valid())
