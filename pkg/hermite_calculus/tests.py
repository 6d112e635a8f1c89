import json
import math
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase

from core.exceptions import DimensionMismatchError, MissingGradientError
from gaussian_measure.expressions import parse_field
from gaussian_measure.fields import Constant, HermiteAtom, Polynomial, truncate
from gaussian_measure.integrators import GaussianIntegrator
from .operators import delta_gradient, divergence, expand, expansion_table, ibp_check, laplacian, partial
from .series import HermiteSeries, hermite, hermite_to_monomial, monomial_to_hermite, multi_indices


def recurrence(k, x):
    h_prev, h = np.ones_like(x), x
    if k == 0:
        return h_prev
    for j in range(1, k):
        h_prev, h = h, x * h - j * h_prev
    return h


class HermiteBasisTests(SimpleTestCase):
    def test_low_degrees(self):
        self.assertEqual(hermite(1).to_polynomial().coefficients, {(1,): 1.0})
        self.assertEqual(hermite(2).to_polynomial().coefficients, {(0,): -1.0, (2,): 1.0})
        self.assertEqual(hermite(3).to_polynomial().coefficients, {(1,): -3.0, (3,): 1.0})

    def test_divergence_of_one_is_a_basis_element(self):
        for k in range(8):
            self.assertEqual(hermite(k).as_dict(), {(k,): 1.0})

    def test_agrees_with_recurrence(self):
        x = np.linspace(-4, 4, 17)
        for k in range(10):
            np.testing.assert_allclose(hermite(k)(x), recurrence(k, x), rtol=1e-12, atol=1e-9)

    def test_orthogonality(self):
        integrator = GaussianIntegrator.quadrature(order=16)
        for a in range(7):
            for b in range(7):
                h = HermiteAtom.from_terms({(a,): 1.0}) * HermiteAtom.from_terms({(b,): 1.0})
                expected = math.factorial(a) if a == b else 0.0
                self.assertAlmostEqual(integrator.expect(h).value, expected, delta=1e-9)

    def test_bivariate_orthogonality(self):
        integrator = GaussianIntegrator.quadrature(dim=2, order=10)
        indices = list(multi_indices(2, 4))
        for a in indices:
            for b in indices:
                h = HermiteAtom.from_terms({a: 1.0}, 2) * HermiteAtom.from_terms({b: 1.0}, 2)
                expected = math.factorial(a[0]) * math.factorial(a[1]) if a == b else 0.0
                self.assertAlmostEqual(integrator.expect(h).value, expected, delta=1e-9)

    def test_multi_indices_count(self):
        self.assertEqual(len(list(multi_indices(1, 5))), 6)
        self.assertEqual(len(list(multi_indices(3, 2))), 10)

    def test_basis_change_is_invertible(self):
        p = Polynomial.from_terms({(0, 0): 2.0, (3, 1): -1.5, (2, 2): 0.25}, 2)
        back = hermite_to_monomial(monomial_to_hermite(p))
        self.assertEqual(back.coefficients.keys(), p.coefficients.keys())
        for index, value in p.coefficients.items():
            self.assertAlmostEqual(back.coefficients[index], value, places=12)

    def test_x_squared_in_hermite_basis(self):
        series = monomial_to_hermite(parse_field("x^2"))
        self.assertEqual(series.as_dict(), {(0,): 1.0, (2,): 1.0})


class OperatorTests(SimpleTestCase):
    def test_partial_transports_coefficients(self):
        self.assertEqual(partial(0, hermite(3)).as_dict(), {(2,): 3.0})
        self.assertEqual(partial(0, HermiteSeries.from_dict({(0,): 5.0})).as_dict(), {})
        self.assertEqual(partial(0, hermite((1, 1))).as_dict(), {(0, 1): 1.0})

    def test_partial_of_basis(self):
        for alpha in [(2, 1), (0, 3), (4, 2)]:
            for axis in range(2):
                expected = hermite(tuple(a - 1 if j == axis else a for j, a in enumerate(alpha))) if alpha[axis] else None
                got = partial(axis, hermite(alpha))
                if expected is None:
                    self.assertEqual(got.as_dict(), {})
                else:
                    self.assertEqual(got.as_dict(), expected.scaled(alpha[axis]).as_dict())

    def test_partial_agrees_with_pointwise_derivative(self):
        series = HermiteSeries.from_dict({(4,): 0.5, (1,): 2.0, (0,): 1.0})
        x = np.linspace(-2, 2, 9)
        step = 1e-5
        numeric = (series(x + step) - series(x - step)) / (2 * step)
        np.testing.assert_allclose(partial(0, series)(x), numeric, rtol=1e-6, atol=1e-6)

    def test_divergence_examples(self):
        x = np.linspace(-3, 3, 7)
        np.testing.assert_allclose(divergence(0, Constant(1.0))(x), x)
        np.testing.assert_allclose(divergence(0, parse_field("x"))(x), x ** 2 - 1)
        np.testing.assert_allclose(divergence(0, parse_field("tanh(x)"))(x), x * np.tanh(x) - 1 / np.cosh(x) ** 2)
        self.assertEqual(divergence(0, hermite(2)).as_dict(), {(3,): 1.0})

    def test_divergence_needs_gradient(self):
        with self.assertRaises(MissingGradientError):
            divergence(0, truncate(parse_field("x"), 2.0))

    def test_axis_out_of_range(self):
        with self.assertRaises(DimensionMismatchError):
            partial(1, hermite(2))

    def test_delta_gradient_and_laplacian(self):
        x = np.linspace(-2, 2, 5)
        g = parse_field("x^2")
        np.testing.assert_allclose(delta_gradient(g)(x), 2 * x ** 2 - 2)
        np.testing.assert_allclose(laplacian(g)(x), np.full_like(x, 2.0))
        g2 = parse_field("|x|^2", 2)
        points = np.array([[0.5, -1.0], [2.0, 0.0]])
        np.testing.assert_allclose(delta_gradient(g2)(points), 2 * (points ** 2).sum(axis=1) - 4)


class IntegrationByPartsTests(SimpleTestCase):
    def test_examples(self):
        integrator = GaussianIntegrator.default()
        report = ibp_check(parse_field("x"), parse_field("x^2"), 0, integrator)
        self.assertAlmostEqual(report.lhs, 2.0, places=12)
        self.assertAlmostEqual(report.rhs, 2.0, places=12)
        self.assertEqual(ibp_check(Constant(1.0), Constant(1.0), 0, integrator).residual, 0.0)
        report = ibp_check(parse_field("H2"), parse_field("H3"), 0, integrator)
        self.assertAlmostEqual(report.lhs, 6.0, places=10)
        self.assertAlmostEqual(report.rhs, 6.0, places=10)

    def test_all_hermite_pairs_up_to_degree_five(self):
        integrator = GaussianIntegrator.default()
        for a in range(6):
            for b in range(6):
                report = ibp_check(parse_field(f"H{a}"), parse_field(f"H{b}"), 0, integrator)
                self.assertLess(report.residual, 1e-8, (a, b))

    def test_smooth_non_polynomial_pairs(self):
        integrator = GaussianIntegrator.default()
        for f, g in [("tanh(x)", "x^3"), ("softplus(x)", "tanh(x)"), ("exp(x)", "H2")]:
            self.assertLess(ibp_check(parse_field(f), parse_field(g), 0, integrator).residual, 1e-8, (f, g))

    def test_two_dimensions(self):
        integrator = GaussianIntegrator.quadrature(dim=2, order=16)
        f, g = parse_field("x1*x2", 2), parse_field("|x|^2", 2)
        for axis in range(2):
            self.assertLess(ibp_check(f, g, axis, integrator).residual, 1e-10)


class ExpansionTests(SimpleTestCase):
    def test_x_squared(self):
        result = expand(parse_field("x^2"), 4)
        self.assertAlmostEqual(result.series.coefficient(0), 1.0, places=12)
        self.assertAlmostEqual(result.series.coefficient(2), 1.0, places=12)
        for k in (1, 3, 4):
            self.assertAlmostEqual(result.series.coefficient(k), 0.0, places=12)
        self.assertAlmostEqual(result.error, 0.0, places=10)

    def test_basis_element_is_recovered(self):
        for d in (3, 5):
            result = expand(parse_field("H3"), d)
            self.assertAlmostEqual(result.series.coefficient(3), 1.0, places=12)
            self.assertAlmostEqual(result.parseval, 6.0, places=10)
            self.assertAlmostEqual(result.second_moment, 6.0, places=10)

    def test_parseval_equality_for_polynomials(self):
        for name in ["x^3", "2x+1", "x^4"]:
            result = expand(parse_field(name), 4)
            self.assertAlmostEqual(result.parseval, result.second_moment, delta=1e-8)

    def test_absolute_value_errors_decrease(self):
        table = expansion_table(parse_field("|x|"), 6, GaussianIntegrator.panel())
        errors = table["error"].tolist()
        self.assertEqual(len(errors), 7)
        for before, after in zip(errors, errors[1:]):
            self.assertLessEqual(after, before + 1e-12)
        self.assertLess(errors[-1], errors[0] / 5)
        self.assertTrue((table["parseval"] <= table["second_moment"] + 1e-12).all())
        c2 = 0.5 * math.sqrt(2 / math.pi)
        self.assertAlmostEqual(expand(parse_field("|x|"), 2, GaussianIntegrator.panel()).series.coefficient(2), c2, places=8)

    def test_no_second_moment(self):
        result = expand(parse_field("exp(x^2)"), 2, GaussianIntegrator.default())
        self.assertFalse(result.finite)
        self.assertEqual(result.verdict, "not in L^2(gamma)")

    def test_two_dimensional_polynomial(self):
        f = parse_field("x1*x2", 2)
        result = expand(f, 2)
        for alpha, value in result.series.as_dict().items():
            self.assertAlmostEqual(value, 1.0 if alpha == (1, 1) else 0.0, places=12)


class CommandTests(SimpleTestCase):
    def test_hermite_command(self):
        out = StringIO()
        call_command("hermite", "--alpha", "3", stdout=out)
        payload = json.loads(out.getvalue())
        self.assertEqual(payload["polynomial"], [{"power": [1], "value": -3.0}, {"power": [3], "value": 1.0}])
        self.assertEqual(payload["norm_squared"], 6)
        self.assertEqual(payload["partials"], [[{"alpha": [2], "value": 3.0}]])

    def test_hermite_command_with_expansion(self):
        out = StringIO()
        call_command("hermite", "--alpha", "1,1", "--f", "x1*x2", "--degree", "2", stdout=out)
        payload = json.loads(out.getvalue())
        self.assertEqual(payload["alpha"], [1, 1])
        self.assertEqual(len(payload["expansion"]), 3)

    def test_expand_command_csv(self):
        out = StringIO()
        call_command("expand", "--f", "x^2", "--degree", "3", "--format", "csv", stdout=out)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[0], "degree,error,parseval,second_moment")
        self.assertEqual(len(lines), 5)
