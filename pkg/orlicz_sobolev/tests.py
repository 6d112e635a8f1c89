import json
import math
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.exceptions import DimensionMismatchError, DomainError, MissingGradientError, UnboundedDerivativeError
from gaussian_measure.expressions import parse_field
from gaussian_measure.fields import Compose, Constant, Product, bump, coordinate, linear
from gaussian_measure.integrators import GaussianIntegrator
from orlicz_norms.norms import luxemburg_norm
from young_functions.young import cosh2
from .composition import (
    lipschitz_composition,
    lipschitz_increment_check,
    min_max_membership,
    neuron,
    neuron_membership,
)
from .sobolev import (
    NOT_MEMBER,
    bump_presets,
    continuity_probe,
    local_embedding_bound,
    sobolev_integrator,
    sobolev_membership,
    translation_increment_check,
    weak_derivative_check,
)

LUX_X_COSH2 = 1.0 / math.sqrt(2.0 * math.log(2.0))
LUX_ONE_SQ_COSH2 = 1.0 / math.sqrt(math.acosh(2.0))


def panel():
    return GaussianIntegrator.panel()


class MembershipTests(SimpleTestCase):
    def test_identity(self):
        report = sobolev_membership(parse_field("x"), panel())
        self.assertTrue(report.member)
        self.assertAlmostEqual(report.f_norm.value, LUX_X_COSH2, places=7)
        self.assertAlmostEqual(report.grad_norms[0].value, LUX_ONE_SQ_COSH2, places=7)
        self.assertAlmostEqual(report.total, LUX_X_COSH2 + LUX_ONE_SQ_COSH2, places=7)
        self.assertIsNone(report.verdict)

    def test_square_is_member(self):
        report = sobolev_membership(parse_field("x^2"), panel())
        self.assertTrue(report.member)
        self.assertAlmostEqual(report.f_norm.value, 2.2056, delta=1e-3)

    def test_constant_has_zero_gradient_norm(self):
        report = sobolev_membership(Constant(1.0), panel())
        self.assertTrue(report.member)
        self.assertEqual(report.grad_norms[0].value, 0.0)

    def test_polynomials_up_to_degree_two(self):
        for name in ("1", "2x+1", "x^2", "H2/2", "|x|^2"):
            with self.subTest(f=name):
                self.assertTrue(sobolev_membership(parse_field(name), panel()).member)

    def test_gaussian_exponential_is_not_member(self):
        report = sobolev_membership(parse_field("exp(x^2)"), panel())
        self.assertFalse(report.member)
        self.assertEqual(report.total, float("inf"))
        self.assertEqual(report.verdict, NOT_MEMBER)
        self.assertEqual(report.to_dict()["f_norm"]["value"], {"diverged": True})

    def test_homogeneity_and_triangle_inequality(self):
        f, g = parse_field("x"), parse_field("tanh(x)")
        base = sobolev_membership(f, panel()).total
        self.assertAlmostEqual(sobolev_membership(f * 3.0, panel()).total, 3.0 * base, places=7)
        combined = sobolev_membership(f + g, panel()).total
        self.assertLessEqual(combined, base + sobolev_membership(g, panel()).total + 1e-8)

    def test_fiber_at_tilted_density(self):
        p = Compose("exp", linear([0.3], -0.045))
        self.assertTrue(sobolev_membership(parse_field("x"), panel(), weight=p).member)
        self.assertFalse(sobolev_membership(parse_field("exp(x^2)"), panel(), weight=p).member)

    def test_fiber_verdicts_and_norms_match_the_base(self):
        p = Compose("exp", linear([0.3], -0.045))
        for name in ("x", "2x+1", "x^2", "tanh(x)", "relu(x)", "exp(x^2)"):
            with self.subTest(f=name):
                base = sobolev_membership(parse_field(name), panel())
                fiber = sobolev_membership(parse_field(name), panel(), weight=p)
                self.assertEqual(fiber.member, base.member)
                if base.member:
                    self.assertTrue(0.5 < fiber.total / base.total < 2.0)

    def test_two_dimensional_membership(self):
        report = sobolev_membership(parse_field("x", 2), GaussianIntegrator.default(2))
        self.assertTrue(report.member)
        self.assertEqual(report.grad_norms[1].value, 0.0)
        self.assertAlmostEqual(report.f_norm.value, LUX_X_COSH2, places=7)


class WeakDerivativeTests(SimpleTestCase):
    def test_smooth_field(self):
        report = weak_derivative_check(parse_field("H3/6"), integrator=panel())
        self.assertEqual(len(report.residuals), 5)
        self.assertTrue(report.passed(1e-10))

    def test_relu_has_heaviside_derivative(self):
        self.assertTrue(weak_derivative_check(parse_field("relu(x)"), integrator=panel()).passed(1e-10))

    def test_square_on_centered_bump(self):
        report = weak_derivative_check(parse_field("x^2"), bumps=[bump([0.0])], integrator=panel())
        self.assertLess(report.max_residual, 1e-10)

    def test_constant(self):
        self.assertLess(weak_derivative_check(Constant(3.0), integrator=panel()).max_residual, 1e-12)

    def test_absolute_value_has_sign_derivative(self):
        claimed = Compose("sign", coordinate(0))
        report = weak_derivative_check(parse_field("|x|"), integrator=panel(), derivative=claimed)
        self.assertLess(report.max_residual, 1e-10)

    def test_wrong_derivative_is_detected(self):
        report = weak_derivative_check(parse_field("relu(x)"), integrator=panel(), derivative=Constant(1.0))
        self.assertGreater(report.max_residual, 1e-3)

    def test_second_axis(self):
        f = parse_field("x1*x2", 2)
        bumps = bump_presets(2)
        self.assertTrue(weak_derivative_check(f, 1, bumps).passed(1e-10))

    def test_default_integrator_per_dimension(self):
        self.assertEqual(sobolev_integrator(1).backend, "panel")
        self.assertEqual(sobolev_integrator(2).describe()["half_width"], 10.0)
        self.assertEqual(sobolev_integrator(3).backend, "panel")
        self.assertEqual(sobolev_integrator(4).backend, "monte_carlo")

    def test_no_gradient(self):
        with self.assertRaises(MissingGradientError):
            weak_derivative_check(parse_field("sign(x)"), integrator=panel())


class TranslationIncrementTests(SimpleTestCase):
    def test_cubic_hermite(self):
        report = translation_increment_check(parse_field("H3/6"), [1.0], 0.1)
        self.assertEqual([row.alpha for row in report.rows], [2.0, 4.0, 8.0])
        self.assertLess(report.max_identity_residual, 1e-10)
        for row in report.rows:
            self.assertGreater(row.remainder, 0.0)
            self.assertLess(row.ratio, 0.3)
        self.assertTrue(report.passed())

    def test_square(self):
        report = translation_increment_check(parse_field("x^2"), [1.0], 0.2, alphas=(2.0,))
        row = report.rows[0]
        self.assertAlmostEqual(row.remainder, 0.04, places=12)
        self.assertAlmostEqual(row.ratio, 0.25, places=10)

    def test_linear_field_has_no_remainder(self):
        report = translation_increment_check(parse_field("x"), [1.0], 0.5)
        self.assertTrue(all(row.ratio == 0.0 for row in report.rows))
        self.assertTrue(report.passed())

    def test_direction_dimension(self):
        with self.assertRaises(DomainError):
            translation_increment_check(parse_field("x"), [1.0, 0.0], 0.1)


class EmbeddingTests(SimpleTestCase):
    def test_identity_on_unit_ball(self):
        report = local_embedding_bound(parse_field("x"), 1.0, 1)
        constant = math.sqrt(2.0 * math.pi) * 2.0 * math.exp(0.5)
        self.assertAlmostEqual(report.lhs, 2.0 / 3.0, places=10)
        self.assertAlmostEqual(report.rhs, constant * LUX_X_COSH2, places=6)
        self.assertAlmostEqual(report.rhs_homogeneous, constant * LUX_X_COSH2 ** 2, places=6)
        self.assertTrue(report.passed)
        self.assertTrue(report.homogeneous_passed)

    def test_square_fourth_moment(self):
        report = local_embedding_bound(parse_field("x^2"), 2.0, 2)
        self.assertAlmostEqual(report.lhs, 2.0 * 2 ** 9 / 9.0, places=7)
        self.assertTrue(report.passed)

    def test_presets(self):
        for name in ("0", "1", "x", "2x+1", "|x|", "x^2", "H2/2", "relu(x)", "tanh(x)", "softplus(x)", "bump"):
            for k in (1, 2):
                with self.subTest(f=name, k=k):
                    self.assertTrue(local_embedding_bound(parse_field(name), 1.0, k).passed)

    def test_zero(self):
        report = local_embedding_bound(Constant(0.0), 1.0, 1)
        self.assertEqual((report.lhs, report.rhs), (0.0, 0.0))
        self.assertTrue(report.passed)

    def test_disk(self):
        report = local_embedding_bound(parse_field("x", 2), 1.0, 1, GaussianIntegrator.default(2))
        self.assertAlmostEqual(report.lhs, math.pi / 4.0, delta=1e-2)
        self.assertTrue(report.passed)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            local_embedding_bound(parse_field("x"), 0.0, 1)
        with self.assertRaises(DomainError):
            local_embedding_bound(parse_field("exp(x^2)"), 1.0, 1)


class ContinuityTests(SimpleTestCase):
    def test_continuous_field(self):
        probe = continuity_probe(parse_field("x"), [0.0])
        self.assertAlmostEqual(probe.oscillations[0], 0.1, places=12)
        self.assertTrue(probe.continuous)

    def test_jump(self):
        self.assertFalse(continuity_probe(parse_field("heaviside(x)"), [0.0]).continuous)


class CompositionTests(SimpleTestCase):
    def test_relu(self):
        report = lipschitz_composition("relu", parse_field("x"), panel())
        self.assertEqual(report.lipschitz, 1.0)
        self.assertTrue(report.composed.member)
        self.assertTrue(report.closed)
        self.assertTrue(report.chain_passed(1e-10))

    def test_tanh_of_square(self):
        report = lipschitz_composition("tanh", parse_field("x^2"), panel())
        self.assertTrue(report.closed)
        self.assertTrue(report.chain_passed(1e-8))

    def test_chain_on_every_axis(self):
        f = parse_field("x1*x2", 2)
        report = lipschitz_composition("tanh", f)
        self.assertEqual([row.axis for row in report.chain], [0, 1])
        self.assertTrue(report.chain_passed(1e-8))
        self.assertEqual(len(report.to_dict()["chain"]), 2)

    def test_chain_catches_a_wrong_second_partial(self):
        f = parse_field("x1+x2^2", 2)
        report = lipschitz_composition("sigmoid", f)
        self.assertTrue(report.chain_passed(1e-8))
        wrong = weak_derivative_check(Compose("sigmoid", f), 1, derivative=Compose("sigmoid_prime", f))
        self.assertGreater(wrong.max_residual, 1e-4)

    def test_identity_map_keeps_the_report(self):
        f = parse_field("H2/2")
        report = lipschitz_composition("identity", f, panel())
        self.assertAlmostEqual(report.composed.total, report.inner.total, places=10)

    def test_unbounded_derivative(self):
        with self.assertRaises(UnboundedDerivativeError):
            lipschitz_composition("exp", parse_field("x"))
        with self.assertRaises(UnboundedDerivativeError):
            lipschitz_increment_check("sqrt", [0.1], [1.0])

    def test_min_and_max(self):
        x = coordinate(0)
        reports = min_max_membership(x, parse_field("H2/2"), panel())
        self.assertTrue(reports["min"].member)
        self.assertTrue(reports["max"].member)
        reports = min_max_membership(x, -x, panel())
        self.assertTrue(reports["min"].member)
        self.assertTrue(reports["max"].member)
        self.assertAlmostEqual(reports["max"].f_norm.value, luxemburg_norm(parse_field("|x|"), cosh2(), panel()).value, places=8)

    def test_neuron(self):
        x = coordinate(0)
        f = neuron([[1.0], [-1.0]], [0.0, 0.0], [1.0, 1.0], "relu", [x])
        points = np.array([-2.0, 0.5, 3.0])
        np.testing.assert_allclose(f(points), np.abs(points))
        self.assertTrue(sobolev_membership(f, panel()).member)

    def test_rectifier_network_on_two_inputs(self):
        inputs = [coordinate(0), parse_field("H2/2")]
        report = neuron_membership([[1.0, 0.5], [-1.0, 2.0]], [0.1, -0.2], [0.7, -1.3], "relu", inputs, panel())
        self.assertTrue(report.member)
        self.assertLess(report.total, float("inf"))

    def test_identity_unit_and_zero_amplitudes(self):
        affine = neuron_membership([[2.0]], [-1.0], [1.0], "identity", [coordinate(0)], panel())
        self.assertAlmostEqual(affine.total, sobolev_membership(parse_field("2x+1"), panel()).total, places=8)
        zero = neuron_membership([[1.0]], [0.0], [0.0], "tanh", [coordinate(0)], panel())
        self.assertEqual(zero.total, 0.0)

    def test_neuron_shapes(self):
        with self.assertRaises(DimensionMismatchError):
            neuron([[1.0, 2.0]], [0.0], [1.0], "relu", [coordinate(0)])

    def test_increment_bound(self):
        points = np.linspace(-5.0, 5.0, 101)
        for name in ("relu", "tanh", "sigmoid", "softplus", "abs"):
            self.assertTrue(lipschitz_increment_check(name, [0.3], points).holds)

    def test_increment_points_on_the_line_and_in_the_plane(self):
        line = lipschitz_increment_check("tanh", 0.5, np.linspace(-3.0, 3.0, 61))
        self.assertTrue(line.holds)
        self.assertLess(line.worst_excess, 0.0)
        plane = lipschitz_increment_check("relu", [0.3, -0.2], np.column_stack([np.linspace(-2, 2, 9)] * 2))
        self.assertTrue(plane.holds)
        with self.assertRaises(DomainError):
            lipschitz_increment_check("relu", [0.3, -0.2], np.linspace(-2.0, 2.0, 9))

    def test_chain_product_form(self):
        f = parse_field("H2/2")
        claimed = Product((Compose("sech2", f), f.partial(0)))
        self.assertTrue(weak_derivative_check(Compose("tanh", f), integrator=panel(), derivative=claimed).passed(1e-10))


class CommandTests(SimpleTestCase):
    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return json.loads(out.getvalue())

    def test_membership(self):
        payload = self.run_command("sobolev", "--f", "x")
        self.assertTrue(payload["member"])
        self.assertAlmostEqual(payload["total"], LUX_X_COSH2 + LUX_ONE_SQ_COSH2, places=6)

    def test_not_member_exit_code(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("sobolev", "--f", "exp(x^2)", stdout=out)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertFalse(json.loads(out.getvalue())["member"])

    def test_increment(self):
        payload = self.run_command("sobolev", "--check", "increment", "--f", "H3/6", "--t", "0.1")
        self.assertTrue(payload["passed"])
        self.assertEqual(len(payload["rows"]), 3)

    def test_chain(self):
        payload = self.run_command("sobolev", "--check", "chain", "--f", "x", "--map", "relu")
        self.assertTrue(payload["chain_passed"])
        self.assertTrue(payload["closed"])

    def test_chain_in_the_plane(self):
        payload = self.run_command("sobolev", "--check", "chain", "--f", "x1*x2", "--map", "tanh", "--n", "2")
        self.assertTrue(payload["chain_passed"])
        self.assertEqual([row["axis"] for row in payload["chain"]], [0, 1])

    def test_chain_needs_map(self):
        with self.assertRaisesMessage(CommandError, "needs --map"):
            call_command("sobolev", "--check", "chain", "--f", "x", stdout=StringIO())

    def test_embedding(self):
        payload = self.run_command("sobolev", "--check", "embedding", "--f", "x", "--rho", "1", "--k", "1")
        self.assertTrue(payload["pass"])
        self.assertAlmostEqual(payload["lhs"], 2.0 / 3.0, places=10)
