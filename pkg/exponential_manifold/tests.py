import json
import math
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.exceptions import (
    DimensionMismatchError,
    DomainError,
    NonPositiveDensityError,
    NotCenteredError,
    OutsideProperDomainError,
)
from gaussian_measure.expressions import parse_field
from gaussian_measure.fields import Compose, Constant, HermiteAtom, linear
from gaussian_measure.integrators import GaussianIntegrator
from .family import ExpFamily, cumulant_and_fisher, expectation_derivative_check, richardson, score
from .geometry import hyvarinen, log_sobolev_check, otto_inner, transport_bound
from .model import (
    OUTSIDE_DOMAIN,
    BundleElement,
    ExpModelPoint,
    chart,
    compose_point,
    k1,
    relative_cumulant,
)
from .portmanteau import portmanteau_check
from .sphere import fisher_routes, sphere_convert

K1_H2_QUARTER = -0.25 + 0.5 * math.log(2.0)


def quadrature(dim=1):
    return GaussianIntegrator.default(dim)


def tilt(a):
    return ExpModelPoint.from_statistic(linear([a]), quadrature())


class CumulantTests(SimpleTestCase):
    def test_zero_statistic(self):
        self.assertEqual(k1(Constant(0.0), quadrature()).value, 0.0)

    def test_linear_statistic(self):
        result = k1(linear([0.7]), quadrature())
        self.assertTrue(result.finite)
        self.assertAlmostEqual(result.value, 0.245, places=12)

    def test_quadratic_statistic(self):
        result = k1(parse_field("H2/4"), quadrature())
        self.assertAlmostEqual(result.value, K1_H2_QUARTER, places=10)

    def test_outside_proper_domain(self):
        result = k1(parse_field("x^2"), quadrature(), auto_center=True)
        self.assertFalse(result.finite)
        self.assertEqual(result.verdict, OUTSIDE_DOMAIN)
        self.assertAlmostEqual(result.mean, 1.0, places=12)
        self.assertEqual(result.to_dict()["value"], {"diverged": True})

    def test_uncentered_statistic_is_rejected(self):
        with self.assertRaises(NotCenteredError):
            k1(parse_field("x^2"), quadrature())

    def test_convexity_on_pairs(self):
        integrator = quadrature()
        pairs = [
            (linear([0.5]), parse_field("H2/4")),
            (parse_field("tanh(x)"), linear([0.3])),
            (linear([-1.0]), parse_field("H2/4") * 0.5),
        ]
        for u, v in pairs:
            middle = k1(u * 0.5 + v * 0.5, integrator).value
            self.assertLessEqual(middle, 0.5 * k1(u, integrator).value + 0.5 * k1(v, integrator).value + 1e-8)

    def test_point_density_has_unit_mass(self):
        point = ExpModelPoint.from_statistic(parse_field("H2/4"), quadrature())
        self.assertAlmostEqual(point.mass(quadrature()), 1.0, places=10)

    def test_point_outside_domain(self):
        with self.assertRaises(OutsideProperDomainError):
            ExpModelPoint.from_statistic(parse_field("x^2"), quadrature(), auto_center=True)


class ChartTests(SimpleTestCase):
    def test_reference_density(self):
        integrator = quadrature()
        u = chart(Constant(1.0), integrator)
        points, _ = integrator.nodes
        np.testing.assert_allclose(u(points), 0.0, atol=1e-14)

    def test_tilted_density(self):
        integrator = quadrature()
        u = chart(Compose("exp", linear([0.5], -0.125)), integrator)
        points, _ = integrator.nodes
        np.testing.assert_allclose(u(points), 0.5 * points[:, 0], atol=1e-10)

    def test_round_trip_on_probe_points(self):
        integrator = quadrature()
        statistic = parse_field("H2/4")
        q = ExpModelPoint.from_statistic(statistic, integrator).density()
        u = chart(q, integrator)
        grid = np.linspace(-6.0, 6.0, 49)
        self.assertLess(np.max(np.abs(u(grid) - statistic(grid))), 1e-6)

    def test_non_positive_density(self):
        with self.assertRaises(NonPositiveDensityError):
            chart(parse_field("x") + 1.0, quadrature())

    def test_unnormalized_density(self):
        with self.assertRaises(DomainError):
            chart(Constant(2.0), quadrature())


class RelativeCumulantTests(SimpleTestCase):
    def test_zero_direction(self):
        self.assertEqual(relative_cumulant(tilt(0.5), Constant(0.0), quadrature()).value, 0.0)

    def test_tilted_gaussian(self):
        result = relative_cumulant(tilt(0.5), linear([0.5], -0.25), quadrature())
        self.assertAlmostEqual(result.value, 0.125, places=10)

    def test_direction_centered_under_gamma_only(self):
        with self.assertRaises(NotCenteredError):
            relative_cumulant(tilt(0.5), linear([0.5]), quadrature())

    def test_chain_consistency(self):
        report = compose_point(tilt(0.5), linear([0.5], -0.25), quadrature())
        self.assertAlmostEqual(report.k1_direct, 0.5, places=10)
        self.assertLess(report.residual, 1e-10)
        grid = np.linspace(-3.0, 3.0, 13)
        np.testing.assert_allclose(report.point.u(grid), grid, atol=1e-10)


class FisherTests(SimpleTestCase):
    def test_richardson_removes_quadratic_term(self):
        self.assertAlmostEqual(richardson(1.0 + 0.04, 1.0 + 0.01), 1.0, places=14)

    def test_linear_family(self):
        integrator = quadrature()
        family = ExpFamily.create([parse_field("x")], integrator)
        for theta in (0.0, 0.4, -1.2):
            report = cumulant_and_fisher(family, [theta], integrator)
            self.assertAlmostEqual(report.kappa, theta ** 2 / 2, places=12)
            self.assertAlmostEqual(report.gradient[0], theta, places=10)
            self.assertAlmostEqual(report.covariance[0, 0], 1.0, places=8)
            self.assertAlmostEqual(report.hessian[0, 0], 1.0, delta=1e-7)

    def test_orthonormal_statistics_at_origin(self):
        integrator = quadrature()
        stats = [parse_field("x"), HermiteAtom.from_terms({(2,): 1.0 / math.sqrt(2.0)})]
        report = cumulant_and_fisher(ExpFamily.create(stats, integrator), [0.0, 0.0], integrator)
        np.testing.assert_allclose(report.gradient, 0.0, atol=1e-12)
        np.testing.assert_allclose(report.covariance, np.eye(2), atol=1e-10)
        self.assertLess(report.max_difference, 1e-4)

    def test_two_dimensional_family(self):
        integrator = quadrature(2)
        stats = [parse_field("x1", 2), parse_field("x2", 2), parse_field("x1*x2", 2)]
        report = cumulant_and_fisher(ExpFamily.create(stats, integrator), [0.3, -0.2, 0.1], integrator)
        self.assertLess(report.max_difference, 1e-4)
        self.assertTrue(report.symmetric)
        self.assertTrue(report.positive_semidefinite)

    def test_uncentered_statistic(self):
        with self.assertRaises(NotCenteredError):
            ExpFamily.create([parse_field("x^2")], quadrature())

    def test_theta_length(self):
        family = ExpFamily.create([parse_field("x")], quadrature())
        with self.assertRaises(DimensionMismatchError):
            cumulant_and_fisher(family, [0.1, 0.2], quadrature())

    def test_stencil_leaving_the_domain(self):
        integrator = quadrature()
        family = ExpFamily.create([HermiteAtom.from_terms({(2,): 1.0})], integrator)
        with self.assertRaises(OutsideProperDomainError):
            cumulant_and_fisher(family, [0.45], integrator, step=0.1)

    def test_score_elements(self):
        integrator = quadrature()
        family = ExpFamily.create([parse_field("x")], integrator)
        (element,) = score(family, [0.4], integrator)
        self.assertAlmostEqual(element.inner(element, integrator), 1.0, places=10)


class ExpectationDerivativeTests(SimpleTestCase):
    def setUp(self):
        self.integrator = quadrature()
        self.family = ExpFamily.create([parse_field("x")], self.integrator)

    def test_constant(self):
        check = expectation_derivative_check(self.family, [0.2], Constant(3.0), self.integrator)
        self.assertAlmostEqual(check.finite_difference[0], 0.0, places=8)
        self.assertAlmostEqual(check.covariance[0], 0.0, places=12)

    def test_identity_at_origin(self):
        check = expectation_derivative_check(self.family, [0.0], parse_field("x"), self.integrator)
        self.assertAlmostEqual(check.covariance[0], 1.0, places=10)
        self.assertAlmostEqual(check.finite_difference[0], 1.0, places=8)

    def test_square(self):
        check = expectation_derivative_check(self.family, [0.3], parse_field("x^2"), self.integrator)
        self.assertAlmostEqual(check.covariance[0], 0.6, places=8)
        self.assertLess(check.residual, 1e-5)


class BundleTests(SimpleTestCase):
    def test_centering_under_base(self):
        integrator = quadrature()
        base = tilt(0.5)
        element = BundleElement.at(base, linear([1.0], -0.5), integrator)
        self.assertAlmostEqual(element.inner(element, integrator), 1.0, places=10)
        with self.assertRaises(NotCenteredError):
            BundleElement.at(base, parse_field("x"), integrator)
        recentered = BundleElement.at(base, parse_field("x"), integrator, auto_center=True)
        self.assertAlmostEqual(recentered.base.expect(recentered.v, integrator).value, 0.0, places=10)


class HyvarinenTests(SimpleTestCase):
    def test_closed_form_for_tilts(self):
        integrator = quadrature()
        for a, b in ((0.0, 1.0), (0.5, -0.5), (1.0, 1.0)):
            report = hyvarinen(tilt(a), tilt(b), integrator)
            self.assertAlmostEqual(report.value, 0.5 * (a - b) ** 2, delta=1e-8)
            self.assertAlmostEqual(report.otto_form, report.value, delta=1e-8)

    def test_same_point(self):
        point = ExpModelPoint.from_statistic(parse_field("H2/4"), quadrature())
        self.assertLess(abs(hyvarinen(point, point, quadrature()).value), 1e-10)

    def test_asymmetry(self):
        integrator = quadrature()
        p = ExpModelPoint.from_statistic(parse_field("H2/4"), integrator)
        q = ExpModelPoint.reference()
        self.assertAlmostEqual(hyvarinen(p, q, integrator).value, 0.25, places=8)
        self.assertAlmostEqual(hyvarinen(q, p, integrator).value, 0.125, places=10)


class OttoTests(SimpleTestCase):
    def test_reference_point(self):
        integrator = quadrature()
        p = ExpModelPoint.reference()
        x = parse_field("x")
        self.assertAlmostEqual(otto_inner(x, x, p, integrator).value, 1.0, places=12)
        self.assertAlmostEqual(otto_inner(x, parse_field("H2"), p, integrator).value, 0.0, places=12)

    def test_adjoint_identity(self):
        integrator = quadrature()
        report = otto_inner(parse_field("x"), parse_field("x^2"), tilt(0.3), integrator, adjoint=True)
        self.assertAlmostEqual(report.value, 0.6, places=10)
        self.assertLess(report.adjoint_residual, 1e-8)

    def test_symmetric_and_nonnegative(self):
        integrator = quadrature()
        p = tilt(-0.4)
        f, g = parse_field("tanh(x)"), parse_field("H2/2")
        self.assertAlmostEqual(otto_inner(f, g, p, integrator).value, otto_inner(g, f, p, integrator).value, places=12)
        self.assertGreaterEqual(otto_inner(f, f, p, integrator).value, 0.0)


class LogSobolevTests(SimpleTestCase):
    def test_reference_point(self):
        report = log_sobolev_check(ExpModelPoint.reference(), quadrature())
        self.assertEqual((report.entropy, report.energy, report.slack), (0.0, 0.0, 0.0))

    def test_gaussian_tilt_is_extremal(self):
        report = log_sobolev_check(tilt(0.8), quadrature())
        self.assertAlmostEqual(report.entropy, 0.32, places=10)
        self.assertAlmostEqual(report.energy, 0.32, places=10)
        self.assertAlmostEqual(report.otto_energy, 0.32, places=10)
        self.assertTrue(report.holds())

    def test_quadratic_statistic(self):
        report = log_sobolev_check(ExpModelPoint.from_statistic(parse_field("H2/4"), quadrature()), quadrature())
        self.assertAlmostEqual(report.entropy, 0.25 - K1_H2_QUARTER, places=8)
        self.assertAlmostEqual(report.energy, 0.25, places=8)
        self.assertGreater(report.slack, 0.0)


class TransportBoundTests(SimpleTestCase):
    def test_bound_holds(self):
        report = transport_bound(parse_field("x"), linear([0.3]), 2.0, quadrature())
        expected_bound = math.exp(-0.045) * (1.0 + math.exp(0.18) / 2.0) - 1.0
        self.assertAlmostEqual(report.bound, expected_bound, places=10)
        self.assertTrue(report.holds)
        self.assertLess(report.value, report.bound)

    def test_exponent_must_exceed_one(self):
        with self.assertRaises(DomainError):
            transport_bound(parse_field("x"), linear([0.3]), 1.0, quadrature())


class SphereTests(SimpleTestCase):
    def test_reference_sphere_point(self):
        integrator = quadrature()
        x = parse_field("x")
        conversion = sphere_convert("sphere_to_bundle", Constant(2.0), x, integrator)
        self.assertEqual(conversion.point.value, 1.0)
        grid = np.linspace(-2.0, 2.0, 5)
        np.testing.assert_allclose(conversion.velocity(grid), grid)
        self.assertTrue(conversion.conserves())

    def test_round_trip_at_reference(self):
        integrator = quadrature()
        x = parse_field("x")
        forward = sphere_convert("bundle_to_sphere", Constant(1.0), x, integrator)
        self.assertEqual(forward.point.value, 2.0)
        back = sphere_convert("sphere_to_bundle", forward.point, forward.velocity, integrator)
        self.assertEqual(back.point.value, 1.0)
        grid = np.linspace(-2.0, 2.0, 5)
        np.testing.assert_allclose(back.velocity(grid), grid)

    def test_tangent_round_trip(self):
        integrator = quadrature()
        p = tilt(0.3).density()
        u = linear([1.0], -0.3)
        tangent = sphere_convert("bundle_to_tangent", p, u, integrator)
        back = sphere_convert("tangent_to_bundle", tangent.point, tangent.velocity, integrator)
        grid = np.linspace(-3.0, 3.0, 7)
        np.testing.assert_allclose(back.velocity(grid), u(grid), atol=1e-12)
        self.assertTrue(back.conserves())

    def test_fisher_routes_at_reference(self):
        routes = fisher_routes(Constant(1.0), parse_field("x"), parse_field("H2"), quadrature())
        for value in (routes.bundle, routes.sphere, routes.tangent):
            self.assertAlmostEqual(value, 0.0, places=12)

    def test_fisher_routes_at_tilt(self):
        p = tilt(0.3).density()
        u1 = linear([1.0], -0.3)
        u2 = u1 * u1 - 1.0
        routes = fisher_routes(p, u1, u1 + u2, quadrature())
        self.assertAlmostEqual(routes.bundle, 1.0, places=8)
        self.assertLess(routes.max_difference, 1e-8)

    def test_non_positive_point(self):
        with self.assertRaises(NonPositiveDensityError):
            sphere_convert("sphere_to_bundle", parse_field("x"), Constant(0.0), quadrature())

    def test_unknown_direction(self):
        with self.assertRaises(DomainError):
            sphere_convert("sphere_to_tangent", Constant(2.0), Constant(0.0), quadrature())


class PortmanteauTests(SimpleTestCase):
    def test_equal_densities(self):
        report = portmanteau_check([0.25] * 4, [0.25] * 4)
        self.assertEqual((report.lower, report.upper), (1.0, 1.0))
        np.testing.assert_allclose(report.log_partition, 0.0, atol=1e-15)
        self.assertTrue(report.all_conditions)

    def test_uniform_against_skewed(self):
        report = portmanteau_check([0.25] * 4, [0.4, 0.3, 0.2, 0.1])
        self.assertTrue(report.arc_connected)
        self.assertTrue(report.log_convex)
        self.assertTrue(report.mutually_integrable)
        self.assertTrue(report.equivalent_norms)
        self.assertLess(report.lower, 1.0)
        self.assertGreater(report.upper, 1.0)

    def test_zero_atom(self):
        with self.assertRaises(NonPositiveDensityError):
            portmanteau_check([0.25] * 4, [0.5, 0.5, 0.0, 0.0])

    def test_length_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            portmanteau_check([0.5, 0.5], [0.2, 0.3, 0.5])


class CommandTests(SimpleTestCase):
    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()

    def test_k1_of_zero(self):
        payload = json.loads(self.run_command("k1", "--u", "0"))
        self.assertEqual(payload["value"], 0.0)

    def test_k1_outside_domain(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("k1", "--u", "x^2", "--auto-center", stdout=out)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertEqual(json.loads(out.getvalue())["value"], {"diverged": True})

    def test_k1_uncentered_is_a_usage_error(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("k1", "--u", "x^2", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("NotCenteredError", str(ctx.exception))

    def test_chart(self):
        payload = json.loads(self.run_command("chart", "--q", "1"))
        self.assertAlmostEqual(payload["k1"], 0.0, places=12)
        self.assertLess(payload["round_trip_residual"], 1e-12)

    def test_fisher(self):
        payload = json.loads(self.run_command("fisher", "--stats", "x", "H2", "--theta", "0,0", "--f", "x"))
        np.testing.assert_allclose(payload["fisher_covariance"], [[1.0, 0.0], [0.0, 2.0]], atol=1e-10)
        self.assertLess(payload["max_difference"], 1e-4)
        self.assertAlmostEqual(payload["expectation_derivative"]["covariance"][0], 1.0, places=10)

    def test_hyvarinen_both_directions(self):
        payload = json.loads(self.run_command("hyvarinen", "--up", "H2/4"))
        self.assertAlmostEqual(payload["p_to_q"]["value"], 0.25, places=8)
        self.assertAlmostEqual(payload["q_to_p"]["value"], 0.125, places=8)
        self.assertFalse(payload["symmetric"])

    def test_otto(self):
        payload = json.loads(self.run_command("otto", "--f", "x", "--g", "x"))
        self.assertAlmostEqual(payload["value"], 1.0, places=10)
        self.assertLess(payload["adjoint_residual"], 1e-8)

    def test_logsob(self):
        payload = json.loads(self.run_command("logsob", "--u", "H2/4"))
        self.assertTrue(payload["holds"])

    def test_sphere(self):
        payload = json.loads(self.run_command(
            "sphere", "--direction", "bundle_to_sphere", "--point", "1", "--velocity", "x", "--velocity2", "H2"
        ))
        self.assertEqual(payload["point"], {"op": "const", "value": 2.0})
        self.assertTrue(payload["conserved"])
        self.assertLess(payload["fisher"]["max_difference"], 1e-12)

    def test_portmanteau_csv(self):
        lines = self.run_command(
            "portmanteau", "--p", "0.25,0.25,0.25,0.25", "--q", "0.4,0.3,0.2,0.1", "--format", "csv"
        ).splitlines()
        self.assertEqual(lines[0], "t,log_Z")
        self.assertEqual(len(lines), 12)

    def test_portmanteau_zero_atom(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("portmanteau", "--p", "0.5,0.5", "--q", "1,0", stdout=StringIO())
        self.assertIn("NonPositiveDensityError", str(ctx.exception))
