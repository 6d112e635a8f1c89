import json
import math
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.stats import norm

from core.exceptions import DomainError
from gaussian_measure.expressions import parse_field
from gaussian_measure.fields import Constant, truncate
from gaussian_measure.integrators import GaussianIntegrator
from young_functions.young import cosh2, power, squared
from .norms import (
    ModularIntegral,
    dual_norm,
    holder_check,
    luxemburg_norm,
    mgf_from_tail,
    mgf_tail_report,
    moment_norm,
    orlicz_class_member,
    product_bound_check,
    tail_certificate,
    truncation_convergence,
)

LUX_X_COSH2 = 1.0 / math.sqrt(2.0 * math.log(2.0))


def gaussian_abs_moment(f, alpha):
    value, _ = quad(lambda x: abs(float(f(x)[0])) ** alpha * norm.pdf(x), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
    return value


def lux_x_squared_cosh2():
    def modular(rho):
        return 0.5 * ((1 - 2 / rho) ** -0.5 + (1 + 2 / rho) ** -0.5) - 2.0

    return brentq(modular, 2.0 + 1e-9, 10.0, xtol=1e-14)


class LuxemburgNormTests(SimpleTestCase):
    def test_zero_field(self):
        result = luxemburg_norm(Constant(0.0), cosh2(), GaussianIntegrator.default())
        self.assertEqual(result.value, 0.0)
        self.assertEqual(result.method, "zero")

    def test_identity_under_cosh2(self):
        result = luxemburg_norm(parse_field("x"), cosh2(), GaussianIntegrator.default())
        self.assertAlmostEqual(result.value, LUX_X_COSH2, places=8)
        self.assertLess(result.residual, 1e-8)
        self.assertTrue(result.bracket[0] <= result.value <= result.bracket[1])

    def test_modular_decreases_across_bracket(self):
        integrator = GaussianIntegrator.default()
        f = parse_field("x")
        result = luxemburg_norm(f, cosh2(), integrator)
        modular = ModularIntegral(integrator.sample(f), cosh2())
        lo, hi = result.bracket
        self.assertGreaterEqual(modular(lo).value, 1.0)
        self.assertLessEqual(modular(hi).value, 1.0)

    def test_x_squared_under_cosh2(self):
        result = luxemburg_norm(parse_field("x^2"), cosh2(), GaussianIntegrator.panel())
        self.assertAlmostEqual(result.value, lux_x_squared_cosh2(), delta=1e-6)
        self.assertAlmostEqual(result.value, 2.2056, places=3)

    def test_power_correspondence(self):
        integrator = GaussianIntegrator.panel()
        for name in ["x", "2x+1", "x^2", "H2/2", "tanh(x)"]:
            f = parse_field(name)
            for alpha in (1.5, 2.0, 3.0):
                expected = alpha ** (-1.0 / alpha) * gaussian_abs_moment(f, alpha) ** (1.0 / alpha)
                value = luxemburg_norm(f, power(alpha), integrator).value
                self.assertAlmostEqual(value / expected, 1.0, delta=1e-6, msg=f"{name} alpha={alpha}")

    def test_identity_under_power_two(self):
        value = luxemburg_norm(parse_field("x"), power(2), GaussianIntegrator.default()).value
        self.assertAlmostEqual(value, 1.0 / math.sqrt(2.0), places=10)

    def test_homogeneity(self):
        integrator = GaussianIntegrator.default()
        f = parse_field("x")
        base = luxemburg_norm(f, cosh2(), integrator).value
        for c in (0.5, 2.0, -3.0):
            value = luxemburg_norm(c * f, cosh2(), integrator).value
            self.assertAlmostEqual(value / (abs(c) * base), 1.0, delta=1e-6, msg=c)

    def test_triangle_inequality(self):
        integrator = GaussianIntegrator.panel()
        fields = [parse_field(name) for name in ["x", "H2/2", "2x+1", "tanh(x)", "x^2"]]
        for phi in (power(2), cosh2()):
            for i, f in enumerate(fields):
                for g in fields[i + 1:]:
                    lhs = luxemburg_norm(f + g, phi, integrator).value
                    rhs = luxemburg_norm(f, phi, integrator).value + luxemburg_norm(g, phi, integrator).value
                    self.assertLessEqual(lhs, rhs * (1 + 1e-9))

    def test_squared_norm_law(self):
        integrator = GaussianIntegrator.panel()
        for name in ["x", "1", "tanh(x)"]:
            f = parse_field(name)
            lhs = luxemburg_norm(f, squared(cosh2()), integrator).value
            rhs = math.sqrt(luxemburg_norm(f * f, cosh2(), integrator).value)
            self.assertAlmostEqual(lhs / rhs, 1.0, delta=1e-6, msg=name)

    def test_constant_one_in_squared_space(self):
        value = luxemburg_norm(Constant(1.0), squared(cosh2()), GaussianIntegrator.default()).value
        self.assertAlmostEqual(value, 1.0 / math.sqrt(math.acosh(2.0)), places=10)

    def test_outside_the_space(self):
        result = luxemburg_norm(parse_field("exp(x^2)"), cosh2(), GaussianIntegrator.default())
        self.assertFalse(result.finite)
        self.assertEqual(result.verdict, "not in L^cosh2")
        self.assertEqual(result.to_dict()["value"], {"diverged": True})

    def test_weighted_norm(self):
        # under the weight 1 the norm is unchanged
        integrator = GaussianIntegrator.default()
        value = luxemburg_norm(parse_field("x"), cosh2(), integrator, weight=Constant(1.0)).value
        self.assertAlmostEqual(value, LUX_X_COSH2, places=8)


class DualNormTests(SimpleTestCase):
    def test_amemiya_value_for_power_two(self):
        integrator = GaussianIntegrator.default()
        result = dual_norm(parse_field("x"), power(2), integrator)
        self.assertAlmostEqual(result.value, math.sqrt(2.0), places=8)
        self.assertEqual(result.method, "amemiya-golden-section")

    def test_sandwich(self):
        integrator = GaussianIntegrator.panel()
        for name in ["x", "x^2", "2x+1", "tanh(x)"]:
            f = parse_field(name)
            lux = luxemburg_norm(f, cosh2(), integrator).value
            dual = dual_norm(f, cosh2(), integrator).value
            self.assertLessEqual(lux, dual * (1 + 1e-8), name)
            self.assertLessEqual(dual, 2 * lux * (1 + 1e-8), name)

    def test_zero_and_homogeneity(self):
        integrator = GaussianIntegrator.default()
        self.assertEqual(dual_norm(Constant(0.0), cosh2(), integrator).value, 0.0)
        base = dual_norm(parse_field("x"), cosh2(), integrator).value
        for c in (0.5, 2.0, -3.0):
            value = dual_norm(c * parse_field("x"), cosh2(), integrator).value
            self.assertAlmostEqual(value / (abs(c) * base), 1.0, delta=1e-6)

    def test_outside_the_space(self):
        result = dual_norm(parse_field("exp(x^2)"), cosh2(), GaussianIntegrator.default())
        self.assertFalse(result.finite)


class MomentNormTests(SimpleTestCase):
    def test_identity(self):
        result = moment_norm(parse_field("x"), GaussianIntegrator.default(), k_max=20)
        self.assertAlmostEqual(result.value, 1.0 / math.sqrt(2.0), places=10)
        self.assertEqual(result.attained_k, 1)

    def test_zero_field(self):
        self.assertEqual(moment_norm(Constant(0.0), GaussianIntegrator.default()).value, 0.0)

    def test_monotone_in_k_max(self):
        integrator = GaussianIntegrator.panel()
        values = [moment_norm(parse_field("x^2"), integrator, k_max=k).value for k in (1, 5, 10, 20)]
        self.assertEqual(values, sorted(values))
        self.assertAlmostEqual(values[-1], 1.883, places=2)

    def test_sandwich_with_luxemburg(self):
        integrator = GaussianIntegrator.panel()
        for name in ["x", "2x+1", "tanh(x)", "H2/2", "x^2"]:
            f = parse_field(name)
            moment = moment_norm(f, integrator, k_max=20).value
            lux = luxemburg_norm(f, cosh2(), integrator).value
            self.assertLessEqual(moment, lux * (1 + 1e-9), name)
            self.assertLessEqual(lux, math.sqrt(2.0) * moment * (1 + 1e-3), name)

    def test_homogeneity(self):
        integrator = GaussianIntegrator.default()
        base = moment_norm(parse_field("x"), integrator).value
        for c in (0.5, 2.0, -3.0):
            value = moment_norm(c * parse_field("x"), integrator).value
            self.assertAlmostEqual(value / (abs(c) * base), 1.0, delta=1e-9)

    def test_bad_order(self):
        for k_max in (0, -2):
            with self.assertRaises(DomainError):
                moment_norm(parse_field("x"), GaussianIntegrator.default(), k_max=k_max)

    def test_explicit_order_is_honoured(self):
        result = moment_norm(parse_field("x"), GaussianIntegrator.default(), k_max=2)
        self.assertEqual(result.k_max, 2)
        self.assertEqual(len(result.terms), 2)

    def test_divergent_moment(self):
        result = moment_norm(parse_field("exp(x^2)"), GaussianIntegrator.default(), k_max=3)
        self.assertFalse(result.finite)
        self.assertEqual(result.verdict, "not sub-exponential at order 1")


class TailCertificateTests(SimpleTestCase):
    def test_normal_tail_at_three(self):
        certificate = tail_certificate(parse_field("x"), GaussianIntegrator.panel(), [3.0])
        row = certificate.table.iloc[0]
        self.assertAlmostEqual(row["empirical_tail"], 2 * norm.sf(3.0), places=8)
        self.assertAlmostEqual(row["bound"], 4 * math.exp(-3.0 / LUX_X_COSH2), places=6)
        self.assertTrue(certificate.all_passed)

    def test_zero_field_is_vacuous(self):
        certificate = tail_certificate(Constant(0.0), GaussianIntegrator.default(), [0.5, 1.0])
        self.assertTrue(certificate.vacuous)
        self.assertTrue(certificate.all_passed)

    def test_sub_exponential_presets_pass_on_twenty_points(self):
        integrator = GaussianIntegrator.panel()
        t_grid = np.linspace(0.5, 10.0, 20)
        for name in ["x", "x^2", "2x+1", "tanh(x)", "H2/2"]:
            certificate = tail_certificate(parse_field(name), integrator, t_grid)
            self.assertEqual(len(certificate.table), 20)
            self.assertTrue(certificate.all_passed, name)

    def test_outside_the_space(self):
        certificate = tail_certificate(parse_field("exp(x^2)"), GaussianIntegrator.default(), [1.0])
        self.assertFalse(certificate.finite)
        self.assertFalse(certificate.all_passed)


class OrliczClassTests(SimpleTestCase):
    def test_identity_is_in_class(self):
        report = orlicz_class_member(parse_field("x"), GaussianIntegrator.default())
        self.assertTrue(report.in_M)
        self.assertIsNone(report.min_diverged_lambda)

    def test_x_squared_frontier(self):
        report = orlicz_class_member(parse_field("x^2"), GaussianIntegrator.default())
        self.assertFalse(report.in_M)
        self.assertGreaterEqual(report.max_finite_lambda, 0.49)
        self.assertLessEqual(report.min_diverged_lambda, 0.51)
        self.assertLess(report.max_finite_lambda, report.min_diverged_lambda)

    def test_bounded_field_is_in_class(self):
        f = truncate(parse_field("x^2"), 5.0)
        report = orlicz_class_member(f, GaussianIntegrator.panel(), [0.1, 1.0, 5.0])
        self.assertTrue(report.in_M)

    def test_bad_lambda_grid(self):
        for grid in ([], [0.5, 0.1], [-1.0, 1.0]):
            with self.assertRaises(ValueError):
                orlicz_class_member(parse_field("x"), GaussianIntegrator.default(), grid)


class TruncationTests(SimpleTestCase):
    def test_identity_converges(self):
        table = truncation_convergence(parse_field("x"), cosh2(), GaussianIntegrator.panel(), [1, 2, 4, 8], 1.0)
        values = table["value"].tolist()
        self.assertFalse(table["diverged"].any())
        self.assertEqual(values, sorted(values, reverse=True))
        self.assertLess(values[-1], 1e-6)

    def test_x_squared_counterexample(self):
        table = truncation_convergence(parse_field("x^2"), cosh2(), GaussianIntegrator.panel(), [1, 2, 4, 8], 0.6)
        self.assertTrue(table["diverged"].all())

    def test_bounded_field_vanishes_past_support(self):
        f = truncate(parse_field("x^2"), 3.0)
        table = truncation_convergence(f, cosh2(), GaussianIntegrator.panel(), [4, 8], 1.0)
        self.assertEqual(table["value"].tolist(), [0.0, 0.0])


class InequalityTests(SimpleTestCase):
    def test_holder(self):
        integrator = GaussianIntegrator.panel()
        report = holder_check(parse_field("x"), parse_field("x"), cosh2(), integrator)
        self.assertAlmostEqual(report.lhs, 1.0, places=10)
        self.assertTrue(report.holds)
        self.assertTrue(holder_check(parse_field("x"), parse_field("H2"), cosh2(), integrator).holds)

    def test_product_bound(self):
        report = product_bound_check(parse_field("x"), parse_field("tanh(x)"), cosh2(), GaussianIntegrator.panel())
        self.assertTrue(report.holds)
        self.assertLessEqual(report.lhs, 1.0 + 1e-8)

    def test_mgf_from_tail(self):
        self.assertEqual(mgf_from_tail(4.0, 1.0, 0.5), 5.0)
        self.assertTrue(math.isinf(mgf_from_tail(4.0, 1.0, 1.0)))

    def test_mgf_report_below_bound(self):
        table = mgf_tail_report(parse_field("x"), GaussianIntegrator.default(), [0.1, 0.5, 1.0])
        self.assertTrue(table["passed"].all())


class CommandTests(SimpleTestCase):
    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()

    def test_norm(self):
        payload = json.loads(self.run_command("norm", "--phi", "cosh2", "--f", "x", "--n", "1"))
        self.assertAlmostEqual(payload["value"], 0.84932, places=5)
        self.assertEqual(payload["method"], "luxemburg-bisection")
        self.assertIn("bracket", payload)
        self.assertIn("residual", payload)

    def test_norm_verdict_exit_code(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("norm", "--f", "exp(x^2)", stdout=out)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertEqual(json.loads(out.getvalue())["value"], {"diverged": True})

    def test_dualnorm_and_momentnorm(self):
        dual = json.loads(self.run_command("dualnorm", "--phi", "power:2", "--f", "x"))
        self.assertAlmostEqual(dual["value"], math.sqrt(2.0), places=8)
        moment = json.loads(self.run_command("momentnorm", "--f", "x", "--k-max", "5"))
        self.assertAlmostEqual(moment["value"], 0.707106781187, places=10)

    def test_tailcert_csv(self):
        lines = self.run_command("tailcert", "--f", "x", "--t-grid", "1,2,3", "--format", "csv").splitlines()
        self.assertEqual(lines[0], "t,empirical_tail,bound,passed")
        self.assertEqual(len(lines), 4)

    def test_class(self):
        payload = json.loads(self.run_command("orlicz_class", "--f", "x^2"))
        self.assertFalse(payload["in_M"])
        self.assertAlmostEqual(payload["max_finite_lambda"], 0.5, delta=0.02)

    def test_truncation(self):
        payload = json.loads(self.run_command("truncation", "--f", "x^2", "--lam", "0.6", "--backend", "panel"))
        self.assertTrue(payload["all_diverged"])

    def test_unknown_preset(self):
        with self.assertRaisesMessage(CommandError, 'Unknown preset "cosine"'):
            call_command("norm", "--f", "cosine", stdout=StringIO())

    def test_missing_field(self):
        with self.assertRaisesMessage(CommandError, "Missing --f"):
            call_command("norm", stdout=StringIO())
