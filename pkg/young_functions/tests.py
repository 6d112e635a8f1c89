import json
import math
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from scipy.integrate import quad

from core.exceptions import DomainError
from .domination import equivalent, eventually_dominates
from .registry import young_function
from .young import (
    YoungFunction,
    check_young_legendre,
    conjugate,
    cosh2,
    custom,
    exp2,
    exp2_conj,
    gauss2,
    numeric_conjugate,
    power,
    squared,
)


class ClosedFormTests(SimpleTestCase):
    def test_values_at_origin_and_symmetry(self):
        for name in ["power:1.5", "power:3", "exp2", "exp2*", "cosh2", "cosh2*", "gauss2", "sq:cosh2"]:
            phi = young_function(name)
            self.assertEqual(float(phi.Phi(0.0)), 0.0, name)
            self.assertEqual(float(phi.phi(0.0)), 0.0, name)
            self.assertEqual(float(phi.Phi(-1.3)), float(phi.Phi(1.3)), name)

    def test_closed_forms(self):
        x = np.array([0.1, 1.0, 3.0])
        np.testing.assert_allclose(power(3).Phi(x), x ** 3 / 3)
        np.testing.assert_allclose(exp2().Phi(x), np.exp(x) - 1 - x)
        np.testing.assert_allclose(exp2_conj().Phi(x), (1 + x) * np.log(1 + x) - x)
        np.testing.assert_allclose(cosh2().Phi(x), np.cosh(x) - 1)
        np.testing.assert_allclose(gauss2().Phi(x), np.exp(x ** 2 / 2) - 1)

    def test_log_phi_matches_direct_log(self):
        x = np.array([1e-4, 0.3, 1.0, 7.0, 20.0])
        for phi in (power(1.5), exp2(), cosh2(), gauss2(), squared(cosh2())):
            np.testing.assert_allclose(phi.log_Phi(x), np.log(phi.Phi(x)), rtol=1e-9, err_msg=phi.name)

    def test_log_phi_does_not_overflow(self):
        self.assertAlmostEqual(float(cosh2().log_Phi(1e6)), 1e6 - math.log(2), places=6)
        self.assertAlmostEqual(float(gauss2().log_Phi(1e6)), 5e11, delta=1e-3)


class ConjugateTests(SimpleTestCase):
    def test_exp2_conjugate_is_closed_form(self):
        psi = conjugate(exp2())
        self.assertEqual(psi.name, "exp2*")
        self.assertAlmostEqual(float(psi.Phi(1.0)), 2 * math.log(2) - 1, places=14)
        self.assertEqual(conjugate(psi).name, "exp2")

    def test_power_is_self_conjugate_at_two(self):
        psi = conjugate(power(2))
        self.assertEqual(psi.alpha, 2.0)
        self.assertAlmostEqual(float(psi.Phi(3.0)), 4.5)
        self.assertAlmostEqual(conjugate(power(3)).alpha, 1.5)

    def test_cosh2_conjugate_against_quadrature_of_asinh(self):
        psi = conjugate(cosh2())
        expected, _ = quad(np.arcsinh, 0.0, 1.0)
        self.assertAlmostEqual(float(psi.Phi(1.0)), expected, places=12)
        self.assertAlmostEqual(float(psi.Phi(1.0)), math.asinh(1.0) - (math.sqrt(2) - 1), places=14)
        self.assertAlmostEqual(float(psi.Phi(1.0)), 0.4672, places=4)

    def test_numeric_conjugate_agrees_with_closed_forms(self):
        y = np.array([0.0, 0.5, 1.0, 5.0, 20.0])
        np.testing.assert_allclose(numeric_conjugate(exp2()).Phi(y), exp2_conj().Phi(y), rtol=1e-8, atol=1e-12)
        np.testing.assert_allclose(numeric_conjugate(cosh2()).Phi(y), conjugate(cosh2()).Phi(y), rtol=1e-8, atol=1e-12)
        np.testing.assert_allclose(numeric_conjugate(power(3)).phi(y), y ** 0.5, rtol=1e-10, atol=1e-12)

    def test_double_conjugation(self):
        grid = np.linspace(0.0, 3.0, 13)
        for phi in (power(1.5), power(3), exp2(), cosh2()):
            np.testing.assert_allclose(conjugate(conjugate(phi)).Phi(grid), phi.Phi(grid), atol=1e-8, err_msg=phi.name)
        self.assertEqual(conjugate(numeric_conjugate(cosh2())).name, "cosh2")

    def test_gauss2_conjugate_is_numeric(self):
        psi = conjugate(gauss2())
        self.assertEqual(psi.kind, "conjugate")
        self.assertEqual(conjugate(psi).kind, "gauss2")

    def test_non_increasing_phi_rejected(self):
        with self.assertRaises(DomainError):
            custom([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 0.5, 2.0])
        with self.assertRaises(DomainError):
            custom([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 1.0, 2.0])

    def test_flat_phi_rejected_by_conjugate(self):
        flat = YoungFunction(name="flat", kind="custom", Phi_plus=np.zeros_like, phi_plus=np.zeros_like)
        with self.assertRaises(DomainError):
            conjugate(flat)


class YoungLegendreTests(SimpleTestCase):
    def test_quadratic_self_duality(self):
        report = check_young_legendre(power(2), 3.0, 3.0)
        self.assertAlmostEqual(report.young_gap, 0.0, places=12)
        self.assertAlmostEqual(report.legendre_residual, 0.0, places=12)
        self.assertTrue(report.holds)

    def test_exp2_at_origin_and_one(self):
        origin = check_young_legendre(exp2(), 0.0, 0.0)
        self.assertEqual((origin.young_gap, origin.legendre_residual), (0.0, 0.0))
        self.assertAlmostEqual(check_young_legendre(exp2(), 1.0, 0.0).legendre_residual, 0.0, places=12)

    def test_negative_arguments_rejected(self):
        with self.assertRaises(DomainError):
            check_young_legendre(cosh2(), -1.0, 0.0)

    def test_young_gap_on_grid(self):
        x, y = np.meshgrid(np.linspace(0, 10, 100), np.linspace(0, 10, 100))
        for phi in (exp2(), cosh2(), power(3), power(1.5)):
            psi = conjugate(phi)
            gap = phi.Phi(x) + psi.Phi(y) - x * y
            self.assertGreaterEqual(float(gap.min()), -1e-10, phi.name)

    def test_legendre_residual_on_interval(self):
        x = np.linspace(0, 10, 50)
        for phi in (exp2(), cosh2(), power(3), power(1.5)):
            psi = conjugate(phi)
            residual = phi.Phi(x) + psi.Phi(phi.phi(x)) - x * phi.phi(x)
            self.assertLess(float(np.abs(residual).max()), 1e-8, phi.name)

    def test_numeric_pair_satisfies_legendre(self):
        phi = gauss2()
        for x in (0.5, 1.0, 2.0):
            self.assertLess(abs(check_young_legendre(phi, x, 1.0).legendre_residual), 1e-8)


class SquaredAndCustomTests(SimpleTestCase):
    def test_squared_values(self):
        self.assertAlmostEqual(float(squared(cosh2()).Phi(1.0)), math.cosh(1) - 1, places=14)
        self.assertAlmostEqual(float(squared(power(2)).Phi(2.0)), 8.0)
        self.assertEqual(squared(cosh2()).name, "sq:cosh2")

    def test_custom_table_tracks_cosh2(self):
        grid = np.linspace(0.0, 5.0, 51)
        phi = custom(grid, np.sinh(grid))
        self.assertAlmostEqual(float(phi.Phi(2.0)), math.cosh(2) - 1, delta=5e-3)
        self.assertGreater(float(phi.phi(6.0)), float(phi.phi(5.0)))
        residual = check_young_legendre(phi, 1.5, 1.0).legendre_residual
        self.assertLess(abs(residual), 1e-8)

    def test_custom_table_validation(self):
        with self.assertRaises(DomainError):
            custom([0.5, 1.0, 2.0], [0.0, 1.0, 2.0])
        with self.assertRaises(DomainError):
            custom([0.0, 2.0, 1.0], [0.0, 1.0, 2.0])


class RegistryTests(SimpleTestCase):
    def test_names(self):
        self.assertEqual(young_function("power:2").kind, "power")
        self.assertEqual(young_function("exp2*").kind, "exp2_conj")
        self.assertEqual(young_function("cosh2*").kind, "cosh2_conj")
        self.assertEqual(young_function("sq:cosh2").kind, "squared")
        self.assertEqual(young_function("conj:cosh2").kind, "conjugate")
        self.assertEqual(young_function("gauss2*").kind, "conjugate")
        self.assertEqual(young_function("power:3*").alpha, 1.5)

    def test_bad_names(self):
        for name in ["cosine", "power:x", "power:0.5", ""]:
            with self.assertRaises(DomainError):
                young_function(name)


class DominationTests(SimpleTestCase):
    def test_cosh2_dominates_powers(self):
        for alpha in (1.5, 2, 3, 6):
            self.assertTrue(eventually_dominates(power(alpha), cosh2()).dominates, alpha)

    def test_cosh2_dominated_by_gauss2(self):
        certificate = eventually_dominates(cosh2(), gauss2())
        self.assertTrue(certificate.dominates)
        self.assertEqual((certificate.k, certificate.x_threshold), (1.0, 0.0))
        self.assertEqual(certificate.probe_range, (0.0, 1e6))
        self.assertFalse(eventually_dominates(gauss2(), cosh2()).dominates)

    def test_reflexive(self):
        for phi in (power(2), exp2(), cosh2(), gauss2()):
            certificate = eventually_dominates(phi, phi)
            self.assertTrue(certificate.dominates)
            self.assertEqual((certificate.k, certificate.x_threshold), (1.0, 0.0))

    def test_squared_cosh2_equivalent_to_gauss2(self):
        both, forward, backward = equivalent(squared(cosh2()), gauss2())
        self.assertTrue(both)
        self.assertEqual(forward.k, 2.0)
        self.assertEqual((backward.k, backward.x_threshold), (2.0, 1.0))

    def test_exp2_equivalent_to_cosh2(self):
        self.assertTrue(equivalent(exp2(), cosh2())[0])

    def test_transitive_chain(self):
        self.assertTrue(eventually_dominates(power(2), cosh2()).dominates)
        self.assertTrue(eventually_dominates(cosh2(), gauss2()).dominates)
        self.assertTrue(eventually_dominates(power(2), gauss2()).dominates)

    def test_conjugation_reverses_domination(self):
        for alpha in (1.5, 2.0, 3.0):
            reversed_certificate = eventually_dominates(conjugate(cosh2()), conjugate(power(alpha)))
            self.assertTrue(reversed_certificate.dominates, alpha)


class CommandTests(SimpleTestCase):
    def test_conjugate_command(self):
        out = StringIO()
        call_command("conjugate", "--phi", "power:2", "--x", "3", stdout=out)
        payload = json.loads(out.getvalue())
        self.assertEqual(payload["conjugate"]["name"], "power:2")
        self.assertEqual(payload["rows"][0]["Psi"], 4.5)
        self.assertEqual(payload["rows"][0]["legendre_residual"], 0.0)

    def test_conjugate_command_csv(self):
        out = StringIO()
        call_command("conjugate", "--phi", "cosh2", "--x", "0,1", "--format", "csv", stdout=out)
        lines = out.getvalue().strip().splitlines()
        self.assertTrue(lines[0].startswith("x,y,Phi,phi,Psi,psi"))
        self.assertEqual(len(lines), 3)

    def test_domination_command(self):
        out = StringIO()
        call_command("domination", "--phi1", "cosh2", "--phi2", "gauss2", "--mutual", stdout=out)
        payload = json.loads(out.getvalue())
        self.assertTrue(payload["forward"]["dominates"])
        self.assertFalse(payload["equivalent"])

    def test_unknown_young_function(self):
        with self.assertRaisesMessage(CommandError, "DomainError"):
            call_command("conjugate", "--phi", "cosine", stdout=StringIO())
