from django.test import SimpleTestCase, override_settings

from .conf import DEFAULTS, get_setting
from .exceptions import (
    DimensionMismatchError,
    DomainError,
    ExpressionError,
    MissingGradientError,
    NegativeWeightError,
    NonPositiveDensityError,
    NotCenteredError,
    OrliczError,
    OutsideProperDomainError,
    UnboundedDerivativeError,
)


class SettingsTests(SimpleTestCase):
    def test_defaults(self):
        self.assertEqual(get_setting("QUADRATURE_ORDER"), 64)
        self.assertEqual(get_setting("TAIL_PROBE_RADII"), (20.0, 25.0, 30.0))
        self.assertEqual(get_setting("OUTPUT_DIGITS"), 12)

    @override_settings(ORLICZ_IG={"TOLERANCE": 1e-4})
    def test_override(self):
        self.assertEqual(get_setting("TOLERANCE"), 1e-4)
        self.assertEqual(get_setting("SEED"), DEFAULTS["SEED"])

    @override_settings(ORLICZ_IG={})
    def test_missing_key_falls_back(self):
        self.assertEqual(get_setting("PANEL_WIDTH"), 0.25)

    def test_unknown_setting(self):
        with self.assertRaises(KeyError):
            get_setting("GRID_SIZE")


class ExceptionTests(SimpleTestCase):
    def test_hierarchy(self):
        for cls in (
            DimensionMismatchError,
            DomainError,
            ExpressionError,
            MissingGradientError,
            NegativeWeightError,
            NonPositiveDensityError,
            NotCenteredError,
            OutsideProperDomainError,
            UnboundedDerivativeError,
        ):
            self.assertTrue(issubclass(cls, OrliczError))
        self.assertTrue(issubclass(OrliczError, ValueError))
