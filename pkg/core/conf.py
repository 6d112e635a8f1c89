"""
Access to the ORLICZ_IG numerical defaults.

Library code calls get_setting() instead of touching django.conf.settings
directly, so the numerical modules also work when Django is not configured.
"""
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    "QUADRATURE_ORDER": 64,
    "MONTE_CARLO_SAMPLES": 1_000_000,
    "SEED": 20200726,
    "DIVERGENCE_GUARD": 1e100,
    "TAIL_PROBE_RADII": (20.0, 25.0, 30.0),
    "PANEL_WIDTH": 0.25,
    "PANEL_HALF_WIDTH": 35.0,
    "PANEL_NODES": 8,
    "TOLERANCE": 1e-8,
    "INVERSION_RTOL": 1e-12,
    "BISECTION_MAXITER": 200,
    "MOMENT_K_MAX": 20,
    "OUTPUT_DIGITS": 12,
}


def get_setting(name):
    """Return the configured value of ORLICZ_IG[name], or its built-in default."""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown ORLICZ_IG setting: {name}")
    try:
        configured = getattr(settings, "ORLICZ_IG", {})
    except ImproperlyConfigured:
        configured = {}
    return configured.get(name, DEFAULTS[name])
