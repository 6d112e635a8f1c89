"""
Django settings for orlicz_geometry project.

The project has no web surface and no database: Django provides the
app registry, the management-command CLI, configuration and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# No request handling happens, the key only satisfies Django's checks.
SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "orlicz-geometry-batch-only")

DEBUG = os.getenv("DJANGO_DEBUG", "false").lower() == "true"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "rest_framework",
    "core",
    "young_functions",
    "gaussian_measure",
    "orlicz_norms",
    "hermite_calculus",
    "exponential_manifold",
    "orlicz_sobolev",
    "finite_oracle",
    "cli",
]

MIDDLEWARE = []

# Every value lives in memory; nothing is persisted.
DATABASES = {}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Django REST Framework (serializers only)
REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
}


def _radii(raw):
    return tuple(float(r) for r in raw.split(",") if r.strip())


# Numerical defaults
ORLICZ_IG = {
    "QUADRATURE_ORDER": int(os.getenv("ORLICZ_IG_QUADRATURE_ORDER", "64")),
    "MONTE_CARLO_SAMPLES": int(os.getenv("ORLICZ_IG_MONTE_CARLO_SAMPLES", "1000000")),
    "SEED": int(os.getenv("ORLICZ_IG_SEED", "20200726")),
    "DIVERGENCE_GUARD": float(os.getenv("ORLICZ_IG_DIVERGENCE_GUARD", "1e100")),
    "TAIL_PROBE_RADII": _radii(os.getenv("ORLICZ_IG_TAIL_PROBE_RADII", "20,25,30")),
    "PANEL_WIDTH": float(os.getenv("ORLICZ_IG_PANEL_WIDTH", "0.25")),
    "PANEL_HALF_WIDTH": float(os.getenv("ORLICZ_IG_PANEL_HALF_WIDTH", "35.0")),
    "PANEL_NODES": int(os.getenv("ORLICZ_IG_PANEL_NODES", "8")),
    "TOLERANCE": float(os.getenv("ORLICZ_IG_TOLERANCE", "1e-8")),
    "INVERSION_RTOL": float(os.getenv("ORLICZ_IG_INVERSION_RTOL", "1e-12")),
    "BISECTION_MAXITER": int(os.getenv("ORLICZ_IG_BISECTION_MAXITER", "200")),
    "MOMENT_K_MAX": int(os.getenv("ORLICZ_IG_MOMENT_K_MAX", "20")),
    "OUTPUT_DIGITS": int(os.getenv("ORLICZ_IG_OUTPUT_DIGITS", "12")),
}

# Logging: stdout carries JSON/CSV results, diagnostics go to stderr.
LOG_LEVEL = os.getenv("ORLICZ_IG_LOG_LEVEL", "WARNING")
LOG_FILE = os.getenv("ORLICZ_IG_LOG_FILE")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "level": LOG_LEVEL,
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "plain",
        },
    },
    "loggers": {
        app: {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        }
        for app in INSTALLED_APPS
        if app != "rest_framework"
    },
}

if LOG_FILE:
    LOGGING["handlers"]["file"] = {
        "level": "INFO",
        "class": "logging.FileHandler",
        "filename": LOG_FILE,
        "formatter": "plain",
    }
    for logger_config in LOGGING["loggers"].values():
        logger_config["handlers"].append("file")
        logger_config["level"] = "INFO"
