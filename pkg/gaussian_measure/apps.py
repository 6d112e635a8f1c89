from django.apps import AppConfig


class GaussianMeasureConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "gaussian_measure"
    verbose_name = "Gaussian measure"
