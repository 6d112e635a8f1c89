from django.apps import AppConfig


class ExponentialManifoldConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "exponential_manifold"
    verbose_name = "Maximal exponential model"
