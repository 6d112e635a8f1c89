from django.apps import AppConfig


class FiniteOracleConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "finite_oracle"
    verbose_name = "Finite sample space oracle"
