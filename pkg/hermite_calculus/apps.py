from django.apps import AppConfig


class HermiteCalculusConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "hermite_calculus"
    verbose_name = "Hermite calculus"
