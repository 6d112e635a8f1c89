from django.apps import AppConfig


class YoungFunctionsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "young_functions"
    verbose_name = "Young functions"
