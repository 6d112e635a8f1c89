from django.apps import AppConfig


class OrliczNormsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "orlicz_norms"
    verbose_name = "Orlicz norms"
