from django.apps import AppConfig


class OrliczSobolevConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "orlicz_sobolev"
    verbose_name = "Gaussian Orlicz-Sobolev space"
