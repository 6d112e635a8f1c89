import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "orlicz_geometry.settings")
django.setup()
