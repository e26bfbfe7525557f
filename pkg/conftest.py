"""
Pytest wiring: run the suite under the same settings as `manage.py test`.
"""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'wavedg.test_settings')
django.setup()

from django.test.utils import setup_test_environment  # noqa: E402

setup_test_environment()
