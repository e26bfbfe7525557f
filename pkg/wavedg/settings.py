"""
Django settings for the wavedg project.
"""
import os
from pathlib import Path
from dotenv import load_dotenv
from django.core.management.utils import get_random_secret_key

# Load environment variables
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', get_random_secret_key())

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    # Third-party
    'rest_framework',

    # Local apps
    'apps.core',  # Exceptions, thread pool, output formatting
    'apps.reference',
    'apps.mesh',
    'apps.geometry',
    'apps.operators',
    'apps.solver',
    'apps.analysis',
    'apps.cli',
]

# Numerical settings
WAVEDG_THREADS = int(os.getenv('WAVEDG_THREADS', str(os.cpu_count() or 1)))
WAVEDG_MAX_DOF = int(os.getenv('WAVEDG_MAX_DOF', '20000'))
WAVEDG_MAX_DEGREE = 9
WAVEDG_DEFAULT_CFL = float(os.getenv('WAVEDG_DEFAULT_CFL', '0.5'))
WAVEDG_WATCHDOG_INTERVAL = int(os.getenv('WAVEDG_WATCHDOG_INTERVAL', '50'))
WAVEDG_WATCHDOG_GROWTH = float(os.getenv('WAVEDG_WATCHDOG_GROWTH', '10.0'))
WAVEDG_NODE_TOLERANCE = float(os.getenv('WAVEDG_NODE_TOLERANCE', '1e-10'))

# Logging
WAVEDG_LOG_LEVEL = os.getenv('WAVEDG_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': WAVEDG_LOG_LEVEL,
            'propagate': False,
        },
        'celery': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
    },
}

# Celery Configuration
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', 'redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'
# Convergence levels run inline unless a worker pool is configured.
CELERY_TASK_ALWAYS_EAGER = os.getenv('CELERY_TASK_ALWAYS_EAGER', 'True') == 'True'
CELERY_TASK_EAGER_PROPAGATES = True
