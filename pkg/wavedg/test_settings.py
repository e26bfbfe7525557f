"""
Test settings for running tests.
"""
from .settings import *

# Run Celery tasks inline
CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True

# Fixed worker count so thread-determinism tests exercise chunking
WAVEDG_THREADS = 2

LOGGING['loggers']['apps']['level'] = 'WARNING'
