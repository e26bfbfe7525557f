"""
Celery app for the wavedg project.

Convergence levels are the only tasks. They run inline while
CELERY_TASK_ALWAYS_EAGER is set, otherwise on a worker started with
`celery -A wavedg worker`.
"""
import os
from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'wavedg.settings')

app = Celery('wavedg')
app.config_from_object('django.conf:settings', namespace='CELERY')

# Levels are long; a worker takes one at a time.
app.conf.worker_prefetch_multiplier = 1

app.autodiscover_tasks()
