"""
Django settings for endgames project.

Проект не обслуживает HTTP: Django дает конфигурацию, логирование,
команды управления и тестовый раннер.
"""

import os

from pathlib import Path

from dotenv import load_dotenv


load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('SECRET_KEY', 'endgames-workbench')

DEBUG = os.environ.get('DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',

    'workbench',
]

DATABASES = {}

REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}


# Параметры стенда; WORKBENCH_BUDGET задает бюджет по умолчанию для всех команд.

WORKBENCH = {
    'HORIZON': int(os.environ.get('WORKBENCH_HORIZON', 64)),
    'BUDGET': int(os.environ.get('WORKBENCH_BUDGET', 16)),
    'WIDTH': int(os.environ.get('WORKBENCH_WIDTH', 3)),
    'SEED': int(os.environ.get('WORKBENCH_SEED', 0)),
    'RADIUS': int(os.environ.get('WORKBENCH_RADIUS', 20)),
    'ARTIFACT_DIR': Path(os.environ.get('WORKBENCH_ARTIFACT_DIR', BASE_DIR / 'artifacts')),
    'PRESETS': Path(os.environ.get('WORKBENCH_PRESETS', BASE_DIR / 'workbench' / 'presets.yaml')),
    'SCHEMA_VERSION': 1,
}


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
        'workbench': {
            'handlers': ['console'],
            'level': os.environ.get('WORKBENCH_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}


# Internationalization
# https://docs.djangoproject.com/en/5.0/topics/i18n/

LANGUAGE_CODE = 'ru-ru'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
