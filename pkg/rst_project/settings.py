"""
Django settings for rst_project project.

The project has no HTTP surface: everything runs through management
commands (detect, correct, batch, bench, synth). Tunables come from the
environment, optionally loaded from rst_project/.env.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/5.0/ref/settings/
"""
from pathlib import Path
from dotenv import load_dotenv
import os

BASE_DIR = Path(__file__).resolve().parent
env_path = BASE_DIR / '.env'
load_dotenv(dotenv_path=env_path)

SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'fallback-dev-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.getenv('DEBUG', 'False') == 'True'
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'imaging',
    'registration',
    'experiments',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv('RST_DB_PATH', os.path.join(BASE_DIR, 'db.sqlite3')),
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# -------------------- LOGGING --------------------
# Reports and CSV go to stdout, so log records stay on stderr.
RST_LOG_LEVEL = os.getenv('RST_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'imaging': {'handlers': ['console'], 'level': RST_LOG_LEVEL, 'propagate': False},
        'registration': {'handlers': ['console'], 'level': RST_LOG_LEVEL, 'propagate': False},
        'experiments': {'handlers': ['console'], 'level': RST_LOG_LEVEL, 'propagate': False},
    },
}


# -------------------- PREPROCESSING --------------------
# Luminance below the threshold is ink (dark signature on light paper)
RST_THRESHOLD = float(os.getenv('RST_THRESHOLD', '0.5'))


# -------------------- ROTATION SEARCH --------------------
RST_RANGE_MIN = float(os.getenv('RST_RANGE_MIN', '-60'))
RST_RANGE_MAX = float(os.getenv('RST_RANGE_MAX', '60'))
RST_COARSE_STEP = float(os.getenv('RST_COARSE_STEP', '5'))
RST_FINE_STEP = float(os.getenv('RST_FINE_STEP', '1'))
RST_FINE_HALFWIDTH = float(os.getenv('RST_FINE_HALFWIDTH', '3'))
# Background luminance for canvas exposed by rotation (1.0 = white paper)
RST_FILL = float(os.getenv('RST_FILL', '1.0'))
# Bring each rotation candidate to the reference crop height before correlating
RST_HEIGHT_MATCH = os.getenv('RST_HEIGHT_MATCH', 'True') == 'True'


# -------------------- EXPERIMENTS --------------------
RST_BENCH_WORKERS = int(os.getenv('RST_BENCH_WORKERS', '1'))
# Square canvas the table suites place perturbed glyphs on
RST_BENCH_CANVAS = int(os.getenv('RST_BENCH_CANVAS', '512'))
RST_GLYPH_WIDTH = int(os.getenv('RST_GLYPH_WIDTH', '200'))
RST_GLYPH_HEIGHT = int(os.getenv('RST_GLYPH_HEIGHT', '120'))
