"""
Django settings for ris_project project.

Solo hay línea de comandos (``manage.py``): sin URLs, middleware ni plantillas.
Las corridas se registran opcionalmente en la base de datos (``--record``).
"""

from pathlib import Path
import os

from django.core.exceptions import ImproperlyConfigured

try:
    import dj_database_url  # type: ignore
except Exception:  # pragma: no cover
    dj_database_url = None

BASE_DIR = Path(__file__).resolve().parent.parent


def _env_bool(name: str, default: bool = False) -> bool:
    val = os.environ.get(name)
    if val is None:
        return default
    return val.strip().lower() in {"1", "true", "yes", "y", "on"}


def _env_list(name: str, default: list[str] | None = None) -> list[str]:
    val = os.environ.get(name)
    if not val:
        return default or []
    return [x.strip() for x in val.split(",") if x.strip()]


def _env_float(name: str, default: float) -> float:
    val = os.environ.get(name)
    if not val:
        return default
    try:
        return float(val)
    except ValueError as exc:
        raise ImproperlyConfigured(f"{name} debe ser numérico (recibido {val!r}).") from exc


SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "dev-insecure-change-me")

DEBUG = _env_bool("DJANGO_DEBUG", True)

ALLOWED_HOSTS = _env_list("DJANGO_ALLOWED_HOSTS", default=["localhost", "127.0.0.1"])

INSTALLED_APPS = [
    'ris_app',
]


DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DATABASE_URL = os.environ.get("DATABASE_URL")
if DATABASE_URL and dj_database_url is not None:
    DATABASES["default"] = dj_database_url.config(default=DATABASE_URL, conn_max_age=600)


LANGUAGE_CODE = 'es-es'

TIME_ZONE = 'America/Lima'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Simulación y experimentos
RIS_FEASIBILITY_DELTA = _env_float("RIS_FEASIBILITY_DELTA", 1e-3)
if RIS_FEASIBILITY_DELTA <= 0:
    raise ImproperlyConfigured("RIS_FEASIBILITY_DELTA debe ser positivo.")

RIS_RESTARTS = int(os.environ.get("RIS_RESTARTS", "4"))
RIS_ML_DECODE_CAP = int(os.environ.get("RIS_ML_DECODE_CAP", str(2**20)))
RIS_DEFAULT_TRIALS = int(os.environ.get("RIS_DEFAULT_TRIALS", "200"))
RIS_OUTPUT_DIR = Path(os.environ.get("RIS_OUTPUT_DIR", BASE_DIR / "runs"))
RIS_RECORD_RUNS = _env_bool("RIS_RECORD_RUNS", False)
RIS_LOG_LEVEL = os.environ.get("RIS_LOG_LEVEL", "INFO").upper()


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "loggers": {
        "ris_app": {
            "handlers": ["console"],
            "level": RIS_LOG_LEVEL,
            "propagate": False,
        },
        "django.db.backends": {
            "handlers": ["console"],
            "level": "ERROR",
            "propagate": False,
        },
    },
}
