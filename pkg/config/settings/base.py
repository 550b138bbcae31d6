import os
from pathlib import Path
from dotenv import load_dotenv
import dj_database_url

load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "unsafe-secret-key")
DEBUG = False

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "apps.geometry.apps.GeometryConfig",
    "apps.minkowski.apps.MinkowskiConfig",
    "apps.covering.apps.CoveringConfig",
    "apps.chaining.apps.ChainingConfig",
    "apps.entropy.apps.EntropyConfig",
    "apps.harness.apps.HarnessConfig",
]

DATABASES = {
    "default": dj_database_url.config(
        default=os.getenv("DATABASE_URL", "sqlite:///db.sqlite3"),
        conn_max_age=600,
    )
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

USE_TZ = True
TIME_ZONE = "UTC"

REST_FRAMEWORK = {
    "COERCE_DECIMAL_TO_STRING": False,
}

HULLMETRY = {
    "TAU_GEOM": float(os.getenv("HULLMETRY_TAU_GEOM", "1e-9")),
    "TAU_VOL": float(os.getenv("HULLMETRY_TAU_VOL", "1e-9")),
    "MAX_HULL_DIM": int(os.getenv("HULLMETRY_MAX_HULL_DIM", "8")),
    "GRID_POINTS_PER_AXIS": int(os.getenv("HULLMETRY_GRID_POINTS", "200")),
    "MAX_SAMPLE_POINTS": int(os.getenv("HULLMETRY_MAX_SAMPLES", str(10**6))),
    "EXACT_COVER_LIMIT": 24,
    "EXACT_GAMMA_LIMIT": 5,
    "GREEDY_GAMMA_LIMIT": 4096,
    "MC_BLOCK": 1000,
    "DEFAULT_SEED": int(os.getenv("HULLMETRY_SEED", "0")),
    "REVBM_C1": float(os.getenv("HULLMETRY_REVBM_C1", "1.0")),
    "CONVERGENCE_ETA": 1e-3,
    "CONVEXIFY_POINTS_PER_AXIS": int(os.getenv("HULLMETRY_CONVEXIFY_POINTS", "48")),
}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
            "stream": "ext://sys.stderr",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": os.getenv("HULLMETRY_LOG_LEVEL", "WARNING"),
    },
}
