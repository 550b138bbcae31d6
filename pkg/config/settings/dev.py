from .base import *

DEBUG = True

LOGGING["root"]["level"] = os.getenv("HULLMETRY_LOG_LEVEL", "DEBUG")
