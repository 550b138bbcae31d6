import json
from functools import lru_cache
from pathlib import Path

from apps.geometry.serializers import load_cloud, load_polytope

DATA_DIR = Path(__file__).resolve().parent / "data"


@lru_cache(maxsize=None)
def _read(kind: str, name: str):
    path = DATA_DIR / kind / f"{name}.json"
    with path.open(encoding="utf-8") as handle:
        return json.load(handle)


def body_document(name: str) -> dict:
    return dict(_read("bodies", name))


def cloud_document(name: str) -> dict:
    return dict(_read("clouds", name))


def load_body(name: str):
    """Poliedro da biblioteca embutida (ex.: 'lshape', 'unit_cube')."""
    return load_polytope(body_document(name))


def load_named_cloud(name: str):
    return load_cloud(cloud_document(name))


def load_profiles(name: str = "canonical") -> list:
    return [dict(item) for item in _read("profiles", name)]


def suite_path(name: str) -> Path:
    return DATA_DIR / "suites" / f"{name}.json"


def available(kind: str) -> list:
    return sorted(path.stem for path in (DATA_DIR / kind).glob("*.json"))
