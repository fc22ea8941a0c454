"""Bundled example tables. ``SICA_FIXTURES`` points at an alternative directory."""
import os
from pathlib import Path

from ..table import CountTable, ingest_csv

NAMES = ("example1", "example2", "example3", "rodent")


def fixture_dir() -> Path:
    env = os.environ.get("SICA_FIXTURES")
    return Path(env) if env else Path(__file__).parent


def fixture_path(name: str) -> Path:
    return fixture_dir() / f"{name}.csv"


def load_fixture(name: str) -> CountTable:
    with open(fixture_path(name), encoding="utf-8") as fh:
        return ingest_csv(fh)
