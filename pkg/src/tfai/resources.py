"""Access to the data files shipped with the package (seed KB, schemas,
example diagram and baseline)."""

from __future__ import annotations

from importlib import resources


def _read(name: str) -> bytes:
    return resources.files("tfai").joinpath("data", name).read_bytes()


def seed_kb_bytes() -> bytes:
    return _read("seed_kb.json")


def kb_schema_bytes() -> bytes:
    return _read("kb.schema.json")


def baseline_schema_bytes() -> bytes:
    return _read("baseline.schema.json")


def example_diagram_bytes() -> bytes:
    return _read("example_healthcare.drawio")


def example_baseline_bytes() -> bytes:
    return _read("example_baseline.json")
