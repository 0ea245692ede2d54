"""The shipped JSON Schemas are a second, independent description of the KB
and baseline file formats; the fixtures must satisfy both them and the
engine's own validator."""

import json

import jsonschema
import pytest

from tfai.resources import (
    baseline_schema_bytes,
    example_baseline_bytes,
    kb_schema_bytes,
    seed_kb_bytes,
)


@pytest.fixture(scope="module")
def kb_schema():
    return json.loads(kb_schema_bytes())


@pytest.fixture(scope="module")
def baseline_schema():
    return json.loads(baseline_schema_bytes())


def test_seed_kb_satisfies_schema(kb_schema):
    jsonschema.validate(json.loads(seed_kb_bytes()), kb_schema)


def test_example_baseline_satisfies_schema(baseline_schema):
    jsonschema.validate(json.loads(example_baseline_bytes()), baseline_schema)


def test_schema_rejects_unknown_objective(kb_schema):
    doc = json.loads(seed_kb_bytes())
    doc["threats"][0]["impacted_objectives"] = ["privacy"]
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, kb_schema)


def test_schema_rejects_empty_asset_ids(kb_schema):
    doc = json.loads(seed_kb_bytes())
    doc["threats"][0]["asset_ids"] = []
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, kb_schema)


def test_schema_objective_enum_matches_engine(kb_schema):
    from tfai.kb import OBJECTIVE_TOKENS

    enum = kb_schema["$defs"]["objective"]["enum"]
    assert tuple(enum) == OBJECTIVE_TOKENS
