import copy
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from tfai.kb import (
    KbValidationError,
    MalformedDocumentError,
    SchemaVersionError,
    UnknownAssetIdError,
    UnknownCategoryIdError,
    load_kb,
    parse_objectives,
    validate_kb,
    SecurityObjective,
)

from conftest import random_kb_document


class TestLoadKb:
    def test_empty_stream_is_malformed(self):
        with pytest.raises(MalformedDocumentError):
            load_kb(b"")

    def test_non_json_is_malformed(self):
        with pytest.raises(MalformedDocumentError):
            load_kb(b"<xml/>")

    def test_non_object_root_is_malformed(self):
        with pytest.raises(MalformedDocumentError):
            load_kb(b"[1, 2]")

    def test_unsupported_schema_version(self, seed_kb_doc):
        doc = copy.deepcopy(seed_kb_doc)
        doc["schema_version"] = "99"
        with pytest.raises(SchemaVersionError):
            load_kb(json.dumps(doc))

    def test_seed_kb_counts_match_fixture(self, seed_kb, seed_kb_doc):
        # independent oracle: count raw objects in the fixture document
        assert len(seed_kb.assets) == len(seed_kb_doc["assets"])
        assert len(seed_kb.threats) == len(seed_kb_doc["threats"])
        assert len(seed_kb.categories) == len(seed_kb_doc["categories"])

    def test_dangling_threat_ref_fails_naming_both(self, seed_kb_doc):
        doc = copy.deepcopy(seed_kb_doc)
        doc["threats"][0]["asset_ids"] = ["nonexistent"]
        with pytest.raises(KbValidationError) as exc_info:
            load_kb(json.dumps(doc))
        messages = " ".join(f.message for f in exc_info.value.report.errors)
        assert "nonexistent" in messages
        assert doc["threats"][0]["id"] in messages

    def test_loading_same_bytes_is_deterministic(self, seed_kb_raw):
        assert load_kb(seed_kb_raw) == load_kb(seed_kb_raw)

    def test_accepts_binary_stream(self, seed_kb_raw, tmp_path):
        path = tmp_path / "kb.json"
        path.write_bytes(seed_kb_raw)
        with open(path, "rb") as fh:
            kb = load_kb(fh)
        assert kb.schema_version == "1"


class TestValidateKb:
    def test_seed_kb_has_no_errors(self, seed_kb_doc):
        assert validate_kb(seed_kb_doc).errors == ()

    def test_duplicate_asset_id_cites_both_occurrences(self, seed_kb_doc):
        doc = copy.deepcopy(seed_kb_doc)
        doc["assets"].append(dict(doc["assets"][0]))
        report = validate_kb(doc)
        errors = [f for f in report.errors if "duplicate asset id" in f.message]
        assert len(errors) == 1
        assert "$.assets[0]" in errors[0].message
        assert f"$.assets[{len(doc['assets']) - 1}]" in errors[0].path

    def test_undeclared_category_names_dangling_ref(self, seed_kb_doc):
        doc = copy.deepcopy(seed_kb_doc)
        doc["assets"][0]["category_id"] = "ghost_category"
        report = validate_kb(doc)
        assert any("ghost_category" in f.message for f in report.errors)

    def test_unknown_extra_field_is_warning_only(self, seed_kb_doc):
        doc = copy.deepcopy(seed_kb_doc)
        doc["custom_extension"] = {"foo": 1}
        doc["assets"][0]["color"] = "red"
        report = validate_kb(doc)
        assert report.ok
        assert len(report.warnings) == 2

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d["threats"][0].__setitem__("impacted_objectives", []),
            lambda d: d["threats"][0].__setitem__("impacted_objectives", ["privacy"]),
            lambda d: d["threats"][0].__setitem__("asset_ids", []),
            lambda d: d["categories"].pop(0),
            lambda d: d["threats"].append(dict(d["threats"][0])),
            lambda d: d["assets"][0].__setitem__("id", "Not A Token"),
        ],
        ids=[
            "empty-objectives",
            "unknown-objective",
            "empty-asset-ids",
            "missing-category",
            "duplicate-threat-id",
            "bad-token",
        ],
    )
    def test_broken_documents_fail(self, seed_kb_doc, mutate):
        doc = copy.deepcopy(seed_kb_doc)
        mutate(doc)
        assert not validate_kb(doc).ok

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10**9), mutate=st.booleans())
    def test_load_validate_agreement(self, seed, mutate):
        # load succeeds iff validate reports zero errors, on valid and
        # deliberately broken generated documents alike
        rng = random.Random(seed)
        doc = random_kb_document(rng, max_assets=30, max_threats=40)
        if mutate and doc["threats"]:
            doc["threats"][rng.randrange(len(doc["threats"]))]["asset_ids"] = ["missing_ref"]
        ok = validate_kb(doc).ok
        try:
            load_kb(json.dumps(doc))
            loaded = True
        except (KbValidationError, SchemaVersionError):
            loaded = False
        assert loaded == ok


class TestQueries:
    def test_asset_with_no_threats_gives_empty_list(self, seed_kb_doc):
        doc = copy.deepcopy(seed_kb_doc)
        doc["assets"].append(
            {"id": "lonely_asset", "name": "Lonely", "category_id": "data"}
        )
        kb = load_kb(json.dumps(doc))
        assert kb.threats_for_asset("lonely_asset") == []

    def test_training_data_threats_match_linear_scan(self, seed_kb, seed_kb_doc):
        # brute-force scan over the raw fixture document
        expected = [
            t["id"] for t in seed_kb_doc["threats"] if "training_data" in t["asset_ids"]
        ]
        assert [t.id for t in seed_kb.threats_for_asset("training_data")] == expected
        assert expected  # seed KB does reference training_data

    def test_unknown_asset_id_raises(self, seed_kb):
        with pytest.raises(UnknownAssetIdError):
            seed_kb.threats_for_asset("zzz")

    def test_unknown_category_raises(self, seed_kb):
        with pytest.raises(UnknownCategoryIdError):
            seed_kb.assets_by_category("zzz")

    def test_singleton_category(self):
        doc = {
            "schema_version": "1",
            "categories": [{"id": "only", "display_name": "Only"}],
            "assets": [{"id": "one", "name": "One", "category_id": "only"}],
            "threats": [],
        }
        kb = load_kb(json.dumps(doc))
        assert [a.id for a in kb.assets_by_category("only")] == ["one"]

    def test_categories_partition_assets(self, seed_kb):
        seen = []
        for category in seed_kb.categories:
            seen.extend(a.id for a in seed_kb.assets_by_category(category.id))
        assert sorted(seen) == sorted(a.id for a in seed_kb.assets)
        assert len(seen) == len(set(seen))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10**9))
    def test_query_oracle_on_random_kbs(self, seed):
        rng = random.Random(seed)
        doc = random_kb_document(rng, max_assets=200, max_threats=400)
        kb = load_kb(json.dumps(doc))
        asset = rng.choice(doc["assets"])["id"]
        oracle = [t["id"] for t in doc["threats"] if asset in t["asset_ids"]]
        assert [t.id for t in kb.threats_for_asset(asset)] == oracle


class TestParseObjectives:
    def test_all_tokens_round_trip(self):
        tokens = [o.value for o in SecurityObjective]
        assert parse_objectives(tokens) == set(SecurityObjective)

    def test_unknown_token_lists_valid_ones(self):
        with pytest.raises(ValueError) as exc_info:
            parse_objectives(["privacy"])
        message = str(exc_info.value)
        for o in SecurityObjective:
            assert o.value in message

    def test_exactly_five_members(self):
        assert len(SecurityObjective) == 5
