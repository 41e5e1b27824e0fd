from __future__ import annotations

import json
import random

import pytest

from ariproto import (
    DefinitionError,
    EnumCodec,
    decode_enum,
    diff_registries,
    load_registry,
    lookup_message,
    save_registry,
)

from regbuild import doc_bytes, registry_doc, sized_registry_doc

MINIMAL = {
    "version_label": "minimal",
    "groups": [
        {
            "id": 1,
            "name": "only_group",
            "messages": [
                {
                    "type": 7,
                    "name": "OnlyMessage",
                    "tlvs": [
                        {"index": 1, "type": 3, "codec": "only_codec",
                         "name": "only_tlv", "mandatory": True},
                    ],
                }
            ],
        }
    ],
    "codecs": [{"name": "only_codec", "offset": 0, "entries": ["zero", "one"]}],
}


def test_minimal_document_loads():
    reg = load_registry(doc_bytes(MINIMAL))
    assert len(reg.groups) == 1
    assert reg.message_count() == 1
    assert reg.tlv_def_count() == 1
    assert reg.codec_count() == 1
    assert reg.version_label == "minimal"


def test_sixty_three_groups_load(registry63):
    assert len(registry63.groups) == 63
    assert registry63.group(9).name == "net_cell"


def test_unknown_codec_reference_names_the_codec():
    doc = json.loads(json.dumps(MINIMAL))
    doc["groups"][0]["messages"][0]["tlvs"][0]["codec"] = "ghost_codec"
    with pytest.raises(DefinitionError, match="ghost_codec"):
        load_registry(doc_bytes(doc))


def test_schema_violation_reports_path():
    doc = json.loads(json.dumps(MINIMAL))
    doc["groups"][0]["id"] = "nine"
    with pytest.raises(DefinitionError, match=r"groups\[0\]"):
        load_registry(doc_bytes(doc))


def test_duplicate_group_and_message_rejected():
    doc = json.loads(json.dumps(MINIMAL))
    doc["groups"].append(json.loads(json.dumps(doc["groups"][0])))
    with pytest.raises(DefinitionError, match="duplicate group"):
        load_registry(doc_bytes(doc))

    doc = json.loads(json.dumps(MINIMAL))
    messages = doc["groups"][0]["messages"]
    messages.append(json.loads(json.dumps(messages[0])))
    with pytest.raises(DefinitionError, match="duplicate"):
        load_registry(doc_bytes(doc))


def test_tlv_indexes_must_increase_from_one():
    doc = json.loads(json.dumps(MINIMAL))
    tlvs = doc["groups"][0]["messages"][0]["tlvs"]
    tlvs[0]["index"] = 2
    with pytest.raises(DefinitionError, match="index"):
        load_registry(doc_bytes(doc))

    tlvs[0]["index"] = 1
    tlvs.append({**tlvs[0], "index": 1, "type": 9, "name": "other"})
    with pytest.raises(DefinitionError, match="increase"):
        load_registry(doc_bytes(doc))


def test_not_json_rejected():
    with pytest.raises(DefinitionError, match="JSON"):
        load_registry(b"version_label: nope")


def test_lookup_known_message(registry63):
    msg = lookup_message(registry63, 9, 0x101)
    assert msg is not None
    assert msg.name == "IBINetSetRadioSignalReportingConfiguration"


def test_lookup_unknown_pairs(registry63):
    assert lookup_message(registry63, 63, 0) is None
    assert lookup_message(registry63, 9, 0x3FF) is None


def test_every_fixture_entry_resolves(registry63):
    for group in registry63.groups:
        for message in group.messages:
            assert lookup_message(registry63, group.group_id, message.type_id) is message


LISTING_CODEC = EnumCodec(name="c", offset=1, entries=tuple(f"e{i}" for i in range(1, 9)))


def test_enum_lookup_table_semantics():
    assert decode_enum(LISTING_CODEC, 1) == "e1"
    assert decode_enum(LISTING_CODEC, 8) == "e8"
    assert decode_enum(LISTING_CODEC, 0) == "???"
    assert decode_enum(LISTING_CODEC, 9) == "???"


def test_enum_decode_total():
    rnd = random.Random(0)
    for _ in range(1000):
        value = rnd.randrange(1 << 32)
        text = decode_enum(LISTING_CODEC, value)
        if 1 <= value <= 8:
            assert text == f"e{value}"
        else:
            assert text == "???"


def test_save_load_identity(registry63):
    again = load_registry(save_registry(registry63).encode())
    assert again == registry63


def test_diff_identity_is_empty(registry63):
    report = diff_registries(registry63, registry63)
    assert report.is_empty()
    assert report.tlv_total_delta == 0
    assert "no changes" in report.format_text()


def test_diff_table_sized_fixtures():
    old = load_registry(doc_bytes(sized_registry_doc(783)))
    new = load_registry(doc_bytes(sized_registry_doc(874)))
    assert old.tlv_def_count() == 783
    assert new.tlv_def_count() == 874
    report = diff_registries(old, new)
    assert report.old_tlv_total == 783
    assert report.new_tlv_total == 874
    assert report.tlv_total_delta == 91
    assert len(report.tlvs_added) == 91
    assert not report.tlvs_removed


def test_diff_rename_only():
    doc_a = registry_doc(num_groups=3)
    doc_b = json.loads(json.dumps(doc_a))
    doc_b["groups"][1]["messages"][0]["name"] = "RenamedMessage"
    report = diff_registries(load_registry(doc_bytes(doc_a)), load_registry(doc_bytes(doc_b)))
    assert len(report.messages_renamed) == 1
    gid, tid, old, new = report.messages_renamed[0]
    assert (gid, tid) == (1, 0x100)
    assert new == "RenamedMessage"
    assert not report.messages_added and not report.messages_removed
    assert not report.tlvs_added and not report.tlvs_removed


def test_diff_group_rename_and_codec_change():
    doc_a = registry_doc(num_groups=3)
    doc_b = json.loads(json.dumps(doc_a))
    doc_b["groups"][2]["name"] = "renamed_group"
    doc_b["codecs"][0]["entries"].append("REASON_9")
    report = diff_registries(load_registry(doc_bytes(doc_a)), load_registry(doc_bytes(doc_b)))
    assert report.groups_renamed == [(2, "grp_02", "renamed_group")]
    assert report.codecs_changed == [doc_a["codecs"][0]["name"]]


def test_diff_inverse_consistency():
    doc_a = registry_doc(num_groups=5, messages_per_group=2)
    doc_b = json.loads(json.dumps(doc_a))
    del doc_b["groups"][4]
    doc_b["groups"][0]["messages"][0]["tlvs"].append(
        {"index": 3, "type": 0x900, "codec": "text", "name": "brand_new", "mandatory": False}
    )
    doc_b["groups"][1]["name"] = "renamed"
    a = load_registry(doc_bytes(doc_a))
    b = load_registry(doc_bytes(doc_b))
    forward = diff_registries(a, b)
    backward = diff_registries(b, a)
    assert forward.groups_added == backward.groups_removed
    assert forward.groups_removed == backward.groups_added
    assert forward.messages_added == backward.messages_removed
    assert forward.tlvs_added == backward.tlvs_removed
    assert [(g, o, n) for g, o, n in forward.groups_renamed] == [
        (g, n, o) for g, o, n in backward.groups_renamed
    ]
