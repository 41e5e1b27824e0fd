from __future__ import annotations

import re

from ariproto import DefinitionRegistry, emit_wireshark_dissector, load_registry
from ariproto.wireshark import (
    CODEC_TABLES_BEGIN,
    CODEC_TABLES_END,
    NAME_TABLES_BEGIN,
    NAME_TABLES_END,
)

from regbuild import doc_bytes, registry_doc


def section(script: str, begin: str, end: str) -> str:
    return script.split(begin, 1)[1].split(end, 1)[0]


def quoted_strings(text: str) -> list[str]:
    return re.findall(r'"((?:[^"\\]|\\.)*)"', text)


def test_empty_registry_emits_minimal_script():
    script = emit_wireshark_dissector(DefinitionRegistry(version_label="empty"))
    assert 'Proto("ari", "ARI baseband management protocol")' in script
    assert quoted_strings(section(script, NAME_TABLES_BEGIN, NAME_TABLES_END)) == []
    assert "ari.dissector" in script
    assert "147" in script  # link-type note for the capture files it reads


def test_field_names_are_prefixed():
    script = emit_wireshark_dissector(DefinitionRegistry(version_label="empty"))
    for field in re.findall(r'ProtoField\.\w+\("([^"]+)"', script):
        assert field.startswith("ari.")


def test_emission_is_deterministic(registry63):
    a = emit_wireshark_dissector(registry63)
    b = emit_wireshark_dissector(registry63)
    assert a == b


def test_name_tables_cover_registry_exactly_once(registry63):
    script = emit_wireshark_dissector(registry63)
    expected = []
    for g in registry63.groups:
        expected.append(g.name)
        for m in g.messages:
            expected.append(m.name)
            expected.extend(t.name for t in m.tlvs)
    names = quoted_strings(section(script, NAME_TABLES_BEGIN, NAME_TABLES_END))
    assert sorted(names) == sorted(expected)  # every name once, nothing extra
    assert "net_cell" in names


def test_codec_tables_cover_codecs(registry63):
    script = emit_wireshark_dissector(registry63)
    codec_section = section(script, CODEC_TABLES_BEGIN, CODEC_TABLES_END)
    for codec in registry63.codecs:
        assert codec_section.count(f'["{codec.name}"]') == 1
        for entry in codec.entries:
            assert f'"{entry}"' in codec_section
        assert f"offset = {codec.offset}," in codec_section


def test_lua_string_escaping():
    doc = registry_doc(num_groups=1, messages_per_group=1, tlvs_per_message=1)
    doc["groups"][0]["name"] = 'evil"name\\with\nescapes'
    script = emit_wireshark_dissector(load_registry(doc_bytes(doc)))
    assert '"evil\\"name\\\\with\\nescapes"' in script
