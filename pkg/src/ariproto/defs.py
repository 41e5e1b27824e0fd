"""Protocol schema registry: groups, messages, TLV definitions, enum codecs.

Registries are loaded from a self-contained JSON document (schema below),
are immutable after load, and support exact-match message lookup, version
diffing, and count queries for change tracking across firmware releases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import jsonschema

from .core import GROUP_MAX, MESSAGE_TYPE_MAX, TLV_TYPE_MAX

ENUM_DEFAULT = "???"

#: Codec tags a TLV definition may carry instead of an enum-codec name.
PRIMITIVE_CODECS = ("unsigned-int", "byte-blob", "text")

#: JSON Schema for definition files. Semantic rules the schema cannot express
#: (unique ids, resolvable codec references, increasing TLV indexes) are
#: enforced by load_registry on top.
DEFINITION_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version_label", "groups", "codecs"],
    "additionalProperties": False,
    "properties": {
        "version_label": {"type": "string"},
        "groups": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "name", "messages"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0, "maximum": GROUP_MAX},
                    "name": {"type": "string", "minLength": 1},
                    "messages": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["type", "name", "tlvs"],
                            "additionalProperties": False,
                            "properties": {
                                "type": {
                                    "type": "integer",
                                    "minimum": 0,
                                    "maximum": MESSAGE_TYPE_MAX,
                                },
                                "name": {"type": "string", "minLength": 1},
                                "tlvs": {
                                    "type": "array",
                                    "items": {
                                        "type": "object",
                                        "required": ["index", "type", "codec", "name", "mandatory"],
                                        "additionalProperties": False,
                                        "properties": {
                                            "index": {"type": "integer", "minimum": 1},
                                            "type": {
                                                "type": "integer",
                                                "minimum": 0,
                                                "maximum": TLV_TYPE_MAX,
                                            },
                                            "codec": {"type": "string", "minLength": 1},
                                            "name": {"type": "string", "minLength": 1},
                                            "mandatory": {"type": "boolean"},
                                        },
                                    },
                                },
                            },
                        },
                    },
                },
            },
        },
        "codecs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "offset", "entries"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "offset": {"type": "integer"},
                    "entries": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                },
            },
        },
    },
}


class DefinitionError(Exception):
    """Definition file rejected; message carries the path to the offender."""


@dataclass(frozen=True)
class EnumCodec:
    """Value-to-string table: decode(v) = entries[v - offset], else the default."""

    name: str
    offset: int
    entries: tuple[str, ...]
    default: str = ENUM_DEFAULT

    def decode(self, value: int) -> str:
        index = value - self.offset
        if 0 <= index < len(self.entries):
            return self.entries[index]
        return self.default


def decode_enum(codec: EnumCodec, value: int) -> str:
    return codec.decode(value)


@dataclass(frozen=True)
class TlvDef:
    index: int
    type_id: int
    codec: str
    name: str
    mandatory: bool


@dataclass(frozen=True)
class MessageDef:
    group_id: int
    type_id: int
    name: str
    tlvs: tuple[TlvDef, ...] = ()

    @property
    def mandatory_tlvs(self) -> tuple[TlvDef, ...]:
        return tuple(t for t in self.tlvs if t.mandatory)

    def tlv_by_type(self, type_id: int) -> TlvDef | None:
        for t in self.tlvs:
            if t.type_id == type_id:
                return t
        return None


@dataclass(frozen=True)
class GroupDef:
    group_id: int
    name: str
    messages: tuple[MessageDef, ...] = ()


@dataclass(frozen=True)
class DefinitionRegistry:
    version_label: str
    groups: tuple[GroupDef, ...] = ()
    codecs: tuple[EnumCodec, ...] = ()
    _messages: dict = field(default_factory=dict, repr=False, compare=False)
    _codec_index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        for g in self.groups:
            for m in g.messages:
                self._messages[(m.group_id, m.type_id)] = m
        for c in self.codecs:
            self._codec_index[c.name] = c

    def group(self, group_id: int) -> GroupDef | None:
        for g in self.groups:
            if g.group_id == group_id:
                return g
        return None

    def codec(self, name: str) -> EnumCodec | None:
        return self._codec_index.get(name)

    def message_count(self) -> int:
        return sum(len(g.messages) for g in self.groups)

    def tlv_def_count(self) -> int:
        """Total TLV type definitions, the 'Types' column of a release table."""
        return sum(len(m.tlvs) for g in self.groups for m in g.messages)

    def codec_count(self) -> int:
        return len(self.codecs)


def lookup_message(reg: DefinitionRegistry, group: int, message_type: int) -> MessageDef | None:
    """Exact-match lookup; None lets callers fall back to raw rendering."""
    return reg._messages.get((group, message_type))


def load_registry(document: bytes | str) -> DefinitionRegistry:
    """Parse and validate a definition file into an immutable registry."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DefinitionError(f"not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(raw, DEFINITION_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise DefinitionError(f"schema violation at {exc.json_path}: {exc.message}") from exc

    codecs = tuple(
        EnumCodec(name=c["name"], offset=c["offset"], entries=tuple(c["entries"]))
        for c in raw["codecs"]
    )
    codec_names = set()
    for i, c in enumerate(codecs):
        if c.name in codec_names:
            raise DefinitionError(f"duplicate codec name {c.name!r} at $.codecs[{i}]")
        codec_names.add(c.name)

    groups: list[GroupDef] = []
    seen_groups: set[int] = set()
    for gi, g in enumerate(raw["groups"]):
        gid = g["id"]
        if gid in seen_groups:
            raise DefinitionError(f"duplicate group id {gid} at $.groups[{gi}]")
        seen_groups.add(gid)
        messages: list[MessageDef] = []
        seen_types: set[int] = set()
        for mi, m in enumerate(g["messages"]):
            where = f"$.groups[{gi}].messages[{mi}]"
            if m["type"] in seen_types:
                raise DefinitionError(f"duplicate (group,type) ({gid},{m['type']}) at {where}")
            seen_types.add(m["type"])
            tlvs: list[TlvDef] = []
            prev_index = 0
            for ti, t in enumerate(m["tlvs"]):
                if t["index"] <= prev_index:
                    raise DefinitionError(
                        f"TLV indexes must increase from 1 at {where}.tlvs[{ti}]"
                        f" (index {t['index']} after {prev_index})"
                    )
                if not tlvs and t["index"] != 1:
                    raise DefinitionError(
                        f"first TLV index must be 1 at {where}.tlvs[{ti}], got {t['index']}"
                    )
                prev_index = t["index"]
                if t["codec"] not in PRIMITIVE_CODECS and t["codec"] not in codec_names:
                    raise DefinitionError(
                        f"unknown codec {t['codec']!r} referenced at {where}.tlvs[{ti}]"
                    )
                tlvs.append(
                    TlvDef(
                        index=t["index"],
                        type_id=t["type"],
                        codec=t["codec"],
                        name=t["name"],
                        mandatory=t["mandatory"],
                    )
                )
            messages.append(
                MessageDef(group_id=gid, type_id=m["type"], name=m["name"], tlvs=tuple(tlvs))
            )
        groups.append(GroupDef(group_id=gid, name=g["name"], messages=tuple(messages)))

    return DefinitionRegistry(
        version_label=raw["version_label"], groups=tuple(groups), codecs=codecs
    )


def save_registry(reg: DefinitionRegistry) -> str:
    """Serialize back to the definition-file document (load/save round trips)."""
    doc = {
        "version_label": reg.version_label,
        "groups": [
            {
                "id": g.group_id,
                "name": g.name,
                "messages": [
                    {
                        "type": m.type_id,
                        "name": m.name,
                        "tlvs": [
                            {
                                "index": t.index,
                                "type": t.type_id,
                                "codec": t.codec,
                                "name": t.name,
                                "mandatory": t.mandatory,
                            }
                            for t in m.tlvs
                        ],
                    }
                    for m in g.messages
                ],
            }
            for g in reg.groups
        ],
        "codecs": [
            {"name": c.name, "offset": c.offset, "entries": list(c.entries)} for c in reg.codecs
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


@dataclass
class ChangeReport:
    """Differences between two registries plus release-table style totals."""

    groups_added: list[tuple[int, str]] = field(default_factory=list)
    groups_removed: list[tuple[int, str]] = field(default_factory=list)
    groups_renamed: list[tuple[int, str, str]] = field(default_factory=list)
    messages_added: list[tuple[int, int, str]] = field(default_factory=list)
    messages_removed: list[tuple[int, int, str]] = field(default_factory=list)
    messages_renamed: list[tuple[int, int, str, str]] = field(default_factory=list)
    tlvs_added: list[tuple[int, int, int, str]] = field(default_factory=list)
    tlvs_removed: list[tuple[int, int, int, str]] = field(default_factory=list)
    tlvs_renamed: list[tuple[int, int, int, str, str]] = field(default_factory=list)
    tlvs_changed: list[tuple[int, int, int, str]] = field(default_factory=list)
    codecs_added: list[str] = field(default_factory=list)
    codecs_removed: list[str] = field(default_factory=list)
    codecs_changed: list[str] = field(default_factory=list)
    old_tlv_total: int = 0
    new_tlv_total: int = 0
    old_codec_total: int = 0
    new_codec_total: int = 0

    @property
    def tlv_total_delta(self) -> int:
        return self.new_tlv_total - self.old_tlv_total

    def is_empty(self) -> bool:
        return not any(
            getattr(self, name)
            for name in (
                "groups_added", "groups_removed", "groups_renamed",
                "messages_added", "messages_removed", "messages_renamed",
                "tlvs_added", "tlvs_removed", "tlvs_renamed", "tlvs_changed",
                "codecs_added", "codecs_removed", "codecs_changed",
            )
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "groups": {
                "added": [list(x) for x in self.groups_added],
                "removed": [list(x) for x in self.groups_removed],
                "renamed": [list(x) for x in self.groups_renamed],
            },
            "messages": {
                "added": [list(x) for x in self.messages_added],
                "removed": [list(x) for x in self.messages_removed],
                "renamed": [list(x) for x in self.messages_renamed],
            },
            "tlvs": {
                "added": [list(x) for x in self.tlvs_added],
                "removed": [list(x) for x in self.tlvs_removed],
                "renamed": [list(x) for x in self.tlvs_renamed],
                "changed": [list(x) for x in self.tlvs_changed],
            },
            "codecs": {
                "added": list(self.codecs_added),
                "removed": list(self.codecs_removed),
                "changed": list(self.codecs_changed),
            },
            "totals": {
                "tlv_defs": {
                    "old": self.old_tlv_total,
                    "new": self.new_tlv_total,
                    "delta": self.tlv_total_delta,
                },
                "codecs": {"old": self.old_codec_total, "new": self.new_codec_total},
            },
        }

    def format_text(self) -> str:
        if self.is_empty():
            return "no changes\n"
        lines: list[str] = []
        for gid, name in self.groups_added:
            lines.append(f"+ group {gid} {name}")
        for gid, name in self.groups_removed:
            lines.append(f"- group {gid} {name}")
        for gid, old, new in self.groups_renamed:
            lines.append(f"~ group {gid} renamed {old} -> {new}")
        for gid, tid, name in self.messages_added:
            lines.append(f"+ message ({gid}, 0x{tid:x}) {name}")
        for gid, tid, name in self.messages_removed:
            lines.append(f"- message ({gid}, 0x{tid:x}) {name}")
        for gid, tid, old, new in self.messages_renamed:
            lines.append(f"~ message ({gid}, 0x{tid:x}) renamed {old} -> {new}")
        for gid, tid, ttype, name in self.tlvs_added:
            lines.append(f"+ tlv ({gid}, 0x{tid:x}, 0x{ttype:x}) {name}")
        for gid, tid, ttype, name in self.tlvs_removed:
            lines.append(f"- tlv ({gid}, 0x{tid:x}, 0x{ttype:x}) {name}")
        for gid, tid, ttype, old, new in self.tlvs_renamed:
            lines.append(f"~ tlv ({gid}, 0x{tid:x}, 0x{ttype:x}) renamed {old} -> {new}")
        for gid, tid, ttype, name in self.tlvs_changed:
            lines.append(f"~ tlv ({gid}, 0x{tid:x}, 0x{ttype:x}) {name} definition changed")
        for name in self.codecs_added:
            lines.append(f"+ codec {name}")
        for name in self.codecs_removed:
            lines.append(f"- codec {name}")
        for name in self.codecs_changed:
            lines.append(f"~ codec {name} table changed")
        lines.append(
            f"tlv definitions: {self.old_tlv_total} -> {self.new_tlv_total}"
            f" ({self.tlv_total_delta:+d})"
        )
        lines.append(f"codecs: {self.old_codec_total} -> {self.new_codec_total}")
        return "\n".join(lines) + "\n"


def diff_registries(old: DefinitionRegistry, new: DefinitionRegistry) -> ChangeReport:
    """Compare two registries: same key with a new name is a rename,
    everything else an add plus remove."""
    report = ChangeReport(
        old_tlv_total=old.tlv_def_count(),
        new_tlv_total=new.tlv_def_count(),
        old_codec_total=old.codec_count(),
        new_codec_total=new.codec_count(),
    )

    old_groups = {g.group_id: g for g in old.groups}
    new_groups = {g.group_id: g for g in new.groups}
    for gid in sorted(old_groups.keys() | new_groups.keys()):
        og, ng = old_groups.get(gid), new_groups.get(gid)
        if og is None:
            report.groups_added.append((gid, ng.name))
        elif ng is None:
            report.groups_removed.append((gid, og.name))
        elif og.name != ng.name:
            report.groups_renamed.append((gid, og.name, ng.name))

    old_msgs = {(m.group_id, m.type_id): m for g in old.groups for m in g.messages}
    new_msgs = {(m.group_id, m.type_id): m for g in new.groups for m in g.messages}
    for key in sorted(old_msgs.keys() | new_msgs.keys()):
        om, nm = old_msgs.get(key), new_msgs.get(key)
        if om is None:
            report.messages_added.append((*key, nm.name))
        elif nm is None:
            report.messages_removed.append((*key, om.name))
        elif om.name != nm.name:
            report.messages_renamed.append((*key, om.name, nm.name))

    old_tlvs = {
        (m.group_id, m.type_id, t.type_id): t
        for g in old.groups for m in g.messages for t in m.tlvs
    }
    new_tlvs = {
        (m.group_id, m.type_id, t.type_id): t
        for g in new.groups for m in g.messages for t in m.tlvs
    }
    for key in sorted(old_tlvs.keys() | new_tlvs.keys()):
        ot, nt = old_tlvs.get(key), new_tlvs.get(key)
        if ot is None:
            report.tlvs_added.append((*key, nt.name))
        elif nt is None:
            report.tlvs_removed.append((*key, ot.name))
        elif ot.name != nt.name:
            report.tlvs_renamed.append((*key, ot.name, nt.name))
        elif ot != nt:
            report.tlvs_changed.append((*key, ot.name))

    old_codecs = {c.name: c for c in old.codecs}
    new_codecs = {c.name: c for c in new.codecs}
    for name in sorted(old_codecs.keys() | new_codecs.keys()):
        oc, nc = old_codecs.get(name), new_codecs.get(name)
        if oc is None:
            report.codecs_added.append(name)
        elif nc is None:
            report.codecs_removed.append(name)
        elif oc != nc:
            report.codecs_changed.append(name)

    return report
