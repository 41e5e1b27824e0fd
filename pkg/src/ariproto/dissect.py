"""Schema-driven packet dissection into annotated field trees.

Composed header fields (group, sequence, length, type) are fragmented on
the wire, so their nodes carry no span of their own; each contiguous bit
chunk is a leaf child. Every bit of a packet is covered by exactly one
leaf span (residue included), which leaf_spans() exposes for verification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

from .bits import BitSpan
from .core import (
    AriPacket,
    HDR_G,
    HDR_GROUP5,
    HDR_LEN7,
    HDR_LEN8,
    HDR_RESERVED_A,
    HDR_RESERVED_B,
    HDR_SEQ1,
    HDR_SEQ3,
    HDR_SEQ7,
    HDR_TRAILER,
    HDR_TYPE2,
    HDR_TYPE8,
    HEADER_SIZE,
    MAGIC,
    TLV_HEADER_SIZE,
    TLV_LEN6,
    TLV_LEN8,
    TLV_RESERVED_1,
    TLV_RESERVED_2,
    TLV_TYPE5,
    TLV_TYPE7,
    TLV_VERSION,
    Tlv,
)
from .defs import DefinitionRegistry, MessageDef, PRIMITIVE_CODECS, TlvDef, lookup_message

FLAG_UNKNOWN_GROUP = "unknown-group"
FLAG_UNKNOWN_TYPE = "unknown-type"
FLAG_UNKNOWN_TLV = "unknown-tlv"
FLAG_MISSING_MANDATORY = "missing-mandatory"
FLAG_RESIDUE = "residue"


class DuplicateSelectorError(Exception):
    pass


@dataclass
class DissectedNode:
    """One tree node. span=None marks composed fields and pure annotations."""

    label: str
    span: BitSpan | None = None
    raw: int | bytes | None = None
    decoded: str | None = None
    children: list["DissectedNode"] = field(default_factory=list)
    flags: set[str] = field(default_factory=set)

    def rebase(self, byte_delta: int) -> "DissectedNode":
        """Copy of the subtree with all spans shifted by byte_delta bytes."""
        return DissectedNode(
            label=self.label,
            span=self.span.shifted(byte_delta) if self.span else None,
            raw=self.raw,
            decoded=self.decoded,
            children=[c.rebase(byte_delta) for c in self.children],
            flags=set(self.flags),
        )

    def to_dict(self) -> dict[str, Any]:
        raw: Any = self.raw
        if isinstance(raw, (bytes, bytearray)):
            raw = raw.hex()
        return {
            "label": self.label,
            "span": None
            if self.span is None
            else {
                "byte_offset": self.span.byte_offset,
                "bit_offset": self.span.bit_offset,
                "bit_length": self.span.bit_length,
            },
            "raw": raw,
            "decoded": self.decoded,
            "flags": sorted(self.flags),
            "children": [c.to_dict() for c in self.children],
        }


def _subtree_has_span(node: DissectedNode) -> bool:
    return node.span is not None or any(_subtree_has_span(c) for c in node.children)


def leaf_spans(node: DissectedNode) -> list[BitSpan]:
    """Spans of the finest-grained covering nodes, in tree order.

    A node's own span counts only when no child subtree refines it.
    """
    spans: list[BitSpan] = []
    if any(_subtree_has_span(c) for c in node.children):
        for c in node.children:
            spans.extend(leaf_spans(c))
    elif node.span is not None:
        spans.append(node.span)
    return spans


@dataclass(frozen=True)
class TlvSelector:
    """Declarative match over (group name, message name, TLV name, codec).

    None fields are wildcards; equal selectors are rejected at registration.
    """

    group: str | None = None
    message: str | None = None
    tlv_name: str | None = None
    codec: str | None = None

    def matches(self, group_name: str | None, message_name: str | None,
                tlv_def: TlvDef | None) -> bool:
        if self.group is not None and self.group != group_name:
            return False
        if self.message is not None and self.message != message_name:
            return False
        if self.tlv_name is not None and (tlv_def is None or self.tlv_name != tlv_def.name):
            return False
        if self.codec is not None and (tlv_def is None or self.codec != tlv_def.codec):
            return False
        return True


@dataclass(frozen=True)
class SubDissector:
    name: str
    selector: TlvSelector
    decode: Callable[[bytes], DissectedNode]


def decode_uint_le(value: bytes) -> int:
    """TLV values are little-endian; swap here if real captures disagree."""
    return int.from_bytes(value, "little")


class Dissector:
    """Combines a registry and registered sub-dissectors; safe to share
    read-only once registration is done."""

    def __init__(self, registry: DefinitionRegistry):
        self.registry = registry
        self._subdissectors: list[SubDissector] = []

    def register_subdissector(self, sd: SubDissector) -> int:
        for existing in self._subdissectors:
            if existing.selector == sd.selector:
                raise DuplicateSelectorError(f"selector {sd.selector} already registered")
        self._subdissectors.append(sd)
        return len(self._subdissectors) - 1

    def _find_subdissector(self, group_name, message_name, tlv_def) -> SubDissector | None:
        for sd in self._subdissectors:  # first registered wins
            if sd.selector.matches(group_name, message_name, tlv_def):
                return sd
        return None

    def dissect(self, packet: AriPacket) -> DissectedNode:
        reg = self.registry
        header = packet.header
        group_def = reg.group(header.group)
        group_name = group_def.name if group_def else None
        message = lookup_message(reg, header.group, header.message_type)

        root = DissectedNode(
            label=message.name if message else "ari-packet",
            span=BitSpan(0, 0, packet.size * 8),
            decoded=message.name if message else None,
        )
        if group_def is None:
            root.flags.add(FLAG_UNKNOWN_GROUP)
        elif message is None:
            root.flags.add(FLAG_UNKNOWN_TYPE)

        root.children.append(
            DissectedNode("magic", span=BitSpan(0, 0, 32), raw=MAGIC, decoded="0x" + MAGIC.hex())
        )
        root.children.append(
            _composed(
                "group", header.group, group_name,
                [("group[4:0]", HDR_GROUP5, header.group & 0x1F),
                 ("group[5]", HDR_G, header.group >> 5)],
            )
        )
        root.children.append(
            _composed(
                "sequence", header.sequence, None,
                [("sequence[6:0]", HDR_SEQ7, header.sequence & 0x7F),
                 ("sequence[7]", HDR_SEQ1, (header.sequence >> 7) & 1),
                 ("sequence[10:8]", HDR_SEQ3, header.sequence >> 8)],
            )
        )
        root.children.append(
            _composed(
                "length", header.length, None,
                [("length[6:0]", HDR_LEN7, header.length & 0x7F),
                 ("length[14:7]", HDR_LEN8, header.length >> 7)],
            )
        )
        root.children.append(
            _composed(
                "message_type", header.message_type,
                message.name if message else None,
                [("message_type[9:8]", HDR_TYPE2, header.message_type >> 8),
                 ("message_type[7:0]", HDR_TYPE8, header.message_type & 0xFF)],
            )
        )
        root.children.append(
            _composed(
                "reserved", (header.reserved_a << 3) | header.reserved_b, None,
                [("reserved-a", HDR_RESERVED_A, header.reserved_a),
                 ("reserved-b", HDR_RESERVED_B, header.reserved_b)],
            )
        )
        root.children.append(
            DissectedNode("trailer", span=HDR_TRAILER, raw=header.trailer,
                          decoded=f"0x{header.trailer:04x}")
        )

        offset = HEADER_SIZE
        seen_types: set[int] = set()
        for tlv in packet.tlvs:
            seen_types.add(tlv.type_id)
            tlv_def = message.tlv_by_type(tlv.type_id) if message else None
            root.children.append(
                self._tlv_node(tlv, offset, tlv_def, group_name,
                               message.name if message else None)
            )
            offset += tlv.size

        if message is not None:
            missing = [t.name for t in message.mandatory_tlvs if t.type_id not in seen_types]
            if missing:
                root.flags.add(FLAG_MISSING_MANDATORY)
                root.children.append(
                    DissectedNode(
                        "missing-mandatory",
                        decoded=", ".join(missing),
                        flags={FLAG_MISSING_MANDATORY},
                    )
                )

        if packet.residue:
            root.children.append(
                DissectedNode(
                    "residue",
                    span=BitSpan(offset, 0, len(packet.residue) * 8),
                    raw=packet.residue,
                    decoded=packet.residue.hex(),
                    flags={FLAG_RESIDUE},
                )
            )
        return root

    def _tlv_node(self, tlv: Tlv, offset: int, tlv_def: TlvDef | None,
                  group_name: str | None, message_name: str | None) -> DissectedNode:
        node = DissectedNode(
            label=tlv_def.name if tlv_def else f"tlv 0x{tlv.type_id:x}",
            span=BitSpan(offset, 0, tlv.size * 8),
        )
        if tlv_def is None:
            node.flags.add(FLAG_UNKNOWN_TLV)
        node.children.append(
            _composed(
                "type", tlv.type_id, tlv_def.name if tlv_def else None,
                [("type[6:0]", TLV_TYPE7.shifted(offset), tlv.type_id & 0x7F),
                 ("type[11:7]", TLV_TYPE5.shifted(offset), tlv.type_id >> 7)],
            )
        )
        node.children.append(
            DissectedNode("version", span=TLV_VERSION.shifted(offset), raw=tlv.version)
        )
        node.children.append(
            _composed(
                "length", tlv.length, None,
                [("length[5:0]", TLV_LEN6.shifted(offset), tlv.length & 0x3F),
                 ("length[13:6]", TLV_LEN8.shifted(offset), tlv.length >> 6)],
            )
        )
        node.children.append(
            _composed(
                "reserved", (tlv.reserved1 << 2) | tlv.reserved2, None,
                [("reserved[0]", TLV_RESERVED_1.shifted(offset), tlv.reserved1),
                 ("reserved[2:1]", TLV_RESERVED_2.shifted(offset), tlv.reserved2)],
            )
        )
        if tlv.value:
            value_offset = offset + TLV_HEADER_SIZE
            value_node = DissectedNode(
                "value",
                span=BitSpan(value_offset, 0, len(tlv.value) * 8),
                raw=tlv.value,
                decoded=self._decode_value(tlv.value, tlv_def),
            )
            sd = self._find_subdissector(group_name, message_name, tlv_def)
            if sd is not None:
                try:
                    value_node.children.append(sd.decode(tlv.value).rebase(value_offset))
                except Exception as exc:  # failures annotate, never abort
                    value_node.children.append(
                        DissectedNode("decode-error", decoded=f"{sd.name}: {exc}")
                    )
            node.children.append(value_node)
        return node

    def _decode_value(self, value: bytes, tlv_def: TlvDef | None) -> str:
        if tlv_def is not None:
            codec_name = tlv_def.codec
            if codec_name == "text":
                return value.decode("utf-8", errors="replace")
            if codec_name == "unsigned-int" and 1 <= len(value) <= 8:
                return str(decode_uint_le(value))
            if codec_name not in PRIMITIVE_CODECS and 1 <= len(value) <= 8:
                codec = self.registry.codec(codec_name)
                if codec is not None:
                    return codec.decode(decode_uint_le(value))
        return value.hex()


def _composed(label: str, raw: int, decoded: str | None,
              chunks: list[tuple[str, BitSpan, int]]) -> DissectedNode:
    node = DissectedNode(label, raw=raw, decoded=decoded)
    for chunk_label, span, chunk_value in chunks:
        node.children.append(DissectedNode(chunk_label, span=span, raw=chunk_value))
    return node


def dissect(packet: AriPacket, reg: DefinitionRegistry) -> DissectedNode:
    """One-shot dissection without sub-dissectors."""
    return Dissector(reg).dissect(packet)


def render_text(node: DissectedNode, indent: int = 0) -> str:
    """Indented tree, one `label: decoded (raw)` line per node."""
    raw = node.raw
    if isinstance(raw, (bytes, bytearray)):
        raw = raw.hex()
    if node.decoded is not None and raw is not None and node.decoded != str(raw):
        line = f"{node.label}: {node.decoded} ({raw})"
    elif node.decoded is not None:
        line = f"{node.label}: {node.decoded}"
    elif raw is not None:
        line = f"{node.label}: {raw}"
    else:
        line = node.label
    if node.flags:
        line += f" [{','.join(sorted(node.flags))}]"
    lines = ["  " * indent + line]
    for child in node.children:
        lines.append(render_text(child, indent + 1))
    return "\n".join(lines)


def render_json(node: DissectedNode) -> str:
    return json.dumps(node.to_dict(), indent=2, sort_keys=True)
