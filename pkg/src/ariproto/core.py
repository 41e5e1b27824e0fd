"""Bit-exact codec for ARI packets.

A packet is a 12-byte header followed by `header.length` payload bytes,
normally a run of TLVs. Several header fields are fragmented into
non-adjacent bit chunks; the chunk positions and composition orders below
are the canonical ones (later chunk = high-order, except the packet length,
where the 8-bit chunk is high-order). Reserved bits and the 16-bit trailer
are carried verbatim so that parse/serialize round trips are byte-exact on
real captures.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .bits import BitSpan, extract_bits, insert_bits

MAGIC = bytes([0xDE, 0xC0, 0x7E, 0xAB])
HEADER_SIZE = 12
TLV_HEADER_SIZE = 4

GROUP_MAX = 63
SEQUENCE_MAX = 2047
LENGTH_MAX = 32767
MESSAGE_TYPE_MAX = 1023
TLV_TYPE_MAX = 4095
TLV_LENGTH_MAX = 16383

# Header bit chunks (spans relative to packet start).
HDR_GROUP5 = BitSpan(4, 0, 5)
HDR_RESERVED_A = BitSpan(4, 5, 3)
HDR_SEQ7 = BitSpan(5, 0, 7)
HDR_G = BitSpan(5, 7, 1)
HDR_LEN7 = BitSpan(6, 0, 7)
HDR_SEQ1 = BitSpan(6, 7, 1)
HDR_LEN8 = BitSpan(7, 0, 8)
HDR_TYPE2 = BitSpan(8, 0, 2)
HDR_RESERVED_B = BitSpan(8, 2, 3)
HDR_SEQ3 = BitSpan(8, 5, 3)
HDR_TYPE8 = BitSpan(9, 0, 8)
HDR_TRAILER = BitSpan(10, 0, 16)

# The three chunks of the 11-bit sequence number, low-order first.
SEQUENCE_SPANS = (HDR_SEQ7, HDR_SEQ1, HDR_SEQ3)

# TLV bit chunks (spans relative to TLV start).
TLV_TYPE7 = BitSpan(0, 0, 7)
TLV_RESERVED_1 = BitSpan(0, 7, 1)
TLV_VERSION = BitSpan(1, 0, 3)
TLV_TYPE5 = BitSpan(1, 3, 5)
TLV_LEN6 = BitSpan(2, 0, 6)
TLV_RESERVED_2 = BitSpan(2, 6, 2)
TLV_LEN8 = BitSpan(3, 0, 8)


class AriError(Exception):
    """Base class for codec failures."""


class BadMagicError(AriError):
    pass


class HeaderSizeError(AriError):
    pass


class TruncationError(AriError):
    """Payload shorter than the header declares."""

    def __init__(self, declared: int, available: int):
        super().__init__(f"header declares {declared} payload bytes, {available} available")
        self.declared = declared
        self.available = available


class TlvBoundsError(AriError):
    """Strict-mode TLV parse failure, with the packet byte offset."""

    def __init__(self, offset: int, reason: str):
        super().__init__(f"malformed TLV at byte {offset}: {reason}")
        self.offset = offset


class LengthConsistencyError(AriError):
    pass


def _check_range(name: str, value: int, maximum: int) -> None:
    if not 0 <= value <= maximum:
        raise AriFieldError(f"{name}={value} out of 0..{maximum}")


class AriFieldError(AriError, ValueError):
    """A field value exceeds its wire width."""


@dataclass(frozen=True)
class AriHeader:
    """Decoded 12-byte header. reserved_* and trailer are opaque, kept verbatim."""

    group: int
    sequence: int
    length: int
    message_type: int
    reserved_a: int = 0
    reserved_b: int = 0
    trailer: int = 0

    def __post_init__(self) -> None:
        _check_range("group", self.group, GROUP_MAX)
        _check_range("sequence", self.sequence, SEQUENCE_MAX)
        _check_range("length", self.length, LENGTH_MAX)
        _check_range("message_type", self.message_type, MESSAGE_TYPE_MAX)
        _check_range("reserved_a", self.reserved_a, 7)
        _check_range("reserved_b", self.reserved_b, 7)
        _check_range("trailer", self.trailer, 0xFFFF)


@dataclass(frozen=True)
class Tlv:
    """One type-length-value element; length is always len(value) on this type.

    Inconsistent declared lengths never surface here: the lenient parser
    routes them to AriPacket.residue and the fuzzer injects them by patching
    serialized bytes.
    """

    type_id: int
    version: int
    value: bytes = b""
    reserved1: int = 0
    reserved2: int = 0

    def __post_init__(self) -> None:
        _check_range("type_id", self.type_id, TLV_TYPE_MAX)
        _check_range("version", self.version, 7)
        _check_range("value length", len(self.value), TLV_LENGTH_MAX)
        _check_range("reserved1", self.reserved1, 1)
        _check_range("reserved2", self.reserved2, 3)

    @property
    def length(self) -> int:
        return len(self.value)

    @property
    def size(self) -> int:
        return TLV_HEADER_SIZE + len(self.value)


@dataclass(frozen=True)
class AriPacket:
    header: AriHeader
    tlvs: tuple[Tlv, ...] = ()
    residue: bytes = b""

    @property
    def payload_size(self) -> int:
        return sum(t.size for t in self.tlvs) + len(self.residue)

    @property
    def size(self) -> int:
        return HEADER_SIZE + self.payload_size


def parse_header(data: bytes) -> AriHeader:
    """Decode exactly 12 header bytes."""
    if len(data) != HEADER_SIZE:
        raise HeaderSizeError(f"header must be {HEADER_SIZE} bytes, got {len(data)}")
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4].hex()}, expected {MAGIC.hex()}")
    group5 = extract_bits(data, HDR_GROUP5)
    g = extract_bits(data, HDR_G)
    sn7 = extract_bits(data, HDR_SEQ7)
    sn1 = extract_bits(data, HDR_SEQ1)
    sn3 = extract_bits(data, HDR_SEQ3)
    len7 = extract_bits(data, HDR_LEN7)
    len8 = extract_bits(data, HDR_LEN8)
    t2 = extract_bits(data, HDR_TYPE2)
    t8 = extract_bits(data, HDR_TYPE8)
    return AriHeader(
        group=(g << 5) | group5,
        sequence=(sn3 << 8) | (sn1 << 7) | sn7,
        length=(len8 << 7) | len7,
        message_type=(t2 << 8) | t8,
        reserved_a=extract_bits(data, HDR_RESERVED_A),
        reserved_b=extract_bits(data, HDR_RESERVED_B),
        trailer=extract_bits(data, HDR_TRAILER),
    )


def serialize_header(h: AriHeader) -> bytes:
    buf = bytearray(HEADER_SIZE)
    buf[0:4] = MAGIC
    insert_bits(buf, HDR_GROUP5, h.group & 0x1F)
    insert_bits(buf, HDR_G, h.group >> 5)
    insert_bits(buf, HDR_SEQ7, h.sequence & 0x7F)
    insert_bits(buf, HDR_SEQ1, (h.sequence >> 7) & 1)
    insert_bits(buf, HDR_SEQ3, h.sequence >> 8)
    insert_bits(buf, HDR_LEN7, h.length & 0x7F)
    insert_bits(buf, HDR_LEN8, h.length >> 7)
    insert_bits(buf, HDR_TYPE8, h.message_type & 0xFF)
    insert_bits(buf, HDR_TYPE2, h.message_type >> 8)
    insert_bits(buf, HDR_RESERVED_A, h.reserved_a)
    insert_bits(buf, HDR_RESERVED_B, h.reserved_b)
    insert_bits(buf, HDR_TRAILER, h.trailer)
    return bytes(buf)


def serialize_tlv(t: Tlv) -> bytes:
    buf = bytearray(TLV_HEADER_SIZE)
    insert_bits(buf, TLV_TYPE7, t.type_id & 0x7F)
    insert_bits(buf, TLV_TYPE5, t.type_id >> 7)
    insert_bits(buf, TLV_VERSION, t.version)
    insert_bits(buf, TLV_LEN6, t.length & 0x3F)
    insert_bits(buf, TLV_LEN8, t.length >> 6)
    insert_bits(buf, TLV_RESERVED_1, t.reserved1)
    insert_bits(buf, TLV_RESERVED_2, t.reserved2)
    return bytes(buf) + t.value


def _parse_tlv_header(payload: bytes, pos: int) -> tuple[int, int, int, int, int]:
    """(type_id, version, declared_length, reserved1, reserved2) at pos."""
    window = payload[pos : pos + TLV_HEADER_SIZE]
    type7 = extract_bits(window, TLV_TYPE7)
    type5 = extract_bits(window, TLV_TYPE5)
    version = extract_bits(window, TLV_VERSION)
    len6 = extract_bits(window, TLV_LEN6)
    len8 = extract_bits(window, TLV_LEN8)
    rsv1 = extract_bits(window, TLV_RESERVED_1)
    rsv2 = extract_bits(window, TLV_RESERVED_2)
    return (type5 << 7) | type7, version, (len8 << 6) | len6, rsv1, rsv2


def parse_packet(data: bytes, strict: bool = False) -> AriPacket:
    """Parse a header plus greedy TLV run.

    A payload tail that is shorter than a TLV header, or whose declared
    value length overruns the payload, becomes `residue` when lenient and a
    TlvBoundsError when strict. Bytes beyond 12 + header.length are ignored.
    """
    if len(data) < HEADER_SIZE:
        raise HeaderSizeError(f"packet needs at least {HEADER_SIZE} bytes, got {len(data)}")
    header = parse_header(bytes(data[:HEADER_SIZE]))
    available = len(data) - HEADER_SIZE
    if available < header.length:
        raise TruncationError(declared=header.length, available=available)
    payload = bytes(data[HEADER_SIZE : HEADER_SIZE + header.length])

    tlvs: list[Tlv] = []
    residue = b""
    pos = 0
    while pos + TLV_HEADER_SIZE <= len(payload):
        type_id, version, length, rsv1, rsv2 = _parse_tlv_header(payload, pos)
        end = pos + TLV_HEADER_SIZE + length
        if end > len(payload):
            if strict:
                raise TlvBoundsError(
                    HEADER_SIZE + pos,
                    f"declared value length {length} overruns payload by {end - len(payload)}",
                )
            residue = payload[pos:]
            pos = len(payload)
            break
        tlvs.append(
            Tlv(
                type_id=type_id,
                version=version,
                value=payload[pos + TLV_HEADER_SIZE : end],
                reserved1=rsv1,
                reserved2=rsv2,
            )
        )
        pos = end
    if pos < len(payload):
        if strict:
            raise TlvBoundsError(
                HEADER_SIZE + pos, f"{len(payload) - pos} tail bytes shorter than a TLV header"
            )
        residue = payload[pos:]
    return AriPacket(header=header, tlvs=tuple(tlvs), residue=residue)


def serialize_packet(p: AriPacket, recompute_length: bool = False) -> bytes:
    """Byte-exact inverse of parse_packet.

    With recompute_length the header length field is rewritten to the actual
    payload size; otherwise a mismatch raises LengthConsistencyError.
    """
    payload = b"".join(serialize_tlv(t) for t in p.tlvs) + p.residue
    header = p.header
    if header.length != len(payload):
        if not recompute_length:
            raise LengthConsistencyError(
                f"header.length={header.length} but payload is {len(payload)} bytes"
            )
        header = replace(header, length=len(payload))
    return serialize_header(header) + payload


@dataclass
class ScanEntry:
    """One scan result: a packet at offset, or an in-band parse failure."""

    offset: int
    packet: AriPacket | None = None
    error: AriError | None = None

    @property
    def ok(self) -> bool:
        return self.packet is not None

    @property
    def size(self) -> int:
        return self.packet.size if self.packet is not None else 0


def scan_stream(data: bytes, strict: bool = False) -> list[ScanEntry]:
    """Find packets in a byte stream with magic-byte resynchronization.

    Successful parses consume 12 + length bytes (magic inside a parsed
    payload is never treated as a packet start); failures are recorded
    in-band and scanning resumes one byte after the failed magic.
    """
    entries: list[ScanEntry] = []
    pos = 0
    while True:
        start = data.find(MAGIC, pos)
        if start < 0:
            break
        try:
            packet = parse_packet(data[start:], strict=strict)
        except AriError as exc:
            entries.append(ScanEntry(offset=start, error=exc))
            pos = start + 1
            continue
        entries.append(ScanEntry(offset=start, packet=packet))
        pos = start + packet.size
    return entries
