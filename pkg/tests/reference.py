"""Independent reference oracles used by the test suite.

Everything in here is deliberately naive: per-bit loops and list-of-bits
packing, sharing no code with the package under test. Expected values in
the tests were computed with these oracles and then frozen.
"""

from __future__ import annotations

MAGIC = bytes([0xDE, 0xC0, 0x7E, 0xAB])


def ref_bit(message: bytes, i: int) -> int:
    """Bit i of a message: MSB-first within each byte."""
    return (message[i // 8] >> (7 - i % 8)) & 1


def ref_extract(message: bytes, byte_offset: int, bit_offset: int, bit_length: int) -> int:
    """Fold the addressed bits big-endian, one bit at a time."""
    first = byte_offset * 8 + bit_offset
    value = 0
    for i in range(first, first + bit_length):
        value = (value << 1) | ref_bit(message, i)
    return value


def ref_set_bits(buf: bytearray, byte_offset: int, bit_offset: int, bit_length: int, value: int) -> None:
    first = byte_offset * 8 + bit_offset
    for k in range(bit_length):
        bit = (value >> (bit_length - 1 - k)) & 1
        i = first + k
        mask = 1 << (7 - i % 8)
        if bit:
            buf[i // 8] |= mask
        else:
            buf[i // 8] &= ~mask


# Header chunk positions, straight off the two 48-bit figure rows.
# (byte_offset, bit_offset, bit_length)
HDR_GROUP5 = (4, 0, 5)
HDR_RESERVED_A = (4, 5, 3)
HDR_SEQ7 = (5, 0, 7)
HDR_G = (5, 7, 1)
HDR_LEN7 = (6, 0, 7)
HDR_SEQ1 = (6, 7, 1)
HDR_LEN8 = (7, 0, 8)
HDR_TYPE2 = (8, 0, 2)
HDR_RESERVED_B = (8, 2, 3)
HDR_SEQ3 = (8, 5, 3)
HDR_TYPE8 = (9, 0, 8)
HDR_TRAILER = (10, 0, 16)


def ref_header_fields(data: bytes) -> dict[str, int]:
    """Decode all header fields of a 12-byte header via the per-bit oracle."""
    g5 = ref_extract(data, *HDR_GROUP5)
    g = ref_extract(data, *HDR_G)
    sn7 = ref_extract(data, *HDR_SEQ7)
    sn1 = ref_extract(data, *HDR_SEQ1)
    sn3 = ref_extract(data, *HDR_SEQ3)
    len7 = ref_extract(data, *HDR_LEN7)
    len8 = ref_extract(data, *HDR_LEN8)
    t2 = ref_extract(data, *HDR_TYPE2)
    t8 = ref_extract(data, *HDR_TYPE8)
    return {
        "group": (g << 5) | g5,
        "sequence": (sn3 << 8) | (sn1 << 7) | sn7,
        "length": (len8 << 7) | len7,
        "message_type": (t2 << 8) | t8,
        "reserved_a": ref_extract(data, *HDR_RESERVED_A),
        "reserved_b": ref_extract(data, *HDR_RESERVED_B),
        "trailer": ref_extract(data, *HDR_TRAILER),
    }


def ref_build_header(
    group: int,
    sequence: int,
    length: int,
    message_type: int,
    reserved_a: int = 0,
    reserved_b: int = 0,
    trailer: int = 0,
) -> bytes:
    """Assemble a 12-byte header bit by bit, independent of the codec."""
    buf = bytearray(12)
    buf[0:4] = MAGIC
    ref_set_bits(buf, *HDR_GROUP5, group & 0x1F)
    ref_set_bits(buf, *HDR_G, (group >> 5) & 1)
    ref_set_bits(buf, *HDR_SEQ7, sequence & 0x7F)
    ref_set_bits(buf, *HDR_SEQ1, (sequence >> 7) & 1)
    ref_set_bits(buf, *HDR_SEQ3, (sequence >> 8) & 0x7)
    ref_set_bits(buf, *HDR_LEN7, length & 0x7F)
    ref_set_bits(buf, *HDR_LEN8, (length >> 7) & 0xFF)
    ref_set_bits(buf, *HDR_TYPE8, message_type & 0xFF)
    ref_set_bits(buf, *HDR_TYPE2, (message_type >> 8) & 0x3)
    ref_set_bits(buf, *HDR_RESERVED_A, reserved_a)
    ref_set_bits(buf, *HDR_RESERVED_B, reserved_b)
    ref_set_bits(buf, *HDR_TRAILER, trailer)
    return bytes(buf)


def ref_build_tlv(type_id: int, version: int, value: bytes,
                  reserved1: int = 0, reserved2: int = 0,
                  declared_length: int | None = None) -> bytes:
    """Assemble one TLV bit by bit. declared_length lets tests lie on purpose."""
    length = len(value) if declared_length is None else declared_length
    buf = bytearray(4)
    ref_set_bits(buf, 0, 0, 7, type_id & 0x7F)
    ref_set_bits(buf, 0, 7, 1, reserved1)
    ref_set_bits(buf, 1, 0, 3, version)
    ref_set_bits(buf, 1, 3, 5, (type_id >> 7) & 0x1F)
    ref_set_bits(buf, 2, 0, 6, length & 0x3F)
    ref_set_bits(buf, 2, 6, 2, reserved2)
    ref_set_bits(buf, 3, 0, 8, (length >> 6) & 0xFF)
    return bytes(buf) + value


def ref_pack_septets(values: list[int]) -> bytes:
    """GSM 7-bit packing via an explicit list of bits, LSB-first per septet."""
    bits: list[int] = []
    for v in values:
        for k in range(7):
            bits.append((v >> k) & 1)
    while len(bits) % 8:
        bits.append(0)
    out = bytearray()
    for i in range(0, len(bits), 8):
        octet = 0
        for k in range(8):
            octet |= bits[i + k] << k
        out.append(octet)
    return bytes(out)


def ref_unpack_septets(data: bytes, count: int) -> list[int]:
    bits: list[int] = []
    for octet in data:
        for k in range(8):
            bits.append((octet >> k) & 1)
    if count * 7 > len(bits):
        raise ValueError("not enough octets")
    values = []
    for i in range(count):
        v = 0
        for k in range(7):
            v |= bits[i * 7 + k] << k
        values.append(v)
    return values


def ref_pack_bcd(digits: str) -> bytes:
    """Semi-octet packing, low nibble first, 0xF filler on odd counts."""
    table = "0123456789*#abc"
    nibbles = [table.index(d) for d in digits]
    if len(nibbles) % 2:
        nibbles.append(0xF)
    out = bytearray()
    for i in range(0, len(nibbles), 2):
        out.append(nibbles[i] | (nibbles[i + 1] << 4))
    return bytes(out)


def ref_unpack_bcd(data: bytes, ndigits: int) -> str:
    table = "0123456789*#abc"
    digits = []
    for octet in data:
        digits.append(octet & 0xF)
        digits.append(octet >> 4)
    return "".join(table[d] for d in digits[:ndigits] if d != 0xF)


def ref_ngram_frequencies(packets: list[bytes], n: int) -> dict[bytes, int]:
    freq: dict[bytes, int] = {}
    for pkt in packets:
        for i in range(len(pkt) - n + 1):
            gram = bytes(pkt[i : i + n])
            freq[gram] = freq.get(gram, 0) + 1
    return freq


def ref_rarity_score(packets: list[bytes], n: int, threshold: int) -> list[int]:
    freq = ref_ngram_frequencies(packets, n)
    scores = []
    for pkt in packets:
        score = 0
        for i in range(len(pkt) - n + 1):
            if freq[bytes(pkt[i : i + n])] <= threshold:
                score += 1
        scores.append(score)
    return scores
