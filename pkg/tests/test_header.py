from __future__ import annotations

import random

import pytest

from ariproto import (
    AriHeader,
    BadMagicError,
    HeaderSizeError,
    MAGIC,
    parse_header,
    serialize_header,
)
from ariproto.core import AriFieldError

from reference import ref_build_header, ref_header_fields

ZERO_HEADER = MAGIC + bytes(8)


def test_zero_header_parses_to_zero_fields():
    h = parse_header(ZERO_HEADER)
    assert h == AriHeader(group=0, sequence=0, length=0, message_type=0)


def test_zero_header_serializes_to_magic_plus_zeros():
    assert serialize_header(AriHeader(0, 0, 0, 0)) == ZERO_HEADER


def test_group_bits_from_figure():
    # byte 4 = 0x38 carries group5 bits 00111; the G bit is clear
    data = MAGIC + bytes([0x38]) + bytes(7)
    h = parse_header(data)
    assert h.group == 7


def test_group_seven_round_trips_to_byte_0x38():
    data = serialize_header(AriHeader(group=7, sequence=0, length=0, message_type=0))
    assert data[4] == 0x38


def test_oracle_built_header_parses_exactly():
    # frozen from the per-bit reference oracle
    data = ref_build_header(group=9, sequence=1337, length=20, message_type=0x245, trailer=0x020A)
    assert data == bytes.fromhex("dec07eab487228008545020a")
    h = parse_header(data)
    assert (h.group, h.sequence, h.length, h.message_type) == (9, 1337, 20, 0x245)
    assert h.trailer == 0x020A
    assert (h.reserved_a, h.reserved_b) == (0, 0)


def test_random_round_trip_with_oracle_cross_check():
    rnd = random.Random(2024)
    for _ in range(10_000):
        data = MAGIC + bytes(rnd.randrange(256) for _ in range(8))
        h = parse_header(data)
        ref = ref_header_fields(data)
        assert h.group == ref["group"]
        assert h.sequence == ref["sequence"]
        assert h.length == ref["length"]
        assert h.message_type == ref["message_type"]
        assert h.reserved_a == ref["reserved_a"]
        assert h.reserved_b == ref["reserved_b"]
        assert h.trailer == ref["trailer"]
        assert serialize_header(h) == data


def test_bad_magic_rejected():
    with pytest.raises(BadMagicError):
        parse_header(b"\xde\xc0\x7e\xac" + bytes(8))


def test_wrong_size_rejected():
    with pytest.raises(HeaderSizeError):
        parse_header(MAGIC + bytes(7))
    with pytest.raises(HeaderSizeError):
        parse_header(MAGIC + bytes(9))


def test_field_width_validation():
    with pytest.raises(AriFieldError):
        AriHeader(group=64, sequence=0, length=0, message_type=0)
    with pytest.raises(AriFieldError):
        AriHeader(group=0, sequence=2048, length=0, message_type=0)
    with pytest.raises(AriFieldError):
        AriHeader(group=0, sequence=0, length=32768, message_type=0)
    with pytest.raises(AriFieldError):
        AriHeader(group=0, sequence=0, length=0, message_type=1024)
    with pytest.raises(AriFieldError):
        AriHeader(group=-1, sequence=0, length=0, message_type=0)


def test_width_safety_exhaustive_small_fields():
    """Every value of the 6-, 10-, and 11-bit fields survives a round trip."""
    for group in range(64):
        assert parse_header(serialize_header(AriHeader(group, 0, 0, 0))).group == group
    for seq in range(2048):
        assert parse_header(serialize_header(AriHeader(0, seq, 0, 0))).sequence == seq
    for mtype in range(1024):
        assert parse_header(serialize_header(AriHeader(0, 0, 0, mtype))).message_type == mtype


def test_width_safety_sampled_length_field():
    rnd = random.Random(5)
    values = {0, 1, 127, 128, 16383, 16384, 32767}
    values.update(rnd.randrange(32768) for _ in range(200))
    for length in values:
        assert parse_header(serialize_header(AriHeader(0, 0, length, 0))).length == length
