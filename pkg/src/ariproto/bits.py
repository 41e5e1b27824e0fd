"""Bit-addressed field access for non-byte-aligned wire formats.

Bit numbering is MSB-first within each byte: bit i of a message is bit
(7 - i % 8) of byte (i // 8), matching the left-to-right rendering of the
header diagrams this codec implements.
"""

from __future__ import annotations

from dataclasses import dataclass


class FieldRangeError(ValueError):
    """A bit span falls outside the message or a value exceeds its width."""


@dataclass(frozen=True)
class BitSpan:
    """A run of bits: byte_offset plus bit_offset (0-7, MSB-first), bit_length >= 1."""

    byte_offset: int
    bit_offset: int
    bit_length: int

    def __post_init__(self) -> None:
        if self.byte_offset < 0:
            raise FieldRangeError(f"negative byte_offset {self.byte_offset}")
        if not 0 <= self.bit_offset < 8:
            raise FieldRangeError(f"bit_offset {self.bit_offset} out of 0..7")
        if self.bit_length < 1:
            raise FieldRangeError(f"bit_length {self.bit_length} < 1")

    @property
    def first_bit(self) -> int:
        return self.byte_offset * 8 + self.bit_offset

    @property
    def end_bit(self) -> int:
        """One past the last addressed bit."""
        return self.first_bit + self.bit_length

    def shifted(self, byte_delta: int) -> "BitSpan":
        return BitSpan(self.byte_offset + byte_delta, self.bit_offset, self.bit_length)


def extract_bits(message: bytes, span: BitSpan) -> int:
    """Read span from message as a big-endian unsigned integer.

    The span must lie inside the message and be at most 64 bits wide.
    """
    if span.bit_length > 64:
        raise FieldRangeError(f"bit_length {span.bit_length} > 64")
    first = span.first_bit
    last = first + span.bit_length - 1
    if last >= len(message) * 8:
        raise FieldRangeError(
            f"span {span} ends at bit {last} but message has {len(message) * 8} bits"
        )
    start_byte = first // 8
    end_byte = last // 8
    chunk = int.from_bytes(message[start_byte : end_byte + 1], "big")
    shift = (end_byte + 1) * 8 - 1 - last
    return (chunk >> shift) & ((1 << span.bit_length) - 1)


def insert_bits(buf: bytearray, span: BitSpan, value: int) -> None:
    """Write value into span in place; other bits are left untouched."""
    if span.bit_length > 64:
        raise FieldRangeError(f"bit_length {span.bit_length} > 64")
    if value < 0 or value >> span.bit_length:
        raise FieldRangeError(f"value {value} does not fit in {span.bit_length} bits")
    first = span.first_bit
    last = first + span.bit_length - 1
    if last >= len(buf) * 8:
        raise FieldRangeError(
            f"span {span} ends at bit {last} but buffer has {len(buf) * 8} bits"
        )
    start_byte = first // 8
    end_byte = last // 8
    chunk = int.from_bytes(buf[start_byte : end_byte + 1], "big")
    shift = (end_byte + 1) * 8 - 1 - last
    mask = ((1 << span.bit_length) - 1) << shift
    chunk = (chunk & ~mask) | (value << shift)
    buf[start_byte : end_byte + 1] = chunk.to_bytes(end_byte - start_byte + 1, "big")
