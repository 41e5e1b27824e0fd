"""Simplified GSM SMS-DELIVER decoding for embedded TLV payloads.

Scope is deliberately narrow: SMSC-less SMS-DELIVER TPDUs, the 7-bit
default alphabet without UDH or concatenation, BCD-packed addresses.
"""

from __future__ import annotations

from .dissect import DissectedNode
from .bits import BitSpan


class SmsDecodeError(Exception):
    pass


# GSM 7-bit default alphabet, one character per code point 0x00..0x7F.
GSM7_ALPHABET = (
    "@£$¥èéùìòÇ\nØø\rÅå"
    "Δ_ΦΓΛΩΠΨΣΘΞ\x1bÆæßÉ"
    " !\"#¤%&'()*+,-./"
    "0123456789:;<=>?"
    "¡ABCDEFGHIJKLMNOPQRSTUVWXYZÄÖÑÜ§"
    "¿abcdefghijklmnopqrstuvwxyzäöñüà"
)
_GSM7_REVERSE = {ch: i for i, ch in enumerate(GSM7_ALPHABET)}

_BCD_DIGITS = "0123456789*#abc"  # 0xF is the odd-count filler

TOA_INTERNATIONAL = 0x91


def pack_septets(text: str) -> bytes:
    """Encode text to GSM 7-bit packed user data (no UDH)."""
    out = bytearray()
    bitbuf = 0
    nbits = 0
    for ch in text:
        value = _GSM7_REVERSE.get(ch)
        if value is None:
            raise SmsDecodeError(f"character {ch!r} not in the 7-bit default alphabet")
        bitbuf |= value << nbits
        nbits += 7
        while nbits >= 8:
            out.append(bitbuf & 0xFF)
            bitbuf >>= 8
            nbits -= 8
    if nbits:
        out.append(bitbuf & 0xFF)
    return bytes(out)


def unpack_septets(data: bytes, count: int) -> str:
    """Decode `count` septets of GSM 7-bit packed user data."""
    if count * 7 > len(data) * 8:
        raise SmsDecodeError(f"{count} septets need {(count * 7 + 7) // 8} octets, got {len(data)}")
    chars = []
    bitbuf = 0
    nbits = 0
    pos = 0
    for _ in range(count):
        while nbits < 7:
            bitbuf |= data[pos] << nbits
            pos += 1
            nbits += 8
        chars.append(GSM7_ALPHABET[bitbuf & 0x7F])
        bitbuf >>= 7
        nbits -= 7
    return "".join(chars)


def unpack_bcd_digits(data: bytes, ndigits: int) -> str:
    """Semi-octet digits, low nibble first; 0xF fillers are dropped."""
    digits = []
    for octet in data:
        digits.append(octet & 0xF)
        digits.append(octet >> 4)
    return "".join(_BCD_DIGITS[d] for d in digits[:ndigits] if d != 0xF)


def pack_bcd_digits(digits: str) -> bytes:
    nibbles = []
    for d in digits:
        idx = _BCD_DIGITS.find(d)
        if idx < 0:
            raise SmsDecodeError(f"{d!r} is not a BCD address digit")
        nibbles.append(idx)
    if len(nibbles) % 2:
        nibbles.append(0xF)
    return bytes(nibbles[i] | (nibbles[i + 1] << 4) for i in range(0, len(nibbles), 2))


def _need(tpdu: bytes, end: int, what: str) -> None:
    if end > len(tpdu):
        raise SmsDecodeError(f"TPDU truncated in {what} ({end} > {len(tpdu)} bytes)")


def _byte_node(label: str, offset: int, size: int, raw, decoded: str | None = None) -> DissectedNode:
    return DissectedNode(
        label=label, span=BitSpan(offset, 0, size * 8), raw=raw, decoded=decoded
    )


def decode_sms_deliver(tpdu: bytes) -> DissectedNode:
    """Decode an SMSC-less SMS-DELIVER TPDU into a field tree.

    Spans are byte offsets relative to the TPDU; every TPDU byte is covered
    by exactly one leaf so the tree can be grafted into a packet dissection
    without breaking coverage.
    """
    _need(tpdu, 1, "first octet")
    first = tpdu[0]
    mti = first & 0x03
    if mti != 0x00:
        raise SmsDecodeError(f"not an SMS-DELIVER TPDU (message type indicator {mti})")
    root = DissectedNode(label="sms-deliver", span=BitSpan(0, 0, len(tpdu) * 8))
    root.children.append(
        _byte_node("flags", 0, 1, first, decoded=f"SMS-DELIVER (0x{first:02x})")
    )

    _need(tpdu, 3, "originating address header")
    ndigits = tpdu[1]
    toa = tpdu[2]
    addr_bytes = (ndigits + 1) // 2
    _need(tpdu, 3 + addr_bytes, "originating address digits")
    number = unpack_bcd_digits(tpdu[3 : 3 + addr_bytes], ndigits)
    if toa == TOA_INTERNATIONAL:
        number = "+" + number
    sender = DissectedNode(label="sender", span=BitSpan(1, 0, (2 + addr_bytes) * 8), decoded=number)
    sender.children.append(_byte_node("address-length", 1, 1, ndigits))
    sender.children.append(_byte_node("address-type", 2, 1, toa, decoded=f"0x{toa:02x}"))
    if addr_bytes:
        sender.children.append(
            _byte_node("address-digits", 3, addr_bytes, tpdu[3 : 3 + addr_bytes], decoded=number)
        )
    root.children.append(sender)
    pos = 3 + addr_bytes

    _need(tpdu, pos + 2, "protocol id / coding scheme")
    pid = tpdu[pos]
    dcs = tpdu[pos + 1]
    root.children.append(_byte_node("protocol-id", pos, 1, pid))
    root.children.append(_byte_node("coding-scheme", pos + 1, 1, dcs, decoded=_dcs_text(dcs)))
    pos += 2

    _need(tpdu, pos + 7, "timestamp")
    root.children.append(
        _byte_node("timestamp", pos, 7, tpdu[pos : pos + 7], decoded=_decode_timestamp(tpdu[pos : pos + 7]))
    )
    pos += 7

    _need(tpdu, pos + 1, "user data length")
    udl = tpdu[pos]
    root.children.append(_byte_node("user-data-length", pos, 1, udl))
    pos += 1

    seven_bit = (dcs & 0x0C) == 0x00
    if udl == 0:
        ud = DissectedNode(label="user-data", span=None, raw=b"", decoded="")
        root.children.append(ud)
    else:
        ud_octets = (udl * 7 + 7) // 8 if seven_bit else udl
        _need(tpdu, pos + ud_octets, "user data")
        ud_bytes = tpdu[pos : pos + ud_octets]
        decoded = unpack_septets(ud_bytes, udl) if seven_bit else None
        root.children.append(_byte_node("user-data", pos, ud_octets, ud_bytes, decoded=decoded))
        pos += ud_octets
    if pos < len(tpdu):
        root.children.append(_byte_node("padding", pos, len(tpdu) - pos, tpdu[pos:]))
    return root


def _dcs_text(dcs: int) -> str:
    scheme = dcs & 0x0C
    if scheme == 0x00:
        return "7-bit default alphabet"
    if scheme == 0x04:
        return "8-bit data"
    if scheme == 0x08:
        return "UCS-2"
    return f"reserved (0x{dcs:02x})"


def _swap(octet: int) -> int:
    return ((octet & 0xF) * 10) + (octet >> 4)


def _decode_timestamp(ts: bytes) -> str:
    year, month, day, hour, minute, second = (_swap(o) for o in ts[:6])
    tz_octet = ts[6]
    negative = bool(tz_octet & 0x08)  # sign lives in the tens nibble, pre-swap
    quarters = ((tz_octet & 0x07) * 10) + (tz_octet >> 4)
    offset_min = quarters * 15 * (-1 if negative else 1)
    sign = "-" if offset_min < 0 else "+"
    offset_min = abs(offset_min)
    return (
        f"20{year:02d}-{month:02d}-{day:02d} {hour:02d}:{minute:02d}:{second:02d}"
        f" {sign}{offset_min // 60:02d}:{offset_min % 60:02d}"
    )
