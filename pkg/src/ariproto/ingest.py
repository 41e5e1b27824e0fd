"""Trace ingestion and export: hex system logs, classic pcap, corpus dirs.

The hex-log extractor is deliberately permissive (debug-profile log framing
is undocumented); requiring the magic sequence in the decoded bytes is the
correctness anchor. pcap files are written big-endian with the user-defined
link type the generated Wireshark script binds to.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .core import MAGIC

CHIP_TO_HOST = "chip-to-host"
HOST_TO_CHIP = "host-to-chip"

PCAP_MAGIC = 0xA1B2C3D4
PCAP_SNAPLEN = 65535
#: First user-defined DLT; the emitted Wireshark script registers on it.
PCAP_LINKTYPE = 147

_GLOBAL_HEADER = struct.Struct(">IHHiIII")
_RECORD_HEADER = struct.Struct(">IIII")

_CONTIGUOUS_HEX = re.compile(r"[0-9A-Fa-f]+")
_SPACED_HEX = re.compile(
    r"(?<![0-9A-Fa-f])[0-9A-Fa-f]{2}(?:[ \t]+[0-9A-Fa-f]{2})+(?![0-9A-Fa-f])"
)
_RX = re.compile(r"(?:^|[^a-z0-9])rx(?:[^a-z0-9]|$)", re.IGNORECASE)
_TX = re.compile(r"(?:^|[^a-z0-9])tx(?:[^a-z0-9]|$)", re.IGNORECASE)


class PcapError(Exception):
    pass


class PcapFormatError(PcapError):
    def __init__(self, offset: int, reason: str):
        super().__init__(f"bad pcap data at offset {offset}: {reason}")
        self.offset = offset


@dataclass
class TraceRecord:
    index: int
    data: bytes
    timestamp: int | None = None  # microseconds since epoch
    direction: str | None = None


@dataclass
class HexLog:
    """parse_hex_log result: kept records plus skip/trim bookkeeping."""

    records: list[TraceRecord] = field(default_factory=list)
    skipped_lines: int = 0
    odd_length_lines: int = 0

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


def _best_hex_run(line: str) -> tuple[str, bool] | None:
    """Longest hex run as (digits, was_odd_length), spaced pairs allowed."""
    best = ""
    for m in _CONTIGUOUS_HEX.finditer(line):
        if len(m.group()) > len(best):
            best = m.group()
    for m in _SPACED_HEX.finditer(line):
        digits = re.sub(r"\s+", "", m.group())
        if len(digits) > len(best):
            best = digits
    if not best:
        return None
    if len(best) % 2:
        return best[:-1], True
    return best, False


def parse_hex_log(lines: Iterable[str] | str) -> HexLog:
    """Extract magic-bearing byte runs from log text, one record per line.

    Each kept record is trimmed to start at the first magic occurrence;
    lines without a qualifying run are counted, not errors.
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    result = HexLog()
    for line in lines:
        run = _best_hex_run(line)
        if run is None:
            result.skipped_lines += 1
            continue
        digits, was_odd = run
        data = bytes.fromhex(digits)
        start = data.find(MAGIC)
        if start < 0:
            result.skipped_lines += 1
            continue
        if was_odd:
            result.odd_length_lines += 1
        direction = None
        if _RX.search(line):
            direction = CHIP_TO_HOST
        elif _TX.search(line):
            direction = HOST_TO_CHIP
        result.records.append(
            TraceRecord(index=len(result.records), data=data[start:], direction=direction)
        )
    return result


def export_pcap(records: Iterable[TraceRecord]) -> bytes:
    """Classic pcap, big-endian, version 2.4, snaplen 65535, link type 147."""
    out = bytearray(
        _GLOBAL_HEADER.pack(PCAP_MAGIC, 2, 4, 0, 0, PCAP_SNAPLEN, PCAP_LINKTYPE)
    )
    for rec in records:
        if len(rec.data) > PCAP_SNAPLEN:
            raise PcapError(
                f"record {rec.index} is {len(rec.data)} bytes, larger than snaplen {PCAP_SNAPLEN}"
            )
        ts = rec.timestamp or 0
        out += _RECORD_HEADER.pack(ts // 1_000_000, ts % 1_000_000, len(rec.data), len(rec.data))
        out += rec.data
    return bytes(out)


def import_pcap(data: bytes) -> list[TraceRecord]:
    """Read a classic pcap file in either byte order."""
    if len(data) < _GLOBAL_HEADER.size:
        raise PcapFormatError(0, f"file is {len(data)} bytes, global header needs 24")
    magic = data[:4]
    if magic == PCAP_MAGIC.to_bytes(4, "big"):
        order = ">"
    elif magic == PCAP_MAGIC.to_bytes(4, "little"):
        order = "<"
    else:
        raise PcapFormatError(0, f"unknown magic {magic.hex()}")
    record_header = struct.Struct(order + "IIII")

    records: list[TraceRecord] = []
    pos = _GLOBAL_HEADER.size
    while pos < len(data):
        if pos + record_header.size > len(data):
            raise PcapFormatError(pos, "truncated record header")
        ts_sec, ts_usec, incl_len, _orig_len = record_header.unpack_from(data, pos)
        pos += record_header.size
        if pos + incl_len > len(data):
            raise PcapFormatError(
                pos, f"record declares {incl_len} bytes, {len(data) - pos} available"
            )
        timestamp = ts_sec * 1_000_000 + ts_usec
        records.append(
            TraceRecord(
                index=len(records),
                data=data[pos : pos + incl_len],
                timestamp=timestamp if timestamp else None,
            )
        )
        pos += incl_len
    return records


def read_corpus_dir(path: str | Path) -> list[bytes]:
    """Raw packet files in lexicographic name order; *.json and dotfiles
    are metadata, not packets."""
    root = Path(path)
    packets = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if not entry.is_file() or entry.name.startswith(".") or entry.suffix == ".json":
            continue
        packets.append(entry.read_bytes())
    return packets


def write_corpus_dir(path: str | Path, packets: Iterable[bytes]) -> list[Path]:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    written = []
    for i, data in enumerate(packets):
        target = root / f"{i:08d}.bin"
        target.write_bytes(data)
        written.append(target)
    return written
