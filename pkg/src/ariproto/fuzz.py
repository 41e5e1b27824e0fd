"""Deterministic, seed-addressed fuzz payload generation.

Campaigns are pure functions of (corpus, config): the RNG is SplitMix64,
chosen because its algorithm is fully specified and trivially portable, so
a (seed, case_index) pair addresses the same bytes on any platform. Magic
bytes are never touched; every emitted case is sequence-fixed and carries
enough mutation records to be re-serialized exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

from .bits import BitSpan, insert_bits
from .core import (
    AriError,
    AriPacket,
    HDR_LEN7,
    HDR_LEN8,
    HEADER_SIZE,
    LENGTH_MAX,
    MAGIC,
    SEQUENCE_SPANS,
    TLV_LEN6,
    TLV_LEN8,
    TLV_LENGTH_MAX,
    TLV_TYPE5,
    TLV_TYPE7,
    TLV_TYPE_MAX,
    TLV_VERSION,
    Tlv,
    parse_packet,
    serialize_packet,
    serialize_tlv,
)
from .defs import DefinitionRegistry

_MASK64 = (1 << 64) - 1

STRATEGY_BITFLIP = "bitflip"
STRATEGY_TLV_AWARE = "tlv-aware"
STRATEGY_CORPUS_REPLAY = "corpus-replay-mutate"
STRATEGIES = (STRATEGY_BITFLIP, STRATEGY_TLV_AWARE, STRATEGY_CORPUS_REPLAY)


class ConfigError(ValueError):
    pass


class MutationError(AriError):
    """Input violates a mutator precondition."""


class SplitMix64:
    """SplitMix64 PRNG (Steele/Lea/Flood's mixing constants)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) via Lemire's multiply-shift."""
        if n <= 0:
            raise ValueError(f"below() needs n >= 1, got {n}")
        return (self.next_u64() * n) >> 64

    def chance(self, probability: float) -> bool:
        return self.next_u64() < int(probability * (1 << 64))

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_distinct(self, n: int, k: int) -> list[int]:
        """k distinct integers in [0, n), in draw order; capped at n."""
        k = min(k, n)
        seen: set[int] = set()
        out: list[int] = []
        while len(out) < k:
            v = self.below(n)
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out


@dataclass
class MutationRecord:
    """One primitive edit; replaying the records in order rebuilds the case.

    kind "bit": position is a bit index, old/new are 0 or 1.
    kind "byte": position is a byte offset, old/new are byte values.
    kind "append": position is the offset appended at, new is hex data.
    """

    kind: str
    position: int
    old: int | str
    new: int | str

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "position": self.position, "old": self.old, "new": self.new}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MutationRecord":
        return cls(kind=d["kind"], position=d["position"], old=d["old"], new=d["new"])


@dataclass
class FuzzCase:
    data: bytes
    case_index: int = 0
    parent: int | None = None
    mutations: list[MutationRecord] = field(default_factory=list)
    seq_fixed: bool = False
    action: str | None = None


@dataclass
class SequenceTracker:
    """11-bit modular counter for rewriting per-packet sequence numbers."""

    next: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.next <= 2047:
            raise ConfigError(f"sequence {self.next} out of 0..2047")

    def take(self) -> int:
        value = self.next
        self.next = (value + 1) & 0x7FF
        return value


@dataclass
class CampaignConfig:
    seed: int
    strategy: str = STRATEGY_BITFLIP
    count: int = 1
    mutation_rate: float = 1.0
    flips_per_packet: int = 1
    preserve_header: bool = True
    ordered: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= _MASK64:
            raise ConfigError(f"seed {self.seed} out of 64-bit range")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}, expected one of {STRATEGIES}")
        if self.count < 1:
            raise ConfigError(f"count must be >= 1, got {self.count}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigError(f"mutation_rate {self.mutation_rate} out of [0, 1]")
        if self.flips_per_packet < 1:
            raise ConfigError(f"flips_per_packet must be >= 1, got {self.flips_per_packet}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "strategy": self.strategy,
            "count": self.count,
            "mutation_rate": self.mutation_rate,
            "flips_per_packet": self.flips_per_packet,
            "preserve_header": self.preserve_header,
            "ordered": self.ordered,
        }


def _require_packet_bytes(data: bytes) -> None:
    if len(data) < HEADER_SIZE:
        raise MutationError(f"packet is {len(data)} bytes, need at least {HEADER_SIZE}")
    if data[:4] != MAGIC:
        raise MutationError(f"packet does not start with magic ({data[:4].hex()})")


def _flip_bit(buf: bytearray, bit: int) -> tuple[int, int]:
    mask = 1 << (7 - bit % 8)
    old = (buf[bit // 8] & mask) >> (7 - bit % 8)
    buf[bit // 8] ^= mask
    return old, old ^ 1


def _write_span(buf: bytearray, span: BitSpan, value: int,
                records: list[MutationRecord] | None) -> None:
    """insert_bits plus byte-level mutation records for changed bytes."""
    first_byte = span.first_bit // 8
    last_byte = (span.end_bit - 1) // 8
    before = bytes(buf[first_byte : last_byte + 1])
    insert_bits(buf, span, value)
    if records is None:
        return
    for i, (old, new) in enumerate(zip(before, buf[first_byte : last_byte + 1])):
        if old != new:
            records.append(MutationRecord("byte", first_byte + i, old, new))


def mutate_bitflip(packet: bytes, rng: SplitMix64, flips: int = 1) -> FuzzCase:
    """Flip `flips` distinct bits at positions >= 32 (magic stays intact)."""
    if flips < 1:
        raise ConfigError(f"flips must be >= 1, got {flips}")
    _require_packet_bytes(packet)
    buf = bytearray(packet)
    flippable = len(packet) * 8 - 32
    records = []
    for pos in rng.sample_distinct(flippable, flips):
        bit = 32 + pos
        old, new = _flip_bit(buf, bit)
        records.append(MutationRecord("bit", bit, old, new))
    return FuzzCase(data=bytes(buf), mutations=records, action="bitflip")


def _registry_tlv_types(registry: DefinitionRegistry | None) -> list[int]:
    if registry is None:
        return []
    types = {t.type_id for g in registry.groups for m in g.messages for t in m.tlvs}
    return sorted(types)


def _patch_header_length(buf: bytearray, new_length: int,
                         records: list[MutationRecord]) -> None:
    if new_length > LENGTH_MAX:
        return  # leave the stale length in place rather than overflow the field
    _write_span(buf, HDR_LEN7, new_length & 0x7F, records)
    _write_span(buf, HDR_LEN8, new_length >> 7, records)


def mutate_tlv_aware(
    packet: AriPacket | bytes,
    rng: SplitMix64,
    registry: DefinitionRegistry | None = None,
    preserve_header: bool = True,
) -> FuzzCase:
    """Mutate one TLV (or append one when there are none).

    Actions: corrupt value bytes, grow/shrink the declared length without
    moving bytes, substitute the type id (from the registry when given),
    bump the version. With preserve_header=False one extra action may flip
    header bits beyond the magic. The header length is only recomputed for
    the structure-preserving append.
    """
    if isinstance(packet, (bytes, bytearray)):
        original = bytes(packet)
        try:
            parsed = parse_packet(original)
        except AriError as exc:
            raise MutationError(f"unparseable packet: {exc}") from exc
    else:
        parsed = packet
        original = serialize_packet(parsed)

    buf = bytearray(original)
    records: list[MutationRecord] = []

    if not parsed.tlvs:
        known_types = _registry_tlv_types(registry)
        type_id = known_types[rng.below(len(known_types))] if known_types \
            else rng.below(TLV_TYPE_MAX + 1)
        value = bytes(rng.below(256) for _ in range(rng.below(9)))
        tlv_bytes = serialize_tlv(Tlv(type_id=type_id, version=rng.below(8), value=value))
        records.append(MutationRecord("append", len(buf), "", tlv_bytes.hex()))
        buf += tlv_bytes
        _patch_header_length(buf, len(buf) - HEADER_SIZE, records)
        return FuzzCase(data=bytes(buf), mutations=records, action="tlv-append")

    choice = rng.below(len(parsed.tlvs))
    offset = HEADER_SIZE
    for t in parsed.tlvs[:choice]:
        offset += t.size
    tlv = parsed.tlvs[choice]

    actions = []
    if tlv.value:
        actions.append("value-corrupt")
    actions += ["length-adjust", "type-substitute", "version-bump"]
    if not preserve_header:
        actions.append("header-corrupt")
    action = actions[rng.below(len(actions))]

    if action == "value-corrupt":
        value_offset = offset + 4
        count = 1 + rng.below(min(8, len(tlv.value)))
        for pos in rng.sample_distinct(len(tlv.value), count):
            old = buf[value_offset + pos]
            new = old ^ (1 + rng.below(255))
            buf[value_offset + pos] = new
            records.append(MutationRecord("byte", value_offset + pos, old, new))
    elif action == "length-adjust":
        magnitude = 1 + rng.below(8)
        grow = rng.below(2) == 0
        new_length = tlv.length + magnitude if grow else tlv.length - magnitude
        if new_length < 0:
            new_length = tlv.length + magnitude
        elif new_length > TLV_LENGTH_MAX:
            new_length = tlv.length - magnitude
        _write_span(buf, TLV_LEN6.shifted(offset), new_length & 0x3F, records)
        _write_span(buf, TLV_LEN8.shifted(offset), new_length >> 6, records)
    elif action == "type-substitute":
        candidates = [t for t in _registry_tlv_types(registry) if t != tlv.type_id]
        if candidates:
            new_type = candidates[rng.below(len(candidates))]
        else:
            new_type = (tlv.type_id + 1 + rng.below(TLV_TYPE_MAX)) & TLV_TYPE_MAX
        _write_span(buf, TLV_TYPE7.shifted(offset), new_type & 0x7F, records)
        _write_span(buf, TLV_TYPE5.shifted(offset), new_type >> 7, records)
    elif action == "version-bump":
        _write_span(buf, TLV_VERSION.shifted(offset), (tlv.version + 1) & 0x7, records)
    else:  # header-corrupt, only offered when preserve_header is off
        for pos in rng.sample_distinct(HEADER_SIZE * 8 - 32, 1 + rng.below(4)):
            bit = 32 + pos
            old, new = _flip_bit(buf, bit)
            records.append(MutationRecord("bit", bit, old, new))

    return FuzzCase(data=bytes(buf), mutations=records, action=action)


def fix_sequence(data: bytes, tracker: SequenceTracker) -> bytes:
    """Rewrite the 11-bit sequence field to tracker.next and advance it."""
    _require_packet_bytes(data)
    buf = bytearray(data)
    set_sequence(buf, tracker.take())
    return bytes(buf)


def set_sequence(buf: bytearray, sequence: int) -> None:
    low7, mid1, high3 = sequence & 0x7F, (sequence >> 7) & 1, sequence >> 8
    for span, chunk in zip(SEQUENCE_SPANS, (low7, mid1, high3)):
        insert_bits(buf, span, chunk)


def generate_campaign(
    corpus: Sequence[bytes],
    cfg: CampaignConfig,
    registry: DefinitionRegistry | None = None,
) -> Iterator[FuzzCase]:
    """Emit cfg.count cases, fully determined by (corpus, cfg).

    The corpus is replayed cyclically (ordered) or with a fresh seeded
    permutation per pass (unordered); each case is mutated with probability
    mutation_rate, then sequence-fixed from a fresh tracker.
    """
    corpus = [bytes(p) for p in corpus]
    if not corpus:
        raise ConfigError("corpus is empty")
    for i, packet in enumerate(corpus):
        if len(packet) < HEADER_SIZE or packet[:4] != MAGIC:
            raise ConfigError(f"corpus packet {i} is not a valid magic-prefixed packet")

    rng = SplitMix64(cfg.seed)
    tracker = SequenceTracker()
    order = list(range(len(corpus)))
    for case_index in range(cfg.count):
        slot = case_index % len(corpus)
        if slot == 0 and not cfg.ordered:
            order = list(range(len(corpus)))
            rng.shuffle(order)
        parent = order[slot]
        base = corpus[parent]

        if rng.chance(cfg.mutation_rate):
            if cfg.strategy == STRATEGY_BITFLIP:
                case = mutate_bitflip(base, rng, flips=cfg.flips_per_packet)
            else:
                case = mutate_tlv_aware(
                    base, rng, registry=registry, preserve_header=cfg.preserve_header
                )
        else:
            case = FuzzCase(data=base)

        case.data = fix_sequence(case.data, tracker)
        case.seq_fixed = True
        case.case_index = case_index
        case.parent = parent
        yield case


def replay_case(parent: bytes, case: FuzzCase, sequence: int | None = None) -> bytes:
    """Re-serialize a case from its parent bytes and mutation records."""
    buf = bytearray(parent)
    for record in case.mutations:
        if record.kind == "bit":
            _flip_bit(buf, record.position)
        elif record.kind == "byte":
            buf[record.position] = int(record.new)
        elif record.kind == "append":
            buf += bytes.fromhex(str(record.new))
        else:
            raise MutationError(f"unknown mutation record kind {record.kind!r}")
    if case.seq_fixed:
        if sequence is None:
            sequence = case.case_index & 0x7FF
        set_sequence(buf, sequence)
    return bytes(buf)


def write_campaign(
    out_dir: str | Path,
    corpus: Sequence[bytes],
    cfg: CampaignConfig,
    registry: DefinitionRegistry | None = None,
) -> list[FuzzCase]:
    """Run a campaign onto disk: one raw file per case plus manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cases = []
    entries = []
    for case in generate_campaign(corpus, cfg, registry=registry):
        (out / f"{case.case_index:08d}.bin").write_bytes(case.data)
        entries.append(
            {
                "case_index": case.case_index,
                "parent": case.parent,
                "seq_fixed": case.seq_fixed,
                "action": case.action,
                "mutations": [m.to_dict() for m in case.mutations],
            }
        )
        cases.append(case)
    manifest = {"config": cfg.to_dict(), "cases": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return cases


def load_campaign(out_dir: str | Path) -> tuple[CampaignConfig, list[FuzzCase]]:
    """Read back a written campaign (case bytes plus manifest records)."""
    out = Path(out_dir)
    manifest = json.loads((out / "manifest.json").read_text())
    cfg = CampaignConfig(**manifest["config"])
    cases = []
    for entry in manifest["cases"]:
        data = (out / f"{entry['case_index']:08d}.bin").read_bytes()
        cases.append(
            FuzzCase(
                data=data,
                case_index=entry["case_index"],
                parent=entry["parent"],
                mutations=[MutationRecord.from_dict(m) for m in entry["mutations"]],
                seq_fixed=entry["seq_fixed"],
                action=entry["action"],
            )
        )
    return cfg, cases


@dataclass(frozen=True)
class CrashSignature:
    """Identity of a crash: exception kind, location, digest of the top frames."""

    exception_kind: str
    location: str
    stack_digest: str


def crash_signature(exception_kind: str, location: str,
                    backtrace: Iterable[str]) -> CrashSignature:
    """Deep frames vary run to run; the top 8 are the stable identity."""
    top = list(backtrace)[:8]
    digest = hashlib.sha256("\n".join(top).encode("utf-8")).hexdigest()[:16]
    return CrashSignature(exception_kind=exception_kind, location=location, stack_digest=digest)
