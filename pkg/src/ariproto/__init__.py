"""Toolkit for the ARI baseband management protocol: bit-exact packet
codec, schema-driven dissection, Wireshark script generation, definition
diffing, trace statistics, and deterministic fuzz payload generation."""

from .bits import BitSpan, FieldRangeError, extract_bits, insert_bits
from .core import (
    AriError,
    AriHeader,
    AriPacket,
    BadMagicError,
    HeaderSizeError,
    LengthConsistencyError,
    MAGIC,
    ScanEntry,
    Tlv,
    TlvBoundsError,
    TruncationError,
    parse_header,
    parse_packet,
    scan_stream,
    serialize_header,
    serialize_packet,
    serialize_tlv,
)
from .defs import (
    ChangeReport,
    DefinitionError,
    DefinitionRegistry,
    EnumCodec,
    GroupDef,
    MessageDef,
    TlvDef,
    decode_enum,
    diff_registries,
    load_registry,
    lookup_message,
    save_registry,
)
from .dissect import (
    DissectedNode,
    Dissector,
    SubDissector,
    TlvSelector,
    dissect,
    leaf_spans,
    render_json,
    render_text,
)
from .fuzz import (
    CampaignConfig,
    CrashSignature,
    FuzzCase,
    MutationRecord,
    SequenceTracker,
    SplitMix64,
    crash_signature,
    fix_sequence,
    generate_campaign,
    mutate_bitflip,
    mutate_tlv_aware,
    replay_case,
    write_campaign,
)
from .ingest import (
    HexLog,
    TraceRecord,
    export_pcap,
    import_pcap,
    parse_hex_log,
    read_corpus_dir,
    write_corpus_dir,
)
from .sms import decode_sms_deliver, pack_septets, unpack_septets
from .stats import (
    GroupHistogram,
    RarityScore,
    group_histogram,
    ngram_rarity_score,
    subsample_dissimilar,
)
from .wireshark import emit_wireshark_dissector

__version__ = "0.1.0"

__all__ = [
    "AriError",
    "AriHeader",
    "AriPacket",
    "BadMagicError",
    "BitSpan",
    "CampaignConfig",
    "ChangeReport",
    "CrashSignature",
    "DefinitionError",
    "DefinitionRegistry",
    "DissectedNode",
    "Dissector",
    "EnumCodec",
    "FieldRangeError",
    "FuzzCase",
    "GroupDef",
    "GroupHistogram",
    "HeaderSizeError",
    "HexLog",
    "LengthConsistencyError",
    "MAGIC",
    "MessageDef",
    "MutationRecord",
    "RarityScore",
    "ScanEntry",
    "SequenceTracker",
    "SplitMix64",
    "SubDissector",
    "Tlv",
    "TlvBoundsError",
    "TlvDef",
    "TlvSelector",
    "TraceRecord",
    "TruncationError",
    "crash_signature",
    "decode_enum",
    "decode_sms_deliver",
    "diff_registries",
    "dissect",
    "emit_wireshark_dissector",
    "export_pcap",
    "extract_bits",
    "fix_sequence",
    "generate_campaign",
    "group_histogram",
    "import_pcap",
    "insert_bits",
    "leaf_spans",
    "load_registry",
    "lookup_message",
    "mutate_bitflip",
    "mutate_tlv_aware",
    "ngram_rarity_score",
    "pack_septets",
    "parse_header",
    "parse_hex_log",
    "parse_packet",
    "read_corpus_dir",
    "render_json",
    "render_text",
    "replay_case",
    "save_registry",
    "scan_stream",
    "serialize_header",
    "serialize_packet",
    "serialize_tlv",
    "subsample_dissimilar",
    "unpack_septets",
    "write_campaign",
    "write_corpus_dir",
]
