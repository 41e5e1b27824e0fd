"""Command-line front end. Thin bindings only: every behavior reachable
here is implemented and tested at library level.

Machine output goes to stdout, diagnostics to stderr. Exit codes: 0 on
success (in-band lenient parse failures are counted on stderr), 1 on input
errors, 2 on bad arguments. Output is plain text; NO_COLOR needs no special
handling because nothing is ever colorized.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .core import AriError, scan_stream
from .defs import DefinitionError, DefinitionRegistry, diff_registries, load_registry
from .dissect import Dissector, render_text
from .fuzz import (
    STRATEGY_BITFLIP,
    STRATEGY_CORPUS_REPLAY,
    STRATEGY_TLV_AWARE,
    CampaignConfig,
    ConfigError,
    write_campaign,
)
from .ingest import (
    PcapError,
    TraceRecord,
    export_pcap,
    import_pcap,
    parse_hex_log,
    read_corpus_dir,
)
from .stats import group_histogram, ngram_rarity_score, subsample_dissimilar
from .wireshark import emit_wireshark_dissector

_STRATEGY_NAMES = {
    "bitflip": STRATEGY_BITFLIP,
    "tlv": STRATEGY_TLV_AWARE,
    "replay": STRATEGY_CORPUS_REPLAY,
}


class CliInputError(Exception):
    pass


def _load_defs(path: str) -> DefinitionRegistry:
    try:
        return load_registry(Path(path).read_bytes())
    except OSError as exc:
        raise CliInputError(f"cannot read definitions {path}: {exc}") from exc
    except DefinitionError as exc:
        raise CliInputError(f"{path}: {exc}") from exc


def _read_trace(path: str, input_format: str | None) -> list[TraceRecord]:
    """A trace file is pcap when it carries the pcap magic, hex log otherwise."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CliInputError(f"cannot read trace {path}: {exc}") from exc
    looks_pcap = raw[:4] in (b"\xa1\xb2\xc3\xd4", b"\xd4\xc3\xb2\xa1")
    fmt = input_format or ("pcap" if looks_pcap else "hexlog")
    if fmt == "pcap":
        try:
            return import_pcap(raw)
        except PcapError as exc:
            raise CliInputError(f"{path}: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CliInputError(f"{path}: not valid pcap and not utf-8 text: {exc}") from exc
    log = parse_hex_log(text)
    if log.skipped_lines:
        print(f"{log.skipped_lines} line(s) without packet data skipped", file=sys.stderr)
    if log.odd_length_lines:
        print(f"{log.odd_length_lines} odd-length hex line(s) trimmed", file=sys.stderr)
    return log.records


def _cmd_dissect(args: argparse.Namespace) -> int:
    registry = _load_defs(args.defs)
    records = _read_trace(args.infile, args.input_format)
    dissector = Dissector(registry)

    trees = []
    failures = 0
    for record in records:
        for entry in scan_stream(record.data, strict=args.strict):
            if entry.packet is None:
                if args.strict:
                    raise CliInputError(
                        f"record {record.index} offset {entry.offset}: {entry.error}"
                    )
                failures += 1
                continue
            trees.append((record.index, entry.offset, dissector.dissect(entry.packet)))

    if args.format == "json":
        document = [
            {"record": rec_index, "offset": offset, "tree": tree.to_dict()}
            for rec_index, offset, tree in trees
        ]
        print(json.dumps(document, indent=2, sort_keys=True))
    else:
        for i, (_, _, tree) in enumerate(trees):
            if i:
                print()
            print(render_text(tree))
    if failures:
        print(f"{failures} packet(s) failed to parse", file=sys.stderr)
    return 0


def _cmd_export_pcap(args: argparse.Namespace) -> int:
    records = _read_trace(args.infile, args.input_format)
    try:
        data = export_pcap(records)
    except PcapError as exc:
        raise CliInputError(str(exc)) from exc
    Path(args.out).write_bytes(data)
    print(f"wrote {len(records)} record(s) to {args.out}", file=sys.stderr)
    return 0


def _cmd_defs_diff(args: argparse.Namespace) -> int:
    report = diff_registries(_load_defs(args.old), _load_defs(args.new))
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        sys.stdout.write(report.format_text())
    return 0


def _cmd_emit_dissector(args: argparse.Namespace) -> int:
    registry = _load_defs(args.defs)
    Path(args.out).write_text(emit_wireshark_dissector(registry), encoding="utf-8")
    print(f"wrote dissector script to {args.out}", file=sys.stderr)
    return 0


def _cmd_fuzz(args: argparse.Namespace) -> int:
    try:
        corpus = read_corpus_dir(args.corpus)
    except OSError as exc:
        raise CliInputError(f"cannot read corpus {args.corpus}: {exc}") from exc
    registry = _load_defs(args.defs) if args.defs else None
    try:
        cfg = CampaignConfig(
            seed=args.seed,
            strategy=_STRATEGY_NAMES[args.strategy],
            count=args.count,
            mutation_rate=args.rate,
            flips_per_packet=args.flips,
            preserve_header=args.preserve_header,
            ordered=not args.unordered,
        )
        cases = write_campaign(args.out, corpus, cfg, registry=registry)
    except ConfigError as exc:
        raise CliInputError(str(exc)) from exc
    print(f"wrote {len(cases)} case(s) to {args.out}", file=sys.stderr)
    return 0


def _cmd_stats_subsample(args: argparse.Namespace) -> int:
    records = _read_trace(args.infile, args.input_format)
    if not records:
        raise CliInputError("trace contains no packets")
    scores = ngram_rarity_score(
        [r.data for r in records], n=args.ngram, rarity_threshold=args.rarity
    )
    kept = subsample_dissimilar(records, args.n, scores)
    out = Path(args.out)
    if out.suffix == ".pcap":
        out.write_bytes(
            export_pcap(
                TraceRecord(index=i, data=r.data, timestamp=r.timestamp)
                for i, r in enumerate(kept)
            )
        )
    else:
        out.write_text("".join(r.data.hex() + "\n" for r in kept))
    print(f"kept {len(kept)} of {len(records)} packet(s)", file=sys.stderr)
    return 0


def _cmd_stats_groups(args: argparse.Namespace) -> int:
    registry = _load_defs(args.defs)
    records = _read_trace(args.infile, args.input_format)
    histogram = group_histogram([r.data for r in records], registry)
    if args.format == "json":
        print(json.dumps(histogram.to_dict(), indent=2, sort_keys=True))
        return 0
    if histogram.counts:
        width = max(len(name) for name in histogram.counts)
        for name, count in sorted(histogram.counts.items(), key=lambda kv: (-kv[1], kv[0])):
            print(f"{name:<{width}}  {count}")
    print(f"total: {histogram.total}")
    print(f"groups covering 95%: {histogram.groups_for_95_percent}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ariproto",
        description="Toolkit for the ARI baseband management protocol.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_trace_input(p: argparse.ArgumentParser) -> None:
        p.add_argument("--in", dest="infile", required=True, help="trace file (pcap or hex log)")
        p.add_argument(
            "--input-format",
            choices=["pcap", "hexlog"],
            help="override trace auto-detection",
        )

    p = sub.add_parser("dissect", help="render packets as annotated field trees")
    p.add_argument("--defs", required=True, help="protocol definition file (JSON)")
    add_trace_input(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--strict", action="store_true", help="fail on malformed TLVs")
    p.set_defaults(func=_cmd_dissect)

    p = sub.add_parser("export-pcap", help="convert a trace to pcap")
    add_trace_input(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_pcap)

    p = sub.add_parser("defs-diff", help="compare two definition files")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=_cmd_defs_diff)

    p = sub.add_parser("emit-dissector", help="generate the Wireshark Lua script")
    p.add_argument("--defs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_emit_dissector)

    p = sub.add_parser("fuzz", help="generate a deterministic fuzz campaign")
    p.add_argument("--corpus", required=True, help="directory of raw packet files")
    p.add_argument("--strategy", choices=sorted(_STRATEGY_NAMES), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--rate", type=float, default=1.0, help="fraction of cases mutated")
    p.add_argument("--flips", type=int, default=1, help="bit flips per case (bitflip)")
    p.add_argument("--preserve-header", action="store_true")
    p.add_argument("--unordered", action="store_true", help="shuffle corpus order per pass")
    p.add_argument("--defs", help="definition file for tlv-aware type substitution")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_fuzz)

    p = sub.add_parser("stats", help="trace statistics")
    stats_sub = p.add_subparsers(dest="stats_command", required=True)

    q = stats_sub.add_parser("subsample", help="keep the most dissimilar packets")
    add_trace_input(q)
    q.add_argument("--n", type=int, required=True, help="packets to keep")
    q.add_argument("--ngram", type=int, default=3)
    q.add_argument("--rarity", type=int, default=1)
    q.add_argument("--out", required=True, help=".pcap for pcap output, hex lines otherwise")
    q.set_defaults(func=_cmd_stats_subsample)

    q = stats_sub.add_parser("groups", help="per-group packet histogram")
    add_trace_input(q)
    q.add_argument("--defs", required=True)
    q.add_argument("--format", choices=["text", "json"], default="text")
    q.set_defaults(func=_cmd_stats_groups)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliInputError, AriError, DefinitionError, PcapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
