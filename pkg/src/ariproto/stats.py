"""Corpus analytics: n-gram rarity scores, dissimilarity subsampling,
group frequency histograms.

Rarity is the count of a packet's n-gram occurrences whose corpus-wide
frequency is at or below a threshold. Defaults (n=3, threshold=1) are the
simplest reading of "uncommon byte sequences" and both are caller flags.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence, TypeVar

from .core import AriError, HEADER_SIZE, parse_header
from .defs import DefinitionRegistry

UNPARSEABLE_BUCKET = "<unparseable>"

DEFAULT_NGRAM = 3
DEFAULT_RARITY_THRESHOLD = 1


@dataclass(frozen=True)
class RarityScore:
    index: int
    score: int


def ngram_rarity_score(
    trace: list[bytes],
    n: int = DEFAULT_NGRAM,
    rarity_threshold: int = DEFAULT_RARITY_THRESHOLD,
) -> list[RarityScore]:
    """Score each packet by its count of corpus-rare byte n-grams."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not trace:
        raise ValueError("trace is empty")
    frequencies: Counter[bytes] = Counter()
    for packet in trace:
        for i in range(len(packet) - n + 1):
            frequencies[bytes(packet[i : i + n])] += 1
    scores = []
    for index, packet in enumerate(trace):
        score = 0
        for i in range(len(packet) - n + 1):
            if frequencies[bytes(packet[i : i + n])] <= rarity_threshold:
                score += 1
        scores.append(RarityScore(index=index, score=score))
    return scores


T = TypeVar("T")


def subsample_dissimilar(trace: Sequence[T], n_keep: int, scores: list[RarityScore]) -> list[T]:
    """Keep the n_keep highest-scoring packets, earliest-first on ties,
    preserving original relative order.

    Content-agnostic on purpose: callers may pass packets or whole trace
    records, as long as scores index into the same sequence.
    """
    if n_keep < 1:
        raise ValueError(f"n_keep must be >= 1, got {n_keep}")
    by_index = {s.index: s.score for s in scores}
    try:
        ranked = sorted(range(len(trace)), key=lambda i: (-by_index[i], i))
    except KeyError as exc:
        raise ValueError(f"scores missing for packet index {exc.args[0]}") from exc
    keep = sorted(ranked[: min(n_keep, len(trace))])
    return [trace[i] for i in keep]


@dataclass
class GroupHistogram:
    """Per-group packet counts plus the 95%-coverage group count."""

    counts: dict[str, int] = field(default_factory=dict)
    total: int = 0
    groups_for_95_percent: int = 0

    def to_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "total": self.total,
            "groups_for_95_percent": self.groups_for_95_percent,
        }


def group_histogram(trace: list[bytes], reg: DefinitionRegistry) -> GroupHistogram:
    """Count packets per group, named via the registry when known, numeric
    otherwise; unparseable packets land in a reserved bucket."""
    counts: Counter[str] = Counter()
    for packet in trace:
        try:
            header = parse_header(bytes(packet[:HEADER_SIZE]))
        except AriError:
            counts[UNPARSEABLE_BUCKET] += 1
            continue
        group = reg.group(header.group)
        counts[group.name if group else str(header.group)] += 1

    total = sum(counts.values())
    needed = 0
    if total:
        covered = 0
        for _, count in counts.most_common():
            covered += count
            needed += 1
            if covered * 100 >= 95 * total:
                break
    return GroupHistogram(
        counts=dict(counts), total=total, groups_for_95_percent=needed
    )
