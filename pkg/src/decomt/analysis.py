"""Diagnostic analyses: score-vs-length buckets, off-target rate, stage deltas.

Source length is the whitespace token count of the raw source sentence.
Length buckets are one standard deviation wide, laid left to right from the
minimum length; a bucket with fewer than 20 members is merged into its right
neighbour, and a final small remnant merges leftward. When a ScoreReport is
supplied, each bucket's score is the corpus-level score recomputed from its
members' sufficient statistics (not a mean of per-sentence scores).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyCorpus, LengthMismatch, MetricMismatch, TooFewSamples
from .metrics import ScoreReport, score_from_stats

MIN_BUCKET_SIZE = 20


@dataclass(frozen=True)
class Bucket:
    low: float
    high: float           # exclusive upper edge (the last bucket covers the max)
    count: int
    score: float


@dataclass(frozen=True)
class BucketReport:
    buckets: tuple[Bucket, ...]
    bucket_width: float

    @property
    def total(self) -> int:
        return sum(b.count for b in self.buckets)


@dataclass(frozen=True)
class OffTargetReport:
    total: int
    off_target: int
    rate_percent: float
    verdicts: tuple[str, ...]   # per-sentence predicted labels, kept for audit


@dataclass(frozen=True)
class StageDelta:
    metric: str
    single_stage_score: float
    two_stage_score: float
    delta: float


def _merge_small_buckets(members: list[list[int]]) -> list[list[int]]:
    """Apply the < MIN_BUCKET_SIZE rule: merge rightward, final remnant leftward."""
    merged = [list(m) for m in members]
    i = 0
    while len(merged) > 1 and i < len(merged):
        if len(merged[i]) >= MIN_BUCKET_SIZE:
            i += 1
        elif i < len(merged) - 1:
            merged[i + 1] = merged[i] + merged[i + 1]
            del merged[i]
        else:
            merged[i - 1] = merged[i - 1] + merged[i]
            del merged[i]
            i -= 1
    return merged


def bucket_by_length(
    source_lengths: Sequence[int],
    scores: ScoreReport | Sequence[float],
) -> BucketReport:
    """Partition sentences into length buckets and score each bucket."""
    n = len(source_lengths)
    if isinstance(scores, ScoreReport):
        n_scores = len(scores)
    else:
        n_scores = len(scores)
    if n != n_scores:
        raise LengthMismatch(f"{n} lengths vs {n_scores} scores")
    if n < MIN_BUCKET_SIZE:
        raise TooFewSamples(f"need >= {MIN_BUCKET_SIZE} sentences, got {n}")

    lengths = np.asarray(source_lengths, dtype=float)
    width = float(lengths.std())
    low, high = float(lengths.min()), float(lengths.max())

    if width == 0.0:
        merged = [list(range(n))]
        merged_edges = [(low, high)]
    else:
        n_buckets = int((high - low) // width) + 1
        member_groups: list[list[int]] = [[] for _ in range(n_buckets)]
        for idx, length in enumerate(lengths):
            b = min(int((length - low) / width), n_buckets - 1)
            member_groups[b].append(idx)
        merged = _merge_small_buckets(member_groups)
        # merging preserves index order, so edges recombine contiguously
        merged_edges = []
        consumed = 0
        for group in merged:
            span, count = 0, 0
            while count < len(group):
                count += len(member_groups[consumed + span])
                span += 1
            merged_edges.append((
                low + consumed * width,
                low + (consumed + span) * width,
            ))
            consumed += span

    def bucket_score(member_idx: list[int]) -> float:
        if isinstance(scores, ScoreReport):
            stats = [scores.sentence_stats[i] for i in member_idx]
            totals = [sum(col) for col in zip(*stats)]
            return score_from_stats(scores.metric, totals)
        return float(np.mean([scores[i] for i in member_idx])) if member_idx else 0.0

    buckets = tuple(
        Bucket(low=e[0], high=e[1], count=len(g), score=bucket_score(g))
        for g, e in zip(merged, merged_edges)
    )
    return BucketReport(buckets=buckets, bucket_width=width)


def off_target_rate(
    outputs: Sequence[str],
    expected_lang: str,
    identifier: Callable[[str], str],
) -> OffTargetReport:
    """Fraction of outputs whose identified language differs from the target."""
    if not outputs:
        raise EmptyCorpus("no outputs to identify")
    verdicts = tuple(identifier(text) for text in outputs)
    off = sum(1 for v in verdicts if v != expected_lang)
    return OffTargetReport(
        total=len(outputs),
        off_target=off,
        rate_percent=100.0 * off / len(outputs),
        verdicts=verdicts,
    )


def make_overlap_identifier(vocabularies: dict[str, set[str]]) -> Callable[[str], str]:
    """Trivial language identifier: the label whose vocabulary overlaps the
    most tokens wins; ties break lexicographically. Intended for tests and
    smoke runs; plug a real identifier for production analysis."""

    def identify(text: str) -> str:
        tokens = set(text.split())
        best = max(sorted(vocabularies), key=lambda lang: len(tokens & vocabularies[lang]))
        return best

    return identify


def stage_delta(single_stage: ScoreReport, two_stage: ScoreReport) -> StageDelta:
    """Two-stage minus single-stage corpus score, reported with both scores."""
    if single_stage.metric != two_stage.metric:
        raise MetricMismatch(f"{single_stage.metric} vs {two_stage.metric}")
    return StageDelta(
        metric=single_stage.metric,
        single_stage_score=single_stage.corpus_score,
        two_stage_score=two_stage.corpus_score,
        delta=two_stage.corpus_score - single_stage.corpus_score,
    )
