"""Corpus-level MT metrics and paired bootstrap significance testing.

chrF++ is computed natively: character n-grams of orders 1..6 on
space-stripped text plus word n-grams of orders 1..2 (leading/trailing
punctuation split off), F-beta with beta=2, averaged over the effective
(populated) orders. BLEU uses modified n-gram precisions of orders 1..4
with exponential smoothing of zero counts, a brevity penalty, and a
geometric mean scaled to [0, 100]; plugging a subword tokenizer in yields
spBLEU.

Every report carries per-sentence sufficient statistics so that corpus
scores can be recomputed exactly on resampled subsets; the bootstrap
never averages per-sentence scores.
"""
from __future__ import annotations

import math
import shlex
import string
import subprocess
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._version import __version__
from .errors import EmptyCorpus, LengthMismatch, MetricMismatch, TooFewSamples

CHRF_CHAR_ORDER = 6
CHRF_WORD_ORDER = 2
CHRF_BETA = 2.0
BLEU_ORDER = 4
_EPS = 1e-16
_PUNCT = set(string.punctuation)

Tokenizer = Callable[[str], Sequence[str]]


@dataclass(frozen=True)
class ScoreReport:
    metric: str                         # chrfpp | bleu | spbleu
    corpus_score: float
    per_sentence: tuple[float, ...]
    signature: str
    sentence_stats: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.per_sentence)


@dataclass(frozen=True)
class BootstrapResult:
    p_value: float
    n_resamples: int
    seed: int
    delta: float                        # system minus baseline, corpus level


def _clamp(score: float) -> float:
    return min(100.0, max(0.0, score))


def _validate_corpora(hypotheses: Sequence[str], references: Sequence[str]) -> None:
    if len(hypotheses) != len(references):
        raise LengthMismatch(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not hypotheses:
        raise EmptyCorpus("cannot score an empty corpus")


# --- chrF++ ----------------------------------------------------------------

def split_off_punctuation(sentence: str) -> list[str]:
    """Word tokens for chrF++: a single leading or trailing punctuation mark
    becomes its own token."""
    tokens: list[str] = []
    for word in sentence.split():
        if len(word) > 1 and word[-1] in _PUNCT:
            tokens.append(word[:-1])
            tokens.append(word[-1])
        elif len(word) > 1 and word[0] in _PUNCT:
            tokens.append(word[0])
            tokens.append(word[1:])
        else:
            tokens.append(word)
    return tokens


def _ngram_counts(items: Sequence, max_order: int) -> list[Counter]:
    counts = []
    for n in range(1, max_order + 1):
        counts.append(Counter(tuple(items[i:i + n]) for i in range(len(items) - n + 1)))
    return counts


def _match_triple(hyp_counts: Counter, ref_counts: Counter) -> tuple[int, int, int]:
    matched = 0
    for ngram, count in hyp_counts.items():
        ref_count = ref_counts.get(ngram)
        if ref_count:
            matched += min(count, ref_count)
    return sum(hyp_counts.values()), sum(ref_counts.values()), matched


def _chrf_segment_stats(hypothesis: str, reference: str) -> tuple[int, ...]:
    """Flattened (hyp_total, ref_total, match) triples: char orders then word orders."""
    hyp_chars = "".join(hypothesis.split())
    ref_chars = "".join(reference.split())
    triples = [
        _match_triple(h, r)
        for h, r in zip(_ngram_counts(hyp_chars, CHRF_CHAR_ORDER),
                        _ngram_counts(ref_chars, CHRF_CHAR_ORDER))
    ]
    hyp_words = split_off_punctuation(hypothesis)
    ref_words = split_off_punctuation(reference)
    triples += [
        _match_triple(h, r)
        for h, r in zip(_ngram_counts(hyp_words, CHRF_WORD_ORDER),
                        _ngram_counts(ref_words, CHRF_WORD_ORDER))
    ]
    return tuple(v for triple in triples for v in triple)


def _chrf_score_from_stats(stats: Sequence[int]) -> float:
    factor = CHRF_BETA * CHRF_BETA
    score = 0.0
    effective_order = 0
    for i in range(CHRF_CHAR_ORDER + CHRF_WORD_ORDER):
        n_hyp, n_ref, n_match = stats[3 * i], stats[3 * i + 1], stats[3 * i + 2]
        precision = n_match / n_hyp if n_hyp > 0 else _EPS
        recall = n_match / n_ref if n_ref > 0 else _EPS
        denominator = factor * precision + recall
        score += ((1 + factor) * precision * recall / denominator) if denominator > 0 else _EPS
        if n_hyp > 0 and n_ref > 0:
            effective_order += 1
    if effective_order == 0:
        return 0.0
    return _clamp(100.0 * score / effective_order)


def chrf_pp(hypotheses: Sequence[str], references: Sequence[str]) -> ScoreReport:
    """chrF++ corpus and per-sentence scores (single reference, mixed case)."""
    _validate_corpora(hypotheses, references)
    sentence_stats = tuple(
        _chrf_segment_stats(h, r) for h, r in zip(hypotheses, references)
    )
    totals = [sum(column) for column in zip(*sentence_stats)]
    return ScoreReport(
        metric="chrfpp",
        corpus_score=_chrf_score_from_stats(totals),
        per_sentence=tuple(_chrf_score_from_stats(s) for s in sentence_stats),
        signature=(
            f"nrefs:1|case:mixed|eff:yes|nc:{CHRF_CHAR_ORDER}|nw:{CHRF_WORD_ORDER}"
            f"|space:no|decomt:{__version__}"
        ),
        sentence_stats=sentence_stats,
    )


# --- BLEU / spBLEU -----------------------------------------------------------

def whitespace_tokenize(text: str) -> list[str]:
    return text.split()


def _bleu_segment_stats(hyp_tokens: Sequence[str], ref_tokens: Sequence[str]) -> tuple[int, ...]:
    """[correct 1..4, total 1..4, hypothesis length, reference length]."""
    correct, total = [], []
    hyp_counts = _ngram_counts(hyp_tokens, BLEU_ORDER)
    ref_counts = _ngram_counts(ref_tokens, BLEU_ORDER)
    for h, r in zip(hyp_counts, ref_counts):
        n_hyp, _, n_match = _match_triple(h, r)
        correct.append(n_match)
        total.append(n_hyp)
    return tuple(correct + total + [len(hyp_tokens), len(ref_tokens)])


def _bleu_score_from_stats(stats: Sequence[int]) -> float:
    correct, total = stats[0:BLEU_ORDER], stats[BLEU_ORDER:2 * BLEU_ORDER]
    sys_len, ref_len = stats[8], stats[9]
    if sys_len == 0:
        return 0.0
    precisions = [0.0] * BLEU_ORDER
    smoothing = 1.0
    for n in range(BLEU_ORDER):
        if total[n] == 0:
            break
        if correct[n] == 0:
            smoothing *= 2.0
            precisions[n] = 100.0 / (smoothing * total[n])
        else:
            precisions[n] = 100.0 * correct[n] / total[n]
    brevity = math.exp(1 - ref_len / sys_len) if sys_len < ref_len else 1.0
    log_sum = sum(math.log(p) if p > 0.0 else -9999999999.0 for p in precisions)
    return _clamp(brevity * math.exp(log_sum / BLEU_ORDER))


def bleu(
    hypotheses: Sequence[str],
    references: Sequence[str],
    tokenizer: Tokenizer = whitespace_tokenize,
    tokenizer_label: str = "whitespace",
    metric_name: str = "bleu",
) -> ScoreReport:
    """BLEU over pluggable tokenization; with a subword tokenizer this is spBLEU."""
    _validate_corpora(hypotheses, references)
    sentence_stats = tuple(
        _bleu_segment_stats(tokenizer(h), tokenizer(r))
        for h, r in zip(hypotheses, references)
    )
    totals = [sum(column) for column in zip(*sentence_stats)]
    return ScoreReport(
        metric=metric_name,
        corpus_score=_bleu_score_from_stats(totals),
        per_sentence=tuple(_bleu_score_from_stats(s) for s in sentence_stats),
        signature=(
            f"nrefs:1|case:mixed|eff:no|tok:{tokenizer_label}|smooth:exp"
            f"|decomt:{__version__}"
        ),
        sentence_stats=sentence_stats,
    )


def make_command_tokenizer(command: str) -> Tokenizer:
    """Wrap an external tokenizer executable: one input line on stdin, one
    space-separated token line on stdout."""
    argv = shlex.split(command)

    def tokenize(text: str) -> list[str]:
        result = subprocess.run(
            argv, input=text + "\n", capture_output=True, text=True, check=True
        )
        return result.stdout.strip().split()

    return tokenize


def score_from_stats(metric: str, stats: Sequence[int]) -> float:
    """Corpus score from aggregated per-sentence sufficient statistics."""
    if metric == "chrfpp":
        return _chrf_score_from_stats(stats)
    if metric in ("bleu", "spbleu"):
        return _bleu_score_from_stats(stats)
    raise MetricMismatch(f"unknown metric {metric!r}")


# --- paired bootstrap --------------------------------------------------------

def paired_bootstrap(
    system: ScoreReport,
    baseline: ScoreReport,
    n_resamples: int = 1000,
    seed: int = 0,
) -> BootstrapResult:
    """One-sided paired bootstrap: p-value is the fraction of resamples on
    which the baseline scores at least as high as the system.

    Sentence indices are drawn with replacement; each resample's corpus
    scores are recomputed from summed sufficient statistics under a fixed
    seed, so results are reproducible bit for bit.
    """
    if system.metric != baseline.metric:
        raise MetricMismatch(f"{system.metric} vs {baseline.metric}")
    if len(system) != len(baseline):
        raise LengthMismatch(f"{len(system)} vs {len(baseline)} sentences")
    n = len(system)
    if n < 2:
        raise TooFewSamples(f"paired bootstrap needs >= 2 sentences, got {n}")

    stats_a = np.asarray(system.sentence_stats, dtype=np.int64)
    stats_b = np.asarray(baseline.sentence_stats, dtype=np.int64)
    rng = np.random.default_rng(seed)
    baseline_wins = 0
    for _ in range(n_resamples):
        idx = rng.integers(0, n, size=n)
        score_a = score_from_stats(system.metric, stats_a[idx].sum(axis=0))
        score_b = score_from_stats(baseline.metric, stats_b[idx].sum(axis=0))
        if score_b >= score_a:
            baseline_wins += 1
    return BootstrapResult(
        p_value=baseline_wins / n_resamples,
        n_resamples=n_resamples,
        seed=seed,
        delta=system.corpus_score - baseline.corpus_score,
    )
