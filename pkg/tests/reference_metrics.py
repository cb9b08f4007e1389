"""Independent reference scorers used as oracles for the metric tests.

Deliberately written as direct, per-sentence enumerations (Counter-based,
no shared statistics machinery) so they stay structurally independent of
the package implementation they check. Golden fixture values are computed
from these functions and frozen under tests/data/.
"""
from __future__ import annotations

import math
import string
from collections import Counter

PUNCT = set(string.punctuation)

CHAR_ORDER = 6
WORD_ORDER = 2
BETA = 2.0
EPS = 1e-16


def split_punctuation(sentence: str) -> list[str]:
    """Whitespace tokens with one leading or trailing punctuation mark split off."""
    tokens = []
    for w in sentence.split():
        if len(w) > 1 and w[-1] in PUNCT:
            tokens.extend([w[:-1], w[-1]])
        elif len(w) > 1 and w[0] in PUNCT:
            tokens.extend([w[0], w[1:]])
        else:
            tokens.append(w)
    return tokens


def _char_ngrams(text: str, n: int) -> Counter:
    squeezed = "".join(text.split())
    return Counter(squeezed[i:i + n] for i in range(len(squeezed) - n + 1))


def _word_ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def chrf_sentence_stats(hyp: str, ref: str) -> list[tuple[int, int, int]]:
    """(hyp_total, ref_total, match) for char orders 1..6 then word orders 1..2."""
    stats = []
    for n in range(1, CHAR_ORDER + 1):
        h, r = _char_ngrams(hyp, n), _char_ngrams(ref, n)
        stats.append((sum(h.values()), sum(r.values()), sum((h & r).values())))
    hyp_tok, ref_tok = split_punctuation(hyp), split_punctuation(ref)
    for n in range(1, WORD_ORDER + 1):
        h, r = _word_ngrams(hyp_tok, n), _word_ngrams(ref_tok, n)
        stats.append((sum(h.values()), sum(r.values()), sum((h & r).values())))
    return stats


def chrf_from_stats(stats: list[tuple[int, int, int]]) -> float:
    """Effective-order F-beta average over the populated n-gram orders."""
    score = 0.0
    effective = 0
    factor = BETA * BETA
    for n_hyp, n_ref, n_match in stats:
        prec = n_match / n_hyp if n_hyp > 0 else EPS
        rec = n_match / n_ref if n_ref > 0 else EPS
        denom = factor * prec + rec
        score += ((1 + factor) * prec * rec / denom) if denom > 0 else EPS
        if n_hyp > 0 and n_ref > 0:
            effective += 1
    if effective == 0:
        return 0.0
    return 100.0 * score / effective


def chrf_corpus(hyps: list[str], refs: list[str]) -> float:
    totals = [(0, 0, 0)] * (CHAR_ORDER + WORD_ORDER)
    for hyp, ref in zip(hyps, refs):
        stats = chrf_sentence_stats(hyp, ref)
        totals = [(a + x, b + y, c + z) for (a, b, c), (x, y, z) in zip(totals, stats)]
    return chrf_from_stats(totals)


def chrf_sentence(hyp: str, ref: str) -> float:
    return chrf_from_stats(chrf_sentence_stats(hyp, ref))


def bleu_sentence_stats(hyp_tokens: list[str], ref_tokens: list[str]) -> list[int]:
    """[correct_1..4, total_1..4, hyp_len, ref_len] for one sentence."""
    correct, total = [], []
    for n in range(1, 5):
        h = Counter(tuple(hyp_tokens[i:i + n]) for i in range(len(hyp_tokens) - n + 1))
        r = Counter(tuple(ref_tokens[i:i + n]) for i in range(len(ref_tokens) - n + 1))
        correct.append(sum((h & r).values()))
        total.append(sum(h.values()))
    return correct + total + [len(hyp_tokens), len(ref_tokens)]


def bleu_from_stats(stats: list[int]) -> float:
    """Geometric mean of smoothed modified precisions times the brevity penalty."""
    correct, total = stats[0:4], stats[4:8]
    sys_len, ref_len = stats[8], stats[9]
    prec = [0.0] * 4
    smooth = 1.0
    for n in range(4):
        if total[n] == 0:
            break
        if correct[n] == 0:
            smooth *= 2.0
            prec[n] = 100.0 / (smooth * total[n])
        else:
            prec[n] = 100.0 * correct[n] / total[n]
    if sys_len == 0:
        return 0.0
    bp = math.exp(1 - ref_len / sys_len) if sys_len < ref_len else 1.0
    logsum = 0.0
    for p in prec:
        if p == 0.0:
            logsum += -9999999999.0
        else:
            logsum += math.log(p)
    return bp * math.exp(logsum / 4.0)


def bleu_corpus(hyps: list[str], refs: list[str], tokenize=str.split) -> float:
    agg = [0] * 10
    for hyp, ref in zip(hyps, refs):
        stats = bleu_sentence_stats(tokenize(hyp), tokenize(ref))
        agg = [a + s for a, s in zip(agg, stats)]
    return bleu_from_stats(agg)


def bleu_sentence(hyp: str, ref: str, tokenize=str.split) -> float:
    return bleu_from_stats(bleu_sentence_stats(tokenize(hyp), tokenize(ref)))
