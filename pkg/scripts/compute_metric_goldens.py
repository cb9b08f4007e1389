"""Freeze golden metric scores for the committed fixture corpus.

Runs the independent reference scorers from tests/reference_metrics.py over
tests/data/metric_fixture.{hyp,ref} and stores corpus plus per-sentence
values in tests/data/metric_goldens.json. The package implementation is
tested against these frozen values, never against itself.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

import reference_metrics as rm  # noqa: E402


def main() -> None:
    data = ROOT / "tests" / "data"
    hyps = (data / "metric_fixture.hyp").read_text(encoding="utf-8").splitlines()
    refs = (data / "metric_fixture.ref").read_text(encoding="utf-8").splitlines()
    assert len(hyps) == len(refs) == 50

    goldens = {
        "chrfpp_corpus_50": rm.chrf_corpus(hyps, refs),
        "bleu_corpus_50": rm.bleu_corpus(hyps, refs),
        "chrfpp_corpus_20": rm.chrf_corpus(hyps[:20], refs[:20]),
        "bleu_corpus_20": rm.bleu_corpus(hyps[:20], refs[:20]),
        "chrfpp_sentences_50": [rm.chrf_sentence(h, r) for h, r in zip(hyps, refs)],
        "bleu_sentences_50": [rm.bleu_sentence(h, r) for h, r in zip(hyps, refs)],
    }
    out = data / "metric_goldens.json"
    out.write_text(json.dumps(goldens, indent=1) + "\n", encoding="utf-8")
    print(f"chrF++ corpus: {goldens['chrfpp_corpus_50']:.4f}")
    print(f"BLEU corpus:   {goldens['bleu_corpus_50']:.4f}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
