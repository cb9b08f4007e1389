"""Command-line surface: translate, evaluate, compare, sweep.

Exit codes: 0 success, 2 configuration problems, 3 input/validation
failures, 4 backend transport or protocol failures. Endpoint and timeout may
also come from the DECOMT_ENDPOINT / DECOMT_TIMEOUT_MS environment variables.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import analysis, corpus_io, metrics
from .backend import BackendConfig, MockInfillBackend, RemoteInfillBackend
from .engine import (
    ALLOWED_M,
    EngineConfig,
    decomt_translate_corpus,
    sap_translate,
    sp_translate,
)
from .errors import (
    BackendError,
    ConfigError,
    DecomtError,
    ProtocolError,
    TransportError,
)
from .templates import load_template_set

# Tuned tokens-per-chunk defaults for the shipped language-pair directions.
M_DEFAULTS = {
    ("hin", "mal"): 5, ("mal", "hin"): 3,
    ("hin", "mar"): 5, ("mar", "hin"): 4,
    ("hin", "guj"): 5, ("guj", "hin"): 4,
    ("hin", "tel"): 5, ("tel", "hin"): 3,
    ("zsm", "ind"): 4, ("ind", "zsm"): 4,
    ("rus", "ukr"): 4, ("ukr", "rus"): 4,
    ("por", "spa"): 4, ("spa", "por"): 4,
}

EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_BACKEND = 4


def resolve_m(m: int | None, pair: str | None) -> int:
    if m is not None:
        return m
    if pair:
        key = tuple(pair.replace("->", "-").split("-"))
        if len(key) == 2 and key in M_DEFAULTS:
            return M_DEFAULTS[key]
        raise ConfigError(
            f"no default chunk size for pair {pair!r}; pass --m explicitly"
        )
    raise ConfigError("either --m or a known --pair is required")


def _load_lexicon(path: str) -> dict[str, str]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read lexicon {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"lexicon {path} must be a JSON object")
    return data


def make_backend_factory(args: argparse.Namespace):
    """Return a zero-argument callable producing a fresh backend per run."""
    if args.backend == "mock":
        if not args.lexicon:
            raise ConfigError("--backend mock needs --lexicon")
        lexicon = _load_lexicon(args.lexicon)
        return lambda: MockInfillBackend(lexicon, batch_size=args.batch_size)
    endpoint = args.endpoint or os.environ.get("DECOMT_ENDPOINT", "")
    if not endpoint:
        raise ConfigError("--backend remote needs --endpoint or DECOMT_ENDPOINT")
    timeout_ms = args.timeout_ms or int(os.environ.get("DECOMT_TIMEOUT_MS", "30000"))
    config = BackendConfig(
        endpoint=endpoint,
        mask_sentinel=args.mask_sentinel,
        batch_size=args.batch_size,
        timeout_ms=timeout_ms,
        retries=args.retries,
    )
    return lambda: RemoteInfillBackend(config)


def _backend_label(args: argparse.Namespace) -> str:
    if args.backend == "mock":
        return "mock"
    return f"remote:{args.endpoint or os.environ.get('DECOMT_ENDPOINT', '')}"


def _read_sentences(path: str) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ConfigError(f"{path} is empty")
    return lines


def _now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# --- subcommands --------------------------------------------------------------

def cmd_translate(args: argparse.Namespace) -> int:
    template_text = Path(args.template).read_text(encoding="utf-8")
    template_set = load_template_set(template_text)
    sentences = _read_sentences(args.src)
    backend_factory = make_backend_factory(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    backend = backend_factory()
    if args.strategy == "decomt":
        m = resolve_m(args.m, args.pair)
        config = EngineConfig(m=m, batch_size=args.batch_size, shots=args.shots)
        traces = []
        for start in range(0, len(sentences), args.group_size):
            group = sentences[start:start + args.group_size]
            traces.extend(decomt_translate_corpus(
                group, config, template_set, backend, single_stage=args.single_stage
            ))
        m_used = m
    else:
        traces = []
        for sentence in sentences:
            if args.strategy == "sp":
                traces.append(sp_translate(sentence, template_set, backend, shots=args.shots))
            else:
                traces.append(sap_translate(sentence, template_set, backend, shots=args.shots))
        m_used = 0

    corpus_io.write_traces(traces, out_dir / "traces.jsonl")
    hypotheses = "\n".join(t.output for t in traces) + "\n"
    (out_dir / "hypotheses.txt").write_text(hypotheses, encoding="utf-8")
    strategy = args.strategy if not args.single_stage else "decomt_single_stage"
    manifest = corpus_io.RunManifest(
        strategy=strategy,
        m=m_used,
        shots=args.shots,
        batch_size=args.batch_size,
        template_path=str(args.template),
        template_sha256=corpus_io.sha256_file(args.template),
        backend=_backend_label(args),
        seed=args.seed,
        created_utc=_now_utc(),
        outputs={
            "traces": str(out_dir / "traces.jsonl"),
            "hypotheses": str(out_dir / "hypotheses.txt"),
        },
    )
    corpus_io.write_manifest(manifest, out_dir / "manifest.json")
    print(f"translated {len(traces)} sentences -> {out_dir / 'hypotheses.txt'}")
    return 0


def _pick_tokenizer(args: argparse.Namespace) -> tuple[metrics.Tokenizer, str]:
    if args.tokenizer_cmd:
        return (
            metrics.make_command_tokenizer(args.tokenizer_cmd),
            Path(args.tokenizer_cmd.split()[0]).name,
        )
    return metrics.whitespace_tokenize, "whitespace"


def _load_hypotheses(args: argparse.Namespace) -> list[str]:
    if args.traces:
        return [t.output for t in corpus_io.read_traces(args.traces)]
    if args.hyp:
        return _read_sentences(args.hyp)
    raise ConfigError("need --hyp or --traces")


def cmd_evaluate(args: argparse.Namespace) -> int:
    hypotheses = _load_hypotheses(args)
    references = _read_sentences(args.ref)
    for metric in args.metric:
        if metric == "chrfpp":
            report = metrics.chrf_pp(hypotheses, references)
        else:
            tokenizer, label = _pick_tokenizer(args)
            report = metrics.bleu(
                hypotheses, references,
                tokenizer=tokenizer, tokenizer_label=label, metric_name=metric,
            )
        print(f"{metric} = {report.corpus_score:.2f}  [{report.signature}]")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    hyp_a = _read_sentences(args.hyp)
    hyp_b = _read_sentences(args.baseline)
    references = _read_sentences(args.ref)
    metric = args.metric[0]
    if metric == "chrfpp":
        report_a = metrics.chrf_pp(hyp_a, references)
        report_b = metrics.chrf_pp(hyp_b, references)
    else:
        tokenizer, label = _pick_tokenizer(args)
        report_a = metrics.bleu(hyp_a, references, tokenizer=tokenizer,
                                tokenizer_label=label, metric_name=metric)
        report_b = metrics.bleu(hyp_b, references, tokenizer=tokenizer,
                                tokenizer_label=label, metric_name=metric)
    result = metrics.paired_bootstrap(
        report_a, report_b, n_resamples=args.resamples, seed=args.seed
    )
    print(f"system   {metric} = {report_a.corpus_score:.2f}  [{report_a.signature}]")
    print(f"baseline {metric} = {report_b.corpus_score:.2f}")
    print(f"delta = {result.delta:+.2f}")
    print(f"p_value = {result.p_value:.4f}  "
          f"(one-sided, {result.n_resamples} resamples, seed {result.seed})")

    if args.src:
        lengths = [len(s.split()) for s in _read_sentences(args.src)]
    else:
        lengths = [len(r.split()) for r in references]
    if len(lengths) >= analysis.MIN_BUCKET_SIZE:
        for name, report in (("system", report_a), ("baseline", report_b)):
            buckets = analysis.bucket_by_length(lengths, report)
            print(f"# length buckets ({name}): low high count score")
            for b in buckets.buckets:
                print(f"{b.low:.2f} {b.high:.2f} {b.count} {b.score:.2f}")
    else:
        print("# fewer than 20 sentences; length buckets skipped")
    return 0


@dataclass(frozen=True)
class SweepRow:
    m: int
    corpus_score: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    best_m: int
    tie: bool


def run_sweep(
    sentences: list[str],
    references: list[str],
    template_set,
    backend_factory,
    m_set: tuple[int, ...] = ALLOWED_M,
    batch_size: int = 8,
    shots: int = 5,
    group_size: int = 64,
) -> SweepResult:
    """Translate with each chunk size and score against the references;
    ties break toward the smallest chunk size."""
    rows = []
    for m in m_set:
        config = EngineConfig(m=m, batch_size=batch_size, shots=shots,
                              allowed_m=tuple(sorted(set(m_set))))
        backend = backend_factory()
        traces = []
        for start in range(0, len(sentences), group_size):
            group = sentences[start:start + group_size]
            traces.extend(decomt_translate_corpus(group, config, template_set, backend))
        outputs = [t.output for t in traces]
        report = metrics.chrf_pp(outputs, references)
        rows.append(SweepRow(m=m, corpus_score=report.corpus_score))
    best = max(rows, key=lambda r: r.corpus_score)
    winners = [r.m for r in rows if r.corpus_score == best.corpus_score]
    return SweepResult(rows=tuple(rows), best_m=min(winners), tie=len(winners) > 1)


def cmd_sweep(args: argparse.Namespace) -> int:
    template_set = load_template_set(Path(args.template).read_text(encoding="utf-8"))
    sentences = _read_sentences(args.src)
    references = _read_sentences(args.ref)
    m_set = tuple(int(v) for v in args.m_set.split(","))
    result = run_sweep(
        sentences, references, template_set,
        make_backend_factory(args),
        m_set=m_set, batch_size=args.batch_size, shots=args.shots,
        group_size=args.group_size,
    )
    print("m chrfpp best")
    for row in result.rows:
        marker = "*" if row.m == result.best_m else ""
        print(f"{row.m} {row.corpus_score:.2f} {marker}")
    if result.tie:
        print(f"# tie broken toward smallest m: {result.best_m}")
    return 0


# --- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decomt",
        description="Chunk-wise decomposed prompting for machine translation, "
                    "with baselines, metrics and significance analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_backend_flags(p):
        p.add_argument("--backend", choices=["mock", "remote"], default="mock")
        p.add_argument("--lexicon", help="JSON token lexicon for the mock backend")
        p.add_argument("--endpoint", help="infill service address (or DECOMT_ENDPOINT)")
        p.add_argument("--mask-sentinel", default="<extra_id_0>",
                       help="placeholder understood by the remote model")
        p.add_argument("--timeout-ms", type=int, default=0)
        p.add_argument("--retries", type=int, default=2)
        p.add_argument("--batch-size", type=int, default=8)
        p.add_argument("--group-size", type=int, default=64,
                       help="sentences whose stage-one requests pool together")

    translate = sub.add_parser("translate", help="translate a corpus and write traces")
    translate.add_argument("--src", required=True)
    translate.add_argument("--template", required=True)
    translate.add_argument("--strategy", choices=["decomt", "sp", "sap"], default="decomt")
    translate.add_argument("--single-stage", action="store_true",
                           help="stop after independent chunk translation")
    translate.add_argument("--m", type=int, choices=ALLOWED_M)
    translate.add_argument("--pair", help="language pair code, e.g. hin-mal, for m defaults")
    translate.add_argument("--shots", type=int, default=5)
    translate.add_argument("--seed", type=int, default=0)
    translate.add_argument("--out", required=True)
    add_backend_flags(translate)
    translate.set_defaults(func=cmd_translate)

    evaluate = sub.add_parser("evaluate", help="score hypotheses against references")
    evaluate.add_argument("--hyp")
    evaluate.add_argument("--traces", help="traces.jsonl to pull outputs from")
    evaluate.add_argument("--ref", required=True)
    evaluate.add_argument("--metric", action="append",
                          choices=["chrfpp", "bleu", "spbleu"], default=None)
    evaluate.add_argument("--tokenizer-cmd", help="external tokenizer executable")
    evaluate.set_defaults(func=cmd_evaluate)

    compare = sub.add_parser("compare", help="paired bootstrap between two systems")
    compare.add_argument("--hyp", required=True, help="system hypotheses")
    compare.add_argument("--baseline", required=True, help="baseline hypotheses")
    compare.add_argument("--ref", required=True)
    compare.add_argument("--src", help="source file for length buckets")
    compare.add_argument("--metric", action="append",
                         choices=["chrfpp", "bleu", "spbleu"], default=None)
    compare.add_argument("--tokenizer-cmd")
    compare.add_argument("--resamples", type=int, default=1000)
    compare.add_argument("--seed", type=int, default=0)
    compare.set_defaults(func=cmd_compare)

    sweep = sub.add_parser("sweep", help="chunk-size search over a dev corpus")
    sweep.add_argument("--src", required=True)
    sweep.add_argument("--ref", required=True)
    sweep.add_argument("--template", required=True)
    sweep.add_argument("--m-set", default="3,4,5")
    sweep.add_argument("--shots", type=int, default=5)
    sweep.add_argument("--seed", type=int, default=0)
    add_backend_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "metric", None) is None and args.command in ("evaluate", "compare"):
        args.metric = ["chrfpp"]
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TransportError, ProtocolError, BackendError) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except DecomtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
