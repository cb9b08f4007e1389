"""Corpus ingestion and run persistence.

Parallel corpora are paired one-sentence-per-line UTF-8 files. Translation
traces persist as JSON Lines, one self-contained record per sentence with
every prompt/response exchange, so evaluation can be re-run without the
backend. A run manifest is a single JSON document pinning the strategy,
engine settings, template digest, backend descriptor and seed.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .chunking import Chunk, ChunkedSentence
from .engine import (
    BackendCall,
    ContextualTranslation,
    IndependentTranslation,
    TranslationTrace,
)
from .errors import EncodingError, LineCountMismatch, ParseError, SinkError


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[tuple[str, str], ...]
    source_lang: str = ""
    target_lang: str = ""
    origin: str = ""

    @property
    def sources(self) -> list[str]:
        return [s for s, _ in self.pairs]

    @property
    def references(self) -> list[str]:
        return [t for _, t in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class RunManifest:
    strategy: str
    m: int
    shots: int
    batch_size: int
    template_path: str
    template_sha256: str
    backend: str                 # e.g. "mock" or "remote:<endpoint>"
    seed: int
    created_utc: str
    outputs: dict


def _read_lines(path: str | Path) -> list[str]:
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path}: not valid UTF-8 ({exc})") from exc
    return text.splitlines()


def load_parallel(
    source_file: str | Path,
    target_file: str | Path,
    source_lang: str = "",
    target_lang: str = "",
) -> ParallelCorpus:
    """Pair line i of both files; counts must match and sources must be non-blank."""
    src_lines = _read_lines(source_file)
    tgt_lines = _read_lines(target_file)
    if len(src_lines) != len(tgt_lines):
        raise LineCountMismatch(
            f"{source_file} has {len(src_lines)} lines, {target_file} has {len(tgt_lines)}"
        )
    if not src_lines:
        raise ParseError(f"{source_file}: corpus is empty")
    for i, line in enumerate(src_lines, start=1):
        if not line.strip():
            raise ParseError(f"{source_file}: blank source sentence", line=i)
    return ParallelCorpus(
        pairs=tuple(zip(src_lines, tgt_lines)),
        source_lang=source_lang,
        target_lang=target_lang,
        origin=f"{source_file}+{target_file}",
    )


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# --- trace persistence -------------------------------------------------------

def trace_to_record(trace: TranslationTrace) -> dict:
    return {
        "strategy": trace.strategy,
        "m": trace.m,
        "output": trace.output,
        "source": {
            "raw": trace.source.raw,
            "m": trace.source.m,
            "chunks": [list(c.tokens) for c in trace.source.chunks],
        },
        "independent": list(trace.independent.chunks) if trace.independent else None,
        "contextual": list(trace.contextual.chunks) if trace.contextual else None,
        "backend_calls": [asdict(c) for c in trace.backend_calls],
        "group_independent_calls": list(trace.group_independent_calls),
        "flags": list(trace.flags),
    }


def record_to_trace(record: dict) -> TranslationTrace:
    source = ChunkedSentence(
        chunks=tuple(
            Chunk(tokens=tuple(tokens), index=i)
            for i, tokens in enumerate(record["source"]["chunks"])
        ),
        m=record["source"]["m"],
        raw=record["source"]["raw"],
    )
    calls = tuple(
        BackendCall(
            stage=c["stage"],
            request_id=c["request_id"],
            call_id=c["call_id"],
            prompt=c["prompt"],
            response=c["response"],
            step=c["step"],
            window=tuple(c["window"]),
            prev_index=c["prev_index"],
            next_index=c["next_index"],
        )
        for c in record["backend_calls"]
    )
    return TranslationTrace(
        source=source,
        strategy=record["strategy"],
        m=record["m"],
        output=record["output"],
        backend_calls=calls,
        independent=(
            IndependentTranslation(chunks=tuple(record["independent"]))
            if record["independent"] is not None else None
        ),
        contextual=(
            ContextualTranslation(chunks=tuple(record["contextual"]))
            if record["contextual"] is not None else None
        ),
        group_independent_calls=tuple(record["group_independent_calls"]),
        flags=tuple(record["flags"]),
    )


def write_traces(traces: list[TranslationTrace], path: str | Path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as sink:
            for trace in traces:
                sink.write(json.dumps(trace_to_record(trace), ensure_ascii=False,
                                      sort_keys=True))
                sink.write("\n")
    except OSError as exc:
        raise SinkError(f"cannot write traces to {path}: {exc}") from exc


def read_traces(path: str | Path) -> list[TranslationTrace]:
    traces = []
    for i, line in enumerate(_read_lines(path), start=1):
        try:
            traces.append(record_to_trace(json.loads(line)))
        except (json.JSONDecodeError, KeyError) as exc:
            raise ParseError(f"{path}: bad trace record ({exc})", line=i) from exc
    return traces


# --- manifest ----------------------------------------------------------------

def write_manifest(manifest: RunManifest, path: str | Path) -> None:
    try:
        Path(path).write_text(
            json.dumps(asdict(manifest), ensure_ascii=False, sort_keys=True, indent=1)
            + "\n",
            encoding="utf-8",
        )
    except OSError as exc:
        raise SinkError(f"cannot write manifest to {path}: {exc}") from exc


def read_manifest(path: str | Path) -> RunManifest:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return RunManifest(**data)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"{path}: bad manifest ({exc})") from exc
