"""Aligned few-shot prompt data and byte-exact prompt rendering.

Three prompt families share one line discipline: a header line
"Translate from <source> to <target>:", then alternating source/target lines,
with exactly one blank line between example blocks and no trailing
whitespace. Infill prompts carry exactly one mask placeholder; rendering is
deterministic, so golden-file tests compare bytes.

Template file format (UTF-8, line oriented)::

    source_lang: Malay
    target_lang: Indonesian

    S: <chunk>          # aligned chunk pairs, one example per blank-line block
    T: <chunk>
    S: <chunk>
    T: <chunk>

    == full ==          # optional: whole-sentence pairs for SP/SAP prompting
    S: <sentence>
    T: <sentence>

    == contextual ==    # optional: overrides the derived contextual chunking
    S: <chunk>
    T: <chunk>
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .chunking import Chunk
from .errors import AlignmentError, ParseError, WindowSizeError

MASK_TOKEN = "⟨mask⟩"  # ⟨mask⟩; backends map this to their own sentinel

_FULL_SECTION = "== full =="
_CONTEXTUAL_SECTION = "== contextual =="


@dataclass(frozen=True)
class AlignedExample:
    """One few-shot example as parallel chunk sequences, fully aligned."""

    source_chunks: tuple[str, ...]
    target_chunks: tuple[str, ...]

    def __post_init__(self):
        if len(self.source_chunks) != len(self.target_chunks):
            raise AlignmentError(
                f"example has {len(self.source_chunks)} source chunks but "
                f"{len(self.target_chunks)} target chunks"
            )
        if not self.source_chunks:
            raise AlignmentError("example has no chunk pairs")
        if any(not c for c in self.source_chunks + self.target_chunks):
            raise AlignmentError("example contains an empty chunk")

    def __len__(self) -> int:
        return len(self.source_chunks)


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    mask_positions: int


@dataclass
class PromptTemplateSet:
    """Immutable-after-load bundle of few-shot examples for one language pair.

    ``contextual_examples`` defaults to pairwise merges of the independent
    examples when the template file does not override them.
    """

    source_lang: str
    target_lang: str
    independent_examples: tuple[AlignedExample, ...]
    contextual_examples: tuple[AlignedExample, ...] = ()
    full_sentence_examples: tuple[tuple[str, str], ...] = ()
    _prefix_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.independent_examples:
            raise AlignmentError("template set needs at least one example")
        if not self.contextual_examples:
            self.contextual_examples = derive_contextual_examples(self.independent_examples)

    @property
    def header(self) -> str:
        return f"Translate from {self.source_lang} to {self.target_lang}:"

    def with_shots(self, shots: int) -> "PromptTemplateSet":
        """Keep the first ``shots`` examples of every section."""
        if shots < 1:
            raise AlignmentError(f"shots must be >= 1, got {shots}")
        return PromptTemplateSet(
            source_lang=self.source_lang,
            target_lang=self.target_lang,
            independent_examples=self.independent_examples[:shots],
            contextual_examples=self.contextual_examples[:shots],
            full_sentence_examples=self.full_sentence_examples[:shots],
        )

    # few-shot prefixes are invariant per prompt family; cache them
    def _prefix(self, kind: str) -> str:
        cached = self._prefix_cache.get(kind)
        if cached is not None:
            return cached
        if kind == "independent":
            blocks = [self._example_block(ex) for ex in self.independent_examples]
        elif kind == "contextual":
            blocks = [self._example_block(ex) for ex in self.contextual_examples]
        else:
            blocks = [
                f"{self.header}\n{self.source_lang}: {s}\n{self.target_lang}: {t}"
                for s, t in self.full_sentence_examples
            ]
        prefix = "\n\n".join(blocks)
        self._prefix_cache[kind] = prefix
        return prefix

    def _example_block(self, example: AlignedExample) -> str:
        lines = [self.header]
        for src, tgt in zip(example.source_chunks, example.target_chunks):
            lines.append(f"{self.source_lang}: {src}")
            lines.append(f"{self.target_lang}: {tgt}")
        return "\n".join(lines)


def derive_contextual_examples(
    independent: tuple[AlignedExample, ...] | list[AlignedExample],
) -> tuple[AlignedExample, ...]:
    """Merge adjacent chunk pairs with a single space; an odd trailing chunk stands alone."""
    merged = []
    for example in independent:
        src, tgt = [], []
        for i in range(0, len(example), 2):
            if i + 1 < len(example):
                src.append(example.source_chunks[i] + " " + example.source_chunks[i + 1])
                tgt.append(example.target_chunks[i] + " " + example.target_chunks[i + 1])
            else:
                src.append(example.source_chunks[i])
                tgt.append(example.target_chunks[i])
        merged.append(AlignedExample(tuple(src), tuple(tgt)))
    return tuple(merged)


def load_template_set(document: str) -> PromptTemplateSet:
    """Parse a template document; raises ParseError / AlignmentError on bad input."""
    lines = document.splitlines()
    numbered = [(i + 1, ln.rstrip("\r")) for i, ln in enumerate(lines)]
    cursor = 0

    def next_content(start: int) -> int:
        i = start
        while i < len(numbered) and not numbered[i][1].strip():
            i += 1
        return i

    cursor = next_content(cursor)
    if cursor >= len(numbered):
        raise ParseError("empty template document")

    def read_header(key: str) -> str:
        nonlocal cursor
        lineno, line = numbered[cursor]
        prefix = f"{key}: "
        if not line.startswith(prefix) or not line[len(prefix):].strip():
            raise ParseError(f"expected '{key}: <label>'", lineno)
        cursor += 1
        return line[len(prefix):]

    source_lang = read_header("source_lang")
    target_lang = read_header("target_lang")

    sections: dict[str, list[AlignedExample]] = {"independent": [], "contextual": []}
    full_pairs: list[tuple[str, str]] = []
    section = "independent"
    pending_src: list[str] = []
    pending_tgt: list[str] = []
    pending_line = 0

    def flush_example():
        nonlocal pending_src, pending_tgt
        if not pending_src and not pending_tgt:
            return
        if len(pending_src) != len(pending_tgt):
            raise AlignmentError(
                f"example ending at line {pending_line}: {len(pending_src)} source "
                f"chunks vs {len(pending_tgt)} target chunks"
            )
        if section == "full":
            for s, t in zip(pending_src, pending_tgt):
                full_pairs.append((s, t))
        else:
            sections[section].append(AlignedExample(tuple(pending_src), tuple(pending_tgt)))
        pending_src, pending_tgt = [], []

    while cursor < len(numbered):
        lineno, line = numbered[cursor]
        cursor += 1
        stripped = line.strip()
        if not stripped:
            flush_example()
            continue
        if stripped == _FULL_SECTION:
            flush_example()
            section = "full"
            continue
        if stripped == _CONTEXTUAL_SECTION:
            flush_example()
            section = "contextual"
            continue
        if line.startswith("S: "):
            if len(pending_src) != len(pending_tgt):
                raise AlignmentError(f"line {lineno}: source chunk before previous pair closed")
            text = line[3:]
            if not text.strip():
                raise ParseError("empty source chunk", lineno)
            pending_src.append(text)
            pending_line = lineno
        elif line.startswith("T: "):
            if len(pending_tgt) != len(pending_src) - 1:
                raise AlignmentError(f"line {lineno}: target chunk without a source chunk")
            text = line[3:]
            if not text.strip():
                raise ParseError("empty target chunk", lineno)
            pending_tgt.append(text)
            pending_line = lineno
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno)
    flush_example()

    if not sections["independent"]:
        raise ParseError("template document has no aligned examples")
    return PromptTemplateSet(
        source_lang=source_lang,
        target_lang=target_lang,
        independent_examples=tuple(sections["independent"]),
        contextual_examples=tuple(sections["contextual"]),
        full_sentence_examples=tuple(full_pairs),
    )


def _finish(text: str) -> RenderedPrompt:
    return RenderedPrompt(text=text, mask_positions=text.count(MASK_TOKEN))


def render_independent_prompt(template_set: PromptTemplateSet, test_chunk: Chunk) -> RenderedPrompt:
    """Few-shot chunk examples, then a test chunk whose translation is masked."""
    test_block = (
        f"{template_set.header}\n"
        f"{template_set.source_lang}: {test_chunk.text}\n"
        f"{template_set.target_lang}: {MASK_TOKEN}"
    )
    return _finish(template_set._prefix("independent") + "\n\n" + test_block)


def render_contextual_prompt(
    template_set: PromptTemplateSet,
    window: tuple[Chunk, ...] | list[Chunk],
    prev_contextual: str | None = None,
    next_independent: str | None = None,
) -> RenderedPrompt:
    """Windowed source chunks with the masked slot between its translated neighbours.

    The window holds 2 chunks at the first and last steps of a schedule and 3
    in between; the target line is the previous contextual translation (if
    any), the mask, then the next independent translation (if any).
    """
    if not 2 <= len(window) <= 3:
        raise WindowSizeError(f"contextual window needs 2 or 3 chunks, got {len(window)}")
    prev_contextual = prev_contextual or None
    next_independent = next_independent or None
    if prev_contextual is None and next_independent is None:
        raise ValueError("contextual prompt needs a previous or next translation")
    parts = [p for p in (prev_contextual, MASK_TOKEN, next_independent) if p is not None]
    test_block = (
        f"{template_set.header}\n"
        f"{template_set.source_lang}: {' '.join(chunk.text for chunk in window)}\n"
        f"{template_set.target_lang}: {' '.join(parts)}"
    )
    return _finish(template_set._prefix("contextual") + "\n\n" + test_block)


def render_standard_prompt(
    template_set: PromptTemplateSet, test_sentence: str, partial_output: str = ""
) -> RenderedPrompt:
    """Whole-sentence examples, then the test sentence with any already-generated
    output ahead of the mask (append-back prompting)."""
    tail = f"{partial_output} {MASK_TOKEN}" if partial_output else MASK_TOKEN
    test_block = (
        f"{template_set.header}\n"
        f"{template_set.source_lang}: {test_sentence}\n"
        f"{template_set.target_lang}: {tail}"
    )
    prefix = template_set._prefix("standard")
    return _finish(prefix + "\n\n" + test_block if prefix else test_block)
