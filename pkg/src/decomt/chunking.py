"""Whitespace tokenization and fixed-size word chunking.

A token is a maximal run of non-whitespace characters; no normalization is
applied, so prompt rendering stays byte-exact. A sentence of n tokens splits
into ceil(n/m) chunks of m tokens each, with a shorter final remainder chunk.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptySentence, InvalidChunkSize


@dataclass(frozen=True)
class TokenizedSentence:
    tokens: tuple[str, ...]
    raw: str

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Chunk:
    tokens: tuple[str, ...]
    index: int

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ChunkedSentence:
    chunks: tuple[Chunk, ...]
    m: int
    raw: str = ""

    @property
    def beta(self) -> int:
        return len(self.chunks)

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(tok for chunk in self.chunks for tok in chunk.tokens)


def tokenize(text: str) -> TokenizedSentence:
    """Split on runs of whitespace; empty or whitespace-only input yields zero tokens."""
    return TokenizedSentence(tokens=tuple(text.split()), raw=text)


def segment(sentence: TokenizedSentence, m: int) -> ChunkedSentence:
    """Cut the token stream every m tokens; the last chunk keeps the remainder."""
    if m < 1:
        raise InvalidChunkSize(f"tokens-per-chunk must be >= 1, got {m}")
    if len(sentence.tokens) == 0:
        raise EmptySentence("cannot segment a sentence with no tokens")
    chunks = tuple(
        Chunk(tokens=sentence.tokens[start:start + m], index=i)
        for i, start in enumerate(range(0, len(sentence.tokens), m))
    )
    return ChunkedSentence(chunks=chunks, m=m, raw=sentence.raw)
