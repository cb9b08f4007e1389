"""Two-stage chunk translation and the whole-sentence prompting baselines.

Strategy ``decomt`` runs two stages. Stage one translates every chunk in
isolation; requests from all sentences of a batch group are pooled, so n
chunks cost ceil(n/batch_size) physical calls. Stage two refines chunks
incrementally: step 1 masks the first chunk ahead of the second chunk's
independent translation, intermediate steps slide a three-chunk window with
the previous contextual translation before the mask and the next independent
translation after it, and the final step masks the last chunk after the
previous contextual translation. Steps run in lockstep across sentences
(sentence i's step k depends on its step k-1, but sentences batch together),
so a batch costs max(beta) contextual physical calls while each sentence
still owns exactly beta contextual exchanges. A single-chunk sentence reuses
its independent translation and makes no contextual calls.

``sp`` renders the whole-sentence prompt, generates, appends the generation
back ahead of the mask and repeats until the backend returns nothing or the
token budget runs out. ``sap`` does the same one token per call with a
budget of floor(1.5 x source tokens) calls.
"""
from __future__ import annotations

from dataclasses import dataclass

from .chunking import ChunkedSentence, segment, tokenize
from .errors import AlignmentError, BackendError, EmptySentence
from .templates import (
    PromptTemplateSet,
    render_contextual_prompt,
    render_independent_prompt,
    render_standard_prompt,
)
from .backend import InfillRequest, InfillResponse

STRATEGIES = ("decomt", "decomt_single_stage", "sp", "sap")
ALLOWED_M = (3, 4, 5)


@dataclass(frozen=True)
class EngineConfig:
    m: int = 4
    batch_size: int = 8
    shots: int = 5
    allowed_m: tuple[int, ...] = ALLOWED_M

    def __post_init__(self):
        if self.m not in self.allowed_m:
            raise ValueError(f"m={self.m} not in allowed set {self.allowed_m}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


@dataclass(frozen=True)
class IndependentTranslation:
    chunks: tuple[str, ...]

    @property
    def assembled(self) -> str:
        return " ".join(self.chunks)


@dataclass(frozen=True)
class ContextualTranslation:
    chunks: tuple[str, ...]

    @property
    def assembled(self) -> str:
        return " ".join(self.chunks)


@dataclass(frozen=True)
class BackendCall:
    """One logical prompt/response exchange, tagged with its physical call."""

    stage: str                       # independent | contextual | standard
    request_id: str
    call_id: str
    prompt: str
    response: str
    step: int = 0                    # 1-based contextual step, 0 otherwise
    window: tuple[int, ...] = ()     # source chunk indices in the window
    prev_index: int = -1             # chunk whose contextual translation precedes the mask
    next_index: int = -1             # chunk whose independent translation follows the mask


@dataclass(frozen=True)
class TranslationTrace:
    source: ChunkedSentence
    strategy: str
    m: int
    output: str
    backend_calls: tuple[BackendCall, ...]
    independent: IndependentTranslation | None = None
    contextual: ContextualTranslation | None = None
    group_independent_calls: tuple[str, ...] = ()  # physical ids shared by the batch group
    flags: tuple[str, ...] = ()

    @property
    def contextual_call_count(self) -> int:
        return sum(1 for c in self.backend_calls if c.stage == "contextual")

    @property
    def attributed_call_count(self) -> int:
        """Distinct physical invocations serving this sentence: the batch
        group's shared independent calls plus this sentence's own steps."""
        own = {c.call_id for c in self.backend_calls if c.stage != "independent"}
        return len(set(self.group_independent_calls) | own)


def translate_independent(
    source: ChunkedSentence, template_set: PromptTemplateSet, backend
) -> IndependentTranslation:
    """Translate every chunk of one sentence in isolation."""
    traces = _independent_stage([source], template_set, backend, sentence_prefix="s0000")
    return IndependentTranslation(chunks=tuple(c.response for c in traces[0]))


def _independent_stage(
    sources: list[ChunkedSentence],
    template_set: PromptTemplateSet,
    backend,
    sentence_prefix: str | None = None,
) -> list[list[BackendCall]]:
    requests, owners = [], []
    for si, source in enumerate(sources):
        prefix = sentence_prefix or f"s{si:04d}"
        for chunk in source.chunks:
            prompt = render_independent_prompt(template_set, chunk)
            requests.append(InfillRequest(
                prompt=prompt.text,
                max_new_tokens=2 * source.m,
                stop_sequences=("\n",),
                request_id=f"{prefix}/ind/{chunk.index:04d}",
            ))
            owners.append(si)
    responses = backend.infill_batch(requests) if requests else []
    calls: list[list[BackendCall]] = [[] for _ in sources]
    for owner, request, response in zip(owners, requests, responses):
        _raise_on_error(response, f"independent chunk {len(calls[owner])} of sentence {owner}")
        calls[owner].append(BackendCall(
            stage="independent",
            request_id=request.request_id,
            call_id=response.call_id,
            prompt=request.prompt,
            response=response.text,
        ))
    return calls


def translate_contextual(
    source: ChunkedSentence,
    independent: IndependentTranslation,
    template_set: PromptTemplateSet,
    backend,
) -> ContextualTranslation:
    """Refine one sentence's chunks along the incremental infilling schedule."""
    if len(independent.chunks) != source.beta:
        raise AlignmentError(
            f"{len(independent.chunks)} independent chunks vs {source.beta} source chunks"
        )
    chunks, _calls, _flags = _contextual_stage(
        [source], [list(independent.chunks)], template_set, backend
    )
    return ContextualTranslation(chunks=tuple(chunks[0]))


def _schedule_step(beta: int, step: int) -> tuple[tuple[int, ...], int, int, int]:
    """(window chunk indices, prev chunk index, next chunk index, target index)
    for 1-based ``step`` of a ``beta``-chunk schedule; -1 marks an absent side."""
    if step == 1:
        return (0, 1), -1, 1, 0
    if step == beta:
        return (beta - 2, beta - 1), beta - 2, -1, beta - 1
    return (step - 2, step - 1, step), step - 2, step, step - 1


def _contextual_stage(
    sources: list[ChunkedSentence],
    independent_chunks: list[list[str]],
    template_set: PromptTemplateSet,
    backend,
    sentence_prefix: str | None = None,
) -> tuple[list[list[str]], list[list[BackendCall]], list[list[str]]]:
    contextual: list[list[str]] = []
    for source, m_chunks in zip(sources, independent_chunks):
        contextual.append([m_chunks[0]] if source.beta == 1 else [""] * source.beta)
    calls: list[list[BackendCall]] = [[] for _ in sources]
    flags: list[list[str]] = [[] for _ in sources]

    max_steps = max((s.beta for s in sources if s.beta >= 2), default=0)
    for step in range(1, max_steps + 1):
        requests, owners, meta = [], [], []
        for si, source in enumerate(sources):
            if source.beta < 2 or step > source.beta:
                continue
            window_idx, prev_idx, next_idx, target_idx = _schedule_step(source.beta, step)
            prev_text = contextual[si][prev_idx] if prev_idx >= 0 else None
            next_text = independent_chunks[si][next_idx] if next_idx >= 0 else None
            prompt = render_contextual_prompt(
                template_set,
                tuple(source.chunks[i] for i in window_idx),
                prev_contextual=prev_text,
                next_independent=next_text,
            )
            prefix = sentence_prefix or f"s{si:04d}"
            requests.append(InfillRequest(
                prompt=prompt.text,
                max_new_tokens=4 * source.m,
                stop_sequences=("\n",),
                request_id=f"{prefix}/ctx/{step:04d}",
            ))
            owners.append(si)
            meta.append((window_idx, prev_idx, next_idx, target_idx))
        if not requests:
            continue
        responses = backend.infill_batch(requests)
        for owner, request, response, (window_idx, prev_idx, next_idx, target_idx) in zip(
            owners, requests, responses, meta
        ):
            _raise_on_error(response, f"contextual step {step} of sentence {owner}")
            text = response.text
            if not text:
                # graceful degradation: reuse the masked chunk's stage-one text
                text = independent_chunks[owner][target_idx]
                flags[owner].append(f"contextual_fallback@{target_idx}")
            contextual[owner][target_idx] = text
            calls[owner].append(BackendCall(
                stage="contextual",
                request_id=request.request_id,
                call_id=response.call_id,
                prompt=request.prompt,
                response=response.text,
                step=step,
                window=window_idx,
                prev_index=prev_idx,
                next_index=next_idx,
            ))
    return contextual, calls, flags


def _raise_on_error(response: InfillResponse, where: str) -> None:
    if response.error is not None:
        raise BackendError(f"{where}: {response.error}")


def decomt_translate_corpus(
    sentences: list[str],
    config: EngineConfig,
    template_set: PromptTemplateSet,
    backend,
    single_stage: bool = False,
) -> list[TranslationTrace]:
    """Translate a batch group of sentences, pooling stage-one requests."""
    if not sentences:
        return []
    template_set = template_set.with_shots(config.shots)
    sources = []
    for sentence in sentences:
        tokens = tokenize(sentence)
        if not tokens.tokens:
            raise EmptySentence("cannot translate an empty sentence")
        sources.append(segment(tokens, config.m))

    ind_calls = _independent_stage(sources, template_set, backend)
    independent_chunks = [[c.response for c in calls] for calls in ind_calls]
    group_ids = tuple(dict.fromkeys(
        c.call_id for calls in ind_calls for c in calls
    ))

    if single_stage:
        traces = []
        for source, m_chunks, calls in zip(sources, independent_chunks, ind_calls):
            independent = IndependentTranslation(chunks=tuple(m_chunks))
            traces.append(TranslationTrace(
                source=source,
                strategy="decomt_single_stage",
                m=config.m,
                output=independent.assembled,
                backend_calls=tuple(calls),
                independent=independent,
                contextual=None,
                group_independent_calls=group_ids,
            ))
        return traces

    contextual_chunks, ctx_calls, flags = _contextual_stage(
        sources, independent_chunks, template_set, backend
    )
    traces = []
    for source, m_chunks, r_chunks, icalls, ccalls, sentence_flags in zip(
        sources, independent_chunks, contextual_chunks, ind_calls, ctx_calls, flags
    ):
        independent = IndependentTranslation(chunks=tuple(m_chunks))
        contextual = ContextualTranslation(chunks=tuple(r_chunks))
        traces.append(TranslationTrace(
            source=source,
            strategy="decomt",
            m=config.m,
            output=contextual.assembled,
            backend_calls=tuple(icalls) + tuple(ccalls),
            independent=independent,
            contextual=contextual,
            group_independent_calls=group_ids,
            flags=tuple(sentence_flags),
        ))
    return traces


def decomt_translate(
    sentence: str,
    config: EngineConfig,
    template_set: PromptTemplateSet,
    backend,
    single_stage: bool = False,
) -> TranslationTrace:
    return decomt_translate_corpus([sentence], config, template_set, backend, single_stage)[0]


def sp_translate(
    sentence: str,
    template_set: PromptTemplateSet,
    backend,
    max_len: int | None = None,
    window_tokens: int = 16,
    shots: int | None = None,
) -> TranslationTrace:
    """Standard prompting with append-back: generate, append, repeat."""
    tokens = tokenize(sentence)
    if not tokens.tokens:
        raise EmptySentence("cannot translate an empty sentence")
    if shots is not None:
        template_set = template_set.with_shots(shots)
    if max_len is None:
        max_len = max(16, 2 * len(tokens.tokens))

    partial = ""
    calls: list[BackendCall] = []
    flags: list[str] = []
    while True:
        prompt = render_standard_prompt(template_set, sentence, partial)
        request = InfillRequest(
            prompt=prompt.text,
            max_new_tokens=window_tokens,
            stop_sequences=("\n",),
            request_id=f"s0000/std/{len(calls):04d}",
        )
        response = backend.infill(request)
        _raise_on_error(response, f"standard call {len(calls)}")
        calls.append(BackendCall(
            stage="standard",
            request_id=request.request_id,
            call_id=response.call_id,
            prompt=request.prompt,
            response=response.text,
        ))
        if not response.text:
            break
        new_tokens = response.text.split()
        budget_left = max_len - len(partial.split())
        if len(new_tokens) >= budget_left:
            new_tokens = new_tokens[:budget_left]
            partial = _append(partial, " ".join(new_tokens))
            flags.append("truncated")
            break
        partial = _append(partial, response.text)
        if response.raw != response.text:   # a stop sequence ended the generation
            break
    return _whole_sentence_trace(tokens.raw, tokens.tokens, "sp", partial, calls, flags)


def sap_translate(
    sentence: str,
    template_set: PromptTemplateSet,
    backend,
    shots: int | None = None,
) -> TranslationTrace:
    """One token per call, appended back; budget floor(1.5 x source tokens)."""
    tokens = tokenize(sentence)
    if not tokens.tokens:
        raise EmptySentence("cannot translate an empty sentence")
    if shots is not None:
        template_set = template_set.with_shots(shots)
    budget = max(1, (3 * len(tokens.tokens)) // 2)

    partial = ""
    calls: list[BackendCall] = []
    flags: list[str] = []
    for step in range(budget):
        prompt = render_standard_prompt(template_set, sentence, partial)
        request = InfillRequest(
            prompt=prompt.text,
            max_new_tokens=1,
            stop_sequences=("\n",),
            request_id=f"s0000/sap/{step:04d}",
        )
        response = backend.infill(request)
        _raise_on_error(response, f"sap call {step}")
        calls.append(BackendCall(
            stage="standard",
            request_id=request.request_id,
            call_id=response.call_id,
            prompt=request.prompt,
            response=response.text,
        ))
        if not response.text:
            break
        partial = _append(partial, response.text.split()[0])
    else:
        flags.append("budget_exhausted")
    return _whole_sentence_trace(tokens.raw, tokens.tokens, "sap", partial, calls, flags)


def _append(partial: str, text: str) -> str:
    return f"{partial} {text}" if partial else text


def _whole_sentence_trace(
    raw: str,
    tokens: tuple[str, ...],
    strategy: str,
    output: str,
    calls: list[BackendCall],
    flags: list[str],
) -> TranslationTrace:
    source = segment(tokenize(raw), max(1, len(tokens)))
    return TranslationTrace(
        source=source,
        strategy=strategy,
        m=0,
        output=output,
        backend_calls=tuple(calls),
        flags=tuple(flags),
    )
