"""Narrow boundary to a masked-span infilling model.

One request carries one prompt with exactly one mask placeholder; the
response is the predicted span. Requests are grouped into physical calls of
``batch_size`` (ceil(n/batch_size) calls for n requests) and responses are
returned in request order regardless of completion order.

Two backends ship: a deterministic lexicon mock for tests and experiments,
and an HTTP client for a remote infill service.

Wire protocol (UTF-8 JSON over HTTP). One POST per physical call::

    POST <endpoint>/infill
    {"requests": [{"request_id": "...", "prompt": "...",
                   "mask_sentinel": "<extra_id_0>",
                   "max_new_tokens": 8, "stop": ["\\n"]}]}

    200 OK
    {"responses": [{"request_id": "...", "text": "...", "error": null}]}

Responses are matched to requests by ``request_id``. A missing or malformed
body raises ProtocolError; network failures and 5xx raise TransportError
after bounded exponential-backoff retries. Per-request errors come back on
the individual response, not the whole batch.
"""
from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass

import httpx

from .errors import MaskCountError, PromptShapeError, ProtocolError, TransportError
from .templates import MASK_TOKEN

_HEADER_RE = re.compile(r"^Translate from (.+) to (.+):$")


@dataclass(frozen=True)
class InfillRequest:
    prompt: str
    max_new_tokens: int = 16
    stop_sequences: tuple[str, ...] = ("\n",)
    request_id: str = ""


@dataclass(frozen=True)
class InfillResponse:
    text: str
    raw: str
    latency_ms: float = 0.0
    request_id: str = ""
    call_id: str = ""          # physical call this exchange travelled in
    error: str | None = None   # per-request failure, attributed not raised


@dataclass(frozen=True)
class BackendConfig:
    endpoint: str = ""
    mask_sentinel: str = MASK_TOKEN
    batch_size: int = 8
    timeout_ms: int = 30_000
    retries: int = 2

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def clean_generation(raw: str, sentinel: str, stop_sequences: tuple[str, ...]) -> str:
    """Strip the backend sentinel, cut at the first stop sequence, trim whitespace."""
    text = raw.replace(sentinel, "")
    cut = len(text)
    for stop in stop_sequences:
        idx = text.find(stop)
        if idx != -1:
            cut = min(cut, idx)
    return text[:cut].strip()


def _check_mask(request: InfillRequest) -> None:
    count = request.prompt.count(MASK_TOKEN)
    if count != 1:
        raise MaskCountError(
            f"prompt must contain exactly one {MASK_TOKEN}, found {count} "
            f"(request {request.request_id or '<unnamed>'})"
        )


class _PhysicalCallCounter:
    """Thread-safe monotonically increasing physical-call ids."""

    def __init__(self):
        self._lock = threading.Lock()
        self._n = 0

    def next_id(self) -> str:
        with self._lock:
            call_id = f"call-{self._n:05d}"
            self._n += 1
            return call_id


@dataclass
class _ParsedPrompt:
    source_tokens: list[str]
    prev_tokens: list[str]
    next_tokens: list[str]
    chunk_style: bool


def _parse_prompt(prompt: str) -> _ParsedPrompt:
    """Pull the test block apart and note whether examples are chunk-aligned.

    Chunk-aligned prompts (any example block with two or more aligned pairs)
    mask a whole chunk; single-pair example blocks mean whole-sentence
    prompting, where the mask continues the partial output token stream.
    """
    blocks = prompt.split("\n\n")
    test = blocks[-1].splitlines()
    if len(test) != 3:
        raise PromptShapeError(f"test block has {len(test)} lines, expected 3")
    header = _HEADER_RE.match(test[0])
    if header is None:
        raise PromptShapeError(f"unrecognized test header {test[0]!r}")
    src_label, tgt_label = header.group(1), header.group(2)
    src_prefix, tgt_prefix = f"{src_label}: ", f"{tgt_label}: "
    if not test[1].startswith(src_prefix) or not test[2].startswith(tgt_prefix):
        raise PromptShapeError("test block lines do not match the header labels")
    source_line = test[1][len(src_prefix):]
    target_line = test[2][len(tgt_prefix):]
    if MASK_TOKEN not in target_line:
        raise PromptShapeError("test target line carries no mask placeholder")
    before, after = target_line.split(MASK_TOKEN, 1)

    chunk_style = False
    for block in blocks[:-1]:
        lines = block.splitlines()
        if lines and _HEADER_RE.match(lines[0]) and len(lines) > 3:
            chunk_style = True
            break
    return _ParsedPrompt(
        source_tokens=source_line.split(),
        prev_tokens=before.split(),
        next_tokens=after.split(),
        chunk_style=chunk_style,
    )


class MockInfillBackend:
    """Deterministic oracle backend: a monotonic one-token-to-one-token lexicon.

    The masked span is located from the prompt alone. For chunk-aligned
    prompts the translated neighbours pin down the masked chunk (their token
    counts equal the neighbouring source chunks' counts under a 1:1 lexicon);
    for whole-sentence prompts the mask continues after the partial output,
    up to ``max_new_tokens`` source tokens per call. Unknown tokens pass
    through unchanged; an exhausted source yields the empty string, which
    callers treat as the terminator.
    """

    def __init__(self, lexicon: dict[str, str], batch_size: int = 8):
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        self.lexicon = dict(lexicon)
        self.batch_size = batch_size
        self._counter = _PhysicalCallCounter()
        self._history_lock = threading.Lock()
        self.history: list[tuple[InfillRequest, InfillResponse]] = []

    def infill(self, request: InfillRequest) -> InfillResponse:
        return self.infill_batch([request])[0]

    def infill_batch(self, requests: list[InfillRequest]) -> list[InfillResponse]:
        responses: list[InfillResponse] = []
        for group_start in range(0, len(requests), self.batch_size):
            call_id = self._counter.next_id()
            for request in requests[group_start:group_start + self.batch_size]:
                responses.append(self._answer(request, call_id))
        with self._history_lock:
            self.history.extend(zip(requests, responses))
        return responses

    @property
    def physical_calls(self) -> int:
        return self._counter._n

    def _answer(self, request: InfillRequest, call_id: str) -> InfillResponse:
        _check_mask(request)
        parsed = _parse_prompt(request.prompt)
        src = parsed.source_tokens
        if parsed.chunk_style:
            start = len(parsed.prev_tokens)
            end = len(src) - len(parsed.next_tokens)
            demanded = src[start:end]
        else:
            start = len(parsed.prev_tokens)
            demanded = src[start:start + max(request.max_new_tokens, 0)]
        text = " ".join(self.lexicon.get(tok, tok) for tok in demanded)
        return InfillResponse(
            text=text,
            raw=text,
            latency_ms=0.0,
            request_id=request.request_id,
            call_id=call_id,
        )


class RemoteInfillBackend:
    """HTTP client for an infill service speaking the module's wire protocol."""

    def __init__(self, config: BackendConfig, client: httpx.Client | None = None):
        if not config.endpoint:
            raise ValueError("remote backend needs an endpoint")
        self.config = config
        self.batch_size = config.batch_size
        self._counter = _PhysicalCallCounter()
        self._client = client or httpx.Client(timeout=config.timeout_ms / 1000.0)

    def close(self) -> None:
        self._client.close()

    def infill(self, request: InfillRequest) -> InfillResponse:
        response = self.infill_batch([request])[0]
        if response.error is not None:
            raise ProtocolError(f"request {request.request_id}: {response.error}")
        return response

    def infill_batch(self, requests: list[InfillRequest]) -> list[InfillResponse]:
        for request in requests:
            _check_mask(request)
        responses: list[InfillResponse] = []
        for group_start in range(0, len(requests), self.batch_size):
            group = requests[group_start:group_start + self.batch_size]
            responses.extend(self._post_group(group))
        return responses

    def _post_group(self, group: list[InfillRequest]) -> list[InfillResponse]:
        call_id = self._counter.next_id()
        sentinel = self.config.mask_sentinel
        payload = {
            "requests": [
                {
                    "request_id": req.request_id,
                    "prompt": req.prompt.replace(MASK_TOKEN, sentinel),
                    "mask_sentinel": sentinel,
                    "max_new_tokens": req.max_new_tokens,
                    "stop": list(req.stop_sequences),
                }
                for req in group
            ]
        }
        started = time.monotonic()
        body = self._post_with_retries(payload)
        elapsed_ms = (time.monotonic() - started) * 1000.0

        try:
            by_id = {entry["request_id"]: entry for entry in body["responses"]}
        except (TypeError, KeyError) as exc:
            raise ProtocolError(f"malformed response body: {exc}") from exc

        out = []
        for req in group:
            entry = by_id.get(req.request_id)
            if entry is None:
                out.append(InfillResponse(
                    text="", raw="", latency_ms=elapsed_ms, request_id=req.request_id,
                    call_id=call_id, error="no response for request_id",
                ))
                continue
            error = entry.get("error")
            raw = entry.get("text", "") or ""
            out.append(InfillResponse(
                text=clean_generation(raw, sentinel, req.stop_sequences) if error is None else "",
                raw=raw,
                latency_ms=elapsed_ms,
                request_id=req.request_id,
                call_id=call_id,
                error=error,
            ))
        return out

    def _post_with_retries(self, payload: dict) -> dict:
        url = self.config.endpoint.rstrip("/") + "/infill"
        attempts = self.config.retries + 1
        delay = 0.05
        last_exc: Exception | None = None
        for attempt in range(attempts):
            try:
                response = self._client.post(url, json=payload)
            except httpx.HTTPError as exc:
                last_exc = exc
            else:
                if response.status_code >= 500:
                    last_exc = TransportError(f"server error {response.status_code}")
                elif response.status_code != 200:
                    raise ProtocolError(f"unexpected status {response.status_code}")
                else:
                    try:
                        return response.json()
                    except json.JSONDecodeError as exc:
                        raise ProtocolError(f"response is not JSON: {exc}") from exc
            if attempt + 1 < attempts:
                time.sleep(delay)
                delay *= 2
        raise TransportError(
            f"infill call failed after {attempts} attempts: {last_exc}"
        ) from last_exc


def expected_physical_calls(n_requests: int, batch_size: int) -> int:
    """ceil(n/batch_size); exposed for accounting checks."""
    return -(-n_requests // batch_size)
