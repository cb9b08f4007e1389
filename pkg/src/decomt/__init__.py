"""Chunk-wise decomposed prompting toolkit for machine translation.

Splits a source sentence into fixed-size word chunks, translates each chunk
independently with few-shot prompting, then refines the chunks left to right
by infilling a masked slot between the previous refined translation and the
next independent one. Ships whole-sentence prompting baselines, chrF++ and
BLEU/spBLEU scoring, paired bootstrap significance testing and the
supporting analyses, all runnable against a deterministic mock backend.
"""
from ._version import __version__
from .chunking import Chunk, ChunkedSentence, TokenizedSentence, segment, tokenize
from .templates import (
    MASK_TOKEN,
    AlignedExample,
    PromptTemplateSet,
    RenderedPrompt,
    derive_contextual_examples,
    load_template_set,
    render_contextual_prompt,
    render_independent_prompt,
    render_standard_prompt,
)
from .backend import (
    BackendConfig,
    InfillRequest,
    InfillResponse,
    MockInfillBackend,
    RemoteInfillBackend,
    expected_physical_calls,
)
from .engine import (
    BackendCall,
    ContextualTranslation,
    EngineConfig,
    IndependentTranslation,
    TranslationTrace,
    decomt_translate,
    decomt_translate_corpus,
    sap_translate,
    sp_translate,
    translate_contextual,
    translate_independent,
)
from .metrics import (
    BootstrapResult,
    ScoreReport,
    bleu,
    chrf_pp,
    paired_bootstrap,
    whitespace_tokenize,
)
from .analysis import (
    Bucket,
    BucketReport,
    OffTargetReport,
    StageDelta,
    bucket_by_length,
    make_overlap_identifier,
    off_target_rate,
    stage_delta,
)
from .corpus_io import (
    ParallelCorpus,
    RunManifest,
    load_parallel,
    read_manifest,
    read_traces,
    write_manifest,
    write_traces,
)

__all__ = [name for name in dir() if not name.startswith("_")]
