"""Rewrite-quality evaluation toolkit.

Metrics for grammatical error correction and text simplification (n-gram
overlap, edit-level P/R/F, keep/delete/add rewrite scores, readability,
length statistics, hallucinated-entity rate), plus the edit alignment and
prompt helpers behind them. The heavy lifting lives in the compiled
`_core` extension; this package re-exports its public surface.
"""

from ._core import (
    __version__,
    apply_edits,
    clean_completion,
    count_sentences,
    count_syllables,
    extract_edits,
    fkgl,
    fre,
    gleu,
    gleu_sentence,
    hallucination_rate,
    length_stats,
    lower_ascii,
    m2_score,
    prf,
    recognize,
    render_prompt,
    sari,
    sari_sentence,
    tokenize,
    word_count,
)

__all__ = [
    "__version__",
    "apply_edits",
    "clean_completion",
    "count_sentences",
    "count_syllables",
    "extract_edits",
    "fkgl",
    "fre",
    "gleu",
    "gleu_sentence",
    "hallucination_rate",
    "length_stats",
    "lower_ascii",
    "m2_score",
    "prf",
    "recognize",
    "render_prompt",
    "sari",
    "sari_sentence",
    "tokenize",
    "word_count",
]
