"""Sequence-labeling pipeline for plant stress-response NER.

Thin python surface over the C++ core: corpus I/O, BIO validation and
repair, subword alignment, agreement statistics, the trainable tagger,
POS-aware post-processing, ontology normalization and the evaluation suite.
"""

from plantner._core import (  # noqa: F401
    AgreementTable,
    AlignedSequence,
    BioViolation,
    ChunkRuleConfig,
    ClassMetrics,
    ClassWeights,
    Document,
    EntitySpan,
    Error,
    EvalReport,
    IaaPair,
    IaaReport,
    LabelSchema,
    NormalizedEntity,
    OntologyDictionary,
    OntologyEntry,
    PairwiseIaa,
    Sentence,
    SubwordVocab,
    TaggerModel,
    Token,
    TrainConfig,
    TrainResult,
    align_labels,
    annotate_document,
    bio_to_spans,
    build_table,
    cohen_kappa,
    compute_class_weights,
    entity_metrics,
    fix_inconsistent,
    g_index,
    iaa_report,
    normalize_entity,
    pairwise_iaa,
    parse_conll,
    pos_realign,
    predict,
    project_to_words,
    render_report_table,
    repair_bio,
    run_pipeline,
    segment,
    serialize_conll,
    spans_to_bio,
    token_metrics,
    train,
    validate_bio,
    viterbi_decode,
    weighted_ce_loss,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
