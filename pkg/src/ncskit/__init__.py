"""Narrative coherence metrics and comparison statistics for visually grounded stories."""

from .baselines import (
    DEFAULT_GRANULARITIES,
    CharacterLexicon,
    LexiconEntry,
    annotate_corpus,
    lexical_grounding,
    lexical_topics,
    load_lexicon,
    match_characters,
    name_chains,
    uniform_relations,
)
from .corpus import (
    RELATION_LABELS,
    SEPARATOR,
    AnnotationBundle,
    Chain,
    CharacterAlignment,
    CorpusStats,
    Mention,
    Segment,
    Story,
    Violation,
    corpus_stats,
    load_corpus,
    make_segment,
    normalize_text,
    parse_story,
    split_sentences,
    validate_bundle,
    validate_corpus,
    word_tokens,
    write_corpus,
)
from .metrics import (
    DEFAULT_EPSILON,
    CharacterComponent,
    CoreferenceComponent,
    DiscourseComponent,
    GroundingComponent,
    MetricVector,
    NcsResult,
    StoryScore,
    TopicComponent,
    character_persistence,
    composite,
    coreference_score,
    discourse_diversity,
    multimodal_character_grounding,
    ncs,
    relation_composition,
    score_story,
    squash,
    topic_switch,
    topic_switch_single,
)
from .stats import (
    AggregateRow,
    GapChangeResult,
    PairedSample,
    PerplexityRow,
    TTestResult,
    aggregate,
    gap_change,
    paired_t,
    perplexity_report,
    regularized_incomplete_beta,
    significance_marker,
    student_t_two_tailed_p,
)

__version__ = "0.1.0"
