"""Per-story narrative coherence metrics and the composite score.

Five story-level metrics (coreference concentration, discourse relation
diversity, topic switch rate, character persistence, multimodal character
grounding) plus their tanh-normalized forms and two composite aggregations
(arithmetic and geometric mean). All functions are pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .corpus import RELATION_LABELS, AnnotationBundle, CharacterAlignment, Chain, Story
from .errors import (
    GranularityLengthMismatchError,
    GroundingMissingError,
    MissingAnnotationError,
    SingleSegmentError,
    UnknownLabelError,
)

# Stabilization constant added to denominators and inside the geometric-mean
# product; overridable per call.
DEFAULT_EPSILON = 1e-9


def squash(raw: float) -> float:
    """tanh normalization onto [0, 1) for non-negative raw scores.

    math.tanh saturates to exactly 1.0 around raw ~ 19.4; clamp one ulp below
    so the [0, 1) bound survives extreme raw values.
    """
    norm = math.tanh(raw)
    if norm >= 1.0:
        norm = math.nextafter(1.0, 0.0)
    return norm


@dataclass(frozen=True)
class CoreferenceComponent:
    chain_count: int
    mean_chain_size: float
    raw: float
    norm: float


@dataclass(frozen=True)
class DiscourseComponent:
    unique_types: int
    total_relations: int
    raw: float
    norm: float


@dataclass(frozen=True)
class TopicComponent:
    per_granularity: Mapping[int, float]
    raw: float  # mean switch rate over granularities
    norm: float


@dataclass(frozen=True)
class CharacterScore:
    name: str
    continuity: float
    spread: float
    persistence: float


@dataclass(frozen=True)
class CharacterComponent:
    per_character: tuple[CharacterScore, ...]
    continuity: float
    spread: float
    raw: float  # mean persistence over characters
    norm: float


@dataclass(frozen=True)
class GroundingComponent:
    character_match: float  # agreement between text and visual segment sets
    visual_grounding: float | None
    raw: float
    norm: float


@dataclass(frozen=True)
class MetricVector:
    coref: CoreferenceComponent
    discourse: DiscourseComponent
    topic: TopicComponent
    character: CharacterComponent
    grounding: GroundingComponent

    def norms(self) -> tuple[float, float, float, float, float]:
        """Normalized component values in canonical order."""
        return (
            self.coref.norm,
            self.discourse.norm,
            self.topic.norm,
            self.character.norm,
            self.grounding.norm,
        )


@dataclass(frozen=True)
class NcsResult:
    arithmetic: float
    geometric: float
    components: tuple[float, float, float, float, float]


@dataclass(frozen=True)
class StoryScore:
    """All metric outputs for one story, plus bookkeeping flags."""

    story_id: str
    sequence_id: str
    system: str
    prompt_condition: str
    n_segments: int
    degenerate: bool  # single-segment story; switch/diversity undefined, recorded as 0
    metrics: MetricVector
    ncs: NcsResult
    missing: tuple[str, ...]  # annotation kinds absent and scored by degenerate rule


def coreference_score(chains: Sequence[Chain] | Sequence[Sequence[Any]]) -> CoreferenceComponent:
    """Concentration of reference: mean chain size over chain count."""
    count = len(chains)
    if count == 0:
        return CoreferenceComponent(chain_count=0, mean_chain_size=0.0, raw=0.0, norm=0.0)
    mean_size = sum(len(chain) for chain in chains) / count
    raw = mean_size / count
    return CoreferenceComponent(chain_count=count, mean_chain_size=mean_size, raw=raw, norm=squash(raw))


def discourse_diversity(
    relations: Sequence[str],
    *,
    strict: bool = False,
    label_set: Sequence[str] = RELATION_LABELS,
) -> DiscourseComponent:
    """Unique relation types over total relations between adjacent segments."""
    if strict:
        for label in relations:
            if label not in label_set:
                raise UnknownLabelError(f"relation label {label!r} outside the declared set")
    total = len(relations)
    if total == 0:
        return DiscourseComponent(unique_types=0, total_relations=0, raw=0.0, norm=0.0)
    unique = len(set(relations))
    raw = unique / total
    return DiscourseComponent(unique_types=unique, total_relations=total, raw=raw, norm=squash(raw))


def relation_composition(
    relations_by_system: Mapping[str, Sequence[Sequence[str]]],
) -> dict[str, dict[str, float]]:
    """Mean within-story proportion of each relation label, per system.

    Stories without relations are skipped (their proportions are undefined).
    Per-system proportions sum to 1.
    """
    out: dict[str, dict[str, float]] = {}
    for system, story_relations in relations_by_system.items():
        per_story: list[dict[str, float]] = []
        for relations in story_relations:
            if not relations:
                continue
            total = len(relations)
            props: dict[str, float] = {}
            for label in relations:
                props[label] = props.get(label, 0.0) + 1.0 / total
            per_story.append(props)
        if not per_story:
            continue
        labels = sorted({label for props in per_story for label in props})
        out[system] = {
            label: sum(props.get(label, 0.0) for props in per_story) / len(per_story)
            for label in labels
        }
    return out


def topic_switch_single(labels: Sequence[Any]) -> float:
    """Fraction of adjacent segment pairs whose topic label changes."""
    n = len(labels)
    if n < 2:
        raise SingleSegmentError("topic switch is undefined for fewer than two segments")
    changes = sum(1 for a, b in zip(labels, labels[1:]) if a != b)
    return changes / (n - 1)


def topic_switch(topics: Mapping[int, Sequence[Any]]) -> TopicComponent:
    """Switch rate per granularity, averaged across granularities."""
    if not topics:
        raise GranularityLengthMismatchError("at least one topic granularity is required")
    lengths = {len(labels) for labels in topics.values()}
    if len(lengths) != 1:
        raise GranularityLengthMismatchError(f"label list lengths differ across granularities: {sorted(lengths)}")
    per_granularity = {gran: topic_switch_single(topics[gran]) for gran in sorted(topics)}
    raw = sum(per_granularity.values()) / len(per_granularity)
    return TopicComponent(per_granularity=per_granularity, raw=raw, norm=squash(raw))


def character_persistence(
    characters: Sequence[CharacterAlignment],
    segment_count: int,
    *,
    epsilon: float = DEFAULT_EPSILON,
) -> CharacterComponent:
    """Continuity over spread for each character, averaged at story level.

    Continuity: fraction of the story's adjacent segment pairs where the
    character is mentioned in both segments. Spread: first-to-last mention
    distance over the maximal distance. Single-segment stories have no
    adjacent pairs and no spread, so both are 0 there.
    """
    if segment_count < 1:
        raise ValueError("segment_count must be >= 1")
    pairs = segment_count - 1
    scores = []
    for character in characters:
        mentioned = character.text_segments
        if pairs > 0:
            both = sum(1 for i in range(pairs) if i in mentioned and i + 1 in mentioned)
            continuity = both / pairs
            spread = (max(mentioned) - min(mentioned)) / pairs if mentioned else 0.0
        else:
            continuity = 0.0
            spread = 0.0
        persistence = continuity / (spread + epsilon)
        scores.append(
            CharacterScore(name=character.name, continuity=continuity, spread=spread, persistence=persistence)
        )
    if not scores:
        return CharacterComponent(per_character=(), continuity=0.0, spread=0.0, raw=0.0, norm=0.0)
    k = len(scores)
    continuity = sum(s.continuity for s in scores) / k
    spread = sum(s.spread for s in scores) / k
    raw = sum(s.persistence for s in scores) / k
    return CharacterComponent(
        per_character=tuple(scores), continuity=continuity, spread=spread, raw=raw, norm=squash(raw)
    )


def _jaccard(a: frozenset[int], b: frozenset[int]) -> float:
    # Two empty sets are identical, which we read as perfect agreement.
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def multimodal_character_grounding(
    characters: Sequence[CharacterAlignment],
    grounding_score: float | None,
    *,
    epsilon: float = DEFAULT_EPSILON,
    strict: bool = False,
) -> GroundingComponent:
    """Text-visual character agreement relative to story-level visual grounding.

    Character match is the mean Jaccard overlap between each character's
    text-mention segments and visual-presence segments.
    """
    if not characters:
        return GroundingComponent(
            character_match=0.0, visual_grounding=grounding_score, raw=0.0, norm=0.0
        )
    match = sum(_jaccard(c.text_segments, c.visual_segments) for c in characters) / len(characters)
    if grounding_score is None:
        if strict:
            raise GroundingMissingError("characters are annotated but the grounding score is absent")
        return GroundingComponent(character_match=match, visual_grounding=None, raw=0.0, norm=0.0)
    raw = match / (grounding_score + epsilon)
    return GroundingComponent(
        character_match=match, visual_grounding=grounding_score, raw=raw, norm=squash(raw)
    )


def composite(values: Sequence[float], *, epsilon: float = DEFAULT_EPSILON) -> tuple[float, float]:
    """Arithmetic mean and stabilized geometric mean of component values.

    The stabilizer is added inside the root only; the result is returned
    as-is, so geometric <= arithmetic + epsilon for non-negative inputs.
    """
    if not values:
        raise ValueError("composite requires at least one component")
    arith = sum(values) / len(values)
    geom = math.prod(v + epsilon for v in values) ** (1.0 / len(values))
    # In exact arithmetic geom <= arith + epsilon (AM-GM on the shifted
    # values); float roundoff can overshoot by a few ulp when all components
    # are equal, so pin the root back to the bound.
    bound = arith + epsilon
    if geom > bound:
        geom = bound
    return arith, geom


def ncs(vector: MetricVector, *, epsilon: float = DEFAULT_EPSILON) -> NcsResult:
    components = vector.norms()
    arith, geom = composite(components, epsilon=epsilon)
    return NcsResult(arithmetic=arith, geometric=geom, components=components)


def score_story(
    story: Story,
    bundle: AnnotationBundle,
    *,
    epsilon: float = DEFAULT_EPSILON,
    strict: bool = False,
    granularities: Sequence[int] | None = None,
) -> StoryScore:
    """Compute the full metric vector and composite scores for one story.

    The bundle is assumed structurally valid (see ``validate_bundle``).
    Absent annotation kinds score 0 under the degenerate rules and are
    listed in ``missing``; in strict mode they raise instead.
    """
    n = story.n_segments
    degenerate = n == 1
    missing: list[str] = []

    def absent(kind: str) -> None:
        if strict:
            raise MissingAnnotationError(f"story {story.story_id!r} has no {kind} annotation")
        missing.append(kind)

    chains = bundle.coref_chains
    if chains is None:
        absent("coref_chains")
        chains = ()
    coref = coreference_score(chains)

    relations = bundle.relations
    if relations is None:
        if not degenerate:
            absent("relations")
        relations = ()
    discourse = discourse_diversity(relations, strict=strict)

    topics = bundle.topics
    if degenerate:
        topic = TopicComponent(per_granularity={}, raw=0.0, norm=0.0)
    else:
        if topics is None:
            absent("topics")
            topic = TopicComponent(per_granularity={}, raw=0.0, norm=0.0)
        else:
            if granularities is not None:
                selected = {g: topics[g] for g in granularities if g in topics}
                if strict and len(selected) != len(set(granularities)):
                    wanted = sorted(set(granularities) - set(selected))
                    raise MissingAnnotationError(
                        f"story {story.story_id!r} lacks topic granularities {wanted}"
                    )
                topics = selected
            if topics:
                topic = topic_switch(topics)
            else:
                missing.append("topics")
                topic = TopicComponent(per_granularity={}, raw=0.0, norm=0.0)

    characters = bundle.characters
    if characters is None:
        absent("characters")
        characters = ()
    character = character_persistence(characters, n, epsilon=epsilon)

    grounding_value = bundle.grounding_score
    if characters and grounding_value is None and not strict:
        # strict mode raises GroundingMissingError inside the op instead
        missing.append("grounding_score")
    grounding = multimodal_character_grounding(
        characters, grounding_value, epsilon=epsilon, strict=strict
    )

    vector = MetricVector(
        coref=coref, discourse=discourse, topic=topic, character=character, grounding=grounding
    )
    return StoryScore(
        story_id=story.story_id,
        sequence_id=story.sequence_id,
        system=story.system,
        prompt_condition=story.prompt_condition,
        n_segments=n,
        degenerate=degenerate,
        metrics=vector,
        ncs=ncs(vector, epsilon=epsilon),
        missing=tuple(missing),
    )
