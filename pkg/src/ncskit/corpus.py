"""Story corpus interchange: parsing, validation, descriptive statistics, JSONL I/O.

A corpus file is JSON lines, one object per story:

    {"story": {...}, "annotations": {...}}

The full schema ships as ``schema/corpus.schema.json``. All parsing and
validation functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import json
import re
import string
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import (
    DanglingAnnotationError,
    EmptyCorpusError,
    EmptySegmentError,
    EmptyStoryError,
    SchemaError,
)

SEPARATOR = "[SEP]"
PROMPT_CONDITIONS = ("short", "long")

# Implicit discourse relation label set observed in within-story composition
# profiles; unknown labels are tolerated unless strict mode is on.
RELATION_LABELS = (
    "temporal",
    "causal",
    "conjunction",
    "contrast",
    "concession",
    "expansion",
)

_WS_RUN = re.compile(r"\s+")
_SEP_SPLIT = re.compile(r"\s*\[SEP\]\s*")

# Characters stripped from token edges when counting words. Hyphens inside a
# token survive (strip only touches the edges), so hyphenated words count once.
_TOKEN_EDGE_CHARS = string.punctuation + "“”‘’«»–—…¡¿°"

# Words whose trailing period does not end a sentence.
_ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "mt.", "jr.", "sr.",
        "capt.", "col.", "gen.", "lt.", "sgt.", "rev.", "hon.",
        "vs.", "etc.", "e.g.", "i.e.", "cf.", "no.", "fig.", "vol.",
        "inc.", "ltd.", "co.", "a.m.", "p.m.", "u.s.",
    }
)

# A sentence boundary candidate: terminal punctuation, optional closing
# quotes/brackets, followed by a space.
_SENT_BOUNDARY = re.compile(r"[.!?]+[\"'”’»)\]]*(?= )")


def normalize_text(raw: str) -> str:
    """NFC-normalize, collapse whitespace runs, and canonicalize separator spacing.

    The canonical form places exactly one space on each side of every
    separator token, so splitting on the separator and rejoining reproduces
    this string exactly.
    """
    text = unicodedata.normalize("NFC", raw)
    text = _WS_RUN.sub(" ", text).strip()
    parts = _SEP_SPLIT.split(text)
    return f" {SEPARATOR} ".join(parts)


def word_tokens(text: str) -> list[str]:
    """Whitespace tokenization with edge punctuation stripped per token."""
    tokens = []
    for tok in text.split():
        tok = tok.strip(_TOKEN_EDGE_CHARS)
        if tok:
            tokens.append(tok)
    return tokens


def count_words(text: str) -> int:
    return len(word_tokens(text))


def split_sentences(text: str) -> list[str]:
    """Rule-based sentence splitting on terminal punctuation.

    Splits after ``. ! ?`` (plus any closing quotes/brackets) followed by a
    space, unless the word ending there is on the abbreviation allowlist or
    the next word starts lowercase (dialogue tags: '"Stop!" she said.').
    Joining the result with single spaces reproduces the input.
    """
    boundaries = []
    for m in _SENT_BOUNDARY.finditer(text):
        head = text[: m.end()]
        last_word = head.rsplit(" ", 1)[-1]
        last_word = last_word.lstrip("\"'“‘«([").lower()
        if last_word in _ABBREVIATIONS:
            continue
        follow = text[m.end() + 1] if m.end() + 1 < len(text) else ""
        if follow.islower():
            continue
        boundaries.append(m.end())
    sentences = []
    start = 0
    for end in boundaries:
        sentences.append(text[start:end])
        start = end + 1  # skip the single separating space
    tail = text[start:]
    if tail:
        sentences.append(tail)
    return sentences


@dataclass(frozen=True)
class Segment:
    """One image-aligned chunk of story text."""

    index: int
    sentences: tuple[str, ...]
    word_count: int

    @property
    def text(self) -> str:
        return " ".join(self.sentences)


def make_segment(index: int, sentences: Sequence[str]) -> Segment:
    sentences = tuple(sentences)
    return Segment(
        index=index,
        sentences=sentences,
        word_count=sum(count_words(s) for s in sentences),
    )


@dataclass(frozen=True)
class Story:
    story_id: str
    sequence_id: str
    system: str
    prompt_condition: str
    segments: tuple[Segment, ...]

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def text(self) -> str:
        return f" {SEPARATOR} ".join(seg.text for seg in self.segments)


@dataclass(frozen=True)
class Mention:
    """One textual mention; offsets are byte offsets into the UTF-8 segment text."""

    segment_index: int
    char_start: int
    char_end: int
    surface_text: str


Chain = tuple[Mention, ...]


@dataclass(frozen=True)
class CharacterAlignment:
    name: str
    text_segments: frozenset[int]
    visual_segments: frozenset[int]


@dataclass(frozen=True)
class AnnotationBundle:
    """Per-story annotation sidecar. ``None`` fields mean "not annotated"."""

    story_id: str
    coref_chains: tuple[Chain, ...] | None = None
    relations: tuple[str, ...] | None = None
    topics: Mapping[int, tuple[Any, ...]] | None = None
    characters: tuple[CharacterAlignment, ...] | None = None
    grounding_score: float | None = None
    perplexities: Mapping[str, float] | None = None
    provenance: Mapping[str, Mapping[str, str]] | None = None

    def is_empty(self) -> bool:
        return (
            self.coref_chains is None
            and self.relations is None
            and self.topics is None
            and self.characters is None
            and self.grounding_score is None
            and self.perplexities is None
            and self.provenance is None
        )


@dataclass(frozen=True)
class Violation:
    """One bundle-invariant violation; data, not an exception."""

    kind: str
    story_id: str
    path: str
    message: str


@dataclass(frozen=True)
class CorpusStats:
    sequences: int
    seg_per_seq: float
    sent_per_seg: float
    sent_per_seq: float
    words_per_seq: float
    words_per_sent: float
    words_per_seg: float


def parse_story(raw_text: str, metadata: Mapping[str, str]) -> Story:
    """Split raw story text on the separator token into sentence-split segments.

    ``metadata`` must provide story_id, sequence_id, system and
    prompt_condition. Text is normalized (NFC, collapsed whitespace) first.
    """
    if not raw_text or not raw_text.strip():
        raise EmptyStoryError("story text is empty")
    normalized = normalize_text(raw_text)
    parts = normalized.split(f" {SEPARATOR} ")
    segments = []
    for i, part in enumerate(parts):
        if part in ("", SEPARATOR) or count_words(part) == 0:
            raise EmptySegmentError(f"segment {i} has no word content")
        segments.append(make_segment(i, split_sentences(part)))
    condition = metadata["prompt_condition"]
    if condition not in PROMPT_CONDITIONS:
        raise SchemaError(f"unknown prompt_condition {condition!r}", field="prompt_condition")
    return Story(
        story_id=metadata["story_id"],
        sequence_id=metadata["sequence_id"],
        system=metadata["system"],
        prompt_condition=condition,
        segments=tuple(segments),
    )


def _check_mention(story: Story, mention: Mention, path: str, out: list[Violation]) -> None:
    n = story.n_segments
    if not 0 <= mention.segment_index < n:
        out.append(
            Violation(
                kind="MentionOutOfRange",
                story_id=story.story_id,
                path=path,
                message=f"segment_index {mention.segment_index} not in [0, {n})",
            )
        )
        return
    seg_bytes = story.segments[mention.segment_index].text.encode("utf-8")
    if not (0 <= mention.char_start < mention.char_end <= len(seg_bytes)):
        out.append(
            Violation(
                kind="MentionOffsetOutOfRange",
                story_id=story.story_id,
                path=path,
                message=(
                    f"byte span [{mention.char_start}, {mention.char_end}) outside "
                    f"segment of {len(seg_bytes)} bytes"
                ),
            )
        )
        return
    if seg_bytes[mention.char_start : mention.char_end] != mention.surface_text.encode("utf-8"):
        out.append(
            Violation(
                kind="MentionSurfaceMismatch",
                story_id=story.story_id,
                path=path,
                message="surface_text does not equal the byte span it points at",
            )
        )


def validate_bundle(story: Story, bundle: AnnotationBundle, *, strict: bool = False) -> list[Violation]:
    """Check every bundle invariant against its story; empty list means valid."""
    out: list[Violation] = []
    n = story.n_segments
    if bundle.story_id != story.story_id:
        out.append(
            Violation(
                kind="DanglingAnnotation",
                story_id=bundle.story_id,
                path="story_id",
                message=f"annotations for {bundle.story_id!r} paired with story {story.story_id!r}",
            )
        )
    if bundle.coref_chains is not None:
        for ci, chain in enumerate(bundle.coref_chains):
            for mi, mention in enumerate(chain):
                _check_mention(story, mention, f"coref_chains[{ci}][{mi}]", out)
    if bundle.relations is not None:
        if len(bundle.relations) != n - 1:
            out.append(
                Violation(
                    kind="RelationsLengthMismatch",
                    story_id=story.story_id,
                    path="relations",
                    message=f"expected {n - 1} relations for {n} segments, got {len(bundle.relations)}",
                )
            )
        if strict:
            for ri, label in enumerate(bundle.relations):
                if label not in RELATION_LABELS:
                    out.append(
                        Violation(
                            kind="UnknownRelationLabel",
                            story_id=story.story_id,
                            path=f"relations[{ri}]",
                            message=f"label {label!r} outside the declared set",
                        )
                    )
    if bundle.topics is not None:
        for gran, labels in bundle.topics.items():
            if len(labels) != n:
                out.append(
                    Violation(
                        kind="TopicsLengthMismatch",
                        story_id=story.story_id,
                        path=f"topics.{gran}",
                        message=f"expected {n} labels, got {len(labels)}",
                    )
                )
    if bundle.characters is not None:
        for ki, character in enumerate(bundle.characters):
            for set_name in ("text_segments", "visual_segments"):
                for idx in sorted(getattr(character, set_name)):
                    if not 0 <= idx < n:
                        out.append(
                            Violation(
                                kind="CharacterSegmentOutOfRange",
                                story_id=story.story_id,
                                path=f"characters[{ki}].{set_name}",
                                message=f"segment index {idx} not in [0, {n})",
                            )
                        )
    if bundle.grounding_score is not None and not 0.0 <= bundle.grounding_score <= 1.0:
        out.append(
            Violation(
                kind="GroundingOutOfRange",
                story_id=story.story_id,
                path="grounding_score",
                message=f"grounding score {bundle.grounding_score!r} outside [0, 1]",
            )
        )
    if bundle.perplexities is not None:
        for name in sorted(bundle.perplexities):
            value = bundle.perplexities[name]
            if not value > 0:
                out.append(
                    Violation(
                        kind="PerplexityNotPositive",
                        story_id=story.story_id,
                        path=f"perplexities.{name}",
                        message=f"perplexity {value!r} must be positive",
                    )
                )
    return out


def validate_corpus(
    stories: Sequence[Story],
    bundles: Sequence[AnnotationBundle],
    *,
    strict: bool = False,
) -> list[Violation]:
    out: list[Violation] = []
    for story, bundle in zip(stories, bundles):
        out.extend(validate_bundle(story, bundle, strict=strict))
    return out


def corpus_stats(stories: Sequence[Story]) -> CorpusStats:
    """Descriptive statistics, each a mean of per-story values."""
    if not stories:
        raise EmptyCorpusError("corpus has no stories")
    segs, sent_per_seg, sents, words, words_per_sent, words_per_seg = [], [], [], [], [], []
    for story in stories:
        n = story.n_segments
        n_sent = sum(len(seg.sentences) for seg in story.segments)
        n_words = sum(seg.word_count for seg in story.segments)
        segs.append(n)
        sents.append(n_sent)
        words.append(n_words)
        sent_per_seg.append(n_sent / n)
        words_per_sent.append(n_words / n_sent)
        words_per_seg.append(n_words / n)

    def mean(xs: list[float]) -> float:
        return sum(xs) / len(xs)

    return CorpusStats(
        sequences=len(stories),
        seg_per_seq=mean(segs),
        sent_per_seg=mean(sent_per_seg),
        sent_per_seq=mean(sents),
        words_per_seq=mean(words),
        words_per_sent=mean(words_per_sent),
        words_per_seg=mean(words_per_seg),
    )


# ---------------------------------------------------------------------------
# JSON-lines serialization


def story_to_dict(story: Story) -> dict:
    return {
        "story_id": story.story_id,
        "sequence_id": story.sequence_id,
        "system": story.system,
        "prompt_condition": story.prompt_condition,
        "segments": [
            {"index": seg.index, "sentences": list(seg.sentences), "word_count": seg.word_count}
            for seg in story.segments
        ],
    }


def bundle_to_dict(bundle: AnnotationBundle) -> dict:
    out: dict[str, Any] = {"story_id": bundle.story_id}
    if bundle.coref_chains is not None:
        out["coref_chains"] = [
            [
                {
                    "segment_index": m.segment_index,
                    "char_start": m.char_start,
                    "char_end": m.char_end,
                    "surface_text": m.surface_text,
                }
                for m in chain
            ]
            for chain in bundle.coref_chains
        ]
    if bundle.relations is not None:
        out["relations"] = list(bundle.relations)
    if bundle.topics is not None:
        out["topics"] = {str(g): list(labels) for g, labels in bundle.topics.items()}
    if bundle.characters is not None:
        out["characters"] = [
            {
                "name": c.name,
                "text_segments": sorted(c.text_segments),
                "visual_segments": sorted(c.visual_segments),
            }
            for c in bundle.characters
        ]
    if bundle.grounding_score is not None:
        out["grounding_score"] = bundle.grounding_score
    if bundle.perplexities is not None:
        out["perplexities"] = dict(sorted(bundle.perplexities.items()))
    if bundle.provenance is not None:
        out["provenance"] = {k: dict(v) for k, v in sorted(bundle.provenance.items())}
    return out


def _require(obj: Mapping, key: str, kind: type | tuple, line: int, path: str) -> Any:
    if key not in obj:
        raise SchemaError("missing required field", line=line, field=f"{path}.{key}")
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError(
            f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}",
            line=line,
            field=f"{path}.{key}",
        )
    return value


def story_from_dict(obj: Mapping, *, line: int = 0) -> Story:
    story_id = _require(obj, "story_id", str, line, "story")
    sequence_id = _require(obj, "sequence_id", str, line, "story")
    system = _require(obj, "system", str, line, "story")
    condition = _require(obj, "prompt_condition", str, line, "story")
    if condition not in PROMPT_CONDITIONS:
        raise SchemaError(
            f"prompt_condition must be one of {PROMPT_CONDITIONS}, got {condition!r}",
            line=line,
            field="story.prompt_condition",
        )
    raw_segments = _require(obj, "segments", list, line, "story")
    if not raw_segments:
        raise SchemaError("segments must be non-empty", line=line, field="story.segments")
    segments = []
    for i, raw in enumerate(raw_segments):
        path = f"story.segments[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("segment must be an object", line=line, field=path)
        index = _require(raw, "index", int, line, path)
        if index != i:
            raise SchemaError(f"segment index {index} at position {i}", line=line, field=f"{path}.index")
        sentences = _require(raw, "sentences", list, line, path)
        if not sentences or not all(isinstance(s, str) and s.strip() for s in sentences):
            raise SchemaError("sentences must be non-empty strings", line=line, field=f"{path}.sentences")
        word_count = _require(raw, "word_count", int, line, path)
        computed = sum(count_words(s) for s in sentences)
        if word_count != computed:
            raise SchemaError(
                f"word_count {word_count} does not match tokenizer count {computed}",
                line=line,
                field=f"{path}.word_count",
            )
        segments.append(Segment(index=index, sentences=tuple(sentences), word_count=word_count))
    return Story(
        story_id=story_id,
        sequence_id=sequence_id,
        system=system,
        prompt_condition=condition,
        segments=tuple(segments),
    )


def bundle_from_dict(obj: Mapping, *, line: int = 0) -> AnnotationBundle:
    story_id = _require(obj, "story_id", str, line, "annotations")
    chains = None
    if "coref_chains" in obj:
        raw_chains = _require(obj, "coref_chains", list, line, "annotations")
        chains = []
        for ci, raw_chain in enumerate(raw_chains):
            path = f"annotations.coref_chains[{ci}]"
            if not isinstance(raw_chain, list):
                raise SchemaError("chain must be a list of mentions", line=line, field=path)
            mentions = []
            for mi, raw_m in enumerate(raw_chain):
                mpath = f"{path}[{mi}]"
                if not isinstance(raw_m, dict):
                    raise SchemaError("mention must be an object", line=line, field=mpath)
                mentions.append(
                    Mention(
                        segment_index=_require(raw_m, "segment_index", int, line, mpath),
                        char_start=_require(raw_m, "char_start", int, line, mpath),
                        char_end=_require(raw_m, "char_end", int, line, mpath),
                        surface_text=_require(raw_m, "surface_text", str, line, mpath),
                    )
                )
            chains.append(tuple(mentions))
        chains = tuple(chains)
    relations = None
    if "relations" in obj:
        raw_rel = _require(obj, "relations", list, line, "annotations")
        if not all(isinstance(r, str) for r in raw_rel):
            raise SchemaError("relations must be strings", line=line, field="annotations.relations")
        relations = tuple(raw_rel)
    topics = None
    if "topics" in obj:
        raw_topics = _require(obj, "topics", dict, line, "annotations")
        topics = {}
        for key, labels in raw_topics.items():
            path = f"annotations.topics.{key}"
            try:
                gran = int(key)
            except ValueError:
                raise SchemaError("granularity key must be an integer string", line=line, field=path)
            if not isinstance(labels, list):
                raise SchemaError("topic labels must be a list", line=line, field=path)
            if not all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in labels):
                raise SchemaError("topic labels must be strings or integers", line=line, field=path)
            topics[gran] = tuple(labels)
    characters = None
    if "characters" in obj:
        raw_chars = _require(obj, "characters", list, line, "annotations")
        characters = []
        for ki, raw_c in enumerate(raw_chars):
            path = f"annotations.characters[{ki}]"
            if not isinstance(raw_c, dict):
                raise SchemaError("character must be an object", line=line, field=path)
            name = _require(raw_c, "name", str, line, path)
            for set_name in ("text_segments", "visual_segments"):
                values = _require(raw_c, set_name, list, line, path)
                if not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
                    raise SchemaError("segment indices must be integers", line=line, field=f"{path}.{set_name}")
            characters.append(
                CharacterAlignment(
                    name=name,
                    text_segments=frozenset(raw_c["text_segments"]),
                    visual_segments=frozenset(raw_c["visual_segments"]),
                )
            )
        characters = tuple(characters)
    grounding = None
    if "grounding_score" in obj:
        grounding = _require(obj, "grounding_score", (int, float), line, "annotations")
        grounding = float(grounding)
    perplexities = None
    if "perplexities" in obj:
        raw_ppl = _require(obj, "perplexities", dict, line, "annotations")
        perplexities = {}
        for name, value in raw_ppl.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise SchemaError("perplexity must be a number", line=line, field=f"annotations.perplexities.{name}")
            perplexities[name] = float(value)
    provenance = None
    if "provenance" in obj:
        raw_prov = _require(obj, "provenance", dict, line, "annotations")
        provenance = {}
        for kind, entry in raw_prov.items():
            if not isinstance(entry, dict) or not all(isinstance(v, str) for v in entry.values()):
                raise SchemaError("provenance entries must be string maps", line=line, field=f"annotations.provenance.{kind}")
            provenance[kind] = dict(entry)
    return AnnotationBundle(
        story_id=story_id,
        coref_chains=chains,
        relations=relations,
        topics=topics,
        characters=characters,
        grounding_score=grounding,
        perplexities=perplexities,
        provenance=provenance,
    )


def dumps_line(story: Story, bundle: AnnotationBundle) -> str:
    """Canonical one-line serialization; stable key order, compact separators."""
    record: dict[str, Any] = {"story": story_to_dict(story)}
    if not bundle.is_empty():
        record["annotations"] = bundle_to_dict(bundle)
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_corpus(path: str | Path, stories: Sequence[Story], bundles: Sequence[AnnotationBundle]) -> None:
    if len(stories) != len(bundles):
        raise ValueError("stories and bundles must be parallel lists")
    with open(path, "w", encoding="utf-8") as f:
        for story, bundle in zip(stories, bundles):
            f.write(dumps_line(story, bundle))
            f.write("\n")


def load_corpus(path: str | Path) -> tuple[list[Story], list[AnnotationBundle]]:
    """Parse a JSONL corpus file; raises SchemaError with line and field path."""
    stories: list[Story] = []
    bundles: list[AnnotationBundle] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw_line in enumerate(f, start=1):
            if not raw_line.strip():
                continue
            try:
                record = json.loads(raw_line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            if not isinstance(record, dict) or "story" not in record:
                raise SchemaError("each line must be an object with a 'story' field", line=lineno, field="story")
            story_obj = record["story"]
            if not isinstance(story_obj, dict):
                raise SchemaError("'story' must be an object", line=lineno, field="story")
            story = story_from_dict(story_obj, line=lineno)
            if "annotations" in record and record["annotations"] is not None:
                ann_obj = record["annotations"]
                if not isinstance(ann_obj, dict):
                    raise SchemaError("'annotations' must be an object", line=lineno, field="annotations")
                bundle = bundle_from_dict(ann_obj, line=lineno)
                if bundle.story_id != story.story_id:
                    raise DanglingAnnotationError(
                        f"annotations story_id {bundle.story_id!r} does not match story {story.story_id!r}",
                        line=lineno,
                        field="annotations.story_id",
                    )
            else:
                bundle = AnnotationBundle(story_id=story.story_id)
            stories.append(story)
            bundles.append(bundle)
    return stories, bundles
