"""Deterministic fallback annotators.

These let the full pipeline run end-to-end without any neural models:
surface name matching for character alignment and coreference chains,
corpus-global lexical topic clustering with a granularity sweep, a
uniform-relation stub, and a lexical grounding proxy. Everything here is
bit-reproducible across runs and platforms; bundles filled from these
annotators are tagged ``kind: baseline`` in their provenance so reports
never silently mix baseline with neural annotations.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import (
    AnnotationBundle,
    Chain,
    CharacterAlignment,
    Mention,
    Story,
    word_tokens,
)
from .errors import MissingLexiconError, SchemaError

BASELINE_VERSION = "0.1.0"

# Default topic-granularity sweep: 80 down to 5 in steps of 5.
DEFAULT_GRANULARITIES = tuple(range(80, 4, -5))

ANNOTATION_KINDS = ("coref_chains", "relations", "topics", "characters", "grounding_score")


def _load_wordlist(name: str) -> frozenset[str]:
    text = resources.files("ncskit.resources").joinpath(name).read_text(encoding="utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


STOPWORDS = _load_wordlist("stopwords.txt")
HONORIFICS = _load_wordlist("honorifics.txt")


@dataclass(frozen=True)
class LexiconEntry:
    name: str
    aliases: tuple[str, ...]
    visual_segments: frozenset[int]


CharacterLexicon = Mapping[str, tuple[LexiconEntry, ...]]


def load_lexicon(path: str | Path) -> dict[str, tuple[LexiconEntry, ...]]:
    """Load a character lexicon: {"sequences": {sequence_id: [entries]}}."""
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    if not isinstance(raw, dict) or not isinstance(raw.get("sequences"), dict):
        raise SchemaError("lexicon must be an object with a 'sequences' map", field="sequences")
    lexicon: dict[str, tuple[LexiconEntry, ...]] = {}
    for sequence_id, raw_entries in raw["sequences"].items():
        entries = []
        seen = set()
        for i, raw_entry in enumerate(raw_entries):
            path_str = f"sequences.{sequence_id}[{i}]"
            name = raw_entry.get("name")
            if not isinstance(name, str) or not name.strip():
                raise SchemaError("character name must be a non-empty string", field=path_str)
            if name in seen:
                raise SchemaError(f"duplicate character name {name!r}", field=path_str)
            seen.add(name)
            aliases = tuple(raw_entry.get("aliases", []))
            if not all(isinstance(a, str) and a.strip() for a in aliases):
                raise SchemaError("aliases must be non-empty strings", field=f"{path_str}.aliases")
            visual = raw_entry.get("visual_segments", [])
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in visual):
                raise SchemaError("visual_segments must be integers", field=f"{path_str}.visual_segments")
            entries.append(
                LexiconEntry(name=name, aliases=aliases, visual_segments=frozenset(visual))
            )
        lexicon[sequence_id] = tuple(entries)
    return lexicon


def _strip_honorific(phrase: str) -> str | None:
    head, _, rest = phrase.partition(" ")
    if head in HONORIFICS and rest:
        return rest
    return None


def _match_variants(entry: LexiconEntry) -> list[str]:
    variants = []
    for phrase in (entry.name, *entry.aliases):
        phrase = " ".join(phrase.split())
        for candidate in (phrase, _strip_honorific(phrase)):
            if candidate and candidate not in variants:
                variants.append(candidate)
    # Longest first, so the combined alternation prefers the fullest surface
    # form at any position and overlapping variants are not double-counted.
    variants.sort(key=lambda v: (-len(v), v))
    return variants


def _entry_pattern(entry: LexiconEntry) -> re.Pattern[str]:
    alternation = "|".join(re.escape(v) for v in _match_variants(entry))
    return re.compile(rf"(?<!\w)(?:{alternation})(?!\w)", re.IGNORECASE)


def _lexicon_entries(story: Story, lexicon: CharacterLexicon) -> tuple[LexiconEntry, ...]:
    try:
        return lexicon[story.sequence_id]
    except KeyError:
        raise MissingLexiconError(f"no lexicon entry for sequence {story.sequence_id!r}") from None


def match_characters(story: Story, lexicon: CharacterLexicon) -> tuple[CharacterAlignment, ...]:
    """Case-insensitive whole-word character matching against segment text.

    Visual segments come from the lexicon, clamped to the story's segment
    range: a story with fewer segments than the sequence has images cannot
    reference the missing ones.
    """
    valid = frozenset(range(story.n_segments))
    out = []
    for entry in _lexicon_entries(story, lexicon):
        pattern = _entry_pattern(entry)
        text_segments = frozenset(
            i for i, seg in enumerate(story.segments) if pattern.search(seg.text)
        )
        out.append(
            CharacterAlignment(
                name=entry.name,
                text_segments=text_segments,
                visual_segments=entry.visual_segments & valid,
            )
        )
    return tuple(out)


def name_chains(story: Story, lexicon: CharacterLexicon) -> tuple[Chain, ...]:
    """One chain per character with at least two surface matches.

    A chain models re-mention, so single-match characters yield no chain.
    Mention offsets are byte offsets into the UTF-8 segment text.
    """
    chains = []
    for entry in _lexicon_entries(story, lexicon):
        pattern = _entry_pattern(entry)
        mentions = []
        for i, seg in enumerate(story.segments):
            text = seg.text
            for m in pattern.finditer(text):
                start = len(text[: m.start()].encode("utf-8"))
                end = start + len(m.group(0).encode("utf-8"))
                mentions.append(
                    Mention(
                        segment_index=i,
                        char_start=start,
                        char_end=end,
                        surface_text=m.group(0),
                    )
                )
        if len(mentions) >= 2:
            chains.append(tuple(mentions))
    return tuple(chains)


def uniform_relations(story: Story) -> tuple[str, ...]:
    """Stub relation labels: one 'conjunction' per adjacent segment pair."""
    return ("conjunction",) * (story.n_segments - 1)


def lexical_grounding(story: Story, lexicon: CharacterLexicon) -> float:
    """Grounding proxy: fraction of segments with at least one character match."""
    entries = _lexicon_entries(story, lexicon)
    patterns = [_entry_pattern(entry) for entry in entries]
    grounded = sum(
        1 for seg in story.segments if any(p.search(seg.text) for p in patterns)
    )
    return grounded / story.n_segments


# ---------------------------------------------------------------------------
# Lexical topic labeling


def _content_bag(text: str) -> Counter[str]:
    return Counter(
        tok.lower() for tok in word_tokens(text) if tok.lower() not in STOPWORDS
    )


def _cosine(a: Counter[str], b: Counter[str]) -> float:
    if not a or not b:
        return 0.0
    dot = sum(count * b[token] for token, count in a.items() if token in b)
    if dot == 0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in a.values()))
    norm_b = math.sqrt(sum(c * c for c in b.values()))
    return dot / (norm_a * norm_b)


class _Clustering:
    """Agglomerative clustering state over corpus segments."""

    def __init__(self, bags: Sequence[Counter[str]]):
        # Exact-duplicate bags always share a cluster, so identical segments
        # get the same label at every granularity.
        key_to_cluster: dict[tuple, int] = {}
        self.members: list[list[int]] = []
        self.centroids: list[Counter[str]] = []
        for i, bag in enumerate(bags):
            key = tuple(sorted(bag.items()))
            if key in key_to_cluster:
                cluster = key_to_cluster[key]
                self.members[cluster].append(i)
                self.centroids[cluster] += bag
            else:
                key_to_cluster[key] = len(self.members)
                self.members.append([i])
                self.centroids.append(Counter(bag))

    def merge_down_to(self, target: int) -> None:
        while len(self.members) > target:
            best = (-1.0, 0, 1)
            k = len(self.centroids)
            for i in range(k):
                for j in range(i + 1, k):
                    sim = _cosine(self.centroids[i], self.centroids[j])
                    if sim > best[0]:
                        best = (sim, i, j)
            _, i, j = best
            self.members[i].extend(self.members[j])
            self.centroids[i] += self.centroids[j]
            del self.members[j]
            del self.centroids[j]

    def labels(self, n_segments: int) -> list[int]:
        out = [0] * n_segments
        for label, members in enumerate(self.members):
            for seg in members:
                out[seg] = label
        return out


def lexical_topics(
    stories: Sequence[Story],
    granularities: Sequence[int] = DEFAULT_GRANULARITIES,
) -> dict[str, dict[int, tuple[int, ...]]]:
    """Corpus-global lexical topic labels at every requested granularity.

    Segments are clustered agglomeratively by content-word cosine similarity;
    each coarser granularity continues merging the finer clustering, so
    coarser labelings are always surjective images of finer ones.
    """
    if not granularities or any(g < 1 for g in granularities):
        raise ValueError("granularities must be positive integers")
    spans: list[tuple[str, int, int]] = []  # story_id, first global index, count
    bags: list[Counter[str]] = []
    for story in stories:
        spans.append((story.story_id, len(bags), story.n_segments))
        bags.extend(_content_bag(seg.text) for seg in story.segments)
    clustering = _Clustering(bags)
    out: dict[str, dict[int, tuple[int, ...]]] = {story_id: {} for story_id, _, _ in spans}
    for gran in sorted(set(granularities), reverse=True):
        clustering.merge_down_to(gran)
        labels = clustering.labels(len(bags))
        for story_id, start, count in spans:
            out[story_id][gran] = tuple(labels[start : start + count])
    return out


# ---------------------------------------------------------------------------
# Corpus-level fill


def _provenance_tag(name: str) -> dict[str, str]:
    return {"name": name, "version": BASELINE_VERSION, "kind": "baseline"}


def annotate_corpus(
    stories: Sequence[Story],
    bundles: Sequence[AnnotationBundle],
    *,
    lexicon: CharacterLexicon | None = None,
    granularities: Sequence[int] = DEFAULT_GRANULARITIES,
    kinds: Sequence[str] = ANNOTATION_KINDS,
) -> list[AnnotationBundle]:
    """Fill missing annotation kinds with baseline outputs, tagging provenance.

    Kinds that need a lexicon (chains, characters, grounding) are left
    missing for sequences the lexicon does not cover.
    """
    kinds = set(kinds)
    topic_fill: dict[str, dict[int, tuple[int, ...]]] = {}
    if "topics" in kinds:
        needs_topics = [
            story
            for story, bundle in zip(stories, bundles)
            if bundle.topics is None and story.n_segments > 1
        ]
        if needs_topics:
            # The topic model is corpus-global: cluster over every story's
            # segments, then label only the stories that need filling.
            topic_fill = {
                story_id: labels
                for story_id, labels in lexical_topics(stories, granularities).items()
                if story_id in {s.story_id for s in needs_topics}
            }
    out = []
    for story, bundle in zip(stories, bundles):
        updates: dict[str, object] = {}
        provenance = dict(bundle.provenance or {})
        has_lexicon = lexicon is not None and story.sequence_id in lexicon
        if "coref_chains" in kinds and bundle.coref_chains is None and has_lexicon:
            updates["coref_chains"] = name_chains(story, lexicon)
            provenance["coref_chains"] = _provenance_tag("name-chains")
        if "relations" in kinds and bundle.relations is None and story.n_segments > 1:
            updates["relations"] = uniform_relations(story)
            provenance["relations"] = _provenance_tag("uniform-relations")
        if "topics" in kinds and story.story_id in topic_fill:
            updates["topics"] = topic_fill[story.story_id]
            provenance["topics"] = _provenance_tag("lexical-agglomerative")
        if "characters" in kinds and bundle.characters is None and has_lexicon:
            updates["characters"] = match_characters(story, lexicon)
            provenance["characters"] = _provenance_tag("name-match")
        if "grounding_score" in kinds and bundle.grounding_score is None and has_lexicon:
            updates["grounding_score"] = lexical_grounding(story, lexicon)
            provenance["grounding_score"] = _provenance_tag("lexical-grounding")
        if updates:
            updates["provenance"] = provenance
            out.append(
                AnnotationBundle(
                    story_id=bundle.story_id,
                    coref_chains=updates.get("coref_chains", bundle.coref_chains),
                    relations=updates.get("relations", bundle.relations),
                    topics=updates.get("topics", bundle.topics),
                    characters=updates.get("characters", bundle.characters),
                    grounding_score=updates.get("grounding_score", bundle.grounding_score),
                    perplexities=bundle.perplexities,
                    provenance=provenance,
                )
            )
        else:
            out.append(bundle)
    return out
