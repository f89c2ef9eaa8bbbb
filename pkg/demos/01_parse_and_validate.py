"""Parsing stories, inspecting segments, and validating annotation bundles.

Run from the repository root:  python demos/01_parse_and_validate.py
"""

from ncskit import (
    AnnotationBundle,
    CharacterAlignment,
    Mention,
    corpus_stats,
    parse_story,
    validate_bundle,
)

# A story is raw text with [SEP] between image-level segments.
raw = (
    "Reese is the only one raising a hand. "
    "[SEP] Matthew notices Reese right away. He hides a smile. "
    "[SEP] After class, Reese lingers by the door."
)

story = parse_story(
    raw,
    {
        "story_id": "demo-1",
        "sequence_id": "classroom-1",
        "system": "human",
        "prompt_condition": "short",
    },
)

print(f"{story.n_segments} segments")
for seg in story.segments:
    print(f"  [{seg.index}] {len(seg.sentences)} sentence(s), {seg.word_count} words: {seg.text}")

stats = corpus_stats([story])
print(f"\nper-story stats: {stats.sent_per_seg:.2f} sentences/segment, "
      f"{stats.words_per_sent:.2f} words/sentence")

# Bundles carry annotations; validate_bundle reports invariant violations as data.
seg0 = story.segments[0].text
good = AnnotationBundle(
    story_id="demo-1",
    relations=("temporal", "causal"),
    characters=(CharacterAlignment("Reese", frozenset({0, 1, 2}), frozenset({0, 2})),),
)
print("\nvalid bundle violations:", validate_bundle(story, good))

bad = AnnotationBundle(
    story_id="demo-1",
    relations=("temporal",),  # needs exactly N-1 = 2
    coref_chains=((Mention(segment_index=9, char_start=0, char_end=5, surface_text="Reese"),),),
)
for violation in validate_bundle(story, bad):
    print(f"violation: {violation.kind} at {violation.path}: {violation.message}")
