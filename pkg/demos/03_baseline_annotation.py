"""Running the deterministic baseline annotators over a tiny corpus.

Run from the repository root:  python demos/03_baseline_annotation.py
"""

from ncskit import (
    LexiconEntry,
    annotate_corpus,
    lexical_topics,
    match_characters,
    name_chains,
    parse_story,
    score_story,
    uniform_relations,
)
from ncskit.corpus import AnnotationBundle

lexicon = {
    "classroom-1": (
        LexiconEntry("Reese", aliases=(), visual_segments=frozenset({0, 1, 2})),
        LexiconEntry("Matthew", aliases=("Mr. Smith",), visual_segments=frozenset({1, 2})),
    )
}

texts = {
    "human": (
        "Reese is the only one raising a hand. [SEP] Matthew notices Reese right away. "
        "[SEP] After class, Reese lingers and Mr. Smith nods."
    ),
    "model-a": (
        "A classroom hums with energy. [SEP] The teacher stands at the board. "
        "[SEP] The lesson ends quietly."
    ),
}

stories = [
    parse_story(
        text,
        {
            "story_id": f"{system}-1",
            "sequence_id": "classroom-1",
            "system": system,
            "prompt_condition": "short",
        },
    )
    for system, text in texts.items()
]

for story in stories:
    print(f"== {story.system}")
    for alignment in match_characters(story, lexicon):
        print(f"  {alignment.name}: text segments {sorted(alignment.text_segments)}")
    chains = name_chains(story, lexicon)
    print(f"  {len(chains)} name chain(s), sizes {[len(c) for c in chains]}")
    print(f"  stub relations: {uniform_relations(story)}")

# The lexical topic model is corpus-global: one clustering labels every story.
labels = lexical_topics(stories, granularities=[6, 3, 1])
for story in stories:
    print(f"topic labels for {story.system}: {labels[story.story_id]}")

# annotate_corpus fills whatever is missing and tags provenance as baseline.
bundles = [AnnotationBundle(story_id=s.story_id) for s in stories]
filled = annotate_corpus(stories, bundles, lexicon=lexicon, granularities=[6, 3, 1])
for story, bundle in zip(stories, filled):
    score = score_story(story, bundle)
    print(
        f"{story.system}: NCS arith={score.ncs.arithmetic:.4f} "
        f"geom={score.ncs.geometric:.4f} (provenance: "
        f"{sorted(bundle.provenance)} all baseline)"
    )
