"""The five per-story coherence metrics and the composite score, step by step.

Run from the repository root:  python demos/02_story_metrics.py
"""

import math

from ncskit import (
    CharacterAlignment,
    character_persistence,
    composite,
    coreference_score,
    discourse_diversity,
    multimodal_character_grounding,
    topic_switch,
    topic_switch_single,
)


def chain(size):
    from ncskit import Mention

    return tuple(Mention(0, i, i + 1, "x") for i in range(size))


# Coreference: mean chain size over chain count, squashed with tanh.
coref = coreference_score([chain(3), chain(3)])
print(f"coreference: C={coref.chain_count} S={coref.mean_chain_size} "
      f"raw={coref.raw} norm={coref.norm:.4f}  (tanh(1.5)={math.tanh(1.5):.4f})")

# Discourse diversity: unique over total relation labels between adjacent segments.
disc = discourse_diversity(["temporal", "temporal", "causal", "conjunction"])
print(f"discourse:   U={disc.unique_types} T={disc.total_relations} raw={disc.raw}")

# Topic switch: label-change rate per granularity, averaged over the sweep.
print(f"topic single granularity [1,1,2,2,3] -> {topic_switch_single([1, 1, 2, 2, 3])}")
topic = topic_switch({10: [1, 1, 2, 2, 3], 5: [1, 1, 1, 1, 2]})
print(f"topic sweep: per-granularity={dict(topic.per_granularity)} averaged={topic.raw}")

# Character persistence: continuity over spread per character.
reese = CharacterAlignment("Reese", frozenset({0, 1, 3}), frozenset({0, 1, 2, 3, 4}))
char = character_persistence([reese], segment_count=5)
per = char.per_character[0]
print(f"character:   ChC={per.continuity} ChS={per.spread} ChP={per.persistence:.4f}")

# Multimodal grounding: text/visual agreement relative to the grounding score.
ground = multimodal_character_grounding([reese], grounding_score=0.75)
print(f"grounding:   match={ground.character_match:.4f} raw={ground.raw:.4f}")

# Composite: arithmetic mean vs geometric mean. The geometric variant
# punishes uneven profiles; one zero component collapses it.
balanced = [0.5, 0.5, 0.5, 0.5, 0.5]
uneven = [0.8, 0.8, 0.8, 0.8, 0.0]
for name, values in (("balanced", balanced), ("uneven", uneven)):
    arith, geom = composite(values)
    print(f"composite {name}: arithmetic={arith:.4f} geometric={geom:.6f}")
