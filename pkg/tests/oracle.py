"""Independent naive oracle implementations used to cross-check the library.

Everything here is written directly from the scoring definitions with
exact-fraction arithmetic where possible, deliberately sharing no code with
the package. Keep this file boring: plain loops, Fractions, no cleverness.
"""

from __future__ import annotations

import math
from fractions import Fraction

EPSILON = 1e-9


def oracle_squash(raw: float) -> float:
    norm = math.tanh(raw)
    if norm >= 1.0:
        norm = math.nextafter(1.0, 0.0)
    return norm


def oracle_coref(chain_sizes: list[int]) -> dict:
    c = len(chain_sizes)
    if c == 0:
        return {"chain_count": 0, "mean_chain_size": 0.0, "raw": 0.0, "norm": 0.0}
    s = Fraction(sum(chain_sizes), c)
    raw = float(s / c)
    return {
        "chain_count": c,
        "mean_chain_size": float(s),
        "raw": raw,
        "norm": oracle_squash(raw),
    }


def oracle_discourse(relations: list[str]) -> dict:
    t = len(relations)
    if t == 0:
        return {"unique_types": 0, "total_relations": 0, "raw": 0.0, "norm": 0.0}
    seen = []
    for r in relations:
        if r not in seen:
            seen.append(r)
    raw = float(Fraction(len(seen), t))
    return {"unique_types": len(seen), "total_relations": t, "raw": raw, "norm": oracle_squash(raw)}


def oracle_switch_rate(labels: list) -> Fraction:
    changes = 0
    for i in range(len(labels) - 1):
        if labels[i] != labels[i + 1]:
            changes += 1
    return Fraction(changes, len(labels) - 1)


def oracle_topic(topics: dict[int, list]) -> dict:
    if not topics:
        return {"per_granularity": {}, "raw": 0.0, "norm": 0.0}
    per = {g: oracle_switch_rate(topics[g]) for g in topics}
    raw = float(sum(per.values(), Fraction(0)) / len(per))
    return {
        "per_granularity": {g: float(v) for g, v in per.items()},
        "raw": raw,
        "norm": oracle_squash(raw),
    }


def oracle_character(characters: list[tuple[set[int], set[int]]], n: int) -> dict:
    per = []
    for text_segments, _visual in characters:
        if n > 1:
            both = 0
            for i in range(n - 1):
                if i in text_segments and i + 1 in text_segments:
                    both += 1
            continuity = Fraction(both, n - 1)
            if text_segments:
                spread = Fraction(max(text_segments) - min(text_segments), n - 1)
            else:
                spread = Fraction(0)
        else:
            continuity = Fraction(0)
            spread = Fraction(0)
        persistence = float(continuity) / (float(spread) + EPSILON)
        per.append((float(continuity), float(spread), persistence))
    if not per:
        return {"continuity": 0.0, "spread": 0.0, "raw": 0.0, "norm": 0.0, "per_character": []}
    k = len(per)
    raw = sum(p[2] for p in per) / k
    return {
        "continuity": sum(p[0] for p in per) / k,
        "spread": sum(p[1] for p in per) / k,
        "raw": raw,
        "norm": oracle_squash(raw),
        "per_character": per,
    }


def oracle_grounding(characters: list[tuple[set[int], set[int]]], gv: float | None) -> dict:
    if not characters:
        return {"character_match": 0.0, "raw": 0.0, "norm": 0.0}
    total = Fraction(0)
    for text_segments, visual_segments in characters:
        union = text_segments | visual_segments
        if not union:
            total += 1
        else:
            total += Fraction(len(text_segments & visual_segments), len(union))
    match = float(total / len(characters))
    if gv is None:
        return {"character_match": match, "raw": 0.0, "norm": 0.0}
    raw = match / (gv + EPSILON)
    return {"character_match": match, "raw": raw, "norm": oracle_squash(raw)}


def oracle_composite(values: list[float]) -> tuple[float, float]:
    arith = sum(values) / len(values)
    product = 1.0
    for v in values:
        product *= v + EPSILON
    geom = product ** (1.0 / len(values))
    if geom > arith + EPSILON:  # exact AM-GM bound; overshoot is roundoff
        geom = arith + EPSILON
    return arith, geom


def oracle_score(
    chain_sizes: list[int],
    relations: list[str],
    topics: dict[int, list],
    characters: list[tuple[set[int], set[int]]],
    gv: float | None,
    n: int,
) -> dict:
    """Full per-story oracle mirroring the degenerate rules."""
    coref = oracle_coref(chain_sizes)
    discourse = oracle_discourse(relations)
    topic = oracle_topic({} if n == 1 else topics)
    character = oracle_character(characters, n)
    grounding = oracle_grounding(characters, gv)
    norms = [coref["norm"], discourse["norm"], topic["norm"], character["norm"], grounding["norm"]]
    arith, geom = oracle_composite(norms)
    return {
        "coref": coref,
        "discourse": discourse,
        "topic": topic,
        "character": character,
        "grounding": grounding,
        "arithmetic": arith,
        "geometric": geom,
        "components": norms,
    }


def oracle_relation_composition(stories: list[list[str]]) -> dict[str, float]:
    """Mean within-story label proportions over stories with >= 1 relation."""
    usable = [s for s in stories if s]
    labels = sorted({label for s in usable for label in s})
    out = {}
    for label in labels:
        total = Fraction(0)
        for s in usable:
            total += Fraction(sum(1 for x in s if x == label), len(s))
        out[label] = float(total / len(usable))
    return out
