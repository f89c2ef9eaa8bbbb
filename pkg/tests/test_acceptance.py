"""Acceptance suite: one test per acceptance criterion, at stated tolerances.

Each test prints a single pass line once its criterion holds (visible with
``pytest -s tests/test_acceptance.py``); a test failure is the fail line.
"""

import json
import math
import random
import time

import pytest

from ncskit import baselines, cli, corpus, metrics, stats

import corpusgen
import oracle

EPS = 1e-9


def passed(name: str) -> None:
    print(f"ACCEPTANCE [{name}] PASS")


def approx_equal(a, b, tol=1e-12):
    return a == b or abs(a - b) <= tol


def test_metric_oracle_equivalence():
    """1,000 random small stories: every metric component matches the naive oracle to 1e-12."""
    rng = random.Random(987654)
    start = time.monotonic()
    for i in range(1000):
        story = corpusgen.random_story(rng, f"s{i}", max_segments=6)
        bundle = corpusgen.random_bundle(
            rng, story, max_chains=4, max_characters=3, max_granularities=4
        )
        score = metrics.score_story(story, bundle)
        expected = oracle.oracle_score(
            chain_sizes=[len(c) for c in bundle.coref_chains],
            relations=list(bundle.relations),
            topics={g: list(v) for g, v in bundle.topics.items()},
            characters=[
                (set(c.text_segments), set(c.visual_segments)) for c in bundle.characters
            ],
            gv=bundle.grounding_score,
            n=story.n_segments,
        )
        m = score.metrics
        assert m.coref.chain_count == expected["coref"]["chain_count"]
        assert approx_equal(m.coref.mean_chain_size, expected["coref"]["mean_chain_size"])
        assert approx_equal(m.coref.raw, expected["coref"]["raw"])
        assert approx_equal(m.coref.norm, expected["coref"]["norm"])
        assert m.discourse.unique_types == expected["discourse"]["unique_types"]
        assert m.discourse.total_relations == expected["discourse"]["total_relations"]
        assert approx_equal(m.discourse.raw, expected["discourse"]["raw"])
        assert approx_equal(m.discourse.norm, expected["discourse"]["norm"])
        assert set(m.topic.per_granularity) == set(expected["topic"]["per_granularity"])
        for g, value in expected["topic"]["per_granularity"].items():
            assert approx_equal(m.topic.per_granularity[g], value)
        assert approx_equal(m.topic.raw, expected["topic"]["raw"])
        assert approx_equal(m.topic.norm, expected["topic"]["norm"])
        assert approx_equal(m.character.continuity, expected["character"]["continuity"])
        assert approx_equal(m.character.spread, expected["character"]["spread"])
        assert approx_equal(m.character.raw, expected["character"]["raw"])
        assert approx_equal(m.character.norm, expected["character"]["norm"])
        for got_char, exp_char in zip(m.character.per_character, expected["character"]["per_character"]):
            assert approx_equal(got_char.continuity, exp_char[0])
            assert approx_equal(got_char.spread, exp_char[1])
            assert approx_equal(got_char.persistence, exp_char[2])
        assert approx_equal(m.grounding.character_match, expected["grounding"]["character_match"])
        assert approx_equal(m.grounding.raw, expected["grounding"]["raw"])
        assert approx_equal(m.grounding.norm, expected["grounding"]["norm"])
        assert approx_equal(score.ncs.arithmetic, expected["arithmetic"])
        assert approx_equal(score.ncs.geometric, expected["geometric"])
        for got_comp, exp_comp in zip(score.ncs.components, expected["components"]):
            assert approx_equal(got_comp, exp_comp)
    elapsed = time.monotonic() - start
    assert elapsed < 10.0, f"oracle equivalence took {elapsed:.1f}s"
    passed(f"metric-oracle-equivalence (1000 stories, {elapsed:.1f}s)")


def test_closed_forms():
    """Uniform relations, full-presence characters, and constant topics hit closed forms."""
    meta = {"story_id": "s", "sequence_id": "q", "system": "human", "prompt_condition": "short"}
    for n in range(2, 11):
        text = " [SEP] ".join(f"Segment number {i} text." for i in range(n))
        story = corpus.parse_story(text, meta)
        relations = baselines.uniform_relations(story)
        comp = metrics.discourse_diversity(relations)
        assert comp.raw == 1 / (n - 1), n

    for n in (2, 5, 9):
        full = corpus.CharacterAlignment("c", frozenset(range(n)), frozenset(range(n)))
        comp = metrics.character_persistence([full], n)
        char = comp.per_character[0]
        assert char.continuity == 1.0
        assert char.spread == 1.0
        assert abs(char.persistence - 1.0 / (1.0 + EPS)) <= 1e-9

    for n in (2, 4, 7):
        topics = {g: ["same"] * n for g in (80, 40, 5)}
        comp = metrics.topic_switch(topics)
        assert comp.raw == 0.0
        assert all(v == 0.0 for v in comp.per_granularity.values())
    passed("closed-forms")


def test_am_gm_property():
    """10,000 random non-negative 5-vectors: geometric <= arithmetic + 1e-9."""
    rng = random.Random(2718)
    for _ in range(10_000):
        scale = rng.choice([1.0, 1.0, 1.0, 5.0])  # mostly unit range, some larger
        values = [rng.random() * scale for _ in range(5)]
        if rng.random() < 0.1:
            values[rng.randrange(5)] = 0.0
        arith, geom = metrics.composite(values)
        assert geom <= arith + 1e-9, values
    passed("am-gm-bound (10000 vectors)")


def test_coarsening_monotonicity():
    """1,000 random label sequences under random surjective coarsenings never gain switches."""
    rng = random.Random(31415)
    for _ in range(1000):
        n = rng.randint(2, 12)
        n_labels = rng.randint(1, 8)
        labels = [rng.randrange(n_labels) for _ in range(n)]
        n_coarse = rng.randint(1, n_labels)
        # surjective map onto 0..n_coarse-1: hit every target at least once
        targets = list(range(n_coarse)) + [rng.randrange(n_coarse) for _ in range(n_labels - n_coarse)]
        rng.shuffle(targets)
        coarse = [targets[l] for l in labels]
        assert metrics.topic_switch_single(coarse) <= metrics.topic_switch_single(labels)
    passed("coarsening-monotonicity (1000 sequences)")


def test_paired_t_accuracy():
    """Hand t value to 1e-9, frozen p references to 1e-6, exact antisymmetry."""
    result = stats.paired_t(
        stats.PairedSample(keys=("a", "b", "c"), a_values=(2.0, 3.0, 4.0), b_values=(1.0, 1.0, 1.0))
    )
    assert abs(result.t_stat - 3.4641016151377544) <= 1e-9
    assert result.df == 2

    references = {
        (2, 3.4641016151377544): 0.07417990022744854,
        (2, 1.0): 0.42264973081037427,
        (10, 2.228): 0.050011771817111327,
        (10, 0.7): 0.49988757017288443,
        (59, 2.0): 0.05011041298824439,
        (59, 2.662): 0.009993618566863564,
    }
    for (df, t), expected in references.items():
        assert abs(stats.student_t_two_tailed_p(t, df) - expected) <= 1e-6

    rng = random.Random(55)
    for _ in range(200):
        n = rng.randint(2, 20)
        a = tuple(rng.uniform(-3, 3) for _ in range(n))
        b = tuple(rng.uniform(-3, 3) for _ in range(n))
        keys = tuple(f"k{i}" for i in range(n))
        try:
            fwd = stats.paired_t(stats.PairedSample(keys=keys, a_values=a, b_values=b))
        except stats.ZeroVarianceError:  # pragma: no cover - vanishing chance
            continue
        rev = stats.paired_t(stats.PairedSample(keys=keys, a_values=b, b_values=a))
        assert fwd.t_stat == -rev.t_stat
    passed("paired-t-accuracy")


def test_pipeline_determinism(data_dir, golden_dir, tmp_path):
    """score and compare are byte-identical across runs and match checked-in goldens."""
    for command, fixture, outputs, golden_names in (
        ("score", "fixture_small.jsonl", ["scores.jsonl"], ["scores_small.jsonl"]),
        (
            "compare",
            "fixture_six.jsonl",
            ["compare.csv", "compare.json", "perplexity.csv"],
            ["six_compare.csv", "six_compare.json", "six_perplexity.csv"],
        ),
    ):
        out1, out2 = tmp_path / f"{command}-1", tmp_path / f"{command}-2"
        assert cli.main([command, "--input", str(data_dir / fixture), "--out", str(out1)]) == 0
        assert cli.main([command, "--input", str(data_dir / fixture), "--out", str(out2)]) == 0
        for output, golden in zip(outputs, golden_names):
            run1 = (out1 / output).read_bytes()
            run2 = (out2 / output).read_bytes()
            assert run1 == run2, f"{command}/{output} differs across runs"
            assert run1 == (golden_dir / golden).read_bytes(), f"{command}/{output} differs from golden"
    passed("pipeline-determinism")


def test_interchange_round_trip(tmp_path):
    """500 random corpora survive write-then-load; every corruption is caught."""
    rng = random.Random(424242)
    path = tmp_path / "corpus.jsonl"
    total_corruptions = 0
    for i in range(500):
        stories, bundles = corpusgen.random_corpus(rng, rng.randint(1, 4))
        corpus.write_corpus(path, stories, bundles)
        loaded_stories, loaded_bundles = corpus.load_corpus(path)
        assert loaded_stories == stories
        assert loaded_bundles == bundles
        assert corpus.validate_corpus(stories, bundles) == []
        story = stories[0]
        bundle = bundles[0]
        for name, corrupted in corpusgen.corruptions(story, bundle):
            violations = corpus.validate_bundle(story, corrupted)
            assert violations, f"corpus {i}: corruption {name} produced no violation"
            total_corruptions += 1
    assert total_corruptions >= 500
    passed(f"interchange-round-trip (500 corpora, {total_corruptions} corruptions caught)")


def test_table_shapes(data_dir, tmp_path):
    """compare.csv blocks carry the per-metric and gap column structure."""
    from test_cli import read_blocks

    assert (
        cli.main(["compare", "--input", str(data_dir / "fixture_six.jsonl"), "--out", str(tmp_path)])
        == 0
    )
    blocks = read_blocks(tmp_path / "compare.csv")
    by_name = {rows[0][0]: (header, rows) for header, rows in blocks if rows}
    metric_headers = {
        "coreference": ["table", "system", "chains", "chain_size", "raw", "score", "t"],
        "discourse": ["table", "system", "unique_types", "total_relations", "raw", "score", "t"],
        "topic": ["table", "system", "segments", "raw", "score", "t"],
        "character": ["table", "system", "continuity", "spread", "raw", "score", "t"],
        "grounding": ["table", "system", "visual_grounding", "character_match", "raw", "score", "t"],
    }
    for condition in ("short", "long"):
        for metric, header in metric_headers.items():
            name = f"{metric}_{condition}"
            assert name in by_name, f"missing table {name}"
            got_header, rows = by_name[name]
            assert got_header == header, name
            assert len(rows) == 6  # six systems
            # score column holds "mean (sd)", t column bare or starred
            for row in rows:
                assert "(" in row[header.index("score")]
        name = f"ncs_{condition}"
        got_header, rows = by_name[name]
        assert got_header == ["table", "system", "arithmetic", "t_arithmetic", "geometric", "t_geometric"]
        assert len(rows) == 6
    for variant in ("arithmetic", "geometric"):
        name = f"ncs_{variant}_gap"
        assert name in by_name, f"missing gap table {name}"
        got_header, rows = by_name[name]
        assert got_header == ["table", "system", "short", "long", "delta_short", "delta_long", "t"]
        assert len(rows) == 6
    passed("table-shapes")
