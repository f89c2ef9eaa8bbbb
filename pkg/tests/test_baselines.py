"""Tests for the deterministic fallback annotators."""

import json

import pytest

from ncskit import baselines, corpus, metrics
from ncskit.errors import MissingLexiconError


def story(text, story_id="s1", sequence_id="q1", system="human"):
    return corpus.parse_story(
        text,
        {
            "story_id": story_id,
            "sequence_id": sequence_id,
            "system": system,
            "prompt_condition": "short",
        },
    )


def lexicon(entries, sequence_id="q1"):
    return {
        sequence_id: tuple(
            baselines.LexiconEntry(
                name=name, aliases=tuple(aliases), visual_segments=frozenset(visual)
            )
            for name, aliases, visual in entries
        )
    }


CLASSROOM = lexicon([("Reese", [], {0}), ("Matthew", ["Mr. Smith"], {1})])


class TestMatchCharacters:
    def test_names_found_per_segment(self):
        s = story("Reese raises her hand. [SEP] Matthew watches.")
        reese, matthew = baselines.match_characters(s, CLASSROOM)
        assert reese.text_segments == {0}
        assert matthew.text_segments == {1}
        assert reese.visual_segments == {0}

    def test_absent_name_matches_nothing(self):
        s = story("An empty classroom hums.")
        reese, matthew = baselines.match_characters(s, CLASSROOM)
        assert reese.text_segments == frozenset()
        assert matthew.text_segments == frozenset()

    def test_alias_matches(self):
        s = story("Class begins. [SEP] Quiet falls. [SEP] Mr. Smith frowns.")
        _, matthew = baselines.match_characters(s, CLASSROOM)
        assert 2 in matthew.text_segments

    def test_alias_honorific_stripped_variant(self):
        s = story("Smith frowns at the board.")
        _, matthew = baselines.match_characters(s, CLASSROOM)
        assert matthew.text_segments == {0}

    def test_case_insensitive_and_punctuation_tolerant(self):
        plain = story("Everyone says Reese won.")
        quoted = story('Everyone says "Reese," won.')
        upper = story("Everyone says REESE won.")
        for s in (plain, quoted, upper):
            reese, _ = baselines.match_characters(s, CLASSROOM)
            assert reese.text_segments == {0}

    def test_whole_word_only(self):
        s = story("The compreesed file opened.")  # contains 'reese' inside a word
        reese, _ = baselines.match_characters(s, CLASSROOM)
        assert reese.text_segments == frozenset()

    def test_missing_lexicon(self):
        s = story("Reese waves.", sequence_id="unknown-seq")
        with pytest.raises(MissingLexiconError):
            baselines.match_characters(s, CLASSROOM)


class TestNameChains:
    def test_re_mention_forms_chain(self):
        s = story("Reese stands. [SEP] Then Reese sits.")
        chains = baselines.name_chains(s, CLASSROOM)
        assert len(chains) == 1
        assert len(chains[0]) == 2
        assert [m.segment_index for m in chains[0]] == [0, 1]

    def test_unique_single_mentions_yield_no_chain(self):
        s = story("Reese stands. [SEP] Matthew sits.")
        chains = baselines.name_chains(s, CLASSROOM)
        assert chains == ()
        assert metrics.coreference_score(chains).raw == 0.0

    def test_chain_counts_hand_case(self):
        s = story("Reese stands. Reese waves. [SEP] Reese and Matthew sit. [SEP] Matthew nods.")
        chains = baselines.name_chains(s, CLASSROOM)
        comp = metrics.coreference_score(chains)
        assert comp.chain_count == 2
        assert comp.mean_chain_size == 2.5

    def test_mention_offsets_are_valid_bytes(self):
        s = story("Café crowd watches Reese. [SEP] Reese bows.")
        chains = baselines.name_chains(s, CLASSROOM)
        bundle = corpus.AnnotationBundle(story_id=s.story_id, coref_chains=chains)
        assert corpus.validate_bundle(s, bundle) == []

    def test_alias_and_name_not_double_counted(self):
        s = story("Mr. Smith speaks. [SEP] Mr. Smith waits.")
        chains = baselines.name_chains(s, CLASSROOM)
        assert len(chains) == 1
        assert [m.surface_text for m in chains[0]] == ["Mr. Smith", "Mr. Smith"]


class TestUniformRelations:
    def test_conjunction_per_pair(self):
        s = story("A one. [SEP] B two. [SEP] C three.")
        assert baselines.uniform_relations(s) == ("conjunction", "conjunction")

    def test_closed_form_diversity(self):
        for n in range(2, 11):
            text = " [SEP] ".join(f"Segment number {i}." for i in range(n))
            s = story(text)
            comp = metrics.discourse_diversity(baselines.uniform_relations(s))
            assert comp.raw == 1 / (n - 1)


class TestLexicalGrounding:
    def test_fraction_of_matched_segments(self):
        s = story("Reese stands. [SEP] Silence. Nothing moves. [SEP] Matthew nods.")
        assert baselines.lexical_grounding(s, CLASSROOM) == pytest.approx(2 / 3)

    def test_bounds(self):
        s = story("Reese. [SEP] Reese again.")
        assert baselines.lexical_grounding(s, CLASSROOM) == 1.0
        s2 = story("Nobody here. [SEP] Still nobody.")
        assert baselines.lexical_grounding(s2, CLASSROOM) == 0.0


class TestLexicalTopics:
    def test_identical_segments_share_labels_everywhere(self):
        s = story("The red fox runs. [SEP] The red fox runs.")
        labels = baselines.lexical_topics([s], granularities=[4, 2, 1])
        for gran, seq in labels["s1"].items():
            assert seq[0] == seq[1], gran
            assert metrics.topic_switch_single(list(seq)) == 0.0

    def test_disjoint_vocabulary_distinct_labels(self):
        s = story("Red foxes run fast. [SEP] Blue whales swim deep.")
        labels = baselines.lexical_topics([s], granularities=[2])
        seq = labels["s1"][2]
        assert seq[0] != seq[1]
        assert metrics.topic_switch_single(list(seq)) == 1.0

    def test_granularity_one_merges_everything(self):
        s = story("Red foxes run. [SEP] Blue whales swim. [SEP] Green birds fly.")
        labels = baselines.lexical_topics([s], granularities=[1])
        assert len(set(labels["s1"][1])) == 1

    def test_coarsening_chain_is_surjective(self):
        stories = [
            story("Red foxes run. [SEP] Red foxes sleep. [SEP] Blue whales swim.", story_id="a"),
            story("Blue whales dive. [SEP] Green birds fly. [SEP] Green birds sing.", story_id="b"),
        ]
        grans = [6, 4, 2, 1]
        labels = baselines.lexical_topics(stories, granularities=grans)
        flat = {
            g: [lab for sid in ("a", "b") for lab in labels[sid][g]] for g in grans
        }
        for finer, coarser in zip(grans, grans[1:]):
            seen: dict[int, int] = {}
            for f_label, c_label in zip(flat[finer], flat[coarser]):
                if f_label in seen:
                    assert seen[f_label] == c_label
                else:
                    seen[f_label] = c_label

    def test_deterministic_across_runs(self):
        stories = [
            story("A crow calls out. [SEP] The crow flies off. [SEP] Rain starts.", story_id="a"),
            story("Rain floods the road. [SEP] A crow shelters.", story_id="b"),
        ]
        first = baselines.lexical_topics(stories, granularities=[5, 3, 1])
        second = baselines.lexical_topics(stories, granularities=[5, 3, 1])
        assert first == second


class TestAnnotateCorpus:
    def _corpus(self):
        s1 = story("Reese stands. [SEP] Reese waves at Matthew.")
        s2 = story("Quiet room. [SEP] Still quiet.", story_id="s2", system="model-a")
        bundles = [
            corpus.AnnotationBundle(story_id="s1"),
            corpus.AnnotationBundle(story_id="s2", relations=("temporal",)),
        ]
        return [s1, s2], bundles

    def test_fills_missing_and_tags_provenance(self):
        stories, bundles = self._corpus()
        filled = baselines.annotate_corpus(
            stories, bundles, lexicon=CLASSROOM, granularities=[3, 1]
        )
        b1 = filled[0]
        assert b1.relations == ("conjunction",)
        assert b1.coref_chains is not None
        assert b1.characters is not None
        assert b1.grounding_score is not None
        assert set(b1.topics) == {3, 1}
        assert b1.provenance["relations"]["kind"] == "baseline"
        # existing annotations are preserved, untouched kinds get no tag
        b2 = filled[1]
        assert b2.relations == ("temporal",)
        assert "relations" not in (b2.provenance or {})

    def test_without_lexicon_character_kinds_stay_missing(self):
        stories, bundles = self._corpus()
        filled = baselines.annotate_corpus(stories, bundles, lexicon=None, granularities=[2])
        assert filled[0].coref_chains is None
        assert filled[0].characters is None
        assert filled[0].relations is not None

    def test_filled_bundles_validate(self):
        stories, bundles = self._corpus()
        filled = baselines.annotate_corpus(
            stories, bundles, lexicon=CLASSROOM, granularities=[3, 1]
        )
        assert corpus.validate_corpus(stories, filled) == []

    def test_determinism(self):
        stories, bundles = self._corpus()
        a = baselines.annotate_corpus(stories, bundles, lexicon=CLASSROOM, granularities=[3, 1])
        b = baselines.annotate_corpus(stories, bundles, lexicon=CLASSROOM, granularities=[3, 1])
        assert a == b


class TestLoadLexicon:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "lexicon.json"
        path.write_text(
            json.dumps(
                {
                    "sequences": {
                        "q1": [
                            {"name": "Reese", "aliases": [], "visual_segments": [0]},
                            {"name": "Matthew", "aliases": ["Mr. Smith"], "visual_segments": [1]},
                        ]
                    }
                }
            )
        )
        lex = baselines.load_lexicon(path)
        assert lex["q1"][0].name == "Reese"
        assert lex["q1"][1].aliases == ("Mr. Smith",)

    def test_duplicate_names_rejected(self, tmp_path):
        path = tmp_path / "lexicon.json"
        path.write_text(
            json.dumps(
                {"sequences": {"q1": [{"name": "Reese"}, {"name": "Reese"}]}}
            )
        )
        with pytest.raises(Exception):
            baselines.load_lexicon(path)
