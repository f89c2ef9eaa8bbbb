"""Regenerate the checked-in golden outputs under tests/golden/.

Every numeric value frozen into a golden file is first cross-checked against
the independent naive oracle (tests/oracle.py); generation aborts on any
disagreement beyond 1e-12. Run from the repository root:

    python tests/make_goldens.py
"""

from __future__ import annotations

import json
import shutil
import tempfile
from pathlib import Path

from ncskit import cli, corpus

import oracle

TESTS_DIR = Path(__file__).parent
DATA_DIR = TESTS_DIR / "data"
GOLDEN_DIR = TESTS_DIR / "golden"


def verify_scores_against_oracle(fixture: Path, scores_path: Path) -> int:
    stories, bundles = corpus.load_corpus(fixture)
    by_id = {s.story_id: (s, b) for s, b in zip(stories, bundles)}
    checked = 0
    with open(scores_path, "r", encoding="utf-8") as f:
        for line in f:
            record = json.loads(line)
            story, bundle = by_id[record["story_id"]]
            expected = oracle.oracle_score(
                chain_sizes=[len(c) for c in (bundle.coref_chains or ())],
                relations=list(bundle.relations or ()),
                topics={g: list(v) for g, v in (bundle.topics or {}).items()},
                characters=[
                    (set(c.text_segments), set(c.visual_segments))
                    for c in (bundle.characters or ())
                ],
                gv=bundle.grounding_score,
                n=story.n_segments,
            )
            got = record["metrics"]
            pairs = [
                (got["coreference"]["raw"], expected["coref"]["raw"]),
                (got["coreference"]["norm"], expected["coref"]["norm"]),
                (got["discourse"]["raw"], expected["discourse"]["raw"]),
                (got["topic"]["raw"], expected["topic"]["raw"]),
                (got["character"]["raw"], expected["character"]["raw"]),
                (got["character"]["continuity"], expected["character"]["continuity"]),
                (got["character"]["spread"], expected["character"]["spread"]),
                (got["grounding"]["raw"], expected["grounding"]["raw"]),
                (got["grounding"]["character_match"], expected["grounding"]["character_match"]),
                (record["ncs"]["arithmetic"], expected["arithmetic"]),
                (record["ncs"]["geometric"], expected["geometric"]),
            ]
            for got_value, expected_value in pairs:
                if abs(got_value - expected_value) > 1e-12:
                    raise SystemExit(
                        f"oracle mismatch for {record['story_id']}: {got_value!r} vs {expected_value!r}"
                    )
            checked += 1
    return checked


def main() -> None:
    GOLDEN_DIR.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "small"
        rc = cli.main(["score", "--input", str(DATA_DIR / "fixture_small.jsonl"), "--out", str(out)])
        assert rc == 0, rc
        n = verify_scores_against_oracle(DATA_DIR / "fixture_small.jsonl", out / "scores.jsonl")
        shutil.copyfile(out / "scores.jsonl", GOLDEN_DIR / "scores_small.jsonl")
        print(f"scores_small.jsonl: {n} stories oracle-verified")

        out = Path(tmp) / "six"
        rc = cli.main(["score", "--input", str(DATA_DIR / "fixture_six.jsonl"), "--out", str(out)])
        assert rc == 0, rc
        n = verify_scores_against_oracle(DATA_DIR / "fixture_six.jsonl", out / "scores.jsonl")
        rc = cli.main(["compare", "--input", str(DATA_DIR / "fixture_six.jsonl"), "--out", str(out)])
        assert rc == 0, rc
        for name in ("compare.csv", "compare.json", "perplexity.csv"):
            shutil.copyfile(out / name, GOLDEN_DIR / f"six_{name}")
        print(f"six-system compare goldens written ({n} stories oracle-verified)")


if __name__ == "__main__":
    main()
