"""End-to-end pipeline through the ncskit command line.

Validates the shipped fixture corpus, scores it, and emits the comparison,
sweep, and composition reports into a scratch directory.

Run from the repository root:  python demos/05_full_pipeline_cli.py
"""

import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
SMALL = REPO / "tests" / "data" / "fixture_small.jsonl"
SIX = REPO / "tests" / "data" / "fixture_six.jsonl"


def run(*args):
    print(f"$ ncskit {' '.join(str(a) for a in args)}")
    result = subprocess.run(
        [sys.executable, "-m", "ncskit.cli", *map(str, args)],
        capture_output=True,
        text=True,
    )
    if result.stdout:
        print(result.stdout.rstrip()[:400])
    if result.returncode != 0:
        print(result.stderr.rstrip())
        raise SystemExit(result.returncode)
    return result


with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp)
    run("validate", "--input", SMALL)
    run("score", "--input", SMALL, "--out", out / "small")
    print("first score record:",
          (out / "small" / "scores.jsonl").read_text().splitlines()[0][:200], "...\n")

    run("compare", "--input", SIX, "--out", out / "six")
    lines = (out / "six" / "compare.csv").read_text().splitlines()
    print("compare.csv head:")
    print("\n".join(lines[:8]), "\n")

    run("sweep", "--input", SIX, "--out", out / "six")
    print("sweep.csv head:")
    print("\n".join((out / "six" / "sweep.csv").read_text().splitlines()[:5]), "\n")

    run("composition", "--input", SIX, "--out", out / "six")
    print("composition.csv head:")
    print("\n".join((out / "six" / "composition.csv").read_text().splitlines()[:5]))
