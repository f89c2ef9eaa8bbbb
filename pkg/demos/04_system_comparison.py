"""Aggregation, paired significance tests, and prompt-gap analysis.

Run from the repository root:  python demos/04_system_comparison.py
"""

from ncskit import PairedSample, aggregate, gap_change, paired_t, perplexity_report

# Per-system score lists aggregate into mean (sd) rows, human row last.
rows = aggregate(
    {
        "human": [0.52, 0.61, 0.47, 0.58],
        "model-a": [0.44, 0.50, 0.39, 0.45],
        "model-b": [0.51, 0.60, 0.46, 0.57],
    }
)
for row in rows:
    print(f"{row.system:8s} mean={row.mean:.2f} sd={row.sd:.2f} (n={row.n})")

# Paired t-test aligned by sequence id; the comparison unit is the sequence.
sample = PairedSample(
    keys=("seq-0", "seq-1", "seq-2", "seq-3"),
    a_values=(0.52, 0.61, 0.47, 0.58),  # human
    b_values=(0.44, 0.50, 0.39, 0.45),  # model-a
)
result = paired_t(sample)
print(f"\nhuman vs model-a: t={result.t_stat:.4f} df={result.df} "
      f"p={result.p_value:.4f} [{result.significance}]")

# Gap change: does the human-model gap shrink under the long prompt?
gap = gap_change(
    human_short={"seq-0": 0.52, "seq-1": 0.61, "seq-2": 0.47},
    model_short={"seq-0": 0.40, "seq-1": 0.45, "seq-2": 0.30},
    human_long={"seq-0": 0.50, "seq-1": 0.58, "seq-2": 0.49},
    model_long={"seq-0": 0.46, "seq-1": 0.52, "seq-2": 0.44},
)
print(f"gap change: delta_short={gap.delta_short:.3f} delta_long={gap.delta_long:.3f} "
      f"t={gap.t_stat:.3f} [{gap.significance}]")

# Perplexity table: human cells mean (sd), model cells a range over sources.
rows = perplexity_report(
    [
        ("human", "short", "eval-a", 13.2),
        ("human", "short", "eval-a", 14.0),
        ("model-a", "short", "eval-a", 3.1),
        ("model-b", "short", "eval-a", 4.3),
    ]
)
for row in rows:
    print(f"perplexity {row.evaluator}/{row.condition}: human {row.human_cell}, "
          f"models {row.models_cell}")
