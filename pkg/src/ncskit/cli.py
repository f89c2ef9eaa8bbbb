"""Command-line surface: validate, annotate, score, compare, sweep, composition.

Outputs are deterministic: repeated runs over identical inputs produce
byte-identical files. Human-readable table cells are fixed to two decimals;
JSON outputs carry full-precision floats and the story ids behind each cell.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from . import baselines, corpus, metrics, stats
from .errors import MissingAnnotationError, NcsKitError, ZeroVarianceError, LengthMismatchError

HUMAN_LABEL = "human"
_MAX_WORKERS = 8


@dataclass(frozen=True)
class RunConfig:
    inputs: tuple[str, ...]
    out_dir: str | None = None
    condition: str = "both"
    epsilon: float = metrics.DEFAULT_EPSILON
    granularities: tuple[int, ...] = baselines.DEFAULT_GRANULARITIES
    granularities_explicit: bool = False
    strict: bool = False
    systems: tuple[str, ...] | None = None
    lexicon_path: str | None = None
    baseline_kinds: tuple[str, ...] = baselines.ANNOTATION_KINDS

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        grans = self.granularities
        if not grans or any(g < 1 for g in grans) or any(a >= b for a, b in zip(grans[1:], grans)):
            raise ValueError("granularities must be strictly descending positive integers")
        if self.condition not in ("short", "long", "both"):
            raise ValueError("condition must be short, long, or both")


# ---------------------------------------------------------------------------
# Shared pipeline steps


def _load_inputs(config: RunConfig) -> tuple[list[corpus.Story], list[corpus.AnnotationBundle]]:
    stories: list[corpus.Story] = []
    bundles: list[corpus.AnnotationBundle] = []
    for path in config.inputs:
        s, b = corpus.load_corpus(path)
        stories.extend(s)
        bundles.extend(b)
    if config.condition != "both":
        keep = [i for i, s in enumerate(stories) if s.prompt_condition == config.condition]
        stories = [stories[i] for i in keep]
        bundles = [bundles[i] for i in keep]
    if config.systems is not None:
        wanted = set(config.systems) | {HUMAN_LABEL}
        keep = [i for i, s in enumerate(stories) if s.system in wanted]
        stories = [stories[i] for i in keep]
        bundles = [bundles[i] for i in keep]
    return stories, bundles


def _reject_invalid(stories, bundles, *, strict: bool) -> None:
    violations = corpus.validate_corpus(stories, bundles, strict=strict)
    if violations:
        raise NcsKitError(
            f"corpus has {len(violations)} validation violation(s); "
            f"first: {violations[0].kind} at {violations[0].story_id}:{violations[0].path}"
        )


def _fill_baselines(config: RunConfig, stories, bundles):
    lexicon = baselines.load_lexicon(config.lexicon_path) if config.lexicon_path else None
    return baselines.annotate_corpus(
        stories,
        bundles,
        lexicon=lexicon,
        granularities=config.granularities,
        kinds=config.baseline_kinds,
    )


def _score_corpus(config: RunConfig, stories, bundles) -> list[metrics.StoryScore]:
    _reject_invalid(stories, bundles, strict=config.strict)
    if not config.strict:
        bundles = _fill_baselines(config, stories, bundles)

    def score_one(pair) -> metrics.StoryScore:
        story, bundle = pair
        return metrics.score_story(story, bundle, epsilon=config.epsilon, strict=config.strict)

    workers = min(_MAX_WORKERS, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(score_one, zip(stories, bundles)))


def _score_to_dict(score: metrics.StoryScore) -> dict:
    m = score.metrics
    return {
        "story_id": score.story_id,
        "sequence_id": score.sequence_id,
        "system": score.system,
        "prompt_condition": score.prompt_condition,
        "n_segments": score.n_segments,
        "degenerate": score.degenerate,
        "missing": list(score.missing),
        "metrics": {
            "coreference": {
                "chain_count": m.coref.chain_count,
                "mean_chain_size": m.coref.mean_chain_size,
                "raw": m.coref.raw,
                "norm": m.coref.norm,
            },
            "discourse": {
                "unique_types": m.discourse.unique_types,
                "total_relations": m.discourse.total_relations,
                "raw": m.discourse.raw,
                "norm": m.discourse.norm,
            },
            "topic": {
                "per_granularity": {str(g): v for g, v in m.topic.per_granularity.items()},
                "raw": m.topic.raw,
                "norm": m.topic.norm,
            },
            "character": {
                "per_character": [
                    {
                        "name": c.name,
                        "continuity": c.continuity,
                        "spread": c.spread,
                        "persistence": c.persistence,
                    }
                    for c in m.character.per_character
                ],
                "continuity": m.character.continuity,
                "spread": m.character.spread,
                "raw": m.character.raw,
                "norm": m.character.norm,
            },
            "grounding": {
                "character_match": m.grounding.character_match,
                "visual_grounding": m.grounding.visual_grounding,
                "raw": m.grounding.raw,
                "norm": m.grounding.norm,
            },
        },
        "ncs": {
            "arithmetic": score.ncs.arithmetic,
            "geometric": score.ncs.geometric,
            "components": list(score.ncs.components),
        },
    }


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _write_text(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(content)


# ---------------------------------------------------------------------------
# Comparison tables

# Per-metric table layout: (table name, component columns, raw getter, norm getter)
_METRIC_TABLES: list[tuple[str, list[tuple[str, Callable]], Callable, Callable]] = [
    (
        "coreference",
        [
            ("chains", lambda s: s.metrics.coref.chain_count),
            ("chain_size", lambda s: s.metrics.coref.mean_chain_size),
        ],
        lambda s: s.metrics.coref.raw,
        lambda s: s.metrics.coref.norm,
    ),
    (
        "discourse",
        [
            ("unique_types", lambda s: s.metrics.discourse.unique_types),
            ("total_relations", lambda s: s.metrics.discourse.total_relations),
        ],
        lambda s: s.metrics.discourse.raw,
        lambda s: s.metrics.discourse.norm,
    ),
    (
        "topic",
        [("segments", lambda s: s.n_segments)],
        lambda s: s.metrics.topic.raw,
        lambda s: s.metrics.topic.norm,
    ),
    (
        "character",
        [
            ("continuity", lambda s: s.metrics.character.continuity),
            ("spread", lambda s: s.metrics.character.spread),
        ],
        lambda s: s.metrics.character.raw,
        lambda s: s.metrics.character.norm,
    ),
    (
        "grounding",
        [
            ("visual_grounding", lambda s: s.metrics.grounding.visual_grounding),
            ("character_match", lambda s: s.metrics.grounding.character_match),
        ],
        lambda s: s.metrics.grounding.raw,
        lambda s: s.metrics.grounding.norm,
    ),
]

_NCS_VARIANTS: list[tuple[str, Callable]] = [
    ("arithmetic", lambda s: s.ncs.arithmetic),
    ("geometric", lambda s: s.ncs.geometric),
]


def _systems_order(systems: set[str]) -> list[str]:
    ordered = sorted(systems - {HUMAN_LABEL})
    if HUMAN_LABEL in systems:
        ordered.append(HUMAN_LABEL)  # human row last, like the reference tables
    return ordered


def _mean(values: Sequence[float]) -> float | None:
    values = [v for v in values if v is not None]
    if not values:
        return None
    return sum(values) / len(values)


def _sd(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    m = sum(values) / len(values)
    return (sum((v - m) ** 2 for v in values) / (len(values) - 1)) ** 0.5


def _sequence_means(scores: Sequence[metrics.StoryScore], value) -> dict[str, float]:
    """Per-sequence values for pairing; duplicate stories average per sequence.

    Degenerate stories are excluded so they drop pairwise from comparisons.
    """
    per_seq: dict[str, list[float]] = {}
    for s in scores:
        if s.degenerate:
            continue
        per_seq.setdefault(s.sequence_id, []).append(value(s))
    return {k: sum(v) / len(v) for k, v in per_seq.items()}


def _paired_vs_human(
    human_scores: Sequence[metrics.StoryScore],
    system_scores: Sequence[metrics.StoryScore],
    value,
) -> tuple[stats.TTestResult | None, list[str]]:
    human_by_seq = _sequence_means(human_scores, value)
    system_by_seq = _sequence_means(system_scores, value)
    shared = sorted(set(human_by_seq) & set(system_by_seq))
    try:
        sample = stats.PairedSample(
            keys=tuple(shared),
            a_values=tuple(human_by_seq[k] for k in shared),
            b_values=tuple(system_by_seq[k] for k in shared),
        )
        return stats.paired_t(sample), shared
    except (ZeroVarianceError, LengthMismatchError):
        return None, shared


def _fmt(value: float | None, decimals: int = 2) -> str:
    return "—" if value is None else f"{value:.{decimals}f}"


def _fmt_mean_sd(mean: float | None, sd: float | None) -> str:
    if mean is None:
        return "—"
    return f"{mean:.2f} ({sd:.2f})"


def _fmt_t(test: stats.TTestResult | None) -> str:
    if test is None:
        return "—"
    stars = test.significance if test.significance != "ns" else ""
    return f"{test.t_stat:.2f}{stars}"


def _metric_table(name, comp_cols, raw_fn, norm_fn, condition, by_system):
    """One per-metric comparison block: component means, score mean (sd), t."""
    header = ["table", "system", *[c for c, _ in comp_cols], "raw", "score", "t"]
    csv_rows = []
    json_rows = []
    human_scores = by_system.get(HUMAN_LABEL, [])
    for system in _systems_order(set(by_system)):
        scores = by_system[system]
        comp_means = {col: _mean([fn(s) for s in scores]) for col, fn in comp_cols}
        raws = [raw_fn(s) for s in scores]
        norms = [norm_fn(s) for s in scores]
        test, shared = (None, [])
        if system != HUMAN_LABEL and human_scores:
            test, shared = _paired_vs_human(human_scores, scores, norm_fn)
        csv_rows.append(
            [
                f"{name}_{condition}",
                system,
                *[_fmt(comp_means[col]) for col, _ in comp_cols],
                _fmt_mean_sd(_mean(raws), _sd(raws)),
                _fmt_mean_sd(_mean(norms), _sd(norms)),
                "—" if system == HUMAN_LABEL else _fmt_t(test),
            ]
        )
        json_rows.append(
            {
                "system": system,
                "n_stories": len(scores),
                "components": comp_means,
                "raw_mean": _mean(raws),
                "raw_sd": _sd(raws),
                "score_mean": _mean(norms),
                "score_sd": _sd(norms),
                "t": None if test is None else test.t_stat,
                "p": None if test is None else test.p_value,
                "significance": None if test is None else test.significance,
                "paired_sequence_ids": shared,
                "story_ids": sorted(s.story_id for s in scores),
            }
        )
    return header, csv_rows, {"name": f"{name}_{condition}", "rows": json_rows}


def _ncs_table(condition, by_system):
    header = ["table", "system", "arithmetic", "t_arithmetic", "geometric", "t_geometric"]
    csv_rows = []
    json_rows = []
    human_scores = by_system.get(HUMAN_LABEL, [])
    for system in _systems_order(set(by_system)):
        scores = by_system[system]
        row_csv = [f"ncs_{condition}", system]
        row_json = {
            "system": system,
            "n_stories": len(scores),
            "story_ids": sorted(s.story_id for s in scores),
        }
        for variant, fn in _NCS_VARIANTS:
            values = [fn(s) for s in scores]
            test, shared = (None, [])
            if system != HUMAN_LABEL and human_scores:
                test, shared = _paired_vs_human(human_scores, scores, fn)
            row_csv.append(_fmt_mean_sd(_mean(values), _sd(values)))
            row_csv.append("—" if system == HUMAN_LABEL else _fmt_t(test))
            row_json[variant] = {
                "mean": _mean(values),
                "sd": _sd(values),
                "t": None if test is None else test.t_stat,
                "p": None if test is None else test.p_value,
                "significance": None if test is None else test.significance,
                "paired_sequence_ids": shared,
            }
        csv_rows.append(row_csv)
        json_rows.append(row_json)
    return header, csv_rows, {"name": f"ncs_{condition}", "rows": json_rows}


def _gap_table(variant, fn, scores):
    """Prompt-gap block for one composite variant: short, long, deltas, t."""
    short = [s for s in scores if s.prompt_condition == "short"]
    long_ = [s for s in scores if s.prompt_condition == "long"]
    by_system_short: dict[str, list[metrics.StoryScore]] = {}
    by_system_long: dict[str, list[metrics.StoryScore]] = {}
    for s in short:
        by_system_short.setdefault(s.system, []).append(s)
    for s in long_:
        by_system_long.setdefault(s.system, []).append(s)
    if HUMAN_LABEL not in by_system_short or HUMAN_LABEL not in by_system_long:
        return None
    human_short = _sequence_means(by_system_short[HUMAN_LABEL], fn)
    human_long = _sequence_means(by_system_long[HUMAN_LABEL], fn)
    header = ["table", "system", "short", "long", "delta_short", "delta_long", "t"]
    csv_rows = []
    json_rows = []
    systems = (set(by_system_short) | set(by_system_long)) - {HUMAN_LABEL}
    for system in sorted(systems):
        short_scores = by_system_short.get(system, [])
        long_scores = by_system_long.get(system, [])
        model_short = _sequence_means(short_scores, fn)
        model_long = _sequence_means(long_scores, fn)
        shared = sorted(set(human_short) & set(human_long) & set(model_short) & set(model_long))
        if not shared:
            continue
        result = stats.gap_change(
            {k: human_short[k] for k in shared},
            {k: model_short[k] for k in shared},
            {k: human_long[k] for k in shared},
            {k: model_long[k] for k in shared},
        )
        short_values = [fn(s) for s in short_scores]
        long_values = [fn(s) for s in long_scores]
        csv_rows.append(
            [
                f"ncs_{variant}_gap",
                system,
                _fmt_mean_sd(_mean(short_values), _sd(short_values)),
                _fmt_mean_sd(_mean(long_values), _sd(long_values)),
                _fmt(result.delta_short),
                _fmt(result.delta_long),
                "—"
                if result.t_stat is None
                else f"{result.t_stat:.2f}{result.significance if result.significance != 'ns' else ''}",
            ]
        )
        json_rows.append(
            {
                "system": system,
                "short_mean": _mean(short_values),
                "short_sd": _sd(short_values),
                "long_mean": _mean(long_values),
                "long_sd": _sd(long_values),
                "delta_short": result.delta_short,
                "delta_long": result.delta_long,
                "n_sequences": result.n,
                "t": result.t_stat,
                "p": result.p_value,
                "significance": result.significance,
                "paired_sequence_ids": shared,
                "story_ids": sorted(
                    s.story_id for s in (*short_scores, *long_scores) if s.sequence_id in shared
                ),
            }
        )
    # Human reference row, mirroring the gap tables' presentation.
    human_short_values = [fn(s) for s in by_system_short[HUMAN_LABEL]]
    human_long_values = [fn(s) for s in by_system_long[HUMAN_LABEL]]
    csv_rows.append(
        [
            f"ncs_{variant}_gap",
            HUMAN_LABEL,
            _fmt_mean_sd(_mean(human_short_values), _sd(human_short_values)),
            _fmt_mean_sd(_mean(human_long_values), _sd(human_long_values)),
            "—",
            "—",
            "—",
        ]
    )
    json_rows.append(
        {
            "system": HUMAN_LABEL,
            "short_mean": _mean(human_short_values),
            "short_sd": _sd(human_short_values),
            "long_mean": _mean(human_long_values),
            "long_sd": _sd(human_long_values),
            "delta_short": None,
            "delta_long": None,
            "n_sequences": None,
            "t": None,
            "p": None,
            "significance": None,
            "paired_sequence_ids": [],
            "story_ids": sorted(
                s.story_id for s in (*by_system_short[HUMAN_LABEL], *by_system_long[HUMAN_LABEL])
            ),
        }
    )
    return header, csv_rows, {"name": f"ncs_{variant}_gap", "rows": json_rows}


def _csv_blocks(blocks: Sequence[tuple[list[str], list[list[str]]]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for i, (header, rows) in enumerate(blocks):
        if i:
            writer.writerow([])
        writer.writerow(header)
        writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(config: RunConfig) -> int:
    stories, bundles = _load_inputs(config)
    violations = corpus.validate_corpus(stories, bundles, strict=config.strict)
    report = {
        "n_stories": len(stories),
        "n_violations": len(violations),
        "violations": [
            {"kind": v.kind, "story_id": v.story_id, "path": v.path, "message": v.message}
            for v in violations
        ],
    }
    text = json.dumps(report, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
    if config.out_dir:
        _write_text(Path(config.out_dir) / "violations.json", text)
    else:
        sys.stdout.write(text)
    return 0 if not violations else 1


def cmd_annotate(config: RunConfig) -> int:
    stories, bundles = _load_inputs(config)
    _reject_invalid(stories, bundles, strict=config.strict)
    filled = _fill_baselines(config, stories, bundles)
    if config.strict:
        still_missing = [
            (story.story_id, kind)
            for story, bundle in zip(stories, filled)
            for kind in baselines.ANNOTATION_KINDS
            if getattr(bundle, kind) is None
            and not (story.n_segments == 1 and kind in ("relations", "topics"))
            and not (kind == "grounding_score" and not bundle.characters)
        ]
        if still_missing:
            story_id, kind = still_missing[0]
            raise MissingAnnotationError(
                f"{len(still_missing)} annotation(s) could not be filled; first: {kind} for {story_id!r}"
            )
    out = Path(config.out_dir) / "annotated.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    corpus.write_corpus(out, stories, filled)
    return 0


def cmd_score(config: RunConfig) -> int:
    stories, bundles = _load_inputs(config)
    scores = _score_corpus(config, stories, bundles)
    lines = [_dump_json(_score_to_dict(s)) for s in scores]
    _write_text(Path(config.out_dir) / "scores.jsonl", "".join(line + "\n" for line in lines))
    return 0


def cmd_compare(config: RunConfig) -> int:
    stories, bundles = _load_inputs(config)
    scores = _score_corpus(config, stories, bundles)
    conditions = sorted({s.prompt_condition for s in scores})
    blocks: list[tuple[list[str], list[list[str]]]] = []
    json_tables = []
    for condition in conditions:
        cond_scores = [s for s in scores if s.prompt_condition == condition]
        by_system: dict[str, list[metrics.StoryScore]] = {}
        for s in cond_scores:
            by_system.setdefault(s.system, []).append(s)
        for name, comp_cols, raw_fn, norm_fn in _METRIC_TABLES:
            header, rows, json_table = _metric_table(
                name, comp_cols, raw_fn, norm_fn, condition, by_system
            )
            blocks.append((header, rows))
            json_tables.append(json_table)
        header, rows, json_table = _ncs_table(condition, by_system)
        blocks.append((header, rows))
        json_tables.append(json_table)
    gap_tables = []
    if len(conditions) == 2:
        for variant, fn in _NCS_VARIANTS:
            gap = _gap_table(variant, fn, scores)
            if gap is not None:
                header, rows, json_table = gap
                blocks.append((header, rows))
                gap_tables.append(json_table)
    out_dir = Path(config.out_dir)
    _write_text(out_dir / "compare.csv", _csv_blocks(blocks))
    payload = {
        "epsilon": config.epsilon,
        "condition": config.condition,
        "tables": json_tables,
        "gap_tables": gap_tables,
    }
    _write_text(out_dir / "compare.json", _dump_json(payload) + "\n")

    ppl_records = [
        (story.story_id, story.system, story.prompt_condition, bundle.perplexities)
        for story, bundle in zip(stories, bundles)
        if bundle.perplexities
    ]
    if ppl_records:
        flat = [
            (system, condition, evaluator, value)
            for _, system, condition, ppls in ppl_records
            for evaluator, value in sorted(ppls.items())
        ]
        rows = stats.perplexity_report(flat, human_label=HUMAN_LABEL)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "evaluator",
                "condition",
                "human",
                "models",
                "human_mean",
                "human_sd",
                "n_human",
                "model_min",
                "model_max",
                "n_model_sources",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    row.evaluator,
                    row.condition,
                    row.human_cell,
                    row.models_cell,
                    repr(row.human_mean),
                    repr(row.human_sd),
                    row.n_human,
                    repr(row.model_min),
                    repr(row.model_max),
                    row.n_model_sources,
                ]
            )
        _write_text(out_dir / "perplexity.csv", buf.getvalue())
    return 0


def cmd_sweep(config: RunConfig) -> int:
    stories, bundles = _load_inputs(config)
    scores = _score_corpus(config, stories, bundles)
    cells: dict[tuple[str, str, int], list[float]] = {}
    for s in scores:
        for gran, value in s.metrics.topic.per_granularity.items():
            if config.granularities_explicit and gran not in config.granularities:
                continue
            cells.setdefault((s.system, s.prompt_condition, gran), []).append(value)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["system", "condition", "granularity", "mean_switch_rate", "n_stories"])
    for system, condition, gran in sorted(cells, key=lambda k: (k[0], k[1], -k[2])):
        values = cells[(system, condition, gran)]
        writer.writerow([system, condition, gran, repr(sum(values) / len(values)), len(values)])
    _write_text(Path(config.out_dir) / "sweep.csv", buf.getvalue())
    return 0


def cmd_composition(config: RunConfig) -> int:
    stories, bundles = _load_inputs(config)
    _reject_invalid(stories, bundles, strict=config.strict)
    if not config.strict:
        bundles = _fill_baselines(config, stories, bundles)
    groups: dict[tuple[str, str], list[Sequence[str]]] = {}
    for story, bundle in zip(stories, bundles):
        if bundle.relations:
            groups.setdefault((story.system, story.prompt_condition), []).append(bundle.relations)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["system", "condition", "relation", "mean_proportion"])
    canonical = {label: i for i, label in enumerate(corpus.RELATION_LABELS)}
    for system, condition in sorted(groups):
        composition = metrics.relation_composition({system: groups[(system, condition)]})[system]
        labels = sorted(composition, key=lambda l: (canonical.get(l, len(canonical)), l))
        for label in labels:
            writer.writerow([system, condition, label, repr(composition[label])])
    _write_text(Path(config.out_dir) / "composition.csv", buf.getvalue())
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _parse_granularities(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"granularities must be integers, got {text!r}")
    return values


def _add_common(parser: argparse.ArgumentParser, *, needs_out: bool) -> None:
    parser.add_argument("--input", nargs="+", required=True, help="corpus JSONL file(s)")
    parser.add_argument("--out", required=needs_out, help="output directory")
    parser.add_argument(
        "--condition", choices=("short", "long", "both"), default="both",
        help="restrict to one prompt condition",
    )
    parser.add_argument("--epsilon", type=float, default=metrics.DEFAULT_EPSILON)
    parser.add_argument(
        "--granularities", type=_parse_granularities, default=None,
        help="comma-separated topic granularities, strictly descending (default 80..5 step 5)",
    )
    parser.add_argument("--strict", action="store_true", help="fail on missing annotations")
    parser.add_argument(
        "--systems", default=None,
        help="comma-separated systems to include (human is always kept)",
    )
    parser.add_argument("--lexicon", default=None, help="character lexicon JSON for baselines")
    parser.add_argument(
        "--baseline-kinds", default=",".join(baselines.ANNOTATION_KINDS),
        help="annotation kinds the baseline fill may supply",
    )


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        inputs=tuple(args.input),
        out_dir=args.out,
        condition=args.condition,
        epsilon=args.epsilon,
        granularities=args.granularities or baselines.DEFAULT_GRANULARITIES,
        granularities_explicit=args.granularities is not None,
        strict=args.strict,
        systems=tuple(s for s in args.systems.split(",") if s) if args.systems else None,
        lexicon_path=args.lexicon,
        baseline_kinds=tuple(k for k in args.baseline_kinds.split(",") if k),
    )


_COMMANDS = {
    "validate": cmd_validate,
    "annotate": cmd_annotate,
    "score": cmd_score,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "composition": cmd_composition,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncskit",
        description="Narrative coherence scoring and comparison over story corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("validate", "check corpus structure and annotation invariants"),
        ("annotate", "fill missing annotations with deterministic baselines"),
        ("score", "write per-story metric and composite scores as JSON lines"),
        ("compare", "per-system tables with paired tests and prompt-gap analysis"),
        ("sweep", "topic-switch-by-granularity series per system"),
        ("composition", "relation-type proportion profile per system"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p, needs_out=name != "validate")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    if os.environ.get("NCSKIT_SEED"):
        print("warning: NCSKIT_SEED is ignored; all outputs are deterministic", file=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return _COMMANDS[args.command](config)
    except NcsKitError as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(error, sort_keys=True), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": "ValueError", "message": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
