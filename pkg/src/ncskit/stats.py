"""Per-system aggregation, paired significance tests, and prompt-gap analysis.

The Student-t tail probability is computed from the regularized incomplete
beta function (continued-fraction evaluation), so the package needs no
statistics library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyCellError,
    EmptyGroupError,
    LengthMismatchError,
    MisalignedConditionsError,
    ZeroVarianceError,
)

_BETA_MAX_ITER = 500
_BETA_EPS = 1e-16
_TINY = 1e-300


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz's method)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # The continued fraction converges fast for x below the distribution bulk;
    # use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def student_t_two_tailed_p(t: float, df: int) -> float:
    """Two-tailed p-value of the Student-t statistic with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def significance_marker(p: float) -> str:
    """Star notation: ** for p<.01, * for p<.05, ns otherwise."""
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return "ns"


@dataclass(frozen=True)
class PairedSample:
    """Two value series aligned by sequence id (the comparison unit)."""

    keys: tuple[str, ...]
    a_values: tuple[float, ...]
    b_values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.a_values) != len(self.b_values) or len(self.keys) != len(self.a_values):
            raise LengthMismatchError(
                f"misaligned paired sample: {len(self.keys)} keys, "
                f"{len(self.a_values)} vs {len(self.b_values)} values"
            )
        if len(self.keys) < 2:
            raise LengthMismatchError("paired tests need at least two aligned sequences")
        for v in (*self.a_values, *self.b_values):
            if not math.isfinite(v):
                raise ValueError(f"non-finite value {v!r} in paired sample")


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    df: int
    p_value: float
    significance: str  # "ns", "*", or "**"


@dataclass(frozen=True)
class GapChangeResult:
    """Change of the human-model gap between prompt conditions."""

    delta_short: float
    delta_long: float
    n: int
    t_stat: float | None
    p_value: float | None
    significance: str | None


@dataclass(frozen=True)
class AggregateRow:
    system: str
    n: int
    mean: float
    sd: float
    sd_undefined: bool  # single-value group: sd reported as 0 with this flag


def aggregate(
    values_by_system: Mapping[str, Sequence[float]],
    *,
    human_label: str = "human",
    human_position: str = "last",
) -> list[AggregateRow]:
    """Mean and sample standard deviation per system, deterministically ordered."""
    if human_position not in ("first", "last"):
        raise ValueError("human_position must be 'first' or 'last'")
    systems = sorted(values_by_system)
    if human_label in systems:
        systems.remove(human_label)
        systems = [human_label, *systems] if human_position == "first" else [*systems, human_label]
    rows = []
    for system in systems:
        values = list(values_by_system[system])
        if not values:
            raise EmptyGroupError(f"system {system!r} has no values")
        n = len(values)
        mean = float(np.mean(values))
        sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
        rows.append(AggregateRow(system=system, n=n, mean=mean, sd=sd, sd_undefined=n < 2))
    return rows


def paired_t(sample: PairedSample) -> TTestResult:
    """Two-tailed paired t-test on a - b with df = n - 1."""
    diffs = [a - b for a, b in zip(sample.a_values, sample.b_values)]
    n = len(diffs)
    mean_d = float(np.mean(diffs))
    sd_d = float(np.std(diffs, ddof=1))
    if sd_d == 0.0:
        raise ZeroVarianceError("all paired differences are identical")
    t = mean_d / (sd_d / math.sqrt(n))
    df = n - 1
    p = student_t_two_tailed_p(t, df)
    return TTestResult(t_stat=t, df=df, p_value=p, significance=significance_marker(p))


def gap_change(
    human_short: Mapping[str, float],
    model_short: Mapping[str, float],
    human_long: Mapping[str, float],
    model_long: Mapping[str, float],
) -> GapChangeResult:
    """Paired test of the per-sequence human-model gap across prompt conditions."""
    keys = set(human_short)
    for name, series in (
        ("model short", model_short),
        ("human long", human_long),
        ("model long", model_long),
    ):
        if set(series) != keys:
            raise MisalignedConditionsError(f"{name} series does not cover the same sequence ids")
    if not keys:
        raise MisalignedConditionsError("gap change needs at least one shared sequence id")
    ordered = sorted(keys)
    gaps_short = [human_short[k] - model_short[k] for k in ordered]
    gaps_long = [human_long[k] - model_long[k] for k in ordered]
    delta_short = float(np.mean(gaps_short))
    delta_long = float(np.mean(gaps_long))
    try:
        sample = PairedSample(
            keys=tuple(ordered), a_values=tuple(gaps_short), b_values=tuple(gaps_long)
        )
        test = paired_t(sample)
    except (ZeroVarianceError, LengthMismatchError):
        return GapChangeResult(
            delta_short=delta_short,
            delta_long=delta_long,
            n=len(ordered),
            t_stat=None,
            p_value=None,
            significance=None,
        )
    return GapChangeResult(
        delta_short=delta_short,
        delta_long=delta_long,
        n=len(ordered),
        t_stat=test.t_stat,
        p_value=test.p_value,
        significance=test.significance,
    )


@dataclass(frozen=True)
class PerplexityRow:
    evaluator: str
    condition: str
    human_mean: float
    human_sd: float
    n_human: int
    model_min: float
    model_max: float
    n_model_sources: int

    @property
    def human_cell(self) -> str:
        return format_mean_sd(self.human_mean, self.human_sd)

    @property
    def models_cell(self) -> str:
        return format_range(self.model_min, self.model_max)


def format_mean_sd(mean: float, sd: float) -> str:
    return f"{mean:.2f} ({sd:.2f})"


def format_range(lo: float, hi: float) -> str:
    return f"{lo:.2f}–{hi:.2f}"


def perplexity_report(
    records: Sequence[tuple[str, str, str, float]],
    *,
    human_label: str = "human",
) -> list[PerplexityRow]:
    """Perplexity table rows from (system, condition, evaluator, value) records.

    Human cells report mean (sd) over human stories; model cells report the
    range of per-source mean perplexities.
    """
    cells: dict[tuple[str, str], dict[str, list[float]]] = {}
    for system, condition, evaluator, value in records:
        cells.setdefault((evaluator, condition), {}).setdefault(system, []).append(value)
    rows = []
    for evaluator, condition in sorted(cells):
        by_system = cells[(evaluator, condition)]
        human_values = by_system.get(human_label, [])
        if not human_values:
            raise EmptyCellError(f"no human perplexities for {evaluator!r} under {condition!r}")
        model_means = [
            float(np.mean(by_system[system]))
            for system in sorted(by_system)
            if system != human_label
        ]
        if not model_means:
            raise EmptyCellError(f"no model perplexities for {evaluator!r} under {condition!r}")
        rows.append(
            PerplexityRow(
                evaluator=evaluator,
                condition=condition,
                human_mean=float(np.mean(human_values)),
                human_sd=float(np.std(human_values, ddof=1)) if len(human_values) > 1 else 0.0,
                n_human=len(human_values),
                model_min=min(model_means),
                model_max=max(model_means),
                n_model_sources=len(model_means),
            )
        )
    return rows
