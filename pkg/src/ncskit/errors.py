"""Exception types shared across the toolkit."""


class NcsKitError(Exception):
    """Base class for all ncskit errors."""


class EmptyStoryError(NcsKitError):
    """Raw story text contains no non-whitespace content."""


class EmptySegmentError(NcsKitError):
    """A separator produced a segment with no word content."""


class EmptyCorpusError(NcsKitError):
    """An operation that needs at least one story received none."""


class SchemaError(NcsKitError):
    """A corpus file line does not conform to the interchange schema.

    Carries the 1-based line number and a dotted field path so callers can
    point at the offending value.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix += f"line {line}"
        if field:
            prefix += f"{': ' if prefix else ''}{field}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DanglingAnnotationError(SchemaError):
    """An annotation block references a story_id other than its own story's."""


class UnknownLabelError(NcsKitError):
    """A relation label outside the declared label set was seen in strict mode."""


class SingleSegmentError(NcsKitError):
    """Topic switch is undefined for stories with fewer than two segments."""


class GranularityLengthMismatchError(NcsKitError):
    """Topic label lists disagree in length across granularities."""


class GroundingMissingError(NcsKitError):
    """Characters are annotated but the story-level grounding score is absent (strict mode)."""


class MissingAnnotationError(NcsKitError):
    """A required annotation kind is absent and strict mode forbids baseline fill."""


class MissingLexiconError(NcsKitError):
    """The character lexicon has no entry for a story's sequence."""


class ZeroVarianceError(NcsKitError):
    """All paired differences are identical; the t statistic is undefined."""


class LengthMismatchError(NcsKitError):
    """Paired value lists have different lengths."""


class MisalignedConditionsError(NcsKitError):
    """The four gap-change series do not cover the same sequence ids."""


class EmptyGroupError(NcsKitError):
    """A per-system aggregation group contains no values."""


class EmptyCellError(NcsKitError):
    """A perplexity table cell has no contributing values."""
