"""Backend interfaces the adapter runners drive.

A backend owns one model; the runner owns file I/O, provenance, and the
manifest. Every backend must be deterministic for fixed assets (greedy
decoding, fixed seeds), since rerun hash-identity is part of the contract.
"""

from __future__ import annotations

from typing import Any, Protocol, runtime_checkable


@runtime_checkable
class CorefBackend(Protocol):
    """Predicts coreference chains for one story."""

    name: str
    model_id: str
    version: str

    def predict_chains(self, record: dict[str, Any]) -> list[list[dict[str, Any]]]:
        """Chains as lists of mention dicts with segment_index and UTF-8 byte offsets."""
        ...


@runtime_checkable
class RelationBackend(Protocol):
    """Classifies the implicit relation for each adjacent segment pair."""

    name: str
    model_id: str
    version: str

    def predict_relations(self, segment_pairs: list[tuple[str, str]]) -> list[str]:
        ...


@runtime_checkable
class TopicBackend(Protocol):
    """Corpus-global topic labeling with reduction to each granularity."""

    name: str
    model_id: str
    version: str

    def fit_transform(
        self, segments: list[str], granularities: list[int]
    ) -> dict[int, list[int]]:
        """One label per corpus segment (in input order) per granularity."""
        ...


@runtime_checkable
class GroundingBackend(Protocol):
    """Story-level visual grounding score in [0, 1]."""

    name: str
    model_id: str
    version: str

    def score(self, record: dict[str, Any]) -> float:
        ...
