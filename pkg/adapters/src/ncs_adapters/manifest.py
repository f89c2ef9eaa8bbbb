"""Adapter manifests: what ran, with which checkpoint, and a hash of its outputs."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any


@dataclass
class AdapterManifest:
    annotator: str
    model_id: str
    version: str
    parameters: dict[str, Any] = field(default_factory=dict)
    content_hash: str | None = None
    n_stories: int | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, ensure_ascii=False, indent=2) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "AdapterManifest":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def content_hash(payload: list[tuple[str, Any]]) -> str:
    """sha256 over the canonical JSON of (story_id, annotation payload) pairs.

    The hash covers the produced annotations only, not the provenance block
    that later embeds the hash itself.
    """
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class AdapterRunError(RuntimeError):
    """A model-load or inference failure, carrying the manifest of the run."""

    def __init__(self, message: str, manifest: AdapterManifest):
        super().__init__(f"{message} [annotator={manifest.annotator} model={manifest.model_id}]")
        self.manifest = manifest
