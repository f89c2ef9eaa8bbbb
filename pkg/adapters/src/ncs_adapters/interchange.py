"""Dict-level access to the ncskit JSON-lines corpus interchange.

This package talks to the scoring toolkit only through its published file
format (see the toolkit's ``corpus.schema.json``), never through its Python
API. Records are kept as plain dicts; the ``story`` block is never modified,
and serialization uses the interchange's canonical settings (sorted keys,
compact separators, UTF-8) so story blocks stay byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable


def read_records(path: str | Path) -> list[dict[str, Any]]:
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict) or "story" not in record:
                raise ValueError(f"{path}:{lineno}: expected an object with a 'story' field")
            records.append(record)
    return records


def dumps_record(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_records(path: str | Path, records: Iterable[dict[str, Any]]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(dumps_record(record))
            f.write("\n")


def story_id(record: dict[str, Any]) -> str:
    return record["story"]["story_id"]


def segment_texts(record: dict[str, Any]) -> list[str]:
    """Segment text is the segment's sentences joined by single spaces."""
    return [" ".join(seg["sentences"]) for seg in record["story"]["segments"]]


def annotations_of(record: dict[str, Any]) -> dict[str, Any]:
    ann = record.get("annotations")
    if ann is None:
        ann = {"story_id": story_id(record)}
        record["annotations"] = ann
    return ann
