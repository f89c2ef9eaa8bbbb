"""Adapter runners: drive one backend over a corpus file, emit interchange + manifest.

Each run reads a JSON-lines corpus, attaches one annotation kind to every
story, and writes a new corpus plus a manifest sidecar. Story blocks pass
through untouched. Provenance on every bundle records the backend identity
(kind: neural) and the run's content hash, so downstream reports can trace
exactly which model produced which numbers.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path
from typing import Any, Callable

from . import neural
from .backends import CorefBackend, GroundingBackend, RelationBackend, TopicBackend
from .interchange import annotations_of, read_records, segment_texts, story_id, write_records
from .manifest import AdapterManifest, AdapterRunError, content_hash


def _provenance(backend, manifest: AdapterManifest) -> dict[str, str]:
    return {
        "name": backend.name,
        "version": backend.version,
        "kind": "neural",
        "model": backend.model_id,
        "manifest_hash": manifest.content_hash,
    }


def _finalize(
    records: list[dict[str, Any]],
    kind: str,
    outputs: list[tuple[str, Any]],
    backend,
    manifest: AdapterManifest,
    output_path: str | Path,
    manifest_path: str | Path | None,
) -> AdapterManifest:
    manifest.content_hash = content_hash(outputs)
    manifest.n_stories = len(records)
    by_id = dict(outputs)
    for record in records:
        ann = annotations_of(record)
        ann[kind] = by_id[story_id(record)]
        ann.setdefault("provenance", {})[kind] = _provenance(backend, manifest)
    write_records(output_path, records)
    if manifest_path is not None:
        manifest.save(manifest_path)
    return manifest


def run_coref(
    input_path: str | Path,
    output_path: str | Path,
    backend: CorefBackend,
    manifest_path: str | Path | None = None,
) -> AdapterManifest:
    records = read_records(input_path)
    manifest = AdapterManifest(annotator=backend.name, model_id=backend.model_id, version=backend.version)
    outputs = []
    try:
        for record in records:
            outputs.append((story_id(record), backend.predict_chains(copy.deepcopy(record))))
    except Exception as exc:
        raise AdapterRunError(str(exc), manifest) from exc
    return _finalize(records, "coref_chains", outputs, backend, manifest, output_path, manifest_path)


def run_relations(
    input_path: str | Path,
    output_path: str | Path,
    backend: RelationBackend,
    manifest_path: str | Path | None = None,
) -> AdapterManifest:
    records = read_records(input_path)
    manifest = AdapterManifest(annotator=backend.name, model_id=backend.model_id, version=backend.version)
    outputs = []
    try:
        for record in records:
            texts = segment_texts(record)
            pairs = list(zip(texts, texts[1:]))
            labels = backend.predict_relations(pairs) if pairs else []
            if len(labels) != len(pairs):
                raise ValueError(
                    f"backend returned {len(labels)} labels for {len(pairs)} segment pairs"
                )
            outputs.append((story_id(record), list(labels)))
    except Exception as exc:
        raise AdapterRunError(str(exc), manifest) from exc
    return _finalize(records, "relations", outputs, backend, manifest, output_path, manifest_path)


def run_topics(
    input_path: str | Path,
    output_path: str | Path,
    backend: TopicBackend,
    granularities: list[int],
    manifest_path: str | Path | None = None,
) -> AdapterManifest:
    records = read_records(input_path)
    manifest = AdapterManifest(
        annotator=backend.name,
        model_id=backend.model_id,
        version=backend.version,
        parameters={"granularities": list(granularities)},
    )
    spans = []
    segments: list[str] = []
    for record in records:
        texts = segment_texts(record)
        spans.append((story_id(record), len(segments), len(texts)))
        segments.extend(texts)
    try:
        global_labels = backend.fit_transform(segments, list(granularities))
        outputs = []
        for sid, start, count in spans:
            per_story: dict[str, list[int]] = {}
            for gran in granularities:
                labels = global_labels[gran][start : start + count]
                if len(labels) != count:
                    raise ValueError(f"backend returned too few labels at granularity {gran}")
                per_story[str(gran)] = labels
            outputs.append((sid, per_story))
    except AdapterRunError:
        raise
    except Exception as exc:
        raise AdapterRunError(str(exc), manifest) from exc
    return _finalize(records, "topics", outputs, backend, manifest, output_path, manifest_path)


def run_grounding(
    input_path: str | Path,
    output_path: str | Path,
    backend: GroundingBackend,
    manifest_path: str | Path | None = None,
) -> AdapterManifest:
    records = read_records(input_path)
    manifest = AdapterManifest(annotator=backend.name, model_id=backend.model_id, version=backend.version)
    outputs = []
    try:
        for record in records:
            value = float(backend.score(copy.deepcopy(record)))
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"grounding score {value!r} outside [0, 1]")
            outputs.append((story_id(record), value))
    except Exception as exc:
        raise AdapterRunError(str(exc), manifest) from exc
    return _finalize(records, "grounding_score", outputs, backend, manifest, output_path, manifest_path)


# ---------------------------------------------------------------------------
# Command line


def _default_backend(annotator: str, args: argparse.Namespace):
    if annotator == "coref":
        return neural.CorefModelBackend(args.model)
    if annotator == "relations":
        return neural.TransformersRelationBackend(args.model)
    if annotator == "topics":
        return neural.BertopicTopicBackend(args.model)
    if annotator == "grounding":
        return neural.GroundingModelBackend(args.model, features_dir=args.features_dir)
    raise ValueError(annotator)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ncskit-annotate",
        description="Run one neural annotator over a corpus and emit interchange JSONL",
    )
    parser.add_argument("annotator", choices=("coref", "relations", "topics", "grounding"))
    parser.add_argument("--input", required=True)
    parser.add_argument("--out", required=True, help="output corpus JSONL path")
    parser.add_argument("--manifest", default=None, help="manifest sidecar JSON path")
    parser.add_argument("--model", required=True, help="model identifier or local checkpoint path")
    parser.add_argument("--granularities", default="80,75,70,65,60,55,50,45,40,35,30,25,20,15,10,5")
    parser.add_argument("--features-dir", default=None)
    args = parser.parse_args(argv)
    backend = _default_backend(args.annotator, args)
    try:
        if args.annotator == "coref":
            manifest = run_coref(args.input, args.out, backend, args.manifest)
        elif args.annotator == "relations":
            manifest = run_relations(args.input, args.out, backend, args.manifest)
        elif args.annotator == "topics":
            grans = [int(g) for g in args.granularities.split(",") if g]
            manifest = run_topics(args.input, args.out, backend, grans, args.manifest)
        else:
            manifest = run_grounding(args.input, args.out, backend, args.manifest)
    except AdapterRunError as exc:
        payload = {
            "error": type(exc).__name__,
            "message": str(exc),
            "manifest": {
                "annotator": exc.manifest.annotator,
                "model_id": exc.manifest.model_id,
                "version": exc.manifest.version,
                "parameters": exc.manifest.parameters,
            },
        }
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return 2
    print(f"{manifest.annotator}: {manifest.n_stories} stories, content hash {manifest.content_hash}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
