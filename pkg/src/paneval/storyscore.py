"""Story scoring: blend of target similarity and corpus-typical plot quality.

A candidate summary is compared against the target story's summary (the
continuation-fidelity half) and against each summary in a reference corpus
of well-known titles (the plot half, averaged). The final score is

    story = gamma * similarity + (1 - gamma) * plot

with gamma in [0, 1] trading originality against fidelity; 0.5 by default.
Similarities are cosine similarities of text embeddings, which either come
pinned in the manifest or are fetched through an embedding provider.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import embed_client, linalg
from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    ManifestError,
    ProviderError,
)

DEFAULT_GAMMA = 0.5


@dataclass
class StoryDoc:
    id: str
    title: str
    summary_text: str
    embedding: np.ndarray | None = None

    def __post_init__(self):
        if not self.summary_text:
            raise InvalidInputError(f"document {self.id!r} has an empty summary_text")
        if self.embedding is not None:
            self.embedding = linalg.as_vector(self.embedding)


@dataclass
class StoryCorpusManifest:
    candidate: StoryDoc
    target: StoryDoc
    references: list[StoryDoc]
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not self.references:
            raise InvalidInputError("manifest needs at least one reference document")
        _check_gamma(self.gamma)

    def documents(self) -> list[StoryDoc]:
        return [self.candidate, self.target, *self.references]


@dataclass(frozen=True)
class StoryScoreRow:
    label: str
    similarity: float
    plot: float
    story: float


def _check_gamma(gamma):
    if not (np.isfinite(gamma) and 0.0 <= gamma <= 1.0):
        raise InvalidInputError(f"gamma must lie in [0, 1], got {gamma}")


def sim(e_x, e_t) -> float:
    """Cosine similarity of two embeddings, in [-1, 1]."""
    return linalg.cosine_similarity(e_x, e_t)


def plot_score(e_x, refs) -> float:
    """Mean cosine similarity of an embedding to each reference embedding."""
    refs = list(refs)
    if not refs:
        raise InvalidInputError("plot_score needs at least one reference embedding")
    return float(np.mean([sim(e_x, e_m) for e_m in refs]))


def story_score(similarity: float, plot: float, gamma: float) -> float:
    """gamma-weighted blend of the similarity and plot components."""
    _check_gamma(gamma)
    return gamma * similarity + (1.0 - gamma) * plot


def evaluate_manifest(manifest: StoryCorpusManifest, provider=None) -> StoryScoreRow:
    """Score a manifest's candidate, fetching any missing embeddings.

    ``provider`` is an embed_client.ProviderConfig, or any callable taking a
    list of texts and returning one vector per text. Documents that already
    carry embeddings are never re-fetched.
    """
    pending = [doc for doc in manifest.documents() if doc.embedding is None]
    if pending:
        if provider is None:
            raise InvalidInputError(
                "documents without pinned embeddings need an embedding provider: "
                + ", ".join(repr(d.id) for d in pending)
            )
        texts = [doc.summary_text for doc in pending]
        try:
            vectors = _fetch(texts, provider)
        except ProviderError as exc:
            raise _attribute_provider_error(exc, pending) from exc
        if len(vectors) != len(pending):
            raise ProviderError(
                f"provider returned {len(vectors)} vectors for {len(pending)} documents"
            )
        for doc, vec in zip(pending, vectors):
            doc.embedding = linalg.as_vector(vec)
    dims = {doc.id: doc.embedding.size for doc in manifest.documents()}
    if len(set(dims.values())) != 1:
        raise DimensionMismatchError(f"embedding dimensions disagree across corpus: {dims}")
    similarity = sim(manifest.candidate.embedding, manifest.target.embedding)
    plot = plot_score(
        manifest.candidate.embedding, [r.embedding for r in manifest.references]
    )
    story = story_score(similarity, plot, manifest.gamma)
    return StoryScoreRow(
        label=manifest.candidate.id, similarity=similarity, plot=plot, story=story
    )


def _fetch(texts, provider):
    if isinstance(provider, embed_client.ProviderConfig):
        return embed_client.embed_texts(texts, provider)
    if callable(provider):
        return provider(texts)
    raise InvalidInputError(f"unusable provider {provider!r}")


def _attribute_provider_error(exc, pending):
    if isinstance(exc, embed_client.EmbeddingNotFoundError):
        for doc in pending:
            if embed_client.text_hash(doc.summary_text) == exc.text_hash:
                return ProviderError(f"embedding fetch failed for document {doc.id!r}: {exc}")
    ids = ", ".join(repr(d.id) for d in pending)
    return ProviderError(f"embedding fetch failed for document(s) {ids}: {exc}")


# --- manifest file handling -------------------------------------------------

_DOC_KEYS = ("id", "title", "summary_text")


def load_manifest(path) -> StoryCorpusManifest:
    """Parse and validate a manifest JSON file.

    Schema violations raise ManifestError carrying the JSON-pointer path of
    the offending field.
    """
    # An unreadable file propagates as OSError (an I/O failure); only content
    # problems become ManifestError.
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ManifestError("", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return manifest_from_dict(doc)


def manifest_from_dict(doc) -> StoryCorpusManifest:
    if not isinstance(doc, dict):
        raise ManifestError("", "manifest must be a JSON object")
    for key in ("candidate", "target", "references"):
        if key not in doc:
            raise ManifestError(f"/{key}", "missing required field")
    gamma = doc.get("gamma", DEFAULT_GAMMA)
    if isinstance(gamma, bool) or not isinstance(gamma, (int, float)):
        raise ManifestError("/gamma", "must be a number")
    if not (np.isfinite(gamma) and 0.0 <= gamma <= 1.0):
        raise ManifestError("/gamma", f"must lie in [0, 1], got {gamma}")
    refs_raw = doc["references"]
    if not isinstance(refs_raw, list):
        raise ManifestError("/references", "must be an array")
    if not refs_raw:
        raise ManifestError("/references", "must be non-empty")
    candidate = _doc_from_dict(doc["candidate"], "/candidate")
    target = _doc_from_dict(doc["target"], "/target")
    references = [
        _doc_from_dict(r, f"/references/{i}") for i, r in enumerate(refs_raw)
    ]
    return StoryCorpusManifest(
        candidate=candidate, target=target, references=references, gamma=float(gamma)
    )


def _doc_from_dict(raw, pointer):
    if not isinstance(raw, dict):
        raise ManifestError(pointer, "must be a JSON object")
    for key in _DOC_KEYS:
        if key not in raw:
            raise ManifestError(f"{pointer}/{key}", "missing required field")
        if not isinstance(raw[key], str):
            raise ManifestError(f"{pointer}/{key}", "must be a string")
    if not raw["summary_text"]:
        raise ManifestError(f"{pointer}/summary_text", "must be non-empty")
    embedding = None
    if "embedding" in raw and raw["embedding"] is not None:
        values = raw["embedding"]
        if not isinstance(values, list) or not values:
            raise ManifestError(f"{pointer}/embedding", "must be a non-empty array of numbers")
        for j, v in enumerate(values):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
                raise ManifestError(f"{pointer}/embedding/{j}", f"non-numeric or non-finite value {v!r}")
        embedding = np.asarray(values, dtype=np.float64)
    return StoryDoc(
        id=raw["id"], title=raw["title"], summary_text=raw["summary_text"],
        embedding=embedding,
    )
