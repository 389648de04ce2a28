"""Pluggable text-embedding provider with deterministic caching.

Two provider kinds:

* ``http`` POSTs ``{"texts": [...]}`` to an endpoint and expects
  ``{"embeddings": [[...], ...], "dim": D}`` back, retrying transient
  failures with exponential backoff.
* ``file`` resolves each text against a local JSON lookup mapping hex
  SHA-256 of the UTF-8 text to its vector.

HTTP results are cached one JSON file per content hash, so repeated scoring
runs are deterministic and offline once warm. ``PANEVAL_CACHE_DIR``
overrides the cache location.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass

import numpy as np
import requests

from .errors import (
    EmbeddingNotFoundError,
    InvalidInputError,
    ProtocolError,
    ProviderUnreachableError,
)

CACHE_DIR_ENV = "PANEVAL_CACHE_DIR"

_BACKOFF_BASE = 0.5

# One in-flight upstream fetch per unique text, process-wide.
_inflight_guard = threading.Lock()
_inflight_locks: dict[str, threading.Lock] = {}


@dataclass(frozen=True)
class ProviderConfig:
    kind: str
    endpoint_url: str | None = None
    lookup_path: str | None = None
    timeout: float = 30.0
    max_retries: int = 3
    expected_dim: int | None = None
    cache_dir: str | None = None
    bearer_token: str | None = None

    def __post_init__(self):
        if self.kind not in ("http", "file"):
            raise InvalidInputError(f"provider kind must be 'http' or 'file', got {self.kind!r}")
        if self.kind == "http" and not self.endpoint_url:
            raise InvalidInputError("http provider requires endpoint_url")
        if self.kind == "file" and not self.lookup_path:
            raise InvalidInputError("file provider requires lookup_path")
        if self.max_retries < 0:
            raise InvalidInputError(f"max_retries must be >= 0, got {self.max_retries}")


def text_hash(text: str) -> str:
    """Hex SHA-256 of the UTF-8 bytes of ``text``; the cache/lookup key."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def embed_texts(texts, cfg: ProviderConfig) -> list[np.ndarray]:
    """Embed each text, order-preserving; one vector per input on success."""
    texts = list(texts)
    if not texts:
        raise InvalidInputError("embed_texts needs at least one text")
    if any(not isinstance(t, str) or t == "" for t in texts):
        raise InvalidInputError("every text must be a non-empty string")
    hashes = [text_hash(t) for t in texts]
    unique: dict[str, str] = {}
    for h, t in zip(hashes, texts):
        unique.setdefault(h, t)
    if cfg.kind == "file":
        resolved = _resolve_from_lookup(unique, cfg)
    else:
        resolved = _resolve_via_http(unique, cfg)
    return [resolved[h].copy() for h in hashes]


def _check_vector(values, cfg, origin):
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1 or not np.all(np.isfinite(arr)):
        raise ProtocolError(f"{origin}: embedding is not a finite 1-D vector")
    if cfg.expected_dim is not None and arr.size != cfg.expected_dim:
        raise ProtocolError(
            f"{origin}: embedding dim {arr.size} != expected {cfg.expected_dim}"
        )
    return arr


def _resolve_from_lookup(unique, cfg):
    try:
        with open(cfg.lookup_path, "r", encoding="utf-8") as fh:
            table = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"could not read lookup {cfg.lookup_path}: {exc}") from exc
    if not isinstance(table, dict):
        raise ProtocolError(f"lookup {cfg.lookup_path} must be a JSON object")
    out = {}
    for h in unique:
        if h not in table:
            raise EmbeddingNotFoundError(h)
        out[h] = _check_vector(table[h], cfg, f"lookup entry {h}")
    return out


def cache_directory(cfg: ProviderConfig) -> str:
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return env
    if cfg.cache_dir:
        return cfg.cache_dir
    return os.path.join(os.path.expanduser("~"), ".cache", "paneval", "embeddings")


def _cache_path(cache_dir, h):
    return os.path.join(cache_dir, f"{h}.json")


def _cache_read(cache_dir, h, cfg):
    path = _cache_path(cache_dir, h)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return _check_vector(doc["values"], cfg, f"cache entry {h}")
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ProtocolError):
        # A missing or corrupted cache entry is just a miss.
        return None


def _cache_write(cache_dir, h, vec):
    os.makedirs(cache_dir, exist_ok=True)
    doc = {"dim": int(vec.size), "values": vec.tolist()}
    fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
        os.replace(tmp, _cache_path(cache_dir, h))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _resolve_via_http(unique, cfg):
    cache_dir = cache_directory(cfg)
    out = {}
    missing = {}
    for h, t in unique.items():
        cached = _cache_read(cache_dir, h, cfg)
        if cached is not None:
            out[h] = cached
        else:
            missing[h] = t
    if not missing:
        return out
    # Coalesce with other threads: take the per-hash locks in sorted order,
    # then re-check the cache in case another holder already fetched.
    ordered = sorted(missing)
    locks = []
    with _inflight_guard:
        for h in ordered:
            locks.append(_inflight_locks.setdefault(h, threading.Lock()))
    for lock in locks:
        lock.acquire()
    try:
        still_missing = {}
        for h in ordered:
            cached = _cache_read(cache_dir, h, cfg)
            if cached is not None:
                out[h] = cached
            else:
                still_missing[h] = missing[h]
        if still_missing:
            fetched = _post_embeddings(list(still_missing.values()), cfg)
            for h, vec in zip(still_missing, fetched):
                _cache_write(cache_dir, h, vec)
                out[h] = vec
    finally:
        for lock in reversed(locks):
            lock.release()
    return out


def _post_embeddings(texts, cfg):
    headers = {}
    if cfg.bearer_token:
        headers["Authorization"] = f"Bearer {cfg.bearer_token}"
    attempts = cfg.max_retries + 1
    last_exc = None
    for attempt in range(attempts):
        if attempt > 0:
            time.sleep(_BACKOFF_BASE * 2 ** (attempt - 1))
        try:
            resp = requests.post(
                cfg.endpoint_url, json={"texts": texts},
                headers=headers, timeout=cfg.timeout,
            )
        except requests.RequestException as exc:
            last_exc = exc
            continue
        if 500 <= resp.status_code < 600:
            last_exc = ProtocolError(f"server error HTTP {resp.status_code}")
            continue
        if resp.status_code != 200:
            raise ProtocolError(
                f"embedding service rejected the request: HTTP {resp.status_code}"
            )
        return _parse_response(resp, texts, cfg)
    raise ProviderUnreachableError(
        f"embedding service unreachable after {attempts} attempt(s): {last_exc}"
    )


def _parse_response(resp, texts, cfg):
    try:
        doc = resp.json()
    except ValueError as exc:
        raise ProtocolError(f"embedding service returned invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "embeddings" not in doc:
        raise ProtocolError("embedding response is missing the 'embeddings' field")
    rows = doc["embeddings"]
    if not isinstance(rows, list) or len(rows) != len(texts):
        raise ProtocolError(
            f"embedding response has {len(rows) if isinstance(rows, list) else 'no'} "
            f"vectors for {len(texts)} texts"
        )
    declared = doc.get("dim")
    vectors = []
    for i, row in enumerate(rows):
        vec = _check_vector(row, cfg, f"response vector {i}")
        if declared is not None and vec.size != declared:
            raise ProtocolError(
                f"response vector {i} has dim {vec.size}, response declares {declared}"
            )
        vectors.append(vec)
    return vectors
