"""Chat-completion and embedding clients with mocks, caching and retries.

Providers hide behind two small interfaces: ``complete_chat`` for text
generation and ``embed_text`` for embeddings. Deterministic mocks (a
fixture directory of fingerprint-named response files, or an in-memory map)
make every LLM-backed flow testable offline. ``CachingChatClient`` adds a
content-addressed on-disk cache with atomic writes, bounded in-flight
requests and exponential-backoff retries.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import re
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import requests

logger = logging.getLogger(__name__)

DEFAULT_MAX_RETRIES = 3
DEFAULT_BACKOFF_BASE_S = 1.0
DEFAULT_TEMPERATURE = 0.0
DEFAULT_MAX_TOKENS = 1024
STUB_EMBEDDING_DIM = 64


class ProviderError(RuntimeError):
    """Provider failed after exhausting the retry budget."""


class TransientProviderError(ProviderError):
    """Retryable provider failure (timeouts, 5xx, rate limits)."""


class ClientConfigError(ValueError):
    """Provider misconfiguration (bad endpoint, dimension mismatch, ...)."""


@dataclass(frozen=True)
class CompletionRequest:
    model_id: str
    prompt: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS


@dataclass(frozen=True)
class CompletionResult:
    text: str
    provider_meta: dict = field(default_factory=dict)


def request_fingerprint(req: CompletionRequest) -> str:
    """Content hash of the full request; the cache / mock-fixture key."""
    payload = json.dumps(
        {
            "model_id": req.model_id,
            "prompt": req.prompt,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ChatClient(Protocol):
    model_id: str

    def complete_chat(self, req: CompletionRequest) -> CompletionResult: ...

    def complete(self, prompt: str, **kwargs) -> CompletionResult: ...


class MockChatClient:
    """Deterministic provider serving canned responses.

    Responses come from an in-memory mapping (prompt -> text) and/or a
    fixture directory of ``<fingerprint>.txt`` files. Unknown requests raise
    ``ProviderError``. Every call is counted for cache-hit assertions.
    """

    def __init__(
        self,
        model_id: str = "mock",
        responses: dict[str, str] | None = None,
        fixtures_dir: str | Path | None = None,
    ):
        self.model_id = model_id
        self.responses = dict(responses or {})
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else None
        self.calls = 0

    def complete_chat(self, req: CompletionRequest) -> CompletionResult:
        self.calls += 1
        if req.prompt in self.responses:
            return CompletionResult(text=self.responses[req.prompt], provider_meta={"provider": "mock"})
        if self.fixtures_dir is not None:
            path = self.fixtures_dir / f"{request_fingerprint(req)}.txt"
            if path.exists():
                return CompletionResult(
                    text=path.read_text(encoding="utf-8"),
                    provider_meta={"provider": "mock", "fixture": path.name},
                )
        raise ProviderError(f"mock has no response for request {request_fingerprint(req)[:12]}")

    def complete(self, prompt: str, **kwargs) -> CompletionResult:
        return self.complete_chat(CompletionRequest(model_id=self.model_id, prompt=prompt, **kwargs))


class HttpChatClient:
    """Minimal OpenAI-style chat-completions provider.

    Endpoint and key come from configuration or the environment
    (``TELEBENCH_CHAT_ENDPOINT`` / ``TELEBENCH_CHAT_API_KEY``).
    """

    def __init__(
        self,
        model_id: str,
        endpoint: str | None = None,
        api_key: str | None = None,
        timeout_s: float = 60.0,
    ):
        self.model_id = model_id
        self.endpoint = endpoint or os.environ.get("TELEBENCH_CHAT_ENDPOINT", "")
        self.api_key = api_key or os.environ.get("TELEBENCH_CHAT_API_KEY", "")
        self.timeout_s = timeout_s
        if not self.endpoint:
            raise ClientConfigError("chat endpoint not configured")

    def complete_chat(self, req: CompletionRequest) -> CompletionResult:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": req.model_id,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        try:
            resp = requests.post(self.endpoint, json=body, headers=headers, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise TransientProviderError(f"chat request failed: {exc}") from exc
        if resp.status_code in (408, 409, 429) or resp.status_code >= 500:
            raise TransientProviderError(f"chat provider returned {resp.status_code}")
        if resp.status_code != 200:
            raise ProviderError(f"chat provider returned {resp.status_code}: {resp.text[:200]}")
        data = resp.json()
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected chat response shape: {exc}") from exc
        return CompletionResult(text=text, provider_meta={"provider": "http", "status": 200})

    def complete(self, prompt: str, **kwargs) -> CompletionResult:
        return self.complete_chat(CompletionRequest(model_id=self.model_id, prompt=prompt, **kwargs))


class CachingChatClient:
    """Retry + disk-cache wrapper around any chat provider.

    Results are stored as ``<fingerprint>.json`` files written atomically
    (temp file + rename), so interrupted runs resume without re-spending
    provider calls and concurrent writers cannot corrupt entries. In-flight
    provider calls are bounded by a semaphore.
    """

    def __init__(
        self,
        inner: ChatClient,
        cache_dir: str | Path | None = None,
        max_retries: int = DEFAULT_MAX_RETRIES,
        backoff_base_s: float = DEFAULT_BACKOFF_BASE_S,
        max_in_flight: int = 4,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.inner = inner
        self.model_id = inner.model_id
        self.cache_dir = Path(cache_dir) if cache_dir else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.max_retries = max_retries
        self.backoff_base_s = backoff_base_s
        self._gate = threading.Semaphore(max_in_flight)
        self._sleep = sleep

    def _cache_path(self, req: CompletionRequest) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"{request_fingerprint(req)}.json"

    def complete_chat(self, req: CompletionRequest) -> CompletionResult:
        path = self._cache_path(req)
        if path is not None and path.exists():
            data = json.loads(path.read_text(encoding="utf-8"))
            return CompletionResult(text=data["text"], provider_meta=data.get("provider_meta", {}))

        last_exc: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                with self._gate:
                    result = self.inner.complete_chat(req)
                break
            except TransientProviderError as exc:
                last_exc = exc
                if attempt == self.max_retries:
                    raise ProviderError(
                        f"provider failed after {self.max_retries + 1} attempts: {exc}"
                    ) from exc
                delay = self.backoff_base_s * (2**attempt)
                logger.warning("transient provider failure (%s); retrying in %.1fs", exc, delay)
                self._sleep(delay)
        else:  # pragma: no cover - loop always breaks or raises
            raise ProviderError(str(last_exc))

        if path is not None:
            payload = json.dumps(
                {"text": result.text, "provider_meta": result.provider_meta},
                ensure_ascii=False,
            )
            fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(payload)
                os.replace(tmp, path)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
        return result

    def complete(self, prompt: str, **kwargs) -> CompletionResult:
        return self.complete_chat(CompletionRequest(model_id=self.model_id, prompt=prompt, **kwargs))


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    def __init__(self, values):
        vals = tuple(float(v) for v in values)
        for v in vals:
            if math.isnan(v) or math.isinf(v):
                raise ValueError("embedding entries must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def dimension(self) -> int:
        return len(self.values)


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """dot(a, b) / (|a| |b|); raises on dimension mismatch or zero vectors."""
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    norm_a = math.sqrt(sum(v * v for v in a.values))
    norm_b = math.sqrt(sum(v * v for v in b.values))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    dot = sum(x * y for x, y in zip(a.values, b.values))
    return max(-1.0, min(1.0, dot / (norm_a * norm_b)))


class EmbeddingClient(Protocol):
    dimension: int

    def embed_text(self, text: str) -> EmbeddingVector: ...


_STUB_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_EMPTY_SENTINEL = "\x00empty\x00"


class StubEmbedder:
    """Deterministic hashed bag-of-token-ngrams embedder for tests.

    Unigrams and bigrams of case-folded tokens are feature-hashed into a
    fixed-dimension signed vector, then unit-normalized. Empty (or token
    free) text maps to a designated non-zero baseline vector.
    """

    def __init__(self, dimension: int = STUB_EMBEDDING_DIM):
        if dimension < 2:
            raise ClientConfigError("stub embedder dimension must be >= 2")
        self.dimension = dimension

    def _accumulate(self, grams) -> list[float]:
        vec = [0.0] * self.dimension
        for gram in grams:
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=9).digest()
            idx = int.from_bytes(digest[:8], "big") % self.dimension
            sign = 1.0 if digest[8] & 1 else -1.0
            vec[idx] += sign
        return vec

    def embed_text(self, text: str) -> EmbeddingVector:
        tokens = _STUB_TOKEN_RE.findall(text.casefold())
        grams = list(tokens) + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]
        if not grams:
            grams = [_EMPTY_SENTINEL]
        vec = self._accumulate(grams)
        norm = math.sqrt(sum(v * v for v in vec))
        if norm == 0.0:  # sign cancellation; fall back to the baseline
            vec = self._accumulate([_EMPTY_SENTINEL])
            norm = math.sqrt(sum(v * v for v in vec))
        return EmbeddingVector(v / norm for v in vec)


class HttpEmbeddingClient:
    """Remote embedding endpoint returning ``{"embedding": [...]}``.

    Pooling over token vectors (mean) is the provider's job and documented
    here as the expected convention for transformer backends. Transient
    failures are retried with exponential backoff before giving up.
    """

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        dimension: int | None = None,
        timeout_s: float = 60.0,
        max_retries: int = DEFAULT_MAX_RETRIES,
        backoff_base_s: float = DEFAULT_BACKOFF_BASE_S,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint or os.environ.get("TELEBENCH_EMBED_ENDPOINT", "")
        self.api_key = api_key or os.environ.get("TELEBENCH_EMBED_API_KEY", "")
        self.dimension = dimension or 0
        self.timeout_s = timeout_s
        self.max_retries = max_retries
        self.backoff_base_s = backoff_base_s
        self._sleep = sleep
        if not self.endpoint:
            raise ClientConfigError("embedding endpoint not configured")

    def _request(self, text: str) -> EmbeddingVector:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(
                self.endpoint, json={"input": text}, headers=headers, timeout=self.timeout_s
            )
        except requests.RequestException as exc:
            raise TransientProviderError(f"embedding request failed: {exc}") from exc
        if resp.status_code in (408, 409, 429) or resp.status_code >= 500:
            raise TransientProviderError(f"embedding provider returned {resp.status_code}")
        if resp.status_code != 200:
            raise ProviderError(f"embedding provider returned {resp.status_code}")
        vec = EmbeddingVector(resp.json()["embedding"])
        if self.dimension and vec.dimension != self.dimension:
            raise ClientConfigError(
                f"provider returned dimension {vec.dimension}, configured {self.dimension}"
            )
        return vec

    def embed_text(self, text: str) -> EmbeddingVector:
        for attempt in range(self.max_retries + 1):
            try:
                return self._request(text)
            except TransientProviderError as exc:
                if attempt == self.max_retries:
                    raise ProviderError(
                        f"embedding provider failed after {self.max_retries + 1} attempts: {exc}"
                    ) from exc
                delay = self.backoff_base_s * (2**attempt)
                logger.warning("transient embedding failure (%s); retrying in %.1fs", exc, delay)
                self._sleep(delay)
        raise AssertionError("unreachable")
