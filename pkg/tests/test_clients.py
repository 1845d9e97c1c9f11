import math
import random

import pytest

from telebench.clients import (
    CachingChatClient,
    ClientConfigError,
    CompletionRequest,
    CompletionResult,
    EmbeddingVector,
    MockChatClient,
    ProviderError,
    StubEmbedder,
    TransientProviderError,
    cosine_similarity,
    request_fingerprint,
)


def _req(prompt: str) -> CompletionRequest:
    return CompletionRequest(model_id="m", prompt=prompt)


# ---------------------------------------------------------------------------
# mocks and fingerprints
# ---------------------------------------------------------------------------


def test_fingerprint_stable_and_content_addressed():
    a = request_fingerprint(_req("hello"))
    assert a == request_fingerprint(_req("hello"))
    assert a != request_fingerprint(_req("hello!"))
    assert a != request_fingerprint(CompletionRequest(model_id="m", prompt="hello", temperature=0.5))


def test_mock_replay_identical():
    mock = MockChatClient(responses={"ping": "pong"})
    r1 = mock.complete("ping")
    r2 = mock.complete("ping")
    assert r1.text == r2.text == "pong"


def test_mock_fixture_directory(tmp_path):
    req = _req("from disk")
    (tmp_path / f"{request_fingerprint(req)}.txt").write_text("fixture reply", encoding="utf-8")
    mock = MockChatClient(model_id="m", fixtures_dir=tmp_path)
    assert mock.complete_chat(req).text == "fixture reply"


def test_mock_unknown_request_errors():
    with pytest.raises(ProviderError):
        MockChatClient().complete("never seen")


# ---------------------------------------------------------------------------
# caching and retries
# ---------------------------------------------------------------------------


def test_cache_hit_spends_no_provider_calls(tmp_path):
    inner = MockChatClient(responses={"q": "a"})
    client = CachingChatClient(inner, cache_dir=tmp_path)
    assert client.complete("q").text == "a"
    assert inner.calls == 1
    assert client.complete("q").text == "a"
    assert inner.calls == 1  # served from cache


def test_cache_survives_new_client_instance(tmp_path):
    inner = MockChatClient(responses={"q": "a"})
    CachingChatClient(inner, cache_dir=tmp_path).complete("q")
    fresh_inner = MockChatClient(responses={})  # would fail if called
    client = CachingChatClient(fresh_inner, cache_dir=tmp_path)
    assert client.complete("q").text == "a"
    assert fresh_inner.calls == 0


def test_cache_misses_on_prompt_edit(tmp_path):
    inner = MockChatClient(responses={"q": "a", "q2": "b"})
    client = CachingChatClient(inner, cache_dir=tmp_path)
    client.complete("q")
    client.complete("q2")
    assert inner.calls == 2


class FlakyClient:
    model_id = "flaky"

    def __init__(self, fail_times: int):
        self.fail_times = fail_times
        self.calls = 0

    def complete_chat(self, req):
        self.calls += 1
        if self.calls <= self.fail_times:
            raise TransientProviderError("temporarily down")
        return CompletionResult(text="recovered")


def test_retries_then_success():
    sleeps = []
    client = CachingChatClient(FlakyClient(2), max_retries=3, sleep=sleeps.append)
    assert client.complete("x").text == "recovered"
    assert sleeps == [1.0, 2.0]  # exponential backoff


def test_retry_budget_exhausted():
    flaky = FlakyClient(10)
    client = CachingChatClient(flaky, max_retries=3, sleep=lambda s: None)
    with pytest.raises(ProviderError):
        client.complete("x")
    assert flaky.calls == 4  # initial try + 3 retries


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------


def test_stub_embedder_deterministic():
    stub = StubEmbedder()
    a = stub.embed_text("channel estimation with pilots")
    b = stub.embed_text("channel estimation with pilots")
    assert a == b
    assert a.dimension == 64


def test_stub_embedder_unit_norm_and_self_similarity():
    stub = StubEmbedder()
    v = stub.embed_text("y = h x + n")
    assert math.isclose(sum(x * x for x in v.values), 1.0, rel_tol=1e-9)
    assert cosine_similarity(v, v) == pytest.approx(1.0)


def test_stub_embedder_empty_baseline_nonzero():
    stub = StubEmbedder()
    empty = stub.embed_text("")
    assert any(v != 0 for v in empty.values)
    assert stub.embed_text("") == empty
    assert stub.embed_text("#### !!!") == empty  # token-free text maps to the baseline


def test_stub_embedder_disjoint_texts_low_similarity():
    stub = StubEmbedder()
    rng = random.Random(31)
    sims = []
    for i in range(80):
        a = " ".join(f"left{rng.randrange(10**6)}" for _ in range(12))
        b = " ".join(f"right{rng.randrange(10**6)}" for _ in range(12))
        sims.append(abs(cosine_similarity(stub.embed_text(a), stub.embed_text(b))))
    assert sum(sims) / len(sims) < 0.2


def test_stub_embedder_rejects_tiny_dimension():
    with pytest.raises(ClientConfigError):
        StubEmbedder(dimension=1)


def test_http_embedder_retries_then_fails(monkeypatch):
    import requests

    from telebench.clients import HttpEmbeddingClient

    calls = []

    def always_down(*args, **kwargs):
        calls.append(1)
        raise requests.ConnectionError("down")

    monkeypatch.setattr(requests, "post", always_down)
    client = HttpEmbeddingClient(endpoint="http://embed.test", max_retries=2, sleep=lambda s: None)
    with pytest.raises(ProviderError):
        client.embed_text("y = h x + n")
    assert len(calls) == 3  # initial attempt + 2 retries


def test_http_embedder_dimension_mismatch(monkeypatch):
    import requests

    from telebench.clients import HttpEmbeddingClient

    class FakeResponse:
        status_code = 200

        @staticmethod
        def json():
            return {"embedding": [0.1, 0.2, 0.3]}

    monkeypatch.setattr(requests, "post", lambda *a, **k: FakeResponse())
    client = HttpEmbeddingClient(endpoint="http://embed.test", dimension=64)
    with pytest.raises(ClientConfigError):
        client.embed_text("anything")


# ---------------------------------------------------------------------------
# cosine similarity
# ---------------------------------------------------------------------------


def test_cosine_self_is_one():
    v = EmbeddingVector([0.3, -0.4, 1.2])
    assert cosine_similarity(v, v) == pytest.approx(1.0)


def test_cosine_orthogonal_zero():
    a = EmbeddingVector([1.0, 0.0])
    b = EmbeddingVector([0.0, 1.0])
    assert cosine_similarity(a, b) == 0.0


def test_cosine_hand_value():
    a = EmbeddingVector([1.0, 1.0, 0.0])
    b = EmbeddingVector([1.0, 0.0, 0.0])
    assert cosine_similarity(a, b) == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_cosine_scale_invariant_and_symmetric():
    rng = random.Random(5)
    for _ in range(50):
        a = EmbeddingVector([rng.uniform(-1, 1) for _ in range(8)])
        b = EmbeddingVector([rng.uniform(-1, 1) for _ in range(8)])
        scaled = EmbeddingVector([3.7 * x for x in a.values])
        assert cosine_similarity(a, b) == pytest.approx(cosine_similarity(b, a))
        assert cosine_similarity(scaled, b) == pytest.approx(cosine_similarity(a, b), abs=1e-12)
        assert -1.0 <= cosine_similarity(a, b) <= 1.0


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError):
        cosine_similarity(EmbeddingVector([1.0]), EmbeddingVector([1.0, 2.0]))


def test_cosine_zero_vector_errors():
    with pytest.raises(ValueError):
        cosine_similarity(EmbeddingVector([0.0, 0.0]), EmbeddingVector([1.0, 0.0]))


def test_embedding_vector_rejects_nan():
    with pytest.raises(ValueError):
        EmbeddingVector([float("nan")])
