import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from paneval import embed_client
from paneval.embed_client import ProviderConfig, embed_texts, text_hash
from paneval.errors import (
    EmbeddingNotFoundError,
    InvalidInputError,
    ProtocolError,
    ProviderUnreachableError,
)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("PANEVAL_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setattr(embed_client, "_BACKOFF_BASE", 0.001)


class StubHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        srv = self.server
        srv.requests.append(json.loads(self.rfile.read(int(self.headers["Content-Length"]))))
        srv.auth_headers.append(self.headers.get("Authorization"))
        status, body = srv.script[min(len(srv.requests) - 1, len(srv.script) - 1)]
        if callable(body):
            body = body(srv.requests[-1])
        payload = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


def echo_embeddings(req):
    # deterministic per-text vectors derived from the text bytes
    vecs = []
    for t in req["texts"]:
        h = hashlib.sha256(t.encode()).digest()
        vecs.append([h[0] / 255.0, h[1] / 255.0, h[2] / 255.0])
    return {"embeddings": vecs, "dim": 3}


@pytest.fixture
def stub_server():
    servers = []

    def start(script):
        srv = ThreadingHTTPServer(("127.0.0.1", 0), StubHandler)
        srv.script = script
        srv.requests = []
        srv.auth_headers = []
        threading.Thread(target=srv.serve_forever, daemon=True).start()
        servers.append(srv)
        return srv, f"http://127.0.0.1:{srv.server_address[1]}/embed"

    yield start
    for srv in servers:
        srv.shutdown()
        srv.server_close()


def test_text_hash_is_sha256():
    assert text_hash("hello") == hashlib.sha256(b"hello").hexdigest()
    assert text_hash("hello") != text_hash("hello ")


def test_embed_texts_validates_inputs(tmp_path):
    cfg = ProviderConfig(kind="file", lookup_path=str(tmp_path / "x.json"))
    with pytest.raises(InvalidInputError):
        embed_texts([], cfg)
    with pytest.raises(InvalidInputError):
        embed_texts(["ok", ""], cfg)


def test_provider_config_validation():
    with pytest.raises(InvalidInputError):
        ProviderConfig(kind="grpc")
    with pytest.raises(InvalidInputError):
        ProviderConfig(kind="http")  # no endpoint
    with pytest.raises(InvalidInputError):
        ProviderConfig(kind="file")  # no lookup


def test_file_provider_round_trip(tmp_path):
    table = {text_hash("a"): [1.0, 0.0], text_hash("b"): [0.0, 1.0]}
    lookup = tmp_path / "lookup.json"
    lookup.write_text(json.dumps(table))
    cfg = ProviderConfig(kind="file", lookup_path=str(lookup))
    vecs = embed_texts(["a", "b", "a"], cfg)
    np.testing.assert_array_equal(vecs[0], [1.0, 0.0])
    np.testing.assert_array_equal(vecs[1], [0.0, 1.0])
    np.testing.assert_array_equal(vecs[2], vecs[0])
    assert vecs[2] is not vecs[0]  # callers get independent copies


def test_file_provider_missing_hash(tmp_path):
    lookup = tmp_path / "lookup.json"
    lookup.write_text(json.dumps({text_hash("a"): [1.0]}))
    cfg = ProviderConfig(kind="file", lookup_path=str(lookup))
    with pytest.raises(EmbeddingNotFoundError) as err:
        embed_texts(["a", "zzz"], cfg)
    assert err.value.text_hash == text_hash("zzz")


def test_file_provider_bad_lookup(tmp_path):
    cfg = ProviderConfig(kind="file", lookup_path=str(tmp_path / "missing.json"))
    with pytest.raises(ProtocolError):
        embed_texts(["a"], cfg)
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ProtocolError):
        embed_texts(["a"], ProviderConfig(kind="file", lookup_path=str(bad)))


def test_http_provider_success_and_cache(stub_server, tmp_path):
    srv, url = stub_server([(200, echo_embeddings)])
    cfg = ProviderConfig(kind="http", endpoint_url=url)
    first = embed_texts(["x", "y"], cfg)
    assert len(srv.requests) == 1
    assert srv.requests[0] == {"texts": ["x", "y"]}
    # second call is served from the cache, no new request
    second = embed_texts(["y", "x"], cfg)
    assert len(srv.requests) == 1
    np.testing.assert_array_equal(second[0], first[1])
    np.testing.assert_array_equal(second[1], first[0])


def test_http_provider_deduplicates(stub_server):
    srv, url = stub_server([(200, echo_embeddings)])
    cfg = ProviderConfig(kind="http", endpoint_url=url)
    vecs = embed_texts(["same", "same", "same"], cfg)
    assert srv.requests == [{"texts": ["same"]}]
    np.testing.assert_array_equal(vecs[0], vecs[1])


def test_http_provider_retries_on_5xx(stub_server):
    srv, url = stub_server([(500, {"error": "boom"}), (503, {"error": "busy"}),
                            (200, echo_embeddings)])
    cfg = ProviderConfig(kind="http", endpoint_url=url, max_retries=3)
    vecs = embed_texts(["r"], cfg)
    assert len(srv.requests) == 3
    assert vecs[0].shape == (3,)


def test_http_provider_gives_up_after_retries(stub_server):
    srv, url = stub_server([(500, {"error": "boom"})])
    cfg = ProviderConfig(kind="http", endpoint_url=url, max_retries=2)
    with pytest.raises(ProviderUnreachableError):
        embed_texts(["r"], cfg)
    assert len(srv.requests) == 3  # initial try + 2 retries


def test_http_provider_4xx_is_protocol_error(stub_server):
    srv, url = stub_server([(400, {"error": "bad"})])
    cfg = ProviderConfig(kind="http", endpoint_url=url, max_retries=5)
    with pytest.raises(ProtocolError):
        embed_texts(["r"], cfg)
    assert len(srv.requests) == 1  # 4xx is not retried


def test_http_provider_connection_refused():
    cfg = ProviderConfig(kind="http", endpoint_url="http://127.0.0.1:9/embed",
                         max_retries=1, timeout=0.2)
    with pytest.raises(ProviderUnreachableError):
        embed_texts(["r"], cfg)


def test_http_provider_response_validation(stub_server):
    _, url = stub_server([(200, {"embeddings": [[1.0, 2.0]]})])
    cfg = ProviderConfig(kind="http", endpoint_url=url)
    with pytest.raises(ProtocolError):
        embed_texts(["a", "b"], cfg)  # one vector for two texts

    _, url = stub_server([(200, {"embeddings": [[1.0, 2.0]], "dim": 3})])
    with pytest.raises(ProtocolError):
        embed_texts(["a"], ProviderConfig(kind="http", endpoint_url=url))

    _, url = stub_server([(200, {"embeddings": [[1.0, 2.0]]})])
    with pytest.raises(ProtocolError):
        embed_texts(["a"], ProviderConfig(kind="http", endpoint_url=url, expected_dim=5))

    _, url = stub_server([(200, {"wrong": True})])
    with pytest.raises(ProtocolError):
        embed_texts(["a"], ProviderConfig(kind="http", endpoint_url=url))


def test_http_provider_sends_bearer_token(stub_server):
    srv, url = stub_server([(200, echo_embeddings)])
    cfg = ProviderConfig(kind="http", endpoint_url=url, bearer_token="sekrit")
    embed_texts(["auth"], cfg)
    assert srv.auth_headers == ["Bearer sekrit"]


def test_cache_env_override(stub_server, tmp_path, monkeypatch):
    override = tmp_path / "elsewhere"
    monkeypatch.setenv("PANEVAL_CACHE_DIR", str(override))
    _, url = stub_server([(200, echo_embeddings)])
    embed_texts(["cached"], ProviderConfig(kind="http", endpoint_url=url))
    files = list(override.iterdir())
    assert len(files) == 1
    assert files[0].name.startswith(text_hash("cached"))


def test_corrupted_cache_entry_is_refetched(stub_server, tmp_path, monkeypatch):
    cache = tmp_path / "c2"
    monkeypatch.setenv("PANEVAL_CACHE_DIR", str(cache))
    srv, url = stub_server([(200, echo_embeddings)])
    cfg = ProviderConfig(kind="http", endpoint_url=url)
    embed_texts(["v"], cfg)
    entry = next(cache.iterdir())
    entry.write_text("{broken")
    vecs = embed_texts(["v"], cfg)
    assert len(srv.requests) == 2
    assert vecs[0].shape == (3,)


def test_concurrent_requests_coalesce(stub_server, tmp_path, monkeypatch):
    monkeypatch.setenv("PANEVAL_CACHE_DIR", str(tmp_path / "c3"))
    srv, url = stub_server([(200, echo_embeddings)])
    cfg = ProviderConfig(kind="http", endpoint_url=url)
    results = []
    barrier = threading.Barrier(4)

    def work():
        barrier.wait()
        results.append(embed_texts(["hot"], cfg)[0])

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    # every caller got the vector, but the upstream saw exactly one request
    assert len(results) == 4
    for v in results[1:]:
        np.testing.assert_array_equal(v, results[0])
    assert len(srv.requests) == 1
