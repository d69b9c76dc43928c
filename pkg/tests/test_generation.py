from __future__ import annotations

import json
from pathlib import Path
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from iga.codec import encode_inference, parse_markup
from iga.generation import (
    MockBackend,
    ProtocolError,
    RemoteBackend,
    Sample,
    SamplingParams,
    TransportError,
    make_backend,
    mock_complete,
    top_k_filter,
)


# --- top-k filtering -------------------------------------------------------------


def test_top_k_identity_when_k_covers_support():
    dist = {"a": 0.5, "b": 0.5}
    assert top_k_filter(dist, 5) == dist


def test_top_k_uniform_case():
    dist = {"a": 0.25, "b": 0.25, "c": 0.25, "d": 0.25}
    out = top_k_filter(dist, 2)
    assert set(out) == {"a", "b"}  # ties break by token order
    assert out["a"] == pytest.approx(0.5)


def test_top_k_renormalizes():
    out = top_k_filter({"a": 0.5, "b": 0.3, "c": 0.2}, 2)
    assert out == {"a": pytest.approx(0.625), "b": pytest.approx(0.375)}


def test_top_k_rejects_bad_input():
    with pytest.raises(ValueError):
        top_k_filter({}, 2)
    with pytest.raises(ValueError):
        top_k_filter({"a": 0.9}, 2)
    with pytest.raises(ValueError):
        top_k_filter({"a": 1.0}, 0)


def test_sampling_params_validation():
    with pytest.raises(ValueError):
        SamplingParams(top_k=0)
    with pytest.raises(ValueError):
        SamplingParams(num_samples=0)
    with pytest.raises(ValueError):
        SamplingParams(temperature=0.0)


# --- mock backend -----------------------------------------------------------------


@pytest.fixture(scope="module")
def backend(dataset_dir):
    return MockBackend.from_dataset(dataset_dir / "examples.jsonl")


def _prompt_for(example):
    parsed = parse_markup(example.tagged_text)
    return encode_inference(example.context or "", parsed)


def test_mock_is_deterministic(backend, full_dataset):
    prompt = _prompt_for(full_dataset[0])
    params = SamplingParams(seed=11)
    first = backend.complete(prompt, params)
    second = backend.complete(prompt, params)
    assert first == second


def test_mock_returns_requested_sample_count(backend, full_dataset):
    prompt = _prompt_for(full_dataset[0])
    samples = backend.complete(prompt, SamplingParams(num_samples=5, seed=1))
    assert len(samples) == 5
    assert all(isinstance(s, Sample) and s.latency_ms >= 0 for s in samples)


def test_mock_exact_probe_returns_gold_spans(backend, full_dataset):
    for example in full_dataset[:25]:
        prompt = _prompt_for(example)
        samples = mock_complete(prompt, SamplingParams(seed=0), backend)
        expected = " ".join(f"{span} <answer>" for span in example.answer_spans)
        assert samples[0].text == expected


def test_mock_seed_changes_diversity_samples(backend, full_dataset):
    prompt = _prompt_for(full_dataset[0])
    a = backend.complete(prompt, SamplingParams(seed=1))
    b = backend.complete(prompt, SamplingParams(seed=2))
    assert a[0].text == b[0].text  # retrieval sample ignores the seed
    assert [s.text for s in a[1:]] != [s.text for s in b[1:]]


def test_mock_unseeded_still_deterministic(backend, full_dataset):
    prompt = _prompt_for(full_dataset[1])
    a = backend.complete(prompt, SamplingParams())
    b = backend.complete(prompt, SamplingParams())
    assert a == b


def test_mock_fallback_flag_for_unindexed_tag(full_dataset):
    cause_only = [ex for ex in full_dataset if ex.tag.value == "CAUSE"]
    backend = MockBackend(cause_only)
    prompt = encode_inference("", parse_markup("It was raining <idiom> trees"))
    samples = backend.complete(prompt, SamplingParams(seed=3))
    assert any("fallback-unigram" in s.flags for s in samples[1:])


def test_mock_accepts_raw_string_prompt(backend):
    samples = backend.complete("It was raining <contrast> trees <sep>", SamplingParams(seed=5))
    assert len(samples) == 3


def test_make_backend_specs(dataset_dir):
    assert isinstance(make_backend(f"mock:{dataset_dir / 'examples.jsonl'}"), MockBackend)
    assert isinstance(make_backend("http://localhost:1"), RemoteBackend)
    with pytest.raises(ValueError):
        make_backend("carrier-pigeon:coop")


# --- remote client ------------------------------------------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    responses: list[tuple[int, dict]] = []
    requests: list[dict] = []

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        _StubHandler.requests.append(json.loads(self.rfile.read(length)))
        status, body = _StubHandler.responses.pop(0)
        payload = json.dumps(body).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def stub_server():
    _StubHandler.responses = []
    _StubHandler.requests = []
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}", _StubHandler
    server.shutdown()


def test_remote_round_trip(stub_server):
    # request/response shapes shared with the adapter's conformance suite
    wire = json.loads((Path(__file__).parent / "data" / "wire_protocol.json").read_text())
    url, handler = stub_server
    handler.responses.append((200, wire["response"]))
    client = RemoteBackend(url, timeout=2)
    samples = client.complete(wire["request"]["prompt"], SamplingParams(num_samples=1, seed=9))
    assert samples == [Sample(text="spanA <answer>", backend_id="stub-lm", latency_ms=7)]
    assert handler.requests[0] == wire["request"]


def test_remote_error_body_raises_protocol_error(stub_server):
    url, handler = stub_server
    handler.responses.append((400, {"error": {"code": "bad_request", "message": "nope"}}))
    client = RemoteBackend(url, timeout=2)
    with pytest.raises(ProtocolError, match="bad_request"):
        client.complete("x <sep>", SamplingParams())
    assert len(handler.requests) == 1  # no retry on protocol errors


def test_remote_malformed_body_raises_protocol_error(stub_server):
    url, handler = stub_server
    handler.responses.append((200, {"nope": True}))
    client = RemoteBackend(url, timeout=2)
    with pytest.raises(ProtocolError):
        client.complete("x <sep>", SamplingParams())


def test_remote_unreachable_raises_transport_error():
    client = RemoteBackend("http://127.0.0.1:9", timeout=0.2)
    with pytest.raises(TransportError):
        client.complete("x <sep>", SamplingParams())


class _FlakySession:
    """Fails with a connection error a fixed number of times, then succeeds."""

    def __init__(self, failures: int):
        self.failures = failures
        self.calls = 0

    def post(self, url, json=None, timeout=None):
        import requests

        self.calls += 1
        if self.calls <= self.failures:
            raise requests.ConnectionError("boom")

        class _Response:
            status_code = 200

            @staticmethod
            def json():
                return {"model_id": "m", "samples": [{"text": "ok <answer>", "latency_ms": 1}]}

        return _Response()


def test_remote_retries_transport_errors_twice():
    session = _FlakySession(failures=2)
    client = RemoteBackend("http://example.invalid", session=session)
    samples = client.complete("x <sep>", SamplingParams(num_samples=1))
    assert session.calls == 3  # first try + two retries
    assert samples[0].text == "ok <answer>"


def test_remote_gives_up_after_two_retries():
    session = _FlakySession(failures=5)
    client = RemoteBackend("http://example.invalid", session=session)
    with pytest.raises(TransportError):
        client.complete("x <sep>", SamplingParams(num_samples=1))
    assert session.calls == 3
