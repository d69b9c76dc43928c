"""Backend-agnostic completion interface.

Exposes the sampling contract (top-k filtering, multiple samples, seeded
determinism), a retrieval/unigram mock backend that makes the whole pipeline
runnable without any language model, and an HTTP client for the completion
wire protocol::

    POST /v1/complete
    {"prompt": ..., "max_new_tokens": ..., "top_k": ..., "temperature": ...,
     "num_samples": ..., "seed": ..., "stop": [...]}
    -> {"model_id": ..., "samples": [{"text": ..., "latency_ms": ...}]}
"""
from __future__ import annotations

import hashlib
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Protocol, Sequence

import requests

from .codec import ANSWER_TOKEN, EncodedPrompt
from .tags import TagKind, find_tag_tokens, TAG_ALIASES
from .tokens import tokenize

__all__ = [
    "SamplingParams",
    "Sample",
    "BackendError",
    "TransportError",
    "ProtocolError",
    "top_k_filter",
    "MockBackend",
    "RemoteBackend",
    "mock_complete",
    "make_backend",
]


@dataclass(frozen=True)
class SamplingParams:
    top_k: int = 40
    temperature: float = 1.0
    num_samples: int = 3
    max_new_tokens: int = 64
    seed: int | None = None
    stop_token: str = ANSWER_TOKEN

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


@dataclass(frozen=True)
class Sample:
    text: str
    backend_id: str
    latency_ms: int
    flags: tuple[str, ...] = ()


class BackendError(RuntimeError):
    pass


class TransportError(BackendError):
    """Network-level failure; safe to retry."""


class ProtocolError(BackendError):
    """The backend violated the wire protocol; never retried."""


def top_k_filter(distribution: dict[str, float], k: int) -> dict[str, float]:
    """Restrict a distribution to its k most probable tokens and renormalize.

    Ties break by token order. Probabilities must sum to 1 within 1e-6.
    """
    if not distribution:
        raise ValueError("empty distribution")
    if k < 1:
        raise ValueError("k must be >= 1")
    total = sum(distribution.values())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"probabilities sum to {total}, not 1")
    items = sorted(distribution.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    mass = sum(p for _, p in items)
    return {token: p / mass for token, p in items}


class Backend(Protocol):
    backend_id: str

    def complete(self, prompt: EncodedPrompt | str, params: SamplingParams) -> list[Sample]: ...


# --- mock backend -------------------------------------------------------------


def _prompt_parts(prompt: EncodedPrompt | str) -> tuple[str, int, tuple[TagKind, ...]]:
    """(tagged text, slot count, slot kinds) for either prompt form."""
    if isinstance(prompt, EncodedPrompt):
        return prompt.tagged_text or prompt.text, prompt.slot_count, prompt.slot_kinds
    kinds: list[TagKind] = []
    para_open = False
    for _, _, name in find_tag_tokens(prompt):
        kind = TAG_ALIASES.get(name.lower())
        if kind is None:
            continue
        if kind.is_paired:
            if para_open:
                para_open = False
                continue
            para_open = True
        kinds.append(kind)
    return prompt, max(len(kinds), 1), tuple(kinds)


def _similarity_tokens(text: str) -> frozenset[str]:
    tags = {name.lower() for _, _, name in find_tag_tokens(text)}
    words = {t.surface.lower() for t in tokenize(text) if t.is_word}
    return frozenset(tags | words)


def _derive_seed(prompt_text: str, seed: int | None, index: int) -> int:
    key = f"{prompt_text}\x00{seed}\x00{index}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


@dataclass
class _IndexEntry:
    example_id: str
    tokens: frozenset[str]
    spans: tuple[str, ...]
    tag: TagKind


class MockBackend:
    """Deterministic backend built from a mined dataset shard.

    The first sample retrieves the nearest training example by token overlap
    and returns its gold spans; further samples are drawn with seeded top-k
    sampling from a unigram model of that tag's spans.
    """

    backend_id = "mock"

    def __init__(self, examples: Sequence):
        if not examples:
            raise ValueError("mock backend needs a non-empty dataset index")
        self._entries: list[_IndexEntry] = []
        by_tag_tokens: dict[TagKind, Counter] = {}
        all_tokens: Counter = Counter()
        for ex in examples:
            self._entries.append(
                _IndexEntry(
                    example_id=ex.id,
                    tokens=_similarity_tokens(ex.tagged_text),
                    spans=tuple(ex.answer_spans),
                    tag=ex.tag,
                )
            )
            counter = by_tag_tokens.setdefault(ex.tag, Counter())
            for span in ex.answer_spans:
                for tok in span.split(" "):
                    if tok:
                        counter[tok] += 1
                        all_tokens[tok] += 1
        self._entries.sort(key=lambda e: e.example_id)
        self._unigrams = {
            tag: self._normalize(counter) for tag, counter in by_tag_tokens.items()
        }
        self._fallback = self._normalize(all_tokens)

    @staticmethod
    def _normalize(counter: Counter) -> dict[str, float]:
        total = sum(counter.values())
        return {tok: c / total for tok, c in counter.items()}

    @classmethod
    def from_dataset(cls, path: str | Path) -> "MockBackend":
        from .mining import read_examples

        return cls(read_examples(path))

    def _nearest(self, tokens: frozenset[str]) -> _IndexEntry:
        best = self._entries[0]
        best_score = -1.0
        for entry in self._entries:
            union = len(tokens | entry.tokens)
            score = len(tokens & entry.tokens) / union if union else 0.0
            if score > best_score:
                best, best_score = entry, score
        return best

    def _sample_span(self, dist: dict[str, float], rng: Random, params: SamplingParams) -> str:
        if params.temperature != 1.0:
            scaled = {t: p ** (1.0 / params.temperature) for t, p in dist.items()}
            z = sum(scaled.values())
            dist = {t: p / z for t, p in scaled.items()}

        filtered = top_k_filter(dist, params.top_k)
        support = set(filtered)
        tokens = sorted(filtered)
        weights = [filtered[t] for t in tokens]
        length = rng.randint(3, min(9, max(3, params.max_new_tokens)))
        out = []
        for _ in range(length):
            tok = rng.choices(tokens, weights=weights, k=1)[0]
            assert tok in support, "sampled token escaped the top-k support"
            out.append(tok)
        return " ".join(out)

    def complete(self, prompt: EncodedPrompt | str, params: SamplingParams) -> list[Sample]:
        text, slots, kinds = _prompt_parts(prompt)
        tokens = _similarity_tokens(text)
        samples: list[Sample] = []

        gold = self._nearest(tokens)
        samples.append(
            Sample(
                text=" ".join(f"{span} {params.stop_token}" for span in gold.spans),
                backend_id=self.backend_id,
                latency_ms=0,
            )
        )

        kind = kinds[0] if kinds else TagKind.MASK
        dist = self._unigrams.get(kind)
        flags: tuple[str, ...] = ()
        if dist is None:
            dist = self._fallback
            flags = ("fallback-unigram",)
        for i in range(1, params.num_samples):
            rng = Random(_derive_seed(text, params.seed, i))
            spans = [self._sample_span(dist, rng, params) for _ in range(slots)]
            samples.append(
                Sample(
                    text=" ".join(f"{span} {params.stop_token}" for span in spans),
                    backend_id=self.backend_id,
                    latency_ms=0,
                    flags=flags,
                )
            )
        return samples[: params.num_samples]


def mock_complete(prompt: EncodedPrompt | str, params: SamplingParams, knowledge: MockBackend) -> list[Sample]:
    """Completion against a dataset-index mock; see MockBackend."""
    return knowledge.complete(prompt, params)


# --- remote backend ------------------------------------------------------------


class RemoteBackend:
    """Client for the completion wire protocol.

    Retries transport failures at most twice; protocol errors are surfaced
    immediately.
    """

    def __init__(self, base_url: str, timeout: float = 10.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.backend_id = base_url
        self._session = session or requests.Session()

    def complete(self, prompt: EncodedPrompt | str, params: SamplingParams) -> list[Sample]:
        text = prompt.text if isinstance(prompt, EncodedPrompt) else prompt
        payload = {
            "prompt": text,
            "max_new_tokens": params.max_new_tokens,
            "top_k": params.top_k,
            "temperature": params.temperature,
            "num_samples": params.num_samples,
            "stop": [params.stop_token],
        }
        if params.seed is not None:
            payload["seed"] = params.seed

        last_exc: Exception | None = None
        for _attempt in range(3):  # first try + two retries
            start = time.monotonic()
            try:
                response = self._session.post(
                    f"{self.base_url}/v1/complete", json=payload, timeout=self.timeout
                )
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = TransportError(f"backend unreachable: {exc}")
                continue
            return self._parse(response, elapsed_ms=int((time.monotonic() - start) * 1000))
        raise last_exc  # type: ignore[misc]

    def _parse(self, response, elapsed_ms: int) -> list[Sample]:
        try:
            body = response.json()
        except ValueError as exc:
            raise ProtocolError(f"non-JSON response (HTTP {response.status_code})") from exc
        if response.status_code != 200:
            error = body.get("error") if isinstance(body, dict) else None
            if isinstance(error, dict) and "code" in error and "message" in error:
                raise ProtocolError(f"backend error {error['code']}: {error['message']}")
            raise ProtocolError(f"HTTP {response.status_code} without error body")
        if not isinstance(body, dict) or "model_id" not in body or "samples" not in body:
            raise ProtocolError("response missing model_id/samples")
        samples = []
        model_id = str(body["model_id"])
        for row in body["samples"]:
            if not isinstance(row, dict) or "text" not in row:
                raise ProtocolError("sample rows must carry text")
            latency = row.get("latency_ms", elapsed_ms)
            if not isinstance(latency, int) or latency < 0:
                raise ProtocolError("latency_ms must be a non-negative integer")
            samples.append(Sample(text=str(row["text"]), backend_id=model_id, latency_ms=latency))
        return samples


def make_backend(spec: str, timeout: float = 10.0) -> Backend:
    """Backend from a spec string: ``mock:<dataset.jsonl>`` or a base URL."""
    if spec.startswith("mock:"):
        return MockBackend.from_dataset(spec[len("mock:") :])
    if spec.startswith(("http://", "https://")):
        return RemoteBackend(spec, timeout=timeout)
    raise ValueError(f"unknown backend spec {spec!r}")
