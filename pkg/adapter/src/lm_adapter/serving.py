"""Completion wire protocol server.

``POST /v1/complete`` accepts::

    {"prompt", "max_new_tokens", "top_k", "temperature", "num_samples",
     "seed"?, "stop": [...]}

and returns ``{"model_id", "samples": [{"text", "latency_ms"}]}``. The
continuation excludes the prompt, honors seeded top-k sampling, and stops
after as many answer terminators as the prompt has tag slots.
Protocol-violating requests get a 4xx ``{"error": {"code", "message"}}``.
"""
from __future__ import annotations

import time
from typing import Any

import torch
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import PAIRED_TAGS, AdapterConfig
from .training import load_checkpoint
from .vocab import WordVocab


def count_slots(prompt: str, config: AdapterConfig) -> int:
    """Tag-token occurrences in the prompt; paired delimiters count once."""
    tokens = prompt.split()
    slots = 0
    paired_seen = 0
    for tok in tokens:
        if tok in PAIRED_TAGS:
            paired_seen += 1
        elif tok in config.tag_tokens:
            slots += 1
    slots += (paired_seen + 1) // 2
    return max(slots, 1)


def _bad_request(message: str) -> JSONResponse:
    return JSONResponse(status_code=400, content={"error": {"code": "bad_request", "message": message}})


def _validate(body: Any) -> dict | JSONResponse:
    if not isinstance(body, dict):
        return _bad_request("request body must be a JSON object")
    if not isinstance(body.get("prompt"), str) or not body["prompt"].strip():
        return _bad_request("prompt must be a non-empty string")
    merged = {
        "prompt": body["prompt"],
        "max_new_tokens": body.get("max_new_tokens", 64),
        "top_k": body.get("top_k", 40),
        "temperature": body.get("temperature", 1.0),
        "num_samples": body.get("num_samples", 1),
        "seed": body.get("seed"),
        "stop": body.get("stop", []),
    }
    for key in ("max_new_tokens", "top_k", "num_samples"):
        if not isinstance(merged[key], int) or merged[key] < 1:
            return _bad_request(f"{key} must be a positive integer")
    if not isinstance(merged["temperature"], (int, float)) or merged["temperature"] <= 0:
        return _bad_request("temperature must be positive")
    if merged["seed"] is not None and not isinstance(merged["seed"], int):
        return _bad_request("seed must be an integer")
    if not isinstance(merged["stop"], list) or not all(isinstance(s, str) for s in merged["stop"]):
        return _bad_request("stop must be a list of strings")
    return merged


@torch.no_grad()
def generate_sample(
    model,
    vocab: WordVocab,
    config: AdapterConfig,
    prompt_ids: list[int],
    request: dict,
    sample_index: int,
    slots: int,
) -> str:
    generator = torch.Generator(device="cpu")
    base_seed = request["seed"] if request["seed"] is not None else int(time.time_ns() % 2**31)
    generator.manual_seed(base_seed * 1009 + sample_index)

    stop_ids = {vocab.token_id(tok) for tok in request["stop"]}
    stop_ids.discard(None)
    if not stop_ids:
        stop_ids = {vocab.token_id(config.answer_token)}
        stop_ids.discard(None)

    prompt_budget = max(config.max_context - request["max_new_tokens"], 8)
    ids = list(prompt_ids)[-prompt_budget:]
    generated: list[int] = []
    terminators = 0
    past = None
    input_ids = torch.tensor([ids], dtype=torch.long)
    # control tokens are vocabulary artifacts, never part of a continuation
    blocked = [i for i in (vocab.pad_id, vocab.eol_id) if i is not None]
    for _ in range(request["max_new_tokens"]):
        out = model(input_ids=input_ids, past_key_values=past, use_cache=True)
        past = out.past_key_values
        logits = out.logits[0, -1, :] / request["temperature"]
        logits[blocked] = float("-inf")
        k = min(request["top_k"], logits.shape[-1])
        top_values, top_indices = torch.topk(logits, k)
        probs = torch.softmax(top_values, dim=-1)
        choice = torch.multinomial(probs, 1, generator=generator)
        token_id = int(top_indices[choice])
        generated.append(token_id)
        if token_id in stop_ids:
            terminators += 1
            if terminators >= slots:
                break
        input_ids = torch.tensor([[token_id]], dtype=torch.long)
    return vocab.decode(generated)


def create_app(checkpoint_path: str) -> FastAPI:
    model, vocab, config = load_checkpoint(checkpoint_path)
    app = FastAPI(title="lm-adapter")

    @app.post("/v1/complete")
    async def complete(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request("request body must be valid JSON")
        merged = _validate(body)
        if isinstance(merged, JSONResponse):
            return merged

        prompt_ids = vocab.encode(merged["prompt"])
        slots = count_slots(merged["prompt"], config)
        samples = []
        for i in range(merged["num_samples"]):
            started = time.monotonic()
            text = generate_sample(model, vocab, config, prompt_ids, merged, i, slots)
            samples.append(
                {"text": text, "latency_ms": int((time.monotonic() - started) * 1000)}
            )
        return {"model_id": config.model_id, "samples": samples}

    return app
