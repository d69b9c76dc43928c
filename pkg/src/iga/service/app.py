"""HTTP API for interactive intent-guided authoring sessions.

Endpoints::

    POST /v1/sessions {mode}                      -> {session_id}
    POST /v1/sessions/{id}/generate {markup, num_samples?} -> {request_id, candidates}
    POST /v1/sessions/{id}/accept {request_id, candidate_id} -> {main_text}
    POST /v1/sessions/{id}/edit {main_text}       -> {seq}
    POST /v1/sessions/{id}/submit                 -> {seq}
    GET  /v1/sessions/{id}/report                 -> SessionReport JSON

Errors are ``{"error": {"code", "message"}}`` with 4xx/5xx status codes.
Sessions are event-sourced: every response-visible change appends exactly one
event, and reports are computed purely from the log.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

from fastapi import FastAPI, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..codec import CodecError, MarkupError, decode_output, encode_inference, parse_markup
from ..generation import BackendError, SamplingParams, TransportError, make_backend
from ..tags import TagKind, UnknownTagError
from .state import MODES, build_report, canonical_report_json, replay_events, token_diff
from .store import SessionStore

__all__ = ["ServiceConfig", "create_app"]


@dataclass
class ServiceConfig:
    data_dir: Path
    backend: str
    token_budget: int = 300
    default_num_samples: int = 3
    tag_backends: dict[str, str] = dataclass_field(default_factory=dict)
    backend_timeout: float = 10.0


class CreateSessionBody(BaseModel):
    mode: str


class GenerateBody(BaseModel):
    markup: str
    num_samples: int | None = None
    seed: int | None = None
    seq: int | None = None


class AcceptBody(BaseModel):
    request_id: str
    candidate_id: str
    seq: int | None = None


class EditBody(BaseModel):
    main_text: str
    seq: int | None = None


class SubmitBody(BaseModel):
    seq: int | None = None


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    body = {"error": {"code": code, "message": message, **extra}}
    return JSONResponse(status_code=status, content=body)


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="intent-guided authoring service")
    store = SessionStore(config.data_dir)
    backends: dict[str, object] = {}

    def backend_for(kind: TagKind):
        spec = config.tag_backends.get(kind.value, config.backend)
        if spec not in backends:
            backends[spec] = make_backend(spec, timeout=config.backend_timeout)
        return backends[spec]

    def load_state(session_id: str):
        header, events = store.read(session_id)
        return replay_events(header, events), events

    @app.post("/v1/sessions")
    def create_session(body: CreateSessionBody):
        if body.mode not in MODES:
            return _error(400, "invalid_mode", f"mode must be one of {', '.join(MODES)}")
        session_id = store.create_session(body.mode)
        return {"session_id": session_id}

    @app.post("/v1/sessions/{session_id}/generate")
    def generate(session_id: str, body: GenerateBody):
        if not store.exists(session_id):
            return _error(404, "unknown_session", f"no session {session_id}")
        with store.lock(session_id):
            state, events = load_state(session_id)
            if body.seq is not None and body.seq != len(events) + 1:
                return _error(409, "seq_conflict", f"expected seq {len(events) + 1}")
            if state.mode == "BASE":
                return _error(400, "mode_violation", "BASE sessions do not accept generate requests")
            try:
                parsed = parse_markup(body.markup)
            except (MarkupError, UnknownTagError) as exc:
                return _error(400, "parse_error", str(exc))
            if parsed.slot_count == 0:
                return _error(400, "parse_error", "markup contains no tags")
            kinds = set(parsed.slot_kinds)
            if state.mode == "ILM" and kinds != {TagKind.MASK}:
                return _error(400, "mode_violation", "ILM sessions accept only the mask tag")
            try:
                prompt = encode_inference(state.main_text, parsed, config.token_budget)
            except CodecError as exc:
                return _error(400, "budget_exceeded", str(exc))

            num_samples = body.num_samples or config.default_num_samples
            params = SamplingParams(num_samples=num_samples, seed=body.seed)
            try:
                samples = backend_for(parsed.slot_kinds[0]).complete(prompt, params)
            except TransportError as exc:
                return _error(502, "backend_unreachable", str(exc), retry=True)
            except BackendError as exc:
                return _error(502, "backend_error", str(exc))

            request_id = f"req{len(events) + 1}"
            candidates = []
            for i, sample in enumerate(samples):
                completion = decode_output(parsed, sample.text)
                candidates.append(
                    {
                        "candidate_id": f"{request_id}.{i}",
                        "assembled": completion.assembled,
                        "spans": list(completion.spans),
                        "tag": parsed.slot_kinds[0].value,
                        "truncated": completion.truncated,
                    }
                )
            store.append(
                session_id,
                "generate_click",
                {
                    "request_id": request_id,
                    "markup": body.markup,
                    "num_samples": num_samples,
                    "candidates": candidates,
                },
            )
            return {
                "request_id": request_id,
                "candidates": [
                    {k: c[k] for k in ("candidate_id", "assembled", "spans")} for c in candidates
                ],
            }

    @app.post("/v1/sessions/{session_id}/accept")
    def accept(session_id: str, body: AcceptBody):
        if not store.exists(session_id):
            return _error(404, "unknown_session", f"no session {session_id}")
        with store.lock(session_id):
            state, events = load_state(session_id)
            if body.seq is not None and body.seq != len(events) + 1:
                return _error(409, "seq_conflict", f"expected seq {len(events) + 1}")
            candidates = state.requests.get(body.request_id)
            if candidates is None or body.candidate_id not in candidates:
                return _error(409, "stale_request", "candidate not found for this session")
            seq = store.append(
                session_id,
                "add_click",
                {"request_id": body.request_id, "candidate_id": body.candidate_id},
            )
            header, events = store.read(session_id)
            state = replay_events(header, events)
            return {"seq": seq, "main_text": state.main_text}

    @app.post("/v1/sessions/{session_id}/edit")
    def edit(session_id: str, body: EditBody):
        if not store.exists(session_id):
            return _error(404, "unknown_session", f"no session {session_id}")
        with store.lock(session_id):
            state, events = load_state(session_id)
            if body.seq is not None and body.seq != len(events) + 1:
                return _error(409, "seq_conflict", f"expected seq {len(events) + 1}")
            diff = token_diff(state.main_text, body.main_text)
            seq = store.append(
                session_id, "edit", {"main_text": body.main_text, "diff": diff}
            )
            return {"seq": seq}

    @app.post("/v1/sessions/{session_id}/submit")
    def submit(session_id: str, body: SubmitBody | None = None):
        if not store.exists(session_id):
            return _error(404, "unknown_session", f"no session {session_id}")
        with store.lock(session_id):
            _, events = store.read(session_id)
            if body is not None and body.seq is not None and body.seq != len(events) + 1:
                return _error(409, "seq_conflict", f"expected seq {len(events) + 1}")
            seq = store.append(session_id, "submit", {})
            return {"seq": seq}

    @app.get("/v1/sessions/{session_id}/report")
    def report(session_id: str):
        if not store.exists(session_id):
            return _error(404, "unknown_session", f"no session {session_id}")
        state, _ = load_state(session_id)
        return Response(
            content=canonical_report_json(build_report(state)),
            media_type="application/json",
        )

    return app
