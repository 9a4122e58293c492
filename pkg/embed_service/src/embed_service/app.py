"""FastAPI application exposing /embed and /health.

Wire contract: POST /embed with {"texts": ["...", ...]} (1 to 256 non-blank
strings) returns {"dim": d, "vectors": [[...], ...]} with exactly one vector
per text. GET /health returns {"status", "model_id", "dim", "pooling"} once
the model is loaded, 503 before. The vector dimension never changes during a
service lifetime, and identical text always yields the identical vector.
"""

from __future__ import annotations

import logging
import os
import threading
import uuid
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backends import Backend, build_backend

log = logging.getLogger("embed_service")

MAX_BATCH = 256


class EmbedRequest(BaseModel):
    texts: list[str]


class EmbedResponse(BaseModel):
    dim: int
    vectors: list[list[float]]


class ServiceState:
    def __init__(self) -> None:
        self.backend: Backend | None = None
        self.error: str | None = None
        self.lock = threading.Lock()

    @property
    def ready(self) -> bool:
        return self.backend is not None


def create_app(
    model_spec: str | None = None,
    backend: Backend | None = None,
    load_in_background: bool = True,
) -> FastAPI:
    """Build the service; the model loads at startup (in a thread by default,
    so /health can answer 503 while loading)."""
    state = ServiceState()
    spec = model_spec if model_spec is not None else os.environ.get("EMBED_SERVICE_MODEL")

    def load() -> None:
        try:
            loaded = backend if backend is not None else build_backend(spec)
        except Exception as exc:  # surface via /health, keep serving 503
            state.error = str(exc)
            log.exception("model load failed")
            return
        state.backend = loaded
        log.info("model ready: %s dim=%d", loaded.model_id, loaded.dim)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        if load_in_background and backend is None:
            threading.Thread(target=load, daemon=True).start()
        else:
            load()
        yield

    app = FastAPI(title="embed-service", lifespan=lifespan)
    app.state.service = state

    @app.get("/health")
    def health():
        if not state.ready:
            detail = {"status": "loading" if state.error is None else "error"}
            if state.error is not None:
                detail["error"] = state.error
            return JSONResponse(status_code=503, content=detail)
        return {
            "status": "ok",
            "model_id": state.backend.model_id,
            "dim": state.backend.dim,
            "pooling": state.backend.pooling,
        }

    @app.post("/embed", response_model=EmbedResponse)
    def embed(request: EmbedRequest):
        if not state.ready:
            raise HTTPException(status_code=503, detail="model is loading")
        if not request.texts:
            raise HTTPException(status_code=400, detail="texts must be non-empty")
        if len(request.texts) > MAX_BATCH:
            raise HTTPException(
                status_code=400,
                detail=f"batch of {len(request.texts)} exceeds the limit of {MAX_BATCH}",
            )
        if any(not text.strip() for text in request.texts):
            raise HTTPException(status_code=400, detail="texts must be non-blank")
        with state.lock:
            try:
                vectors = state.backend.embed(list(request.texts))
            except Exception:
                error_id = uuid.uuid4().hex
                log.exception("inference failed (error_id=%s)", error_id)
                raise HTTPException(
                    status_code=500, detail={"error_id": error_id}
                ) from None
        if len(vectors) != len(request.texts):
            error_id = uuid.uuid4().hex
            log.error(
                "vector count %d != text count %d (error_id=%s)",
                len(vectors),
                len(request.texts),
                error_id,
            )
            raise HTTPException(status_code=500, detail={"error_id": error_id})
        return EmbedResponse(dim=state.backend.dim, vectors=vectors)

    return app
