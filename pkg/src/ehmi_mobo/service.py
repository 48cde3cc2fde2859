"""HTTP/JSON service exposing sessions to the rating client.

Sessions live in an append-only store and are replayed transparently, so a
service restart resumes every in-flight session exactly where it stopped.
Per-session locks serialize mutations; distinct sessions proceed in
parallel (sync endpoints run on the worker thread pool).
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware

from .acquisition import AcquisitionConfig
from .design_space import rendering_to_dict, resolve_geometry
from .errors import (
    ConfigInvalid,
    NumericalFailure,
    ScaleViolation,
    SessionFinished,
)
from .objectives import QuestionnaireResponse, default_scales
from .optimizer import (
    Session,
    SessionConfig,
    SessionStore,
    export_session_jsonl,
    start_session,
    submit_rating,
)
from .pareto import hypervolume, pareto_front

DEFAULT_EXPIRY_S = 24 * 3600.0


@dataclass
class ServiceConfig:
    store_dir: str = "sessions"
    host: str = "127.0.0.1"
    port: int = 8000
    expiry_s: float = DEFAULT_EXPIRY_S
    defaults: SessionConfig = field(default_factory=SessionConfig)

    def validate(self) -> None:
        if self.expiry_s <= 0:
            raise ConfigInvalid(f"expiry_s must be > 0, got {self.expiry_s}")
        Path(self.store_dir).mkdir(parents=True, exist_ok=True)
        if not os.access(self.store_dir, os.W_OK):
            raise ConfigInvalid(f"store directory {self.store_dir} not writable")

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        cfg = cls(**overrides)
        cfg.store_dir = os.environ.get("EHMI_MOBO_STORE", cfg.store_dir)
        cfg.port = int(os.environ.get("EHMI_MOBO_PORT", cfg.port))
        return cfg


class SessionRegistry:
    """In-memory front of the session store with per-session locks."""

    def __init__(self, config: ServiceConfig):
        config.validate()
        self.config = config
        self.store = SessionStore(config.store_dir)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._last_seen: dict[str, float] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _touch(self, session_id: str) -> None:
        self._last_seen[session_id] = datetime.now(timezone.utc).timestamp()

    def _expired(self, session_id: str) -> bool:
        last = self._last_seen.get(session_id)
        now = datetime.now(timezone.utc).timestamp()
        return last is not None and now - last > self.config.expiry_s

    def create(self, config: SessionConfig) -> Session:
        session = start_session(config, session_id=uuid.uuid4().hex)
        with self._registry_lock:
            self._sessions[session.id] = session
        self.store.save_new(session)
        self._touch(session.id)
        return session

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            if not self.store.exists(session_id):
                raise KeyError(session_id)
            session = self.store.load(session_id)
            with self._registry_lock:
                session = self._sessions.setdefault(session_id, session)
        if self._expired(session_id):
            raise KeyError(session_id)
        self._touch(session_id)
        return session

    def submit(self, session_id: str, resp: QuestionnaireResponse, expected_iteration):
        session = self.get(session_id)
        with self._lock_for(session_id):
            if expected_iteration is not None and expected_iteration != session.iteration + 1:
                raise DuplicateRating(
                    f"expected iteration {session.iteration + 1}, got {expected_iteration}"
                )
            n_before = len(session.events)
            result = submit_rating(session, resp)
            for event in session.events[n_before:]:
                self.store.append(session_id, event)
        self._touch(session_id)
        return session, result


class DuplicateRating(Exception):
    pass


def _design_payload(session: Session) -> dict | None:
    design = session.pending_design
    if design is None:
        return None
    return {
        "params": design.as_list(),
        "rendering": rendering_to_dict(resolve_geometry(design)),
    }


def _state_payload(session: Session) -> dict:
    return {
        "session_id": session.id,
        "iteration": session.iteration,
        "total_iterations": session.config.total_iterations,
        "n_sobol": session.config.acquisition.n_sobol,
        "phase": session.phase,
        "finished": session.finished,
        "stopped_early": session.stopped_early,
        "design": _design_payload(session),
    }


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    registry = SessionRegistry(config or ServiceConfig.from_env())
    app = FastAPI(title="ehmi-mobo", version="0.1.0")
    app.state.registry = registry
    # the rating client is served from a different origin than the API
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _get_or_404(session_id: str) -> Session:
        try:
            return registry.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(default={})):
        base = registry.config.defaults
        try:
            acq = AcquisitionConfig(
                n_sobol=body.get("n_sobol", base.acquisition.n_sobol),
                n_candidates=body.get("n_candidates", base.acquisition.n_candidates),
                n_mc_samples=body.get("n_mc_samples", base.acquisition.n_mc_samples),
                seed=body.get("seed", base.acquisition.seed),
            )
            cfg = SessionConfig(
                acquisition=acq,
                scales=default_scales(t_max=body.get("t_max", 60.0)),
                n_optimization=body.get("n_optimization", base.n_optimization),
                fit_seed=body.get("fit_seed", base.fit_seed),
            )
            session = registry.create(cfg)
        except (ConfigInvalid, TypeError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return _state_payload(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _state_payload(_get_or_404(session_id))

    @app.post("/sessions/{session_id}/rating")
    def post_rating(session_id: str, body: dict = Body(...)):
        _get_or_404(session_id)
        try:
            resp = QuestionnaireResponse.from_dict(body)
            expected = body.get("iteration")
            session, result = registry.submit(session_id, resp, expected)
        except ScaleViolation as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except SessionFinished:
            raise HTTPException(status_code=409, detail="session already finished")
        except DuplicateRating as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except NumericalFailure as exc:
            diagnostic_id = uuid.uuid4().hex[:12]
            raise HTTPException(
                status_code=500,
                detail={"error": "numerical failure", "diagnostic_id": diagnostic_id,
                        "message": str(exc)},
            )
        payload = _state_payload(session)
        payload["finished"] = result.finished
        payload["stopped_early"] = result.stopped_early
        return payload

    @app.get("/sessions/{session_id}/pareto")
    def get_pareto(session_id: str):
        session = _get_or_404(session_id)
        if not session.history:
            return {"points": [], "hypervolume": 0.0, "reference_point": None}
        front = pareto_front([rec.objectives for rec in session.history])
        return {
            "points": [
                {
                    "iteration": idx + 1,
                    "params": session.history[idx].design.as_list(),
                    "objectives": list(map(float, front.values[row])),
                }
                for row, idx in enumerate(front.indices)
            ],
            "hypervolume": hypervolume(front),
            "reference_point": [float(v) for v in front.reference_point],
        }

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str):
        session = _get_or_404(session_id)
        return Response(
            content=export_session_jsonl(session),
            media_type="application/x-ndjson",
        )

    return app
