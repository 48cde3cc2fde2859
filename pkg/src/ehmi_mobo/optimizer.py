"""The human-in-the-loop session state machine and its persistence.

A session walks through a fixed number of iterations: an initial sampling
phase rating the shared Sobol designs, then an optimization phase where a
surrogate is refit on the full history and the next design maximizes
expected hypervolume improvement.  A perfect rating of every subjective
metric stops the session early.

Sessions persist as append-only line-delimited JSON event logs (one file
per session, named by session id); replaying a log reconstructs the exact
state, so a crashed service resumes mid-session and re-exports identical
bytes.
"""

from __future__ import annotations

import json
import os
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping

from .acquisition import AcquisitionConfig, sobol_designs, suggest_next
from .design_space import DesignParams, validate_params
from .errors import ConfigInvalid, SessionFinished
from .objectives import (
    OBJECTIVE_NAMES,
    ObjectiveVector,
    QuestionnaireResponse,
    ScaleSpec,
    default_scales,
    is_perfect_rating,
    response_to_objectives,
)
from .pareto import pareto_front
from .surrogate import fit

PHASE_SAMPLING = "sampling"
PHASE_OPTIMIZATION = "optimization"
PHASE_FINISHED = "finished"

DEFAULT_N_OPTIMIZATION = 15


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class SessionConfig:
    """Everything a session needs: acquisition counts, scales, length."""

    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    scales: Mapping[str, ScaleSpec] = field(default_factory=default_scales)
    n_optimization: int = DEFAULT_N_OPTIMIZATION
    fit_seed: int = 0

    @property
    def total_iterations(self) -> int:
        return self.acquisition.n_sobol + self.n_optimization

    def validate(self) -> None:
        self.acquisition.validate()
        if self.n_optimization < 0:
            raise ConfigInvalid(
                f"n_optimization must be >= 0, got {self.n_optimization}"
            )
        missing = [n for n in OBJECTIVE_NAMES if n not in self.scales]
        if missing:
            raise ConfigInvalid(f"scales missing objectives: {missing}")

    def to_dict(self) -> dict:
        return {
            "acquisition": self.acquisition.to_dict(),
            "scales": {
                name: {"lo": s.lo, "hi": s.hi, "direction": s.direction}
                for name, s in self.scales.items()
            },
            "n_optimization": self.n_optimization,
            "fit_seed": self.fit_seed,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SessionConfig":
        return cls(
            acquisition=AcquisitionConfig.from_dict(payload["acquisition"]),
            scales={
                name: ScaleSpec(s["lo"], s["hi"], s["direction"])
                for name, s in payload["scales"].items()
            },
            n_optimization=payload["n_optimization"],
            fit_seed=payload.get("fit_seed", 0),
        )


@dataclass(frozen=True)
class IterationRecord:
    """One completed iteration: the design and how it was rated."""

    design: DesignParams
    response: QuestionnaireResponse
    raw_scores: dict[str, float]
    objectives: ObjectiveVector


@dataclass(frozen=True)
class SubmitResult:
    finished: bool
    stopped_early: bool
    next_design: DesignParams | None


@dataclass
class Session:
    """Full HITL state; mutate only through :func:`submit_rating`."""

    id: str
    config: SessionConfig
    history: list[IterationRecord] = field(default_factory=list)
    pending_design: DesignParams | None = None
    stopped_early: bool = False
    events: list[dict] = field(default_factory=list)
    clock: Callable[[], str] = _utc_now

    @property
    def iteration(self) -> int:
        return len(self.history)

    @property
    def finished(self) -> bool:
        return self.stopped_early or self.iteration >= self.config.total_iterations

    @property
    def phase(self) -> str:
        if self.finished:
            return PHASE_FINISHED
        if self.iteration < self.config.acquisition.n_sobol:
            return PHASE_SAMPLING
        return PHASE_OPTIMIZATION

    def _log(self, record: dict) -> dict:
        record = {"ts": self.clock(), **record}
        self.events.append(record)
        return record


def start_session(
    config: SessionConfig | None = None,
    session_id: str | None = None,
    clock: Callable[[], str] = _utc_now,
) -> Session:
    """Create a fresh session with the first Sobol design pending."""
    config = config or SessionConfig()
    config.validate()
    session = Session(
        id=session_id or uuid.uuid4().hex,
        config=config,
        clock=clock,
    )
    session._log(
        {
            "type": "session_started",
            "session_id": session.id,
            "config": config.to_dict(),
        }
    )
    first = sobol_designs(config.acquisition)[0]
    _issue_design(session, first, source="sobol")
    return session


def _issue_design(
    session: Session,
    design: DesignParams,
    source: str,
    diagnostics: dict | None = None,
    surrogate: dict | None = None,
) -> None:
    session.pending_design = design
    record = {
        "type": "design_issued",
        "iteration": session.iteration + 1,
        "phase": session.phase,
        "params": design.as_list(),
        "source": source,
    }
    if diagnostics is not None:
        record["acquisition"] = diagnostics
    if surrogate is not None:
        record["surrogate"] = surrogate
    session._log(record)


def submit_rating(session: Session, resp: QuestionnaireResponse) -> SubmitResult:
    """Record a rating for the pending design and advance the session.

    Raises:
        SessionFinished: the session already finished.
        ScaleViolation: an item is outside its scale.
    """
    if session.finished or session.pending_design is None:
        raise SessionFinished(f"session {session.id} is finished")
    resp.validate(session.config.scales)
    raw, vec = response_to_objectives(resp, session.config.scales)
    design = session.pending_design
    session.history.append(
        IterationRecord(design=design, response=resp, raw_scores=raw, objectives=vec)
    )
    session.pending_design = None
    perfect = is_perfect_rating(resp, session.config.scales)
    session._log(
        {
            "type": "rating_received",
            "iteration": session.iteration,
            "response": resp.to_dict(),
            "raw_scores": {n: raw[n] for n in OBJECTIVE_NAMES},
            "objectives": vec.as_list(),
            "perfect": perfect,
        }
    )

    if perfect:
        session.stopped_early = True
        session._log(
            {"type": "session_finished", "iteration": session.iteration,
             "stopped_early": True}
        )
        return SubmitResult(finished=True, stopped_early=True, next_design=None)
    if session.iteration >= session.config.total_iterations:
        session._log(
            {"type": "session_finished", "iteration": session.iteration,
             "stopped_early": False}
        )
        return SubmitResult(finished=True, stopped_early=False, next_design=None)

    if session.iteration < session.config.acquisition.n_sobol:
        design = sobol_designs(session.config.acquisition)[session.iteration]
        _issue_design(session, design, source="sobol")
    else:
        model = fit(
            [(rec.design, rec.objectives) for rec in session.history],
            seed=session.config.fit_seed,
        )
        front = pareto_front([rec.objectives for rec in session.history])
        design, diag = suggest_next(
            model, front, session.config.acquisition, return_diagnostics=True
        )
        _issue_design(
            session,
            design,
            source="acquisition",
            diagnostics=diag.to_dict(),
            surrogate=model.export_record(),
        )
    return SubmitResult(
        finished=False, stopped_early=False, next_design=session.pending_design
    )


def export_session(session: Session) -> list[dict]:
    """One record per completed iteration, byte-stable given the session."""
    issued = {
        e["iteration"]: e for e in session.events if e["type"] == "design_issued"
    }
    rated = {
        e["iteration"]: e for e in session.events if e["type"] == "rating_received"
    }
    records = []
    for i, rec in enumerate(session.history, start=1):
        issue = issued[i]
        rate = rated[i]
        record = {
            "session_id": session.id,
            "iteration": i,
            "phase": issue["phase"],
            "issued_ts": issue["ts"],
            "rated_ts": rate["ts"],
            "params": rec.design.as_list(),
            "source": issue["source"],
            "response": rec.response.to_dict(),
            "raw_scores": {n: rec.raw_scores[n] for n in OBJECTIVE_NAMES},
            "objectives": rec.objectives.as_list(),
        }
        if "acquisition" in issue:
            record["acquisition"] = issue["acquisition"]
        if "surrogate" in issue:
            record["surrogate"] = issue["surrogate"]
        records.append(record)
    return records


def export_session_jsonl(session: Session) -> bytes:
    lines = [
        json.dumps(record, separators=(",", ":"), allow_nan=False)
        for record in export_session(session)
    ]
    return ("\n".join(lines) + "\n").encode() if lines else b""


class SessionStore:
    """Append-only event-log persistence, one JSONL file per session."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str) -> Path:
        safe = "".join(c for c in session_id if c.isalnum() or c in "-_")
        if not safe or safe != session_id:
            raise ValueError(f"unsafe session id {session_id!r}")
        return self.directory / f"{session_id}.jsonl"

    def append(self, session_id: str, event: dict) -> None:
        line = json.dumps(event, separators=(",", ":"), allow_nan=False)
        with open(self._path(session_id), "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.jsonl"))

    def load(self, session_id: str) -> Session:
        """Rebuild a session by replaying its event log."""
        path = self._path(session_id)
        events = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    events.append(json.loads(line))
        return replay(events)

    def save_new(self, session: Session) -> None:
        for event in session.events:
            self.append(session.id, event)


def replay(events: list[dict]) -> Session:
    """Reconstruct session state from its ordered event log.

    Issued designs are taken from the log verbatim; acquisition is never
    re-run, so replay is cheap and exact.
    """
    if not events or events[0]["type"] != "session_started":
        raise ValueError("event log must start with session_started")
    head = events[0]
    session = Session(
        id=head["session_id"], config=SessionConfig.from_dict(head["config"])
    )
    session.events = list(events)
    for event in events[1:]:
        if event["type"] == "design_issued":
            session.pending_design = validate_params(event["params"])
        elif event["type"] == "rating_received":
            resp = QuestionnaireResponse.from_dict(event["response"])
            design = session.pending_design
            if design is None:
                raise ValueError("rating_received without a pending design")
            session.history.append(
                IterationRecord(
                    design=design,
                    response=resp,
                    raw_scores=dict(event["raw_scores"]),
                    objectives=ObjectiveVector.from_sequence(event["objectives"]),
                )
            )
            session.pending_design = None
        elif event["type"] == "session_finished":
            session.stopped_early = bool(event["stopped_early"])
    return session
