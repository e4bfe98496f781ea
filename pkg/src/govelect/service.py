"""HTTP demo service: guided election sessions plus one-shot file tallies.

The demo flow creates a session (election, then ballots one voter at a
time, capped), and tallies on demand; the file flow tallies a combined
upload in one stateless request with no voter cap. Both flows produce
ResultsFile bytes from the same tally and checker code, so equal logical
inputs yield byte-identical responses.

Configuration comes from the environment: VOTER_CAP, SESSION_TTL_SECONDS,
MAX_BODY_BYTES, WEBAPP_DIR (static assets to serve at /), SNAPSHOT_PATH
(persist sessions across restarts), BIND_ADDR (used by the CLI).
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass
from typing import Any, Mapping

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool
from starlette.exceptions import HTTPException as StarletteHTTPException
from starlette.staticfiles import StaticFiles

from . import ballots
from .model import (
    ApprovalProfile,
    Election,
    ElectionError,
    Voter,
    election_to_data,
    validate_election,
    validate_voter,
)
from .oracle import check_gjr
from .tally import greedy_pav

SCHEMA_VERSION = ballots.SCHEMA_VERSION


@dataclass(frozen=True)
class ServiceConfig:
    voter_cap: int = 200
    session_ttl_seconds: float = 86400.0
    max_body_bytes: int = 16 * 1024 * 1024
    webapp_dir: str | None = None
    snapshot_path: str | None = None

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        return cls(
            voter_cap=int(env.get("VOTER_CAP", cls.voter_cap)),
            session_ttl_seconds=float(
                env.get("SESSION_TTL_SECONDS", cls.session_ttl_seconds)
            ),
            max_body_bytes=int(env.get("MAX_BODY_BYTES", cls.max_body_bytes)),
            webapp_dir=env.get("WEBAPP_DIR") or None,
            snapshot_path=env.get("SNAPSHOT_PATH") or None,
        )


class ApiError(Exception):
    """An error with a fixed HTTP status and machine-readable code."""

    def __init__(
        self,
        status: int,
        code: str,
        message: str,
        location: str | None = None,
    ):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.location = location


class _Session:
    def __init__(self, election: Election, created_at: float):
        self.election = election
        self.created_at = created_at
        self.lock = threading.Lock()
        # voter id -> approvals; insertion order is ballot submission order
        self.voters: dict[str, Mapping[str, frozenset[str]]] = {}
        self.cached_results: bytes | None = None


class SessionStore:
    """In-memory sessions with TTL expiry; safe for concurrent handlers.

    Mutations within one session serialize on the session lock
    (last-writer-wins per voter id); tallies snapshot the profile under
    that lock, so concurrent ballot posts never produce a torn read.
    """

    def __init__(self, config: ServiceConfig):
        self.config = config
        self._mutex = threading.Lock()
        self._sessions: dict[str, _Session] = {}

    def _expired(self, session: _Session, now: float) -> bool:
        return now - session.created_at > self.config.session_ttl_seconds

    def sweep(self, now: float | None = None) -> None:
        now = time.time() if now is None else now
        with self._mutex:
            for sid in [
                sid for sid, s in self._sessions.items() if self._expired(s, now)
            ]:
                del self._sessions[sid]

    def create(self, election: Election) -> str:
        self.sweep()
        session_id = secrets.token_urlsafe(16)
        with self._mutex:
            self._sessions[session_id] = _Session(election, time.time())
        return session_id

    def get(self, session_id: str) -> _Session:
        with self._mutex:
            session = self._sessions.get(session_id)
            if session is not None and self._expired(session, time.time()):
                del self._sessions[session_id]
                session = None
        if session is None:
            raise ApiError(404, "UnknownSession", f"no session {session_id!r}")
        return session

    def upsert_ballot(self, session_id: str, voter_data: Mapping[str, Any]) -> int:
        session = self.get(session_id)
        voter = validate_voter(session.election, voter_data)
        with session.lock:
            if (
                voter.id not in session.voters
                and len(session.voters) >= self.config.voter_cap
            ):
                raise ApiError(
                    409,
                    "VoterLimitReached",
                    f"demo voter cap of {self.config.voter_cap} reached",
                )
            session.voters[voter.id] = voter.approvals
            session.cached_results = None
            return len(session.voters)

    def tally(self, session_id: str) -> bytes:
        session = self.get(session_id)
        with session.lock:
            if session.cached_results is not None:
                return session.cached_results
            if not session.voters:
                raise ApiError(409, "NoBallots", "no ballots submitted yet")
            profile = ApprovalProfile(
                tuple(Voter(vid, approvals) for vid, approvals in session.voters.items())
            )
            result = _tally_bytes(session.election, profile)
            session.cached_results = result
            return result

    def save(self, path: str) -> None:
        with self._mutex:
            doc = {
                sid: {
                    "election": election_to_data(s.election),
                    "voters": [
                        {"voter_id": vid, "approvals": {o: sorted(c) for o, c in a.items()}}
                        for vid, a in s.voters.items()
                    ],
                    "created_at": s.created_at,
                }
                for sid, s in self._sessions.items()
            }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)

    def load(self, path: str) -> None:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        now = time.time()
        for sid, entry in doc.items():
            try:
                election = validate_election(entry["election"])
                session = _Session(election, float(entry["created_at"]))
                for voter_data in entry["voters"]:
                    voter = validate_voter(election, voter_data)
                    session.voters[voter.id] = voter.approvals
            except (ElectionError, KeyError, TypeError, ValueError):
                continue  # a broken snapshot entry is not worth failing startup
            if not self._expired(session, now):
                with self._mutex:
                    self._sessions[sid] = session


def _tally_bytes(election: Election, profile: ApprovalProfile) -> bytes:
    committee, trail = greedy_pav(election, profile)
    violations = check_gjr(election, profile, committee)
    return ballots.write_results(committee, trail, violations)


def _error_body(code: str, message: str, location: str | None = None) -> dict:
    error: dict[str, Any] = {"code": code, "message": message}
    if location is not None:
        error["location"] = location
    return {"schema_version": SCHEMA_VERSION, "error": error}


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    store = SessionStore(config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if config.snapshot_path and os.path.exists(config.snapshot_path):
            store.load(config.snapshot_path)
        yield
        if config.snapshot_path:
            store.save(config.snapshot_path)

    app = FastAPI(title="govelect", lifespan=lifespan)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            _error_body(exc.code, exc.message, exc.location), status_code=exc.status
        )

    @app.exception_handler(ElectionError)
    async def handle_validation_error(
        request: Request, exc: ElectionError
    ) -> JSONResponse:
        return JSONResponse(
            _error_body(exc.code, exc.message, exc.location), status_code=400
        )

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_exception(
        request: Request, exc: StarletteHTTPException
    ) -> JSONResponse:
        codes = {404: "NotFound", 405: "MethodNotAllowed"}
        return JSONResponse(
            _error_body(codes.get(exc.status_code, "HttpError"), str(exc.detail)),
            status_code=exc.status_code,
            headers=getattr(exc, "headers", None),
        )

    # past this much over the limit, stop draining and let the socket drop
    drain_cap = config.max_body_bytes * 2 + 1_048_576

    async def drain(request: Request) -> None:
        # consume what the client is still sending so the 413 response can
        # actually reach it instead of dying on a broken pipe
        consumed = 0
        while consumed <= drain_cap:
            message = await request.receive()
            if message["type"] != "http.request":
                return
            consumed += len(message.get("body", b""))
            if not message.get("more_body", False):
                return

    async def read_body(request: Request) -> bytes:
        declared = request.headers.get("content-length")
        if declared is not None and declared.isdigit():
            if int(declared) > config.max_body_bytes:
                await drain(request)
                raise ApiError(413, "BodyTooLarge", "request body over size limit")
        chunks: list[bytes] = []
        size = 0
        while True:
            message = await request.receive()
            if message["type"] == "http.disconnect":
                raise ApiError(400, "ClientDisconnect", "client went away mid-request")
            chunk = message.get("body", b"")
            size += len(chunk)
            if size > config.max_body_bytes:
                await drain(request)
                raise ApiError(413, "BodyTooLarge", "request body over size limit")
            chunks.append(chunk)
            if not message.get("more_body", False):
                return b"".join(chunks)

    def parse_json_body(body: bytes, what: str) -> Any:
        return ballots._ensure_object(ballots._load_json(body, what))

    @app.post("/api/elections", status_code=201)
    async def create_election(request: Request) -> dict:
        body = await read_body(request)
        election = validate_election(parse_json_body(body, "election document"))
        session_id = store.create(election)
        return {"schema_version": SCHEMA_VERSION, "session_id": session_id}

    @app.get("/api/elections/{session_id}")
    async def get_election(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            n = len(session.voters)
        return {
            "schema_version": SCHEMA_VERSION,
            "election": election_to_data(session.election),
            "n": n,
        }

    @app.post("/api/elections/{session_id}/ballots")
    async def submit_ballot(session_id: str, request: Request) -> dict:
        body = await read_body(request)
        voter_data = parse_json_body(body, "ballot document")
        n = await run_in_threadpool(store.upsert_ballot, session_id, voter_data)
        return {"schema_version": SCHEMA_VERSION, "n": n}

    @app.post("/api/elections/{session_id}/tally")
    async def tally_session(session_id: str) -> Response:
        result = await run_in_threadpool(store.tally, session_id)
        return Response(content=result, media_type="application/json")

    @app.post("/api/tally-file")
    async def tally_file(request: Request) -> Response:
        body = await read_body(request)

        def work() -> bytes:
            election, profile = ballots.parse_combined(body)
            return _tally_bytes(election, profile)

        result = await run_in_threadpool(work)
        return Response(content=result, media_type="application/json")

    if config.webapp_dir and os.path.isdir(config.webapp_dir):
        app.mount(
            "/", StaticFiles(directory=config.webapp_dir, html=True), name="webapp"
        )

    return app
