"""Session service for the live bridge game.

A client joins over a websocket, steers the human car with per-tick
inputs, and plays a fixed number of episodes against the tit-for-tat
SDC.  The server owns the clock, the scoring, and the log: every tick it
stages the SDC's move, reports the public state, waits out the tick,
then applies whatever input arrived last (none means stay).  The SDC's
internal mode never crosses the wire; the horn is the only tell.

Episode records append to sessions/{id}/episodes.jsonl, durably and
before the client hears the episode result, so a crashed or dropped
session always resumes from the last completed episode boundary with the
same per-episode seeds it would have used uninterrupted.

Two tick drivers share all game logic: the wall-clock driver sleeps out
real ticks for live play, and the lockstep driver advances one tick per
received frame so scripted clients and tests run at full speed.
"""

from __future__ import annotations

import asyncio
import json
import os
import random
import secrets
from dataclasses import asdict
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .bridge import STARTS, BridgeConfig, BridgeConfigError, solve_bridge
from .driving import COOPERATIVE, next_mode
from .harness import (
    EXPERIMENTAL,
    EpisodeEngine,
    SessionRecord,
    episode_to_dict,
    read_episodes_jsonl,
)

FORWARD_WIRE = "forward"
STAY_WIRE = "stay"
BACKWARD_WIRE = "backward"

# wire spelling -> internal action
WIRE_ACTIONS = {FORWARD_WIRE: "forward", STAY_WIRE: "stay", BACKWARD_WIRE: "back"}

DEFAULT_EPISODES = 20


class ProtocolError(ValueError):
    """Client sent a frame the protocol cannot accept."""


class CapacityError(RuntimeError):
    """No room for another session."""


class Session:
    """One player's 20-episode run; sequential by construction.

    Episode seeds are drawn up front from the session seed, so an
    episode restarted after a disconnect replays with the seed it
    had the first time.
    """

    def __init__(self, session_id, cfg, theta, seed, solutions, episodes=DEFAULT_EPISODES):
        self.session_id = session_id
        self.cfg = cfg
        self.theta = theta
        self.seed = seed
        self.episodes_total = episodes
        rng = random.Random(seed)
        self.episode_seeds = [rng.randrange(2**32) for _ in range(episodes)]
        self.solutions = solutions
        self.mode = COOPERATIVE
        self.records: list = []
        self.engine: Optional[EpisodeEngine] = None
        self.latched: Optional[str] = None
        self.active = False

    @property
    def episode_index(self) -> int:
        return len(self.records)

    @property
    def done(self) -> bool:
        return len(self.records) >= self.episodes_total

    def cumulative_cents(self) -> int:
        return sum(record.human_cents for record in self.records)

    def start_episode(self) -> EpisodeEngine:
        k = self.episode_index
        self.engine = EpisodeEngine(
            self.mode,
            self.cfg,
            sdc_closer=(k % 2 == 0),
            seed=self.episode_seeds[k],
            episode_index=k,
            theta=self.theta,
            solutions=self.solutions,
        )
        self.latched = None
        return self.engine

    def abandon_episode(self) -> None:
        # a partial episode was never logged; it restarts from scratch
        self.engine = None
        self.latched = None

    def finish_episode(self):
        record = self.engine.record()
        self.records.append(record)
        self.mode = next_mode(self.engine.mode, record.verdict)
        self.engine = None
        self.latched = None
        return record

    def latch(self, frame: dict) -> None:
        """Last-write-wins input for the tick in flight.

        Frames for a different episode are stale chatter from around a
        boundary and are dropped; the tick number is advisory, since an
        input that misses its deadline simply lands on the next tick.
        """
        action = frame.get("action")
        if action not in WIRE_ACTIONS:
            raise ProtocolError(f"unknown action {action!r}")
        if frame.get("episode") != self.episode_index:
            return
        self.latched = WIRE_ACTIONS[action]

    def take_latch(self) -> str:
        action = self.latched if self.latched is not None else "stay"
        self.latched = None
        return action


class GameServer:
    """Owns sessions, solved policies, and the on-disk log layout."""

    def __init__(
        self,
        cfg: BridgeConfig,
        theta: int,
        log_dir,
        episodes: int = DEFAULT_EPISODES,
        max_sessions: int = 64,
        lockstep: bool = False,
        seed_base: Optional[int] = None,
    ):
        self.cfg = cfg
        self.theta = theta
        self.log_dir = Path(log_dir)
        self.episodes = episodes
        self.max_sessions = max_sessions
        self.lockstep = lockstep
        self.seed_base = seed_base
        self.counter = 0
        self.sessions: dict[str, Session] = {}
        self.solution_cache = {cfg: {start: solve_bridge(cfg, start) for start in STARTS}}

    def solutions_for(self, cfg: BridgeConfig) -> dict:
        if cfg not in self.solution_cache:
            self.solution_cache[cfg] = {start: solve_bridge(cfg, start) for start in STARTS}
        return self.solution_cache[cfg]

    def _next_seed(self) -> int:
        if self.seed_base is not None:
            return self.seed_base + self.counter
        return secrets.randbits(32)

    def create_session(self, overrides: Optional[dict] = None) -> Session:
        if len(self.sessions) >= self.max_sessions:
            raise CapacityError("capacity exceeded")
        cfg = self.cfg
        if overrides:
            cfg = BridgeConfig.from_dict({**asdict(self.cfg), **overrides})
        seed = self._next_seed()
        session_id = f"s{self.counter:04d}"
        self.counter += 1
        session = Session(
            session_id, cfg, self.theta, seed, self.solutions_for(cfg), self.episodes
        )
        self.sessions[session_id] = session
        self._write_meta(session)
        return session

    def resume_session(self, session_id) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            session = self._load_session(session_id)
        if session.active:
            raise ProtocolError(f"session {session_id} already has an active connection")
        session.abandon_episode()
        return session

    # --- disk layout: sessions/{id}/meta.json + episodes.jsonl ---

    def _session_dir(self, session_id) -> Path:
        return self.log_dir / "sessions" / session_id

    def _write_meta(self, session: Session) -> None:
        directory = self._session_dir(session.session_id)
        directory.mkdir(parents=True, exist_ok=True)
        meta = {
            "session_id": session.session_id,
            "seed": session.seed,
            "theta": session.theta,
            "episodes": session.episodes_total,
            "config": asdict(session.cfg),
        }
        with open(directory / "meta.json", "w") as handle:
            json.dump(meta, handle, sort_keys=True, indent=2)
            handle.write("\n")

    def _load_session(self, session_id) -> Session:
        directory = self._session_dir(session_id)
        meta_path = directory / "meta.json"
        if not meta_path.exists():
            raise ProtocolError(f"unknown session {session_id!r}")
        with open(meta_path) as handle:
            meta = json.load(handle)
        try:
            cfg = BridgeConfig.from_dict(meta["config"])
        except BridgeConfigError as exc:
            raise ProtocolError(f"session {session_id!r} has a corrupt config: {exc}") from exc
        session = Session(
            meta["session_id"],
            cfg,
            meta["theta"],
            meta["seed"],
            self.solutions_for(cfg),
            meta["episodes"],
        )
        log_path = directory / "episodes.jsonl"
        if log_path.exists():
            with open(log_path) as handle:
                session.records = list(read_episodes_jsonl(handle))
        mode = COOPERATIVE
        for record in session.records:
            mode = next_mode(mode, record.verdict)
        session.mode = mode
        self.sessions[session_id] = session
        return session

    def append_log(self, session: Session, record) -> None:
        """Durable append: the line is on disk before the client is told."""
        path = self._session_dir(session.session_id) / "episodes.jsonl"
        line = json.dumps(episode_to_dict(record), sort_keys=True, separators=(",", ":"))
        with open(path, "a") as handle:
            handle.write(line + "\n")
            handle.flush()
            os.fsync(handle.fileno())

    def as_session_record(self, session: Session) -> SessionRecord:
        return SessionRecord(
            group=EXPERIMENTAL,
            seed=session.seed,
            theta=session.theta,
            episodes=tuple(session.records),
        )


# --- wire messages ---


def state_message(session: Session, horn: bool) -> dict:
    live = session.engine.live
    cfg = session.cfg
    return {
        "type": "state",
        "episode": session.episode_index,
        "tick": live.tick,
        "sdc_cell": live.sdc_cell,
        "human_cell": live.human_cell,
        "horn": bool(horn),
        "elapsed_s": live.tick * cfg.tick_ms // 1000,
        "cumulative_cents": session.cumulative_cents(),
    }


def episode_end_message(record) -> dict:
    return {
        "type": "episode_end",
        "payoff_cents": record.human_cents,
        "bullied": record.verdict.bullied,
        "next_mode_visible": False,
    }


def session_end_message(session: Session) -> dict:
    payoffs = [record.human_cents for record in session.records]
    return {
        "type": "session_end",
        "summary": {
            "episodes": len(session.records),
            "payoffs": payoffs,
            "total_cents": sum(payoffs),
            "bullied_count": sum(1 for r in session.records if r.verdict.bullied),
        },
    }


def joined_message(session: Session) -> dict:
    return {
        "type": "joined",
        "session_id": session.session_id,
        "episode": session.episode_index,
        "episodes_total": session.episodes_total,
        "cumulative_cents": session.cumulative_cents(),
        "config": asdict(session.cfg),
    }


async def _drive_lockstep(ws: WebSocket, server: GameServer, session: Session) -> None:
    """One tick per received frame; input frames latch, sync frames pass."""
    while not session.done:
        engine = session.start_episode()
        while not engine.done:
            _, horn = engine.begin_tick()
            await ws.send_json(state_message(session, horn))
            frame = await ws.receive_json()
            kind = frame.get("type")
            if kind == "input":
                session.latch(frame)
            elif kind != "sync":
                raise ProtocolError(f"unexpected frame type {kind!r}")
            engine.complete_tick(session.take_latch())
        record = session.finish_episode()
        server.append_log(session, record)
        await ws.send_json(episode_end_message(record))
    await ws.send_json(session_end_message(session))


async def _drive_timed(ws: WebSocket, server: GameServer, session: Session) -> None:
    """Wall-clock ticks; a reader task latches inputs as they arrive."""
    disconnected = asyncio.Event()

    async def reader() -> None:
        try:
            while True:
                frame = await ws.receive_json()
                if frame.get("type") == "input":
                    try:
                        session.latch(frame)
                    except ProtocolError:
                        pass  # live play drops bad frames instead of dying
        except WebSocketDisconnect:
            disconnected.set()

    reader_task = asyncio.create_task(reader())
    try:
        while not session.done:
            engine = session.start_episode()
            while not engine.done:
                if disconnected.is_set():
                    session.abandon_episode()
                    return
                _, horn = engine.begin_tick()
                await ws.send_json(state_message(session, horn))
                await asyncio.sleep(session.cfg.tick_ms / 1000)
                engine.complete_tick(session.take_latch())
            record = session.finish_episode()
            server.append_log(session, record)
            await ws.send_json(episode_end_message(record))
        await ws.send_json(session_end_message(session))
    finally:
        reader_task.cancel()


def build_app(
    cfg: BridgeConfig = BridgeConfig(),
    theta: Optional[int] = None,
    log_dir="server-logs",
    episodes: int = DEFAULT_EPISODES,
    max_sessions: int = 64,
    lockstep: bool = False,
    seed_base: Optional[int] = None,
    static_dir=None,
) -> FastAPI:
    if theta is None:
        theta = cfg.theta
    server = GameServer(
        cfg,
        theta,
        log_dir,
        episodes=episodes,
        max_sessions=max_sessions,
        lockstep=lockstep,
        seed_base=seed_base,
    )
    app = FastAPI()
    app.state.game_server = server

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok"}

    @app.websocket("/ws")
    async def play(ws: WebSocket) -> None:
        await ws.accept()
        session = None
        try:
            hello = await ws.receive_json()
            kind = hello.get("type")
            if kind == "join":
                session = server.create_session(hello.get("config"))
            elif kind == "resume":
                session = server.resume_session(hello.get("session_id"))
            else:
                raise ProtocolError(f"expected join or resume, got {kind!r}")
            session.active = True
            await ws.send_json(joined_message(session))
            if server.lockstep:
                await _drive_lockstep(ws, server, session)
            else:
                await _drive_timed(ws, server, session)
        except (ProtocolError, BridgeConfigError, CapacityError) as exc:
            await ws.send_json({"type": "error", "reason": str(exc)})
            await ws.close()
            return
        except WebSocketDisconnect:
            if session is not None:
                session.abandon_episode()
            return
        finally:
            if session is not None:
                session.active = False
        try:
            await ws.close()
        except RuntimeError:
            pass  # client hung up right after the final message

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="web")
    else:

        @app.get("/")
        async def placeholder() -> PlainTextResponse:
            return PlainTextResponse(
                "stackel game server is running; web client bundle not built\n"
            )

    return app
