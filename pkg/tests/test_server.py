"""Wire protocol and session service behavior.

The heavy lifting is transcript equivalence: a scripted client driving
the websocket must leave behind byte-identical episode logs to the
in-process harness running the matching human model, because both sides
share the same engine and seed derivation.
"""

import io
import json

import pytest
from fastapi.testclient import TestClient

from stackel.bridge import BridgeConfig
from stackel.harness import (
    EXPERIMENTAL,
    AlwaysBullyHuman,
    ScriptedHuman,
    export_episodes_jsonl,
    run_session,
)
from stackel.server import build_app

CFG = BridgeConfig()

STATE_FIELDS = {
    "type",
    "episode",
    "tick",
    "sdc_cell",
    "human_cell",
    "horn",
    "elapsed_s",
    "cumulative_cents",
}


def lockstep_app(tmp_path, episodes=4, seed_base=5, **kwargs):
    return build_app(
        cfg=CFG,
        theta=2,
        log_dir=tmp_path,
        episodes=episodes,
        lockstep=True,
        seed_base=seed_base,
        **kwargs,
    )


def drive(ws, action_for):
    """Feed the session to completion; returns all received frames."""
    frames = []
    while True:
        msg = ws.receive_json()
        frames.append(msg)
        if msg["type"] == "state":
            action = action_for(msg)
            if action is None:
                ws.send_json({"type": "sync"})
            else:
                ws.send_json(
                    {
                        "type": "input",
                        "episode": msg["episode"],
                        "tick": msg["tick"],
                        "action": action,
                    }
                )
        elif msg["type"] == "session_end":
            return frames
        elif msg["type"] == "error":
            return frames


def play_full_session(app, action_for):
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "join"})
            joined = ws.receive_json()
            frames = drive(ws, action_for)
    return joined, frames


def harness_twin(human, episodes=4, seed=5):
    session = run_session(human, EXPERIMENTAL, episodes=episodes, cfg=CFG, theta=2, seed=seed)
    buffer = io.StringIO()
    export_episodes_jsonl(session.episodes, buffer)
    return session, buffer.getvalue()


def test_healthz(tmp_path):
    with TestClient(lockstep_app(tmp_path)) as client:
        response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_join_reports_session_and_config(tmp_path):
    app = lockstep_app(tmp_path)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "join"})
            joined = ws.receive_json()
            assert joined["type"] == "joined"
            assert joined["session_id"] == "s0000"
            assert joined["episode"] == 0
            assert joined["config"]["bridge_cells"] == CFG.bridge_cells
            first = ws.receive_json()
            assert set(first) == STATE_FIELDS
            assert first["episode"] == 0 and first["tick"] == 0


def test_transcript_equivalence_always_forward(tmp_path):
    app = lockstep_app(tmp_path)
    joined, frames = play_full_session(app, lambda msg: "forward")
    _, expected = harness_twin(AlwaysBullyHuman())
    logged = (tmp_path / "sessions" / joined["session_id"] / "episodes.jsonl").read_text()
    assert logged == expected

    ends = [f for f in frames if f["type"] == "episode_end"]
    twin, _ = harness_twin(AlwaysBullyHuman())
    assert [f["payoff_cents"] for f in ends] == [r.human_cents for r in twin.episodes]
    assert [f["bullied"] for f in ends] == [r.verdict.bullied for r in twin.episodes]
    summary = frames[-1]["summary"]
    assert summary["payoffs"] == [r.human_cents for r in twin.episodes]
    assert summary["total_cents"] == sum(r.human_cents for r in twin.episodes)


def test_transcript_equivalence_missing_inputs_mean_stay(tmp_path):
    app = lockstep_app(tmp_path, episodes=2)
    joined, _ = play_full_session(app, lambda msg: None)
    _, expected = harness_twin(ScriptedHuman(()), episodes=2)
    logged = (tmp_path / "sessions" / joined["session_id"] / "episodes.jsonl").read_text()
    assert logged == expected


def test_transcript_equivalence_backward_maps_to_back(tmp_path):
    script = ["forward", "forward", "forward", "backward", "backward"]

    def action_for(msg):
        if msg["tick"] < len(script):
            return script[msg["tick"]]
        return "stay"

    app = lockstep_app(tmp_path, episodes=1)
    joined, _ = play_full_session(app, action_for)
    twin_script = ["forward", "forward", "forward", "back", "back"]
    _, expected = harness_twin(ScriptedHuman(twin_script), episodes=1)
    logged = (tmp_path / "sessions" / joined["session_id"] / "episodes.jsonl").read_text()
    assert logged == expected


def test_mode_never_crosses_the_wire(tmp_path):
    app = lockstep_app(tmp_path)
    joined, frames = play_full_session(app, lambda msg: "forward")

    def keys_of(obj):
        if isinstance(obj, dict):
            for key, value in obj.items():
                yield key
                yield from keys_of(value)
        elif isinstance(obj, list):
            for value in obj:
                yield from keys_of(value)

    for frame in [joined] + frames:
        assert "mode" not in set(keys_of(frame))
    ends = [f for f in frames if f["type"] == "episode_end"]
    assert ends and all(f["next_mode_visible"] is False for f in ends)
    # the human hears the punishment, it just is not named: after the
    # bullied opening episode the horn is on from the very first tick
    second_episode_start = next(
        f for f in frames if f["type"] == "state" and f["episode"] == 1 and f["tick"] == 0
    )
    assert second_episode_start["horn"] is True


def test_log_is_on_disk_before_episode_end_arrives(tmp_path):
    app = lockstep_app(tmp_path, episodes=2)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "join"})
            joined = ws.receive_json()
            log_path = tmp_path / "sessions" / joined["session_id"] / "episodes.jsonl"
            seen_ends = 0
            while True:
                msg = ws.receive_json()
                if msg["type"] == "state":
                    ws.send_json({"type": "sync"})
                elif msg["type"] == "episode_end":
                    seen_ends += 1
                    lines = log_path.read_text().splitlines()
                    assert len(lines) == seen_ends
                elif msg["type"] == "session_end":
                    break


def test_resume_restarts_the_interrupted_episode(tmp_path):
    full_dir = tmp_path / "full"
    resumed_dir = tmp_path / "resumed"

    app = lockstep_app(full_dir, episodes=3, seed_base=9)
    joined, _ = play_full_session(app, lambda msg: "forward")
    expected = (full_dir / "sessions" / joined["session_id"] / "episodes.jsonl").read_text()

    app = lockstep_app(resumed_dir, episodes=3, seed_base=9)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "join"})
            sid = ws.receive_json()["session_id"]
            ends = 0
            ticks_into_current = 0
            while True:
                msg = ws.receive_json()
                if msg["type"] == "state":
                    if ends == 2:
                        ticks_into_current += 1
                        if ticks_into_current == 4:
                            break  # vanish mid-episode
                    ws.send_json(
                        {
                            "type": "input",
                            "episode": msg["episode"],
                            "tick": msg["tick"],
                            "action": "forward",
                        }
                    )
                elif msg["type"] == "episode_end":
                    ends += 1
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "resume", "session_id": sid})
            joined = ws.receive_json()
            assert joined["type"] == "joined"
            assert joined["episode"] == 2  # two logged, partial third discarded
            drive(ws, lambda msg: "forward")
    resumed = (resumed_dir / "sessions" / sid / "episodes.jsonl").read_text()
    assert resumed == expected


def test_resume_survives_a_server_restart(tmp_path):
    app = lockstep_app(tmp_path, episodes=2, seed_base=9)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "join"})
            sid = ws.receive_json()["session_id"]
            while True:
                msg = ws.receive_json()
                if msg["type"] == "state":
                    ws.send_json({"type": "sync"})
                elif msg["type"] == "episode_end":
                    break  # one episode logged, then drop the connection

    fresh = lockstep_app(tmp_path, episodes=2, seed_base=9)
    with TestClient(fresh) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "resume", "session_id": sid})
            joined = ws.receive_json()
            assert joined["episode"] == 1
            frames = drive(ws, lambda msg: None)
    assert frames[-1]["type"] == "session_end"
    assert frames[-1]["summary"]["episodes"] == 2


def test_resume_unknown_session_errors(tmp_path):
    with TestClient(lockstep_app(tmp_path)) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "resume", "session_id": "nope"})
            msg = ws.receive_json()
    assert msg["type"] == "error"
    assert "unknown session" in msg["reason"]


def test_resume_while_active_errors(tmp_path):
    app = lockstep_app(tmp_path)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as first:
            first.send_json({"type": "join"})
            sid = first.receive_json()["session_id"]
            first.receive_json()  # leave the first tick pending
            with client.websocket_connect("/ws") as second:
                second.send_json({"type": "resume", "session_id": sid})
                msg = second.receive_json()
    assert msg["type"] == "error"
    assert "active connection" in msg["reason"]


def test_capacity_limit(tmp_path):
    app = lockstep_app(tmp_path, max_sessions=1)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as first:
            first.send_json({"type": "join"})
            assert first.receive_json()["type"] == "joined"
            with client.websocket_connect("/ws") as second:
                second.send_json({"type": "join"})
                msg = second.receive_json()
    assert msg["type"] == "error"
    assert "capacity" in msg["reason"]


def test_unknown_action_is_a_protocol_error(tmp_path):
    app = lockstep_app(tmp_path)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "join"})
            ws.receive_json()
            state = ws.receive_json()
            ws.send_json(
                {
                    "type": "input",
                    "episode": state["episode"],
                    "tick": state["tick"],
                    "action": "up",
                }
            )
            msg = ws.receive_json()
    assert msg["type"] == "error"
    assert "unknown action" in msg["reason"]


def test_stale_episode_inputs_are_ignored(tmp_path):
    app = lockstep_app(tmp_path, episodes=1)

    def action_for(msg):
        return "forward"

    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "join"})
            joined = ws.receive_json()
            state = ws.receive_json()
            # claims a different episode: latch must not take it
            ws.send_json(
                {"type": "input", "episode": 7, "tick": state["tick"], "action": "forward"}
            )
            nxt = ws.receive_json()
            assert nxt["type"] == "state" and nxt["tick"] == 1
            assert nxt["human_cell"] == state["human_cell"]  # stayed put
            ws.send_json(
                {"type": "input", "episode": nxt["episode"], "tick": nxt["tick"], "action": "forward"}
            )
            frames = drive(ws, action_for)
    assert frames[-1]["type"] == "session_end"


def test_timed_mode_ticks_without_input(tmp_path):
    app = build_app(
        cfg=CFG, theta=2, log_dir=tmp_path, episodes=1, lockstep=False, seed_base=1
    )
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "join", "config": {"tick_ms": 50}})
            joined = ws.receive_json()
            assert joined["config"]["tick_ms"] == 50
            ticks = [ws.receive_json()["tick"] for _ in range(3)]
    assert ticks == [0, 1, 2]


def test_placeholder_page_without_bundle(tmp_path):
    with TestClient(lockstep_app(tmp_path)) as client:
        response = client.get("/")
    assert response.status_code == 200
    assert "bundle not built" in response.text


def test_static_bundle_is_served_when_present(tmp_path):
    bundle = tmp_path / "dist"
    bundle.mkdir()
    (bundle / "index.html").write_text("<html>bridge</html>")
    app = build_app(
        cfg=CFG, theta=2, log_dir=tmp_path / "logs", lockstep=True, static_dir=bundle
    )
    with TestClient(app) as client:
        response = client.get("/")
    assert response.status_code == 200
    assert "bridge" in response.text
