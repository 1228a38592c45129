"""Simulated negotiation sessions between the SDC and a modeled human.

A session is a fixed number of episodes with the two cars swapping the
close start each episode.  The control group drives cautiously no
matter what; the experimental group answers a bullied verdict with one
punishing episode and forgives as soon as the human behaves.  Human
models live across the whole session, so behavior in one episode can
change what the model does in the next.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from typing import Optional

from .bridge import (
    BACK,
    CEDE,
    FORWARD,
    HUMAN_CLOSE,
    SDC_CLOSE,
    STARTS,
    STAY,
    BridgeConfig,
    solve_bridge,
)
from .driving import (
    COOPERATIVE,
    PUNISHING,
    BullyVerdict,
    PunishingDriver,
    advance,
    cautious_action,
    cautious_policy,
    detect_bully,
    episode_reward,
    horn_signal,
    next_mode,
    start_state,
)

CONTROL = "control"
EXPERIMENTAL = "experimental"
GROUPS = (CONTROL, EXPERIMENTAL)


@dataclass(frozen=True, slots=True)
class TickRow:
    tick: int
    sdc_cell: int
    human_cell: int
    human_action: str
    sdc_action: str
    horn: bool


@dataclass(frozen=True, slots=True)
class EpisodeRecord:
    episode_index: int
    start_assignment: str
    mode: str
    rng_seed: int
    ticks: tuple
    sdc_finish_time_s: Optional[int]
    human_finish_time_s: Optional[int]
    sdc_cents: int
    human_cents: int
    verdict: BullyVerdict


@dataclass(frozen=True, slots=True)
class SessionRecord:
    group: str
    seed: int
    theta: Optional[int]
    episodes: tuple

    def bullied_episodes(self) -> int:
        return sum(1 for ep in self.episodes if ep.verdict.bullied)


class AlwaysBullyHuman:
    """Pushes forward every tick regardless of anything."""

    def begin_episode(self, index: int, right_of_way: bool, driver) -> None:
        pass

    def act(self, live, horn: bool) -> str:
        return FORWARD


class AlwaysFairHuman:
    """Cautious driving from the human seat."""

    def begin_episode(self, index: int, right_of_way: bool, driver) -> None:
        self.right_of_way = right_of_way

    def act(self, live, horn: bool) -> str:
        return cautious_action(
            live.cfg, live.human_cell, live.sdc_cell, live.tick, self.right_of_way
        )


class ScriptedHuman:
    """Plays a fixed per-tick script, then stays put."""

    def __init__(self, actions):
        self.actions = tuple(actions)

    def begin_episode(self, index: int, right_of_way: bool, driver) -> None:
        pass

    def act(self, live, horn: bool) -> str:
        if live.tick < len(self.actions):
            return self.actions[live.tick]
        return STAY


class AdaptiveHuman:
    """Bullies until it has heard the punishing horn open enough episodes.

    The wall-to-wall horn of a punishing episode is already sounding at
    tick zero, before the cars can even meet; a cooperative horn never
    is.  Hearing it at an episode's first tick is therefore how the
    model tells real punishment from in-traffic protest.
    """

    def __init__(self, threshold: int = 1):
        if threshold < 1:
            raise ValueError("threshold must be at least 1")
        self.threshold = threshold
        self.punished = 0

    def begin_episode(self, index: int, right_of_way: bool, driver) -> None:
        self.right_of_way = right_of_way

    def act(self, live, horn: bool) -> str:
        if live.tick == 0 and horn:
            self.punished += 1
        if self.punished >= self.threshold:
            return cautious_action(
                live.cfg, live.human_cell, live.sdc_cell, live.tick, self.right_of_way
            )
        return FORWARD


class BestResponseHuman:
    """Follows the punisher's plan when punished, presses its luck when not.

    Under punishment the model shadows the plan cursor: each round it
    reads the action the plan expects of the human and realizes it on
    cells.  Once the plan has run its course it falls back to cautious
    driving.  Against a cooperative controller it simply takes the
    bridge, which a cautious opponent will concede.
    """

    def begin_episode(self, index: int, right_of_way: bool, driver) -> None:
        self.right_of_way = right_of_way
        self.driver = driver
        self.desired = None
        self.on_plan = driver is not None

    def act(self, live, horn: bool) -> str:
        cfg = live.cfg
        if live.human_cell >= cfg.finish_progress:
            return STAY
        if self.on_plan:
            cursor = self.driver.cursor
            if cursor.done or cursor.threat:
                self.on_plan = False
            elif live.tick % cfg.ticks_per_round == 0:
                current = cfg.abstract_position(live.human_cell)
                if self.desired is None:
                    self.desired = current
                expected = cursor.expected_human_action()
                if expected == FORWARD:
                    self.desired = min(3, self.desired + 1)
                elif expected == BACK:
                    self.desired = max(0, self.desired - 1)
                # stay and cede both mean: hold position
        if self.on_plan and self.desired is not None:
            current = cfg.abstract_position(live.human_cell)
            if self.desired > current:
                return FORWARD
            if self.desired < current:
                return BACK
            return STAY
        if self.driver is not None:
            return cautious_action(
                live.cfg, live.human_cell, live.sdc_cell, live.tick, self.right_of_way
            )
        return FORWARD


def make_human(spec: str):
    """Build a human model from a CLI-style spec string."""
    kind, _, arg = spec.partition(":")
    if kind == "always-bully":
        return AlwaysBullyHuman()
    if kind == "always-fair":
        return AlwaysFairHuman()
    if kind == "adaptive":
        return AdaptiveHuman(int(arg) if arg else 1)
    if kind == "best-response":
        return BestResponseHuman()
    if kind == "scripted":
        actions = [a for a in arg.split(",") if a]
        allowed = {FORWARD, STAY, BACK, CEDE}
        bad = [a for a in actions if a not in allowed]
        if bad:
            raise ValueError(f"unknown scripted actions: {bad}")
        return ScriptedHuman(actions)
    raise ValueError(f"unknown human model: {spec!r}")


class EpisodeEngine:
    """One episode advanced tick by tick.

    The harness and the game server share this loop so a wire-driven
    episode and a model-driven one cannot drift apart.  Each tick is a
    two-step handshake: begin_tick stages the SDC's action and the horn
    (idempotently, so peeking does not resample the plan), then
    complete_tick applies it together with whatever the human chose.
    """

    def __init__(
        self,
        mode: str,
        cfg: BridgeConfig,
        sdc_closer: bool,
        seed: int,
        episode_index: int = 0,
        theta: Optional[int] = None,
        solutions: Optional[dict] = None,
    ):
        self.mode = mode
        self.cfg = cfg
        self.episode_index = episode_index
        self.seed = seed
        self.start = SDC_CLOSE if sdc_closer else HUMAN_CLOSE
        self.rng = random.Random(seed)
        self.driver = None
        if mode == PUNISHING:
            solution = (solutions or {}).get(self.start)
            if solution is None:
                solution = solve_bridge(cfg, self.start)
            self.driver = PunishingDriver(solution, theta=theta, rng=self.rng)
        self.live = start_state(cfg, sdc_closer)
        self.limit = cfg.round_limit_s * 1000 // cfg.tick_ms
        self.rows = []
        self.being_bullied = False
        self._staged = None

    @property
    def done(self) -> bool:
        if self.live.tick >= self.limit:
            return True
        return (
            self.live.sdc_finish_tick is not None
            and self.live.human_finish_tick is not None
        )

    def begin_tick(self):
        if self._staged is None:
            if self.driver is not None:
                sdc_action = self.driver.action(self.live)
            else:
                sdc_action = cautious_policy(self.live, right_of_way=self.start == SDC_CLOSE)
            horn = horn_signal(self.mode, self.live, self.being_bullied)
            self._staged = (sdc_action, horn)
        return self._staged

    def complete_tick(self, human_action: str) -> None:
        sdc_action, horn = self.begin_tick()
        self._staged = None
        live = self.live
        self.rows.append(
            TickRow(
                live.tick, live.sdc_cell, live.human_cell, human_action, sdc_action, horn
            )
        )
        nxt = advance(live, sdc_action, human_action)
        if nxt.sdc_cell < live.sdc_cell and live.sdc_on_bridge() and live.human_on_bridge():
            self.being_bullied = True
        if self.being_bullied and not nxt.human_on_bridge():
            self.being_bullied = False
        self.live = nxt

    def record(self) -> EpisodeRecord:
        s_time = None if self.live.sdc_finish_tick is None else self.live.sdc_finish_tick + 1
        h_time = None if self.live.human_finish_tick is None else self.live.human_finish_tick + 1
        return EpisodeRecord(
            episode_index=self.episode_index,
            start_assignment=self.start,
            mode=self.mode,
            rng_seed=self.seed,
            ticks=tuple(self.rows),
            sdc_finish_time_s=s_time,
            human_finish_time_s=h_time,
            sdc_cents=episode_reward(s_time, self.cfg),
            human_cents=episode_reward(h_time, self.cfg),
            verdict=detect_bully(_VerdictView(self.start, self.rows, s_time, h_time), self.cfg),
        )


def run_episode(
    human,
    mode: str,
    cfg: BridgeConfig,
    sdc_closer: bool,
    seed: int,
    episode_index: int = 0,
    theta: Optional[int] = None,
    solutions: Optional[dict] = None,
) -> EpisodeRecord:
    engine = EpisodeEngine(mode, cfg, sdc_closer, seed, episode_index, theta, solutions)
    human.begin_episode(episode_index, right_of_way=not sdc_closer, driver=engine.driver)
    while not engine.done:
        _, horn = engine.begin_tick()
        engine.complete_tick(human.act(engine.live, horn))
    return engine.record()


class _VerdictView:
    """Adapter so detect_bully can read a record still under construction."""

    def __init__(self, start, ticks, s_time, h_time):
        self.start_assignment = start
        self.ticks = ticks
        self.sdc_finish_time_s = s_time
        self.human_finish_time_s = h_time


def run_session(
    human,
    group: str,
    episodes: int = 20,
    cfg: BridgeConfig = BridgeConfig(),
    theta: Optional[int] = None,
    seed: int = 0,
) -> SessionRecord:
    """Alternating-start episodes with the mode automaton applied per group."""
    if group not in GROUPS:
        raise ValueError(f"unknown group: {group!r}")
    solutions = {start: solve_bridge(cfg, start) for start in STARTS}
    session_rng = random.Random(seed)
    mode = COOPERATIVE
    records = []
    for k in range(episodes):
        ep_seed = session_rng.randrange(2**32)
        use_mode = COOPERATIVE if group == CONTROL else mode
        record = run_episode(
            human,
            use_mode,
            cfg,
            sdc_closer=(k % 2 == 0),
            seed=ep_seed,
            episode_index=k,
            theta=theta,
            solutions=solutions,
        )
        records.append(record)
        mode = next_mode(use_mode, record.verdict)
    return SessionRecord(group=group, seed=seed, theta=theta, episodes=tuple(records))


@dataclass(frozen=True, slots=True)
class PersistenceCurve:
    """fractions[k-1] is the share of engaged sessions with more than k
    bullied episodes, for k = 1 up to the largest observed count."""

    fractions: tuple

    def fraction_above(self, k: int) -> float:
        if k < 1:
            raise ValueError("k starts at 1")
        if k > len(self.fractions):
            return 0.0
        return self.fractions[k - 1]


def bully_persistence(sessions) -> PersistenceCurve:
    """Dropoff curve over sessions whose human bullied at least once.

    Sessions with no bullying at all say nothing about persistence and
    are left out entirely.
    """
    counts = [s.bullied_episodes() for s in sessions]
    engaged = [c for c in counts if c >= 1]
    if not engaged:
        raise ValueError("no session contains a bullied episode")
    top = max(engaged)
    fractions = tuple(
        sum(1 for c in engaged if c > k) / len(engaged) for k in range(1, top + 1)
    )
    return PersistenceCurve(fractions)


def episode_to_dict(record: EpisodeRecord) -> dict:
    data = asdict(record)
    data["ticks"] = [asdict(row) for row in record.ticks]
    data["verdict"] = {"bullied": record.verdict.bullied, "condition": record.verdict.condition}
    return data


def episode_from_dict(data: dict) -> EpisodeRecord:
    verdict = BullyVerdict(data["verdict"]["bullied"], data["verdict"]["condition"])
    ticks = tuple(TickRow(**row) for row in data["ticks"])
    fields = {
        k: data[k]
        for k in (
            "episode_index",
            "start_assignment",
            "mode",
            "rng_seed",
            "sdc_finish_time_s",
            "human_finish_time_s",
            "sdc_cents",
            "human_cents",
        )
    }
    return EpisodeRecord(ticks=ticks, verdict=verdict, **fields)


def export_episodes_jsonl(records, fp) -> None:
    """One canonical JSON object per line; stable bytes for stable inputs."""
    for record in records:
        line = json.dumps(episode_to_dict(record), sort_keys=True, separators=(",", ":"))
        fp.write(line + "\n")


def read_episodes_jsonl(fp):
    return [episode_from_dict(json.loads(line)) for line in fp if line.strip()]
