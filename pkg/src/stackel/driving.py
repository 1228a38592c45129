"""Live grid play: cell-level driving on top of the solved abstraction.

Both cars move every tick, at most one cell, the SDC along progress
cells 0..finish and the human the same way from the opposite end.  Only
the bridge is one lane: approach and exit cells never conflict.  The
engine resolves simultaneous proposals so that two cars never share a
bridge cell and never drive through each other; a blocked car simply
stays.

Policies are written from the SDC's seat.  The cautious controller
follows the right of way and backs off the bridge rather than stand
nose to nose.  The punishing controller replays a solved commitment:
one abstract ply per round of ticks_per_round ticks, the human's reply
read off its cell transition at each round boundary, and any deviation
from the plan answered with the minimax threat the solver priced in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .bridge import (
    BACK,
    BEFORE,
    CEDE,
    FINISH,
    FORWARD,
    ON,
    STAY,
    BridgeConfig,
    BridgeSolution,
)

COOPERATIVE = "cooperative"
PUNISHING = "punishing"

FORCED_BACKOFF = "forced-backoff-finish-first"
BLOCKED_TIMEOUT = "blocked-timeout"

# how long a polite driver without the right of way waits at the bridge
# mouth for the entitled car to claim it, before going anyway
PATIENCE_TICKS = 6


@dataclass(frozen=True, slots=True)
class LiveState:
    """One tick of the live world, in each car's own progress frame."""

    cfg: BridgeConfig
    sdc_cell: int
    human_cell: int
    tick: int = 0
    sdc_finish_tick: Optional[int] = None
    human_finish_tick: Optional[int] = None

    def sdc_on_bridge(self) -> bool:
        return self.cfg.approach_cells <= self.sdc_cell < self.cfg.finish_progress

    def human_on_bridge(self) -> bool:
        return self.cfg.approach_cells <= self.human_cell < self.cfg.finish_progress


def start_state(cfg: BridgeConfig, sdc_closer: bool) -> LiveState:
    if sdc_closer:
        return LiveState(cfg, sdc_cell=cfg.close_start, human_cell=cfg.far_start)
    return LiveState(cfg, sdc_cell=cfg.far_start, human_cell=cfg.close_start)


def _target(cfg: BridgeConfig, cell: int, action: str) -> int:
    if cell >= cfg.finish_progress:
        return cell  # finished cars are parked off the track
    if action == FORWARD:
        return min(cell + 1, cfg.finish_progress)
    if action == BACK:
        return max(cell - 1, 0)
    return cell  # stay, or anything unrecognized


def _human_phys(cfg: BridgeConfig, cell: int) -> int:
    """The human's cell in the SDC's frame; meaningful on the bridge."""
    return 2 * cfg.approach_cells + cfg.bridge_cells - 1 - cell


def advance(state: LiveState, sdc_action: str, human_action: str) -> LiveState:
    """Apply one tick of simultaneous moves and return the next state."""
    cfg = state.cfg
    s, h = state.sdc_cell, state.human_cell
    ns, nh = _target(cfg, s, sdc_action), _target(cfg, h, human_action)

    def on_bridge(cell: int) -> bool:
        return cfg.approach_cells <= cell < cfg.finish_progress

    # Settle conflicts to a fixed point: a car whose move was blocked
    # stays, which can block the other car's move in turn.
    while True:
        if on_bridge(ns) and on_bridge(nh) and ns == _human_phys(cfg, nh):
            # heading for the same cell, or into a cell the other keeps
            if ns != s:
                ns = s
            elif nh != h:
                nh = h
            continue
        if (
            ns != s
            and nh != h
            and on_bridge(ns)
            and on_bridge(h)
            and ns == _human_phys(cfg, h)
            and _human_phys(cfg, nh) == s
        ):
            ns, nh = s, h  # driving through each other
            continue
        break

    tick = state.tick
    sdc_finish = state.sdc_finish_tick
    human_finish = state.human_finish_tick
    if sdc_finish is None and ns >= cfg.finish_progress:
        sdc_finish = tick
    if human_finish is None and nh >= cfg.finish_progress:
        human_finish = tick
    return replace(
        state,
        sdc_cell=ns,
        human_cell=nh,
        tick=tick + 1,
        sdc_finish_tick=sdc_finish,
        human_finish_tick=human_finish,
    )


def cautious_action(
    cfg: BridgeConfig, me: int, other: int, tick: int, right_of_way: bool
) -> str:
    """Polite driving for either seat, given both progress cells."""
    if me >= cfg.finish_progress:
        return STAY
    other_on_bridge = cfg.approach_cells <= other < cfg.finish_progress
    if me >= cfg.approach_cells:
        return BACK if other_on_bridge else FORWARD
    if me == cfg.approach_cells - 1:
        if other_on_bridge:
            return STAY
        if right_of_way or other >= cfg.finish_progress or tick >= PATIENCE_TICKS:
            return FORWARD
        return STAY
    return FORWARD


def cautious_policy(live: LiveState, right_of_way: bool) -> str:
    """The SDC's cooperative controller."""
    return cautious_action(live.cfg, live.sdc_cell, live.human_cell, live.tick, right_of_way)


class PunishingDriver:
    """Drives a solved punishment commitment on the live grid.

    One abstract ply per round: at each round boundary the driver feeds
    the human's observed abstract transition to the plan cursor, then
    resolves its own next abstract action (sampling where the plan
    mixes, once per decision).  Between boundaries it moves cell by
    cell toward the plan's position, creeping to the far end of the
    bridge while holding so the exit costs one tick.

    When the plan ends with the SDC's own crossing, the exit is held
    until the human's best remaining earnings cannot exceed what the
    plan conceded to it; that clock is what makes a blocking commitment
    bite in live time.  Plans that end with the human crossing (or with
    nobody finishing) drop back to polite driving.
    """

    def __init__(self, solution: BridgeSolution, theta=None, rng=None) -> None:
        self.solution = solution
        self.cursor = solution.plan(solution.punishment(theta))
        self.rng = rng
        self.desired = solution.game.root_key[1]
        self.prev_human_abs: Optional[int] = None
        self.release_tick: Optional[int] = None
        self.finishing = False

    def _release_clock(self, cfg: BridgeConfig, human_cents: int) -> int:
        # earliest tick at which a car entering from before the bridge
        # still earns at most human_cents
        steps_needed = math.ceil((cfg.base_reward - human_cents) / cfg.per_step_cost)
        seconds = steps_needed * cfg.seconds_per_step - (cfg.bridge_cells + 1)
        return max(0, seconds * 1000 // cfg.tick_ms)

    def _enter_terminal(self, live: LiveState, human_cents: int) -> None:
        if live.sdc_on_bridge() or self.desired >= ON:
            self.release_tick = max(live.tick, self._release_clock(live.cfg, human_cents))
        else:
            self.finishing = True

    def _round_boundary(self, live: LiveState) -> None:
        cfg = live.cfg
        cursor = self.cursor
        if cursor.threat or cursor.done:
            return
        human_abs = cfg.abstract_position(live.human_cell)
        if self.prev_human_abs is None:
            self.prev_human_abs = human_abs
        else:
            if human_abs > self.prev_human_abs:
                observed = FORWARD
            elif human_abs < self.prev_human_abs:
                observed = BACK
            else:
                observed = STAY
            self.prev_human_abs = human_abs
            # cells cannot spell out a cede; a human sitting still off the
            # bridge while we hold it is doing exactly what cede means
            if observed != FORWARD and cursor.expected_human_action() == CEDE:
                observed = CEDE
            cursor.human_step(observed)
            if cursor.done:
                _, (_, human_cents) = self.solution.game.expand(cursor.key)
                self._enter_terminal(live, human_cents)
                return
            if cursor.threat:
                return
        before_pos = cursor.key[1]
        action = cursor.sdc_action(self.rng)
        if cursor.done:
            _, (_, human_cents) = self.solution.game.expand(cursor.key)
            if action == FORWARD and before_pos == ON:
                self.release_tick = max(live.tick, self._release_clock(cfg, human_cents))
            else:
                self._enter_terminal(live, human_cents)
        elif action == FORWARD:
            self.desired = before_pos + 1
        elif action == BACK:
            self.desired = before_pos - 1

    def action(self, live: LiveState) -> str:
        cfg = live.cfg
        me = live.sdc_cell
        if me >= cfg.finish_progress:
            return STAY
        if live.tick % cfg.ticks_per_round == 0:
            self._round_boundary(live)
        hold_cell = cfg.finish_progress - 1
        if self.release_tick is not None:
            if live.tick < self.release_tick:
                return FORWARD if me < hold_cell else STAY
            return FORWARD
        if self.cursor.threat:
            # a deviating human forfeited the plan: blockade the bridge
            # and run the clock all the way out before finishing
            self.release_tick = self._release_clock(cfg, 0)
            return self.action(live)
        if self.finishing:
            return cautious_action(cfg, me, live.human_cell, live.tick, right_of_way=False)
        current = cfg.abstract_position(me)
        if self.desired > current:
            return FORWARD
        if self.desired < current:
            return BACK
        if current == ON:
            # stop short of the far end while the plan runs: the last bridge
            # cell is the human's entry point and parking there would make
            # the expected approach-and-retreat unobservable
            plan_hold = max(cfg.approach_cells, hold_cell - 1)
            return FORWARD if me < plan_hold else STAY
        return STAY


def punishing_policy(live: LiveState, solved_punishment: PunishingDriver) -> str:
    """The SDC's punishing controller; the driver carries the plan state."""
    return solved_punishment.action(live)


@dataclass(frozen=True, slots=True)
class BullyVerdict:
    bullied: bool
    condition: Optional[str] = None


def detect_bully(record, cfg: BridgeConfig = BridgeConfig()) -> BullyVerdict:
    """Decide from an episode record whether the human bullied the SDC.

    Forced backoff counts only when the SDC held the right of way: it
    was on the bridge, reversed while the human was also on it, and the
    human went on to finish first.  Denying the SDC any finish within
    the episode counts from either seat.
    """

    def on_bridge(cell: int) -> bool:
        return cfg.approach_cells <= cell < cfg.finish_progress

    if record.start_assignment == "sdc-close":
        backed_off = any(
            on_bridge(row.sdc_cell)
            and on_bridge(row.human_cell)
            and later.sdc_cell < row.sdc_cell
            for row, later in zip(record.ticks, record.ticks[1:])
        )
        human_first = record.human_finish_time_s is not None and (
            record.sdc_finish_time_s is None
            or record.human_finish_time_s < record.sdc_finish_time_s
        )
        if backed_off and human_first:
            return BullyVerdict(True, FORCED_BACKOFF)
    if record.sdc_finish_time_s is None:
        return BullyVerdict(True, BLOCKED_TIMEOUT)
    return BullyVerdict(False)


def next_mode(prev_mode: str, verdict: BullyVerdict) -> str:
    """Punish for one episode after being bullied; prev_mode carries no
    weight, so forgiveness is immediate once the human behaves."""
    return PUNISHING if verdict.bullied else COOPERATIVE


def horn_signal(mode: str, live: LiveState, being_bullied_now: bool) -> bool:
    """Punishing episodes horn throughout; cooperative ones only while
    actively being pushed off the bridge."""
    return mode == PUNISHING or bool(being_bullied_now)


def episode_reward(finish_time_s: Optional[float], cfg: BridgeConfig) -> int:
    """Cents for finishing at a given second count; unfinished earns 0."""
    if finish_time_s is None:
        return 0
    steps = math.floor(finish_time_s / cfg.seconds_per_step)
    return max(0, cfg.base_reward - cfg.per_step_cost * steps)
