"""One-lane-bridge negotiation between a committed SDC and a human driver.

Abstract model: each car occupies one of four positions (start,
before-bridge, on-bridge, finish) and the cars alternate moves, the SDC
first, for a bounded number of rounds.  The bridge holds both cars at
once only nose to nose; a car can leave the bridge forward only when the
other car is not on it, and can always back off to the bridge entrance.
The game ends the moment one car finishes: the other car's payoff is
then forced, so it is scored analytically instead of growing the tree.
A car waiting while the other holds the bridge may also cede outright,
committing to wait out the crossing and then finish; both payoffs are
forced there too, so ceding is likewise a leaf.  A car finishing on the
ply at depth d earns base_reward minus per_step_cost for every full
round before its finishing round, floored at zero; a car that cannot
finish inside the horizon earns nothing.

The same keyed dynamics drive three consumers: materializing the game as
an explicit tree, solving frontiers directly over (positions, depth)
states (identical subgames collapse, so the solve is near-instant), and
stepping a committed plan ply by ply during live play.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Union

from .frontier import (
    Frontier,
    TargetPoint,
    Theta,
    extract_equilibrium,
    extract_punishment,
    solve_keyed,
)
from .games import FOLLOWER, LEADER, GameTree, Node

START, BEFORE, ON, FINISH = range(4)

FORWARD = "forward"
STAY = "stay"
BACK = "back"
CEDE = "cede"

SDC_CLOSE = "sdc-close"
HUMAN_CLOSE = "human-close"
STARTS = (SDC_CLOSE, HUMAN_CLOSE)

BLOCK = "block"
BULLY = "bully"
YIELD = "yield"
MIXTURE = "mixture"


class BridgeConfigError(ValueError):
    """Raised for malformed or inconsistent bridge configuration."""


_CONFIG_FIELDS = (
    "horizon_rounds",
    "base_reward",
    "per_step_cost",
    "theta",
    "approach_cells",
    "bridge_cells",
    "close_start",
    "far_start",
    "tick_ms",
    "seconds_per_step",
    "round_limit_s",
)


@dataclass(frozen=True, slots=True)
class BridgeConfig:
    """Game parameters; defaults reproduce the reference experiment.

    Money is integer cents.  horizon_rounds is per player, so the
    abstract tree has twice that many plies.  Live-play geometry: each
    car drives approach_cells own cells, then bridge_cells shared
    one-lane cells, and has finished once past the bridge.  close_start
    and far_start are the starting cells; the close car begins adjacent
    to the bridge and holds the right of way.
    """

    horizon_rounds: int = 10
    base_reward: int = 13
    per_step_cost: int = 1
    theta: int = 2
    approach_cells: int = 3
    bridge_cells: int = 4
    close_start: int = 2
    far_start: int = 0
    tick_ms: int = 1000
    seconds_per_step: int = 2
    round_limit_s: int = 26

    def __post_init__(self) -> None:
        positive = (
            self.horizon_rounds,
            self.base_reward,
            self.per_step_cost,
            self.approach_cells,
            self.bridge_cells,
            self.tick_ms,
            self.seconds_per_step,
            self.round_limit_s,
        )
        if any(v <= 0 for v in positive):
            raise BridgeConfigError("all sizes, costs, and durations must be positive")
        if self.theta < 0 or self.theta >= self.base_reward:
            raise BridgeConfigError("theta must lie in [0, base_reward)")
        if not 0 <= self.far_start < self.close_start < self.approach_cells:
            raise BridgeConfigError(
                "starts must satisfy 0 <= far_start < close_start < approach_cells"
            )
        if (self.seconds_per_step * 1000) % self.tick_ms:
            raise BridgeConfigError("seconds_per_step must be a whole number of ticks")

    @property
    def depth_limit(self) -> int:
        return 2 * self.horizon_rounds

    @property
    def finish_progress(self) -> int:
        return self.approach_cells + self.bridge_cells

    @property
    def ticks_per_round(self) -> int:
        return self.seconds_per_step * 1000 // self.tick_ms

    def abstract_position(self, progress: int) -> int:
        """Map a car's live progress cell to its abstract position."""
        if progress >= self.finish_progress:
            return FINISH
        if progress >= self.approach_cells:
            return ON
        if progress == self.approach_cells - 1:
            return BEFORE
        return START

    @staticmethod
    def from_dict(data: Mapping) -> "BridgeConfig":
        unknown = set(data) - set(_CONFIG_FIELDS)
        if unknown:
            raise BridgeConfigError(f"unknown config keys: {sorted(unknown)}")
        bad = [k for k, v in data.items() if not isinstance(v, int) or isinstance(v, bool)]
        if bad:
            raise BridgeConfigError(f"config values must be integers: {sorted(bad)}")
        return BridgeConfig(**data)

    @staticmethod
    def from_file(path) -> "BridgeConfig":
        try:
            with open(path) as handle:
                data = json.load(handle)
        except json.JSONDecodeError as err:
            raise BridgeConfigError(f"config is not valid JSON: {err}") from err
        if not isinstance(data, dict):
            raise BridgeConfigError("config must be a JSON object")
        return BridgeConfig.from_dict(data)


@dataclass(frozen=True, slots=True)
class MoveRules:
    """Legal-move toggles for the abstract dynamics.

    The defaults are the calibrated ruleset; the toggles exist so the
    tree-size calibration can document what nearby rule choices produce.
    """

    head_on_entry: bool = True  # may enter the bridge while the other car is on it
    exit_past_opponent: bool = False  # may leave the bridge forward past the other car
    reverse_from_approach: bool = False  # may back up when not on the bridge
    stop_at_first_finish: bool = True  # score the other car analytically at first finish
    cede_when_blocked: bool = True  # may commit to waiting whenever the other car holds the bridge


def _timed_value(cfg: BridgeConfig, finish_ply: int) -> int:
    return max(0, cfg.base_reward - cfg.per_step_cost * (finish_ply // 2))


class BridgeGame:
    """Keyed expansion of the abstract game.

    Keys are ("play", sdc_pos, human_pos, depth) for decision nodes and
    ("score", sdc_cents, human_cents) for leaves; the mover alternates
    with depth parity, SDC on even plies.  The expansion is a pure
    function of the key, which is what lets the frontier solve and the
    node counting memoize on states instead of tree paths.
    """

    def __init__(
        self, cfg: BridgeConfig, start: str = HUMAN_CLOSE, rules: MoveRules = MoveRules()
    ) -> None:
        if start not in STARTS:
            raise ValueError(f"start must be one of {STARTS}")
        self.cfg = cfg
        self.start = start
        self.rules = rules
        if start == SDC_CLOSE:
            self.root_key = ("play", BEFORE, START, 0)
        else:
            self.root_key = ("play", START, BEFORE, 0)

    def moves(self, mover_pos: int, other_pos: int) -> dict[str, int]:
        """Legal actions for the mover, as action -> new position."""
        rules = self.rules
        out = {STAY: mover_pos}
        if mover_pos == START:
            out[FORWARD] = BEFORE
        elif mover_pos == BEFORE:
            if other_pos != ON or rules.head_on_entry:
                out[FORWARD] = ON
            if rules.reverse_from_approach:
                out[BACK] = START
        elif mover_pos == ON:
            if other_pos != ON or rules.exit_past_opponent:
                out[FORWARD] = FINISH
            out[BACK] = BEFORE
        return out

    def _finish_key(self, depth: int, other_pos: int) -> tuple:
        cfg = self.cfg
        finisher = _timed_value(cfg, depth)
        # The other car now crosses unimpeded: next ply is depth+1, one
        # move per round thereafter, needing FINISH - other_pos moves.
        remaining_finish_ply = depth + 2 * (FINISH - other_pos) - 1
        if remaining_finish_ply <= cfg.depth_limit - 1:
            other = _timed_value(cfg, remaining_finish_ply)
        else:
            other = 0
        if depth % 2 == 0:
            return ("score", finisher, other)
        return ("score", other, finisher)

    def _cede_key(self, depth: int, mover_pos: int) -> tuple:
        cfg = self.cfg
        # The other car finishes on its next ply; the mover starts moving
        # on its own next ply after that and crosses unimpeded.
        other_finish_ply = depth + 1
        other = _timed_value(cfg, other_finish_ply) if other_finish_ply <= cfg.depth_limit - 1 else 0
        mover_finish_ply = depth + 2 * (FINISH - mover_pos)
        mover = _timed_value(cfg, mover_finish_ply) if mover_finish_ply <= cfg.depth_limit - 1 else 0
        if depth % 2 == 0:
            return ("score", mover, other)
        return ("score", other, mover)

    def expand(self, key: tuple) -> tuple:
        if key[0] == "score":
            return ("leaf", (key[1], key[2]))
        _, sdc, human, depth = key
        if depth >= self.cfg.depth_limit:
            return ("leaf", (0, 0))
        sdc_moves = depth % 2 == 0
        mover, other = (sdc, human) if sdc_moves else (human, sdc)
        children = []
        for action, new_pos in sorted(self.moves(mover, other).items()):
            if new_pos == FINISH:
                children.append((action, self._finish_key(depth, other)))
            else:
                s2, h2 = (new_pos, human) if sdc_moves else (sdc, new_pos)
                children.append((action, ("play", s2, h2, depth + 1)))
        if self.rules.cede_when_blocked and other == ON and mover != ON:
            children.append((CEDE, self._cede_key(depth, mover)))
            children.sort()
        return (LEADER if sdc_moves else FOLLOWER, tuple(children))


def count_bridge_tree(
    cfg: BridgeConfig, start: str = HUMAN_CLOSE, rules: MoveRules = MoveRules()
) -> tuple[int, int]:
    """(total nodes, leaves) of the materialized tree, without building it."""
    game = BridgeGame(cfg, start, rules)
    memo: dict[tuple, tuple[int, int]] = {}

    def count(key: tuple) -> tuple[int, int]:
        got = memo.get(key)
        if got is None:
            shape = game.expand(key)
            if shape[0] == "leaf":
                got = (1, 1)
            else:
                nodes, leaves = 1, 0
                for _, child_key in shape[1]:
                    n, l = count(child_key)
                    nodes += n
                    leaves += l
                got = (nodes, leaves)
            memo[key] = got
        return got

    return count(game.root_key)


def build_bridge_tree(
    cfg: BridgeConfig, start: str = HUMAN_CLOSE, rules: MoveRules = MoveRules()
) -> GameTree:
    """Materialize the abstract game as an explicit tree.

    Node ids are preorder "n0", "n1", ...; identical subgames become
    distinct nodes here (the tree is what the generic solver consumes,
    and its size is a calibration observable).
    """
    game = BridgeGame(cfg, start, rules)
    nodes: dict[str, Node] = {}
    counter = 1
    stack: list[tuple[tuple, str]] = [(game.root_key, "n0")]
    while stack:
        key, nid = stack.pop()
        shape = game.expand(key)
        if shape[0] == "leaf":
            sdc_cents, human_cents = shape[1]
            nodes[nid] = Node.leaf(nid, sdc_cents, human_cents)
            continue
        owner, child_keys = shape
        pairs = []
        for action, child_key in child_keys:
            cid = f"n{counter}"
            counter += 1
            pairs.append((action, cid))
            stack.append((child_key, cid))
        nodes[nid] = Node.internal(nid, owner, pairs)
    return GameTree(nodes, "n0")


@dataclass(frozen=True, slots=True)
class RegimeReport:
    """How a committed punishment plays out against a best-responding human.

    regime: "yield" (human crosses first), "bully" (SDC crosses first at
    full speed), "block" (SDC crosses first but holds the bridge), or
    "mixture" when the committed plan randomizes across those classes.
    block_steps counts the rounds the human spends waiting before it can
    enter the bridge, worst case over the plan's support;
    expected_block_steps is the probability-weighted mean.
    """

    theta: Theta
    regime: str
    target: TargetPoint
    block_steps: int
    expected_block_steps: Fraction
    branches: tuple[tuple[Fraction, str, int], ...]  # (probability, class, hold)


@dataclass(slots=True)
class BridgeSolution:
    """Solved frontiers for one start assignment of the bridge game."""

    cfg: BridgeConfig
    start: str
    game: BridgeGame
    solved: dict = field(repr=False)

    @property
    def root_frontier(self) -> Frontier:
        return self.solved[self.game.root_key][0]

    def minimax(self, key: tuple) -> Fraction:
        return self.solved[key][1]

    def equilibrium(self) -> TargetPoint:
        return extract_equilibrium(self.root_frontier)

    def punishment(self, theta: Optional[Theta] = None) -> TargetPoint:
        if theta is None:
            theta = self.cfg.theta
        return extract_punishment(self.root_frontier, theta)

    def max_segments_per_node(self) -> int:
        return max(len(frontier.segments) for frontier, _ in self.solved.values())

    def plan(self, target: TargetPoint) -> "PlanCursor":
        return PlanCursor(self, target)

    def support_paths(self, target: TargetPoint):
        """Pure realizations of a committed target under follower best
        response: list of (probability, trail, payoffs) where trail is a
        tuple of (depth, mover, action, sdc_pos, human_pos) plies and
        payoffs the (sdc_cents, human_cents) leaf it ends at.
        """
        out: list[tuple[Fraction, tuple, tuple]] = []

        def walk(key, prov, prob, trail):
            shape = self.game.expand(key)
            if shape[0] == "leaf":
                out.append((prob, tuple(trail), shape[1]))
                return
            assert prov[0] != "leaf", "leaf provenance at a decision node"
            _, sdc, human, depth = key
            mover = "sdc" if depth % 2 == 0 else "human"
            children = dict(shape[1])
            if prov[0] == "child":
                _, action, element = prov
                trail.append((depth, mover, action, sdc, human))
                walk(children[action], element.prov, prob, trail)
                trail.pop()
                return
            base, t = prov[1], prov[2]
            if base[0] == "cross":
                _, a_lo, p_lo, a_hi, p_hi = base
                for action, element, weight in (
                    (a_lo, p_lo, 1 - t),
                    (a_hi, p_hi, t),
                ):
                    if weight == 0:
                        continue
                    trail.append((depth, mover, action, sdc, human))
                    walk(children[action], element.prov, prob * weight, trail)
                    trail.pop()
                return
            _, action, child_seg = base
            inner = child_seg.t_lo + t * (child_seg.t_hi - child_seg.t_lo)
            trail.append((depth, mover, action, sdc, human))
            walk(children[action], ("mix", child_seg.base, inner), prob, trail)
            trail.pop()

        kind = target.support[0]
        if kind == "point":
            prov = target.support[1].prov
        else:
            segment, lam = target.support[1], target.support[2]
            prov = ("mix", segment.base, segment.t_lo + lam * (segment.t_hi - segment.t_lo))
        walk(self.game.root_key, prov, Fraction(1), [])
        return out

    def human_unimpeded_round(self) -> int:
        """Rounds the human needs to finish with the SDC absent."""
        start_pos = BEFORE if self.start == HUMAN_CLOSE else START
        return FINISH - start_pos

    def classify_regime(self, theta: Optional[Theta] = None) -> RegimeReport:
        """Behavioral class of the committed punishment at this cap."""
        if theta is None:
            theta = self.cfg.theta
        target = self.punishment(theta)
        unimpeded = self.human_unimpeded_round()
        branches = []
        for prob, trail, payoffs in self.support_paths(target):
            cls = _classify_trail(trail)
            hold = _human_delay(self.cfg, payoffs[1], unimpeded)
            branches.append((prob, cls, hold))
        classes = {cls for _, cls, _ in branches}
        regime = classes.pop() if len(classes) == 1 else MIXTURE
        holds = [(prob, hold) for prob, _, hold in branches]
        return RegimeReport(
            theta=theta,
            regime=regime,
            target=target,
            block_steps=max(hold for _, hold in holds),
            expected_block_steps=sum((p * h for p, h in holds), Fraction(0)),
            branches=tuple(branches),
        )


def _classify_trail(trail: tuple) -> str:
    """Class of one pure realization: yield when the human crosses first
    (because it finished, or because the SDC ceded to it), bully when
    the SDC crosses first without ever pausing, block otherwise.
    """
    sdc_paused = any(
        action not in (FORWARD, CEDE) for _, mover, action, _, _ in trail if mover == "sdc"
    )
    _, last_mover, last_action, last_sdc, last_human = trail[-1]
    if last_action == CEDE:
        first_across = "human" if last_mover == "sdc" else "sdc"
    elif last_action == FORWARD and (last_sdc if last_mover == "sdc" else last_human) == ON:
        first_across = last_mover
    else:
        first_across = None  # ran out the clock
    if first_across == "human":
        return YIELD
    if first_across == "sdc" and not sdc_paused:
        return BULLY
    return BLOCK


def _human_delay(cfg: BridgeConfig, human_cents: int, unimpeded_round: int) -> int:
    """Rounds of crossing the human lost relative to an open bridge.

    Recovered from the leaf payoff rather than the trail shape, because
    value-equal realizations can differ in how the waiting is arranged.
    A human that never finishes lost every round from its unimpeded
    finish through the horizon.
    """
    if human_cents <= 0:
        return cfg.horizon_rounds + 1 - unimpeded_round
    finish_round = (cfg.base_reward - human_cents) // cfg.per_step_cost + 1
    return max(0, finish_round - unimpeded_round)


def solve_bridge(
    cfg: BridgeConfig, start: str = HUMAN_CLOSE, rules: MoveRules = MoveRules()
) -> BridgeSolution:
    """Solve frontiers over the state space of one start assignment.

    States, not tree paths, index the memo, so the solve touches a few
    hundred keys; values agree exactly with solving the materialized
    tree (identical subgames share one frontier either way).
    """
    game = BridgeGame(cfg, start, rules)
    solved = solve_keyed(game.root_key, game.expand)
    return BridgeSolution(cfg=cfg, start=start, game=game, solved=solved)


class PlanCursor:
    """Steps a committed target through the abstract game ply by ply.

    At SDC plies sdc_action() resolves the plan (sampling where it
    mixes) and advances; at human plies human_step() consumes the
    observed action.  A human deviation from the plan's path switches
    the cursor to threat mode: from then on the SDC plays the action
    minimizing the follower's minimax value, the same commitment the
    solver assumed off path.  Illegal observed actions fall back to
    stay, which is always legal.
    """

    def __init__(self, solution: BridgeSolution, target: TargetPoint) -> None:
        self.solution = solution
        self.key = solution.game.root_key
        kind = target.support[0]
        if kind == "point":
            self._prov: Optional[tuple] = target.support[1].prov
        else:
            segment, lam = target.support[1], target.support[2]
            self._prov = ("mix", segment.base, segment.t_lo + lam * (segment.t_hi - segment.t_lo))
        self.threat = False

    @property
    def done(self) -> bool:
        return self.solution.game.expand(self.key)[0] == "leaf"

    def _children(self) -> dict[str, tuple]:
        shape = self.solution.game.expand(self.key)
        assert shape[0] != "leaf", "cursor stepped past the end of the game"
        return dict(shape[1])

    def sdc_action(self, rng) -> str:
        children = self._children()
        if self.threat:
            action = min(children, key=lambda a: (self.solution.minimax(children[a]), a))
            self.key = children[action]
            return action
        prov = self._prov
        if prov[0] == "child":
            action, element = prov[1], prov[2]
            self.key = children[action]
            self._prov = element.prov
            return action
        base, t = prov[1], prov[2]
        if base[0] == "cross":
            _, a_lo, p_lo, a_hi, p_hi = base
            if t == 1 or (t != 0 and rng.random() < t):
                action, element = a_hi, p_hi
            else:
                action, element = a_lo, p_lo
            self.key = children[action]
            self._prov = element.prov
            return action
        _, action, child_seg = base
        inner = child_seg.t_lo + t * (child_seg.t_hi - child_seg.t_lo)
        self.key = children[action]
        self._prov = ("mix", child_seg.base, inner)
        return action

    def expected_human_action(self) -> Optional[str]:
        if self.threat:
            return None
        prov = self._prov
        if prov[0] == "child":
            return prov[1]
        base = prov[1]
        assert base[0] == "child-seg", "cross mixes arise only at SDC plies"
        return base[1]

    def human_step(self, action: str) -> None:
        children = self._children()
        if action not in children:
            action = STAY
        if self.threat:
            self.key = children[action]
            return
        expected = self.expected_human_action()
        if action != expected:
            self.threat = True
            self.key = children[action]
            return
        prov = self._prov
        if prov[0] == "child":
            self._prov = prov[2].prov
        else:
            base, t = prov[1], prov[2]
            child_seg = base[2]
            self._prov = ("mix", child_seg.base, child_seg.t_lo + t * (child_seg.t_hi - child_seg.t_lo))
        self.key = children[action]
