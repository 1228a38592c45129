"""Brute-force ground truth for desk-scale instances.

Two independent oracles validate the frontier solver: exhaustive
enumeration of deterministic leader commitments, and a discretized grid
search over mixed leader policies.  Both deliberately avoid the
points-and-segments machinery so that agreement is evidence, not
tautology.

The pure oracle works bottom-up on sets of achievable (leader, follower)
value pairs: a leaf achieves its reward; a leader node achieves anything
some child achieves; a follower node achieves, for every combination of
committed outcomes in its children, the outcome of the child the
follower then prefers (ties resolved toward the leader, then by action
label, exactly as best_response does).  The grid oracle enumerates
per-node distributions with probabilities on a fixed step grid and
evaluates each against the follower's best response.

Budgets are hard errors, not silent truncation, so a passing oracle
suite cannot be a vacuous pass.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .games import (FOLLOWER, LEADER, LEAF, GameTree, Policy, best_response)

PURE_LEADER_NODE_BUDGET = 12
GRID_LEADER_NODE_BUDGET = 6
GRID_BRANCHING_BUDGET = 3
GRID_STEPS = (Fraction(1, 10), Fraction(1, 20))


class BudgetExceededError(RuntimeError):
    """The instance is too large for this oracle's combinatorial budget."""


class PureInfeasibleError(ValueError):
    """No deterministic leader commitment keeps the follower at or below theta."""


@dataclass(slots=True)
class OracleResult:
    best_leader_value: Fraction
    witness_policy: Policy
    follower_value: Fraction
    method: str


# ---------------------------------------------------------------------------
# Pure-commitment enumeration
# ---------------------------------------------------------------------------

# Achievable-pair DP entries: (leader_value, follower_value) -> witness,
# where a witness is ("leaf",) | ("pick", action, child_witness)
# | ("commit", ((action, child_witness), ...)).  "pick" marks a leader
# node's on-path action; "commit" records the leader's commitment inside
# every child of a follower node, which is what steers the follower.


def _leader_node_count(tree: GameTree) -> int:
    return sum(1 for node in tree.nodes.values() if node.owner == LEADER)


def _pure_pairs(tree: GameTree, node_id, combo_budget: list) -> dict:
    node = tree.nodes[node_id]
    if node.owner == LEAF:
        lc, fc = node.reward
        return {(Fraction(lc), Fraction(fc)): ("leaf",)}

    child_pairs = [(action, _pure_pairs(tree, cid, combo_budget))
                   for action, cid in node.children]

    pairs: dict = {}
    if node.owner == LEADER:
        for action, sub in child_pairs:
            for value, witness in sub.items():
                pairs.setdefault(value, ("pick", action, witness))
        return pairs

    combos = 1
    for _, sub in child_pairs:
        combos *= len(sub)
    combo_budget[0] -= combos
    if combo_budget[0] < 0:
        raise BudgetExceededError(
            f"follower node {node_id!r} needs {combos} commitment combinations")

    actions = [action for action, _ in child_pairs]
    for combo in itertools.product(*(sub.items() for _, sub in child_pairs)):
        best_i = 0
        for i in range(1, len(combo)):
            va, vb = combo[i][0]
            ba, bb = combo[best_i][0]
            if (vb, va) > (bb, ba):
                best_i = i
        value = combo[best_i][0]
        witness = ("commit", tuple((actions[i], combo[i][1]) for i in range(len(combo))))
        pairs.setdefault(value, witness)
    return pairs


def _witness_to_policy(tree: GameTree, node_id, witness, out: Policy) -> None:
    node = tree.nodes[node_id]
    if witness[0] == "leaf":
        return
    if witness[0] == "pick":
        _, action, sub = witness
        out[node_id] = {action: Fraction(1)}
        _witness_to_policy(tree, node.child(action), sub, out)
        return
    for action, sub in witness[1]:
        _witness_to_policy(tree, node.child(action), sub, out)


def enumerate_pure_leader(tree: GameTree, theta) -> OracleResult:
    """Best deterministic leader commitment holding the follower to theta.

    theta is in cents and may be float("inf").  Raises
    BudgetExceededError past the combinatorial budget and
    PureInfeasibleError when no pure commitment qualifies.
    """
    leader_nodes = _leader_node_count(tree)
    if leader_nodes > PURE_LEADER_NODE_BUDGET:
        raise BudgetExceededError(
            f"{leader_nodes} leader nodes exceeds the pure-enumeration budget "
            f"of {PURE_LEADER_NODE_BUDGET}")

    combo_budget = [200_000]
    pairs = _pure_pairs(tree, tree.root, combo_budget)
    best = None
    best_witness = None
    for value, witness in pairs.items():
        va, vb = value
        if vb > theta:
            continue
        if best is None or (va, vb) > best:
            best = (va, vb)
            best_witness = witness
    if best is None:
        raise PureInfeasibleError(
            f"no pure leader commitment holds the follower to {theta}")

    policy: Policy = {}
    _witness_to_policy(tree, tree.root, best_witness, policy)
    return OracleResult(best[0], policy, best[1], "pure-enumeration")


def pure_achievable_pairs(tree: GameTree) -> set:
    """All root (leader, follower) value pairs under pure commitments.

    Exposed for invariant tests; subject to the same budgets as
    enumerate_pure_leader.
    """
    leader_nodes = _leader_node_count(tree)
    if leader_nodes > PURE_LEADER_NODE_BUDGET:
        raise BudgetExceededError(
            f"{leader_nodes} leader nodes exceeds the pure-enumeration budget "
            f"of {PURE_LEADER_NODE_BUDGET}")
    return set(_pure_pairs(tree, tree.root, [200_000]))


# ---------------------------------------------------------------------------
# Grid search over mixed leader policies
# ---------------------------------------------------------------------------


def _grid_distributions(n_actions: int, steps: int) -> list:
    # All probability vectors over n_actions with entries k/steps summing to 1.
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining + 1):
            rec(prefix + (k,), remaining - k, slots - 1)

    rec((), steps, n_actions)
    return out


def grid_assignment_values(tree: GameTree, step: Fraction,
                           combo_budget: int = 50_000) -> list:
    """Evaluate every grid leader policy; returns (value_pair, policy) pairs.

    This is the single enumeration grid_search_leader filters per theta;
    tests reuse it to sweep several caps without re-enumerating.
    """
    if step not in GRID_STEPS:
        raise ValueError(f"step must be one of {GRID_STEPS}")
    leader_ids = [node.id for node in tree.nodes.values() if node.owner == LEADER]
    if len(leader_ids) > GRID_LEADER_NODE_BUDGET:
        raise BudgetExceededError(
            f"{len(leader_ids)} leader nodes exceeds the grid budget "
            f"of {GRID_LEADER_NODE_BUDGET}")
    max_branching = max((len(node.children) for node in tree.nodes.values()
                         if node.owner != LEAF), default=0)
    if max_branching > GRID_BRANCHING_BUDGET:
        raise BudgetExceededError(
            f"branching {max_branching} exceeds the grid budget of "
            f"{GRID_BRANCHING_BUDGET}")

    steps = int(1 / step)
    per_node = []
    total = 1
    for node_id in sorted(leader_ids, key=str):
        actions = tree.nodes[node_id].actions()
        grids = _grid_distributions(len(actions), steps)
        total *= len(grids)
        if total > combo_budget:
            raise BudgetExceededError(
                f"{total}+ grid combinations exceeds the budget of {combo_budget}")
        per_node.append((node_id, actions, grids))

    results = []
    for combo in itertools.product(*(grids for _, _, grids in per_node)):
        policy: Policy = {}
        for (node_id, actions, _), weights in zip(per_node, combo):
            policy[node_id] = {action: Fraction(k, steps)
                               for action, k in zip(actions, weights) if k}
        _, value = best_response(tree, policy)
        results.append((value, policy))
    return results


def grid_search_leader(tree: GameTree, step: Fraction, theta) -> OracleResult:
    """Best grid-restricted mixed leader policy holding the follower to theta.

    A lower bound on the true optimum; probabilities are multiples of
    step at every leader node.
    """
    best = None
    best_policy = None
    for value, policy in grid_assignment_values(tree, step):
        va, vb = value
        if vb > theta:
            continue
        if best is None or (va, vb) > best:
            best = (va, vb)
            best_policy = policy
    if best is None:
        raise PureInfeasibleError(
            f"no grid policy holds the follower to {theta}")
    return OracleResult(best[0], best_policy, best[1], "grid")


def verify_point(tree: GameTree, policy: Policy, expected) -> bool:
    """True iff best_response(tree, policy) reproduces expected exactly.

    expected is anything with .leader and .follower attributes, or a
    (leader, follower) pair.
    """
    if hasattr(expected, "leader"):
        want = (Fraction(expected.leader), Fraction(expected.follower))
    else:
        want = (Fraction(expected[0]), Fraction(expected[1]))
    _, got = best_response(tree, policy)
    return got == want
