"""Tree-based alternating-move two-player games.

A game is a finite tree in which every node is owned by the leader, owned
by the follower, or is a leaf carrying an exact payoff pair in integer
cents.  The leader commits to a (possibly mixed) behavioral policy over
its nodes; the follower observes the commitment and best-responds.  This
module holds the tree representation, validation, policy evaluation,
follower best response, and the follower-minimax threat value that the
rest of the solver builds on.

Conventions that everything downstream inherits:

  * All payoffs are integer cents at the leaves and exact `Fraction`
    values everywhere else.  There is no floating point in any value
    computation.
  * Action labels are opaque strings ordered lexicographically; children
    of a node are stored sorted by label so that iteration order, and
    therefore every tie-break, is reproducible across runs.
  * Follower indifference is broken in the leader's favor (the strong
    Stackelberg convention): first by follower value, then by leader
    value, then by action label.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

NodeId = Union[str, int]

LEADER = "leader"
FOLLOWER = "follower"
LEAF = "leaf"

OWNERS = (LEADER, FOLLOWER, LEAF)

#: A behavioral policy: for each owned node, a distribution over that
#: node's action labels.  Probabilities are exact rationals summing to 1.
Policy = dict  # dict[NodeId, dict[str, Fraction]]


class PolicyError(ValueError):
    """A policy is missing or malformed at a reachable owned node."""


class TreeFormatError(ValueError):
    """A tree file failed to parse; the message names the offending node."""


@dataclass(frozen=True, slots=True)
class Node:
    """One tree node: an owner, sorted children, and a leaf reward.

    Attributes:
        id: node identifier, unique within the tree.
        owner: one of LEADER, FOLLOWER, LEAF.
        children: tuple of (action_label, child_id) pairs sorted by
            label; empty exactly for leaves.
        reward: (leader_cents, follower_cents) for leaves, else None.
    """

    id: NodeId
    owner: str
    children: tuple[tuple[str, NodeId], ...]
    reward: tuple[int, int] | None

    @staticmethod
    def leaf(node_id: NodeId, leader_cents: int, follower_cents: int) -> "Node":
        return Node(node_id, LEAF, (), (leader_cents, follower_cents))

    @staticmethod
    def internal(node_id: NodeId, owner: str,
                 children: Mapping[str, NodeId] | Iterable[tuple[str, NodeId]]) -> "Node":
        if isinstance(children, Mapping):
            pairs = tuple(sorted(children.items()))
        else:
            pairs = tuple(sorted(children))
        return Node(node_id, owner, pairs, None)

    def is_leaf(self) -> bool:
        return self.owner == LEAF

    def child(self, action: str) -> NodeId:
        for label, cid in self.children:
            if label == action:
                return cid
        raise KeyError(f"node {self.id!r} has no action {action!r}")

    def actions(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.children)


@dataclass(slots=True)
class GameTree:
    """A rooted tree of Nodes indexed by id."""

    nodes: dict
    root: NodeId

    @staticmethod
    def from_nodes(nodes: Iterable[Node], root: NodeId) -> "GameTree":
        index = {}
        for node in nodes:
            if node.id in index:
                raise ValueError(f"duplicate node id {node.id!r}")
            index[node.id] = node
        return GameTree(index, root)

    def node(self, node_id: NodeId) -> Node:
        return self.nodes[node_id]

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(slots=True)
class ValidationReport:
    """Counts and invariant violations for a GameTree.

    internal_count is the number of decision nodes (m) and leaf_count the
    number of leaves (n) reachable from the root.  errors is empty iff
    every tree invariant holds.
    """

    internal_count: int = 0
    leaf_count: int = 0
    max_depth: int = 0
    max_branching: int = 0
    errors: list = field(default_factory=list)

    def ok(self) -> bool:
        return not self.errors


def validate_tree(tree: GameTree) -> ValidationReport:
    """Check every GameTree invariant and count nodes.

    Violations are reported as data rather than raised; counts are
    computed over the reachable, well-formed part of the tree even when
    violations exist.
    """
    report = ValidationReport()
    if tree.root not in tree.nodes:
        report.errors.append(f"root {tree.root!r} not present in node set")
        return report

    seen = set()
    stack = [(tree.root, 0)]
    while stack:
        node_id, depth = stack.pop()
        if node_id in seen:
            report.errors.append(f"node {node_id!r} reachable by more than one path")
            continue
        seen.add(node_id)
        node = tree.nodes[node_id]
        report.max_depth = max(report.max_depth, depth)

        if node.owner not in OWNERS:
            report.errors.append(f"node {node_id!r} has unknown owner {node.owner!r}")
            continue
        if node.owner == LEAF:
            report.leaf_count += 1
            if node.children:
                report.errors.append(f"leaf {node_id!r} has children")
            if node.reward is None:
                report.errors.append(f"leaf {node_id!r} is missing a reward")
            continue

        report.internal_count += 1
        report.max_branching = max(report.max_branching, len(node.children))
        if node.reward is not None:
            report.errors.append(f"internal node {node_id!r} carries a reward")
        if not node.children:
            report.errors.append(f"internal node {node_id!r} has no children")
        labels = set()
        for action, child_id in node.children:
            if action in labels:
                report.errors.append(f"node {node_id!r} repeats action {action!r}")
            labels.add(action)
            if child_id not in tree.nodes:
                report.errors.append(
                    f"node {node_id!r} action {action!r} references missing child {child_id!r}")
            else:
                stack.append((child_id, depth + 1))

    unreachable = len(tree.nodes) - len(seen)
    if unreachable:
        report.errors.append(f"{unreachable} node(s) unreachable from the root")
    return report


def _distribution(policy: Policy, node: Node, role: str) -> list[tuple[str, Fraction]]:
    # Returns the positive-probability actions at an owned node, checking
    # that the distribution is over known actions and sums to exactly 1.
    if node.id not in policy:
        raise PolicyError(f"{role} policy has no entry for reachable node {node.id!r}")
    dist = policy[node.id]
    actions = dict(node.children)
    total = Fraction(0)
    support = []
    for action, prob in sorted(dist.items()):
        if action not in actions:
            raise PolicyError(f"{role} policy at node {node.id!r} uses unknown action {action!r}")
        p = Fraction(prob)
        if p < 0:
            raise PolicyError(f"{role} policy at node {node.id!r} has negative probability")
        total += p
        if p > 0:
            support.append((action, p))
    if total != 1:
        raise PolicyError(f"{role} policy at node {node.id!r} sums to {total}, not 1")
    return support


def evaluate_policy(tree: GameTree, leader: Policy, follower: Policy) -> tuple[Fraction, Fraction]:
    """Expected (leader, follower) value at the root under both policies.

    Bottom-up expectation with exact rational arithmetic.  Only nodes
    reachable with positive probability need policy entries; a missing
    entry at a reachable owned node raises PolicyError.
    """

    def value(node_id: NodeId) -> tuple[Fraction, Fraction]:
        node = tree.nodes[node_id]
        if node.owner == LEAF:
            lc, fc = node.reward
            return Fraction(lc), Fraction(fc)
        policy = leader if node.owner == LEADER else follower
        role = node.owner
        va = Fraction(0)
        vb = Fraction(0)
        for action, p in _distribution(policy, node, role):
            child_va, child_vb = value(node.child(action))
            va += p * child_va
            vb += p * child_vb
        return va, vb

    return value(tree.root)


def best_response(tree: GameTree, leader: Policy) -> tuple[Policy, tuple[Fraction, Fraction]]:
    """The follower's best response to a committed leader policy.

    Backward induction with the leader's mixing fixed.  At follower nodes
    the follower picks the child maximizing its own expected value; ties
    are broken in favor of the larger leader value, then by action label.
    Returns the (pure) follower policy over visited follower nodes and the
    root value pair, which equals evaluate_policy of the two policies.

    Leader nodes reachable with positive probability must have policy
    entries; unreachable omissions are fine, which permits the partial
    policies produced by unrolling.
    """
    follower_policy: Policy = {}

    def value(node_id: NodeId) -> tuple[Fraction, Fraction]:
        node = tree.nodes[node_id]
        if node.owner == LEAF:
            lc, fc = node.reward
            return Fraction(lc), Fraction(fc)
        if node.owner == LEADER:
            va = Fraction(0)
            vb = Fraction(0)
            for action, p in _distribution(leader, node, LEADER):
                child_va, child_vb = value(node.child(action))
                va += p * child_va
                vb += p * child_vb
            return va, vb
        best = None
        best_action = None
        for action, child_id in node.children:
            child_va, child_vb = value(child_id)
            if best is None or (child_vb, child_va) > (best[1], best[0]):
                best = (child_va, child_vb)
                best_action = action
        follower_policy[node.id] = {best_action: Fraction(1)}
        return best

    root_value = value(tree.root)
    return follower_policy, root_value


def minimax_follower_value(tree: GameTree, node_id: NodeId | None = None) -> Fraction:
    """The lowest follower value the leader can force in a subtree.

    Backward induction on the follower's payoff alone: leaves return the
    follower reward, leader nodes minimize over children, follower nodes
    maximize.  This is the threat value behind every sigma threshold.
    """
    if node_id is None:
        node_id = tree.root
    if node_id not in tree.nodes:
        raise KeyError(f"unknown node id {node_id!r}")

    def value(nid: NodeId) -> Fraction:
        node = tree.nodes[nid]
        if node.owner == LEAF:
            return Fraction(node.reward[1])
        child_values = [value(cid) for _, cid in node.children]
        if node.owner == LEADER:
            return min(child_values)
        return max(child_values)

    return value(node_id)


_ACTION_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def random_tree(seed: int, max_depth: int, branching: int, reward_bound: int = 500) -> GameTree:
    """Deterministic random tree for test corpora.

    Owners are sampled uniformly, branching factors uniformly in
    [1, branching], rewards uniformly in [0, reward_bound] cents.  The
    same seed always produces the identical tree, and the result passes
    validate_tree.
    """
    if max_depth < 1 or branching < 1:
        raise ValueError("max_depth and branching must be >= 1")
    rng = random.Random(seed)
    nodes: list[Node] = []

    def gen(depth: int) -> NodeId:
        node_id = len(nodes)
        nodes.append(None)  # reserve the preorder slot
        is_leaf = depth >= max_depth or (depth > 0 and rng.random() < 0.35) \
            or (depth == 0 and rng.random() < 0.1)
        if is_leaf:
            nodes[node_id] = Node.leaf(node_id, rng.randint(0, reward_bound),
                                       rng.randint(0, reward_bound))
            return node_id
        owner = rng.choice((LEADER, FOLLOWER))
        width = rng.randint(1, branching)
        children = {}
        for action in _ACTION_ALPHABET[:width]:
            children[action] = gen(depth + 1)
        nodes[node_id] = Node.internal(node_id, owner, children)
        return node_id

    root = gen(0)
    return GameTree.from_nodes(nodes, root)


# ---------------------------------------------------------------------------
# Tree file format
#
# {"root": id, "nodes": [{"id": str, "owner": "leader"|"follower"|"leaf",
#                         "children": {action: id}, "reward": [l, f]}]}
#
# Node ids are strings on disk.  Exports are sorted so that
# export(import(export(x))) is byte-identical to export(x).
# ---------------------------------------------------------------------------


def _require_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TreeFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def import_tree(path) -> GameTree:
    """Load a GameTree from a tree file, with per-node diagnostics."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise TreeFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "root" not in doc or "nodes" not in doc:
        raise TreeFormatError(f"{path}: expected an object with 'root' and 'nodes'")
    if not isinstance(doc["nodes"], list):
        raise TreeFormatError(f"{path}: 'nodes' must be a list")

    nodes = []
    for i, raw in enumerate(doc["nodes"]):
        if not isinstance(raw, dict) or "id" not in raw:
            raise TreeFormatError(f"nodes[{i}]: expected an object with an 'id'")
        node_id = raw["id"]
        if not isinstance(node_id, str):
            raise TreeFormatError(f"nodes[{i}]: id must be a string, got {node_id!r}")
        where = f"node {node_id!r}"
        owner = raw.get("owner")
        if owner not in OWNERS:
            raise TreeFormatError(f"{where}: unknown owner tag {owner!r}")
        children = raw.get("children", {})
        if not isinstance(children, dict):
            raise TreeFormatError(f"{where}: children must be an object")
        reward = raw.get("reward")
        if owner == LEAF:
            if children:
                raise TreeFormatError(f"{where}: a leaf cannot have children")
            if not isinstance(reward, list) or len(reward) != 2:
                raise TreeFormatError(f"{where}: leaf reward must be [leader, follower]")
            lc = _require_int(reward[0], f"{where} reward[0]")
            fc = _require_int(reward[1], f"{where} reward[1]")
            nodes.append(Node.leaf(node_id, lc, fc))
        else:
            if reward is not None:
                raise TreeFormatError(f"{where}: only leaves carry a reward")
            pairs = {}
            for action, child_id in children.items():
                if not isinstance(child_id, str):
                    raise TreeFormatError(
                        f"{where}: child id for action {action!r} must be a string")
                pairs[action] = child_id
            nodes.append(Node.internal(node_id, owner, pairs))

    root = doc["root"]
    if not isinstance(root, str):
        raise TreeFormatError(f"{path}: root must be a string node id")
    try:
        tree = GameTree.from_nodes(nodes, root)
    except ValueError as exc:
        raise TreeFormatError(str(exc)) from exc
    if root not in tree.nodes:
        raise TreeFormatError(f"root {root!r} is not among the nodes")
    return tree


def export_tree(tree: GameTree, path) -> None:
    """Write a GameTree in the tree file format, deterministically sorted."""
    records = []
    for node_id in sorted(tree.nodes, key=str):
        node = tree.nodes[node_id]
        record = {"id": str(node_id), "owner": node.owner,
                  "children": {action: str(cid) for action, cid in node.children}}
        if node.owner == LEAF:
            record["reward"] = list(node.reward)
        records.append(record)
    doc = {"root": str(tree.root), "nodes": records}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")
