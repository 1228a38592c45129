"""Shared fixtures: the four worked-example trees and brute-force helpers.

The example trees are small enough to reason about by hand and are used
throughout the suite:

  t1: leader root, a -> (200, 300), b -> (0, 0)
  t2: follower root, a -> (500, 100), b -> (0, 200)
  t3: leader root, a -> follower {a1 -> (300, 100), a2 -> (100, 400)}, b -> (0, 0)
  t4: follower root, a -> (300, 100), b -> leader {c -> (0, 0), d -> (500, 500)}

The helpers here re-derive values by explicit path enumeration and
policy-space products, independent of the solver under test.
"""

import itertools
from fractions import Fraction

import pytest

from stackel.games import FOLLOWER, LEADER, GameTree, Node


@pytest.fixture
def t1():
    return GameTree.from_nodes([
        Node.internal("r", LEADER, {"a": "la", "b": "lb"}),
        Node.leaf("la", 200, 300),
        Node.leaf("lb", 0, 0),
    ], "r")


@pytest.fixture
def t2():
    return GameTree.from_nodes([
        Node.internal("r", FOLLOWER, {"a": "la", "b": "lb"}),
        Node.leaf("la", 500, 100),
        Node.leaf("lb", 0, 200),
    ], "r")


@pytest.fixture
def t3():
    return GameTree.from_nodes([
        Node.internal("r", LEADER, {"a": "f", "b": "lb"}),
        Node.internal("f", FOLLOWER, {"a1": "l1", "a2": "l2"}),
        Node.leaf("l1", 300, 100),
        Node.leaf("l2", 100, 400),
        Node.leaf("lb", 0, 0),
    ], "r")


@pytest.fixture
def t4():
    return GameTree.from_nodes([
        Node.internal("r", FOLLOWER, {"a": "la", "b": "g"}),
        Node.leaf("la", 300, 100),
        Node.internal("g", LEADER, {"c": "lc", "d": "ld"}),
        Node.leaf("lc", 0, 0),
        Node.leaf("ld", 500, 500),
    ], "r")


def enumerate_paths(tree, leader, follower):
    """(probability, leaf_node) for every positive-probability root path."""
    out = []

    def walk(node_id, prob):
        node = tree.nodes[node_id]
        if not node.children:
            out.append((prob, node))
            return
        policy = leader if node.owner == LEADER else follower
        for action, p in policy[node_id].items():
            p = Fraction(p)
            if p > 0:
                walk(node.child(action), prob * p)

    walk(tree.root, Fraction(1))
    return out


def owned_nodes(tree, owner):
    return sorted((n.id for n in tree.nodes.values() if n.owner == owner), key=str)


def pure_policies(tree, owner, cap=20_000):
    """Every deterministic policy for one side, as a list of dicts."""
    ids = owned_nodes(tree, owner)
    choices = [tree.nodes[i].actions() for i in ids]
    total = 1
    for c in choices:
        total *= len(c)
    assert total <= cap, f"policy space {total} too large for exhaustive tests"
    out = []
    for combo in itertools.product(*choices):
        out.append({i: {a: Fraction(1)} for i, a in zip(ids, combo)})
    return out
