"""Exact achievable-payoff frontiers for alternating-move games.

For every node we keep the upper envelope, in follower-payoff coordinates,
of the (leader, follower) value pairs the leader can still commit to from
that node.  The envelope is a finite union of points and closed line
segments with exact Fraction coordinates:

* a leaf contributes its reward as a single point,
* a leader node may mix over two actions, which adds the segments joining
  value pairs of distinct children to the children's own elements,
* a follower node keeps, for each action, only the child elements whose
  follower value matches what the follower could guarantee by deviating
  (the max over sibling minimax values), because any element below that
  threshold would never be chosen by a rational follower facing the
  leader's off-path threats.

Every element carries provenance so a concrete commitment policy can be
reconstructed from it without re-searching the tree (see unroll_policy).
Mixing at a node is only ever between two actions; richer mixes add
nothing because the envelope of pairwise segments already covers their
convex combinations.

Envelope convention: segments are kept whole and closed.  A point whose
leader value strictly exceeds every segment at its follower coordinate is
retained even when it sits above a segment interior (the envelope may
jump).  Points that lie exactly on a retained segment are also kept; they
realise the same pair without mixing, and extraction prefers them.
Consequently "no element dominates another" holds in the strict sense
only; equal pairs reachable both purely and by mixing coexist.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .games import (
    FOLLOWER,
    LEADER,
    GameTree,
    NodeId,
    Policy,
    minimax_follower_value,
    validate_tree,
)

NEG_INF = float("-inf")

Theta = Union[int, Fraction, float]


class InfeasibleCap(ValueError):
    """Raised when a follower cap lies below every achievable follower value."""

    def __init__(self, theta: Theta, min_follower: Fraction) -> None:
        self.theta = theta
        self.min_follower = min_follower
        super().__init__(
            f"cap {theta} is below the minimal achievable follower value "
            f"{min_follower}; no commitment can hold the follower that low"
        )


@dataclass(frozen=True, eq=False, slots=True)
class FrontierPoint:
    """A single achievable (leader, follower) value pair.

    prov records how the pair is realised:
      ("leaf",)                    reward of the node itself
      ("child", action, element)   element of the child reached by action
      ("mix", base, t)             interpolation at t in [0, 1] along base
    where base is ("cross", action_lo, point_lo, action_hi, point_hi) for a
    two-action mix at a leader node, or ("child-seg", action, segment) for a
    pair inherited from a child segment.
    """

    leader: Fraction
    follower: Fraction
    prov: tuple

    def pair(self) -> tuple[Fraction, Fraction]:
        return (self.leader, self.follower)


@dataclass(frozen=True, eq=False, slots=True)
class FrontierSegment:
    """A closed segment of achievable pairs, follower-ascending.

    lo and hi are the endpoint objects, both retained in the owning
    frontier's point list.  base is the construction the segment
    interpolates (see FrontierPoint.prov) and [t_lo, t_hi] the retained
    parameter window within it, so trimmed segments keep exact provenance.
    """

    lo: FrontierPoint
    hi: FrontierPoint
    base: tuple
    t_lo: Fraction
    t_hi: Fraction

    def value_at(self, follower: Fraction) -> Fraction:
        """Leader value of the segment at a follower coordinate inside it."""
        span = self.hi.follower - self.lo.follower
        lam = (follower - self.lo.follower) / span
        return self.lo.leader + lam * (self.hi.leader - self.lo.leader)

    def t_at(self, follower: Fraction) -> Fraction:
        """Base parameter corresponding to a follower coordinate inside it."""
        span = self.hi.follower - self.lo.follower
        lam = (follower - self.lo.follower) / span
        return self.t_lo + lam * (self.t_hi - self.t_lo)


@dataclass(frozen=True, eq=False, slots=True)
class Frontier:
    """Pruned envelope for one node: points plus follower-ascending segments."""

    points: tuple[FrontierPoint, ...]
    segments: tuple[FrontierSegment, ...]

    def is_empty(self) -> bool:
        return not self.points

    def min_follower(self) -> Fraction:
        if not self.points:
            raise ValueError("empty frontier has no follower values")
        return min(p.follower for p in self.points)

    def value_at(self, follower: Fraction):
        """Best leader value at an exact follower coordinate, or None."""
        best = None
        for p in self.points:
            if p.follower == follower and (best is None or p.leader > best):
                best = p.leader
        for s in self.segments:
            if s.lo.follower <= follower <= s.hi.follower:
                v = s.value_at(follower)
                if best is None or v > best:
                    best = v
        return best


EMPTY_FRONTIER = Frontier((), ())


@dataclass(frozen=True, slots=True)
class TargetPoint:
    """An extracted frontier element: the value pair plus its support.

    support is ("point", FrontierPoint) for a pure frontier element or
    ("segment", FrontierSegment, lam) with lam in [0, 1] the mix weight
    toward the segment's higher-follower endpoint.
    """

    leader: Fraction
    follower: Fraction
    support: tuple

    def pair(self) -> tuple[Fraction, Fraction]:
        return (self.leader, self.follower)


def leaf_frontier(reward: tuple[int, int]) -> Frontier:
    """Frontier of a leaf: its reward pair as a single point."""
    r_leader, r_follower = reward
    point = FrontierPoint(Fraction(r_leader), Fraction(r_follower), ("leaf",))
    return Frontier((point,), ())


def _relabel_child(
    action: str, frontier: Frontier
) -> tuple[list[FrontierPoint], list[FrontierSegment]]:
    """Lift a child frontier into the parent, wrapping provenance.

    Child segments become ("child-seg", action, segment) bases spanning
    t in [0, 1]; their endpoints reuse the relabelled child points so the
    element graph stays shared.
    """
    lifted: dict[int, FrontierPoint] = {}
    points = []
    for p in frontier.points:
        q = FrontierPoint(p.leader, p.follower, ("child", action, p))
        lifted[id(p)] = q
        points.append(q)
    segments = []
    for s in frontier.segments:
        base = ("child-seg", action, s)
        segments.append(
            FrontierSegment(lifted[id(s.lo)], lifted[id(s.hi)], base, Fraction(0), Fraction(1))
        )
    return points, segments


def _clip_elements(
    points: Iterable[FrontierPoint],
    segments: Iterable[FrontierSegment],
    bound,
) -> tuple[list[FrontierPoint], list[FrontierSegment]]:
    """Drop everything with follower value below bound; trim segments.

    bound may be float("-inf"), in which case nothing is removed.  A
    segment cut strictly inside gets a new low endpoint with exact "mix"
    provenance; a segment whose entire span falls below the bound except
    its high endpoint degenerates to that endpoint (already a point).
    """
    kept_points = [p for p in points if p.follower >= bound]
    kept_segments = []
    for s in segments:
        if s.lo.follower >= bound:
            kept_segments.append(s)
        elif s.hi.follower > bound:
            t_cut = s.t_at(bound)
            lo = FrontierPoint(s.value_at(bound), Fraction(bound), ("mix", s.base, t_cut))
            kept_points.append(lo)
            kept_segments.append(FrontierSegment(lo, s.hi, s.base, t_cut, s.t_hi))
        # hi.follower <= bound: fully below except possibly the endpoint,
        # which survives in kept_points on its own if it meets the bound.
    return kept_points, kept_segments


def clip_frontier(frontier: Frontier, min_follower) -> Frontier:
    """Restrict a frontier to follower values >= min_follower.

    float("-inf") is the identity.  The result may be empty.
    """
    if min_follower == NEG_INF:
        return frontier
    points, segments = _clip_elements(frontier.points, frontier.segments, min_follower)
    points.sort(key=lambda p: (p.follower, p.leader))
    return Frontier(tuple(points), tuple(segments))


def _segment_crossing(a: FrontierSegment, b: FrontierSegment):
    """Follower coordinate where two segments strictly cross, or None."""
    lo = max(a.lo.follower, b.lo.follower)
    hi = min(a.hi.follower, b.hi.follower)
    if lo >= hi:
        return None
    slope_a = (a.hi.leader - a.lo.leader) / (a.hi.follower - a.lo.follower)
    slope_b = (b.hi.leader - b.lo.leader) / (b.hi.follower - b.lo.follower)
    if slope_a == slope_b:
        return None
    x = (
        b.lo.leader - a.lo.leader + slope_a * a.lo.follower - slope_b * b.lo.follower
    ) / (slope_a - slope_b)
    if lo < x < hi:
        return x
    return None


def _prune(
    points: Sequence[FrontierPoint], segments: Sequence[FrontierSegment]
) -> Frontier:
    """Upper envelope of candidate elements, preserving provenance.

    Candidate segments another segment weakly covers are discarded first
    (they can never win), then an exact sweep over breakpoints (element
    endpoints plus pairwise crossings of the survivors) picks one winning
    segment per interval, ties resolved toward the previous interval's
    winner and then candidate order so output is deterministic.  Winning
    stretches are merged and trimmed with interpolated endpoints.  Points
    survive if no retained piece sits strictly above them at their
    follower coordinate; duplicates by exact coordinates collapse to the
    first occurrence.
    """
    if not points and not segments:
        return EMPTY_FRONTIER

    lines: dict[int, tuple[Fraction, Fraction]] = {}

    def line(s: FrontierSegment) -> tuple[Fraction, Fraction]:
        mb = lines.get(id(s))
        if mb is None:
            m = (s.hi.leader - s.lo.leader) / (s.hi.follower - s.lo.follower)
            lines[id(s)] = mb = (m, s.lo.leader - m * s.lo.follower)
        return mb

    retained: dict[tuple[Fraction, Fraction], FrontierPoint] = {}
    pieces: list[FrontierSegment] = []
    if segments:
        seen_geometry = set()
        unique = []
        for s in segments:
            key = (s.lo.pair(), s.hi.pair())
            if key not in seen_geometry:
                seen_geometry.add(key)
                unique.append(s)
        survivors = []
        for s in unique:
            for t in unique:
                if t is s:
                    continue
                if t.lo.follower <= s.lo.follower and t.hi.follower >= s.hi.follower:
                    m, b = line(t)
                    if (
                        m * s.lo.follower + b >= s.lo.leader
                        and m * s.hi.follower + b >= s.hi.leader
                    ):
                        break
            else:
                survivors.append(s)

        xs = {p.follower for p in points}
        starts: dict[Fraction, list[FrontierSegment]] = {}
        for s in survivors:
            xs.add(s.lo.follower)
            xs.add(s.hi.follower)
            starts.setdefault(s.lo.follower, []).append(s)
        for i, a in enumerate(survivors):
            for b in survivors[i + 1 :]:
                x = _segment_crossing(a, b)
                if x is not None:
                    xs.add(x)
        order = sorted(xs)
        rank = {id(s): i for i, s in enumerate(survivors)}

        # One winning segment per interval between breakpoints; contiguous
        # intervals with the same winner fuse into a single run.
        runs: list[list] = []
        active: list[FrontierSegment] = []
        prev_winner = None
        for x1, x2 in zip(order, order[1:]):
            active.extend(starts.get(x1, ()))
            active = [s for s in active if s.hi.follower >= x2]
            if not active:
                prev_winner = None
                continue
            mid = (x1 + x2) / 2
            best_val = None
            tied: list[FrontierSegment] = []
            for s in active:
                m, b = line(s)
                v = m * mid + b
                if best_val is None or v > best_val:
                    best_val = v
                    tied = [s]
                elif v == best_val:
                    tied.append(s)
            if prev_winner is not None and any(s is prev_winner for s in tied):
                winner = prev_winner
            else:
                winner = min(tied, key=lambda s: rank[id(s)])
            if runs and runs[-1][0] is winner and runs[-1][2] == x1:
                runs[-1][2] = x2
            else:
                runs.append([winner, x1, x2])
            prev_winner = winner

        def endpoint(seg: FrontierSegment, x: Fraction) -> FrontierPoint:
            if x == seg.lo.follower:
                cand = seg.lo
            elif x == seg.hi.follower:
                cand = seg.hi
            else:
                cand = FrontierPoint(seg.value_at(x), x, ("mix", seg.base, seg.t_at(x)))
            return retained.setdefault(cand.pair(), cand)

        for seg, xa, xb in runs:
            pieces.append(
                FrontierSegment(
                    endpoint(seg, xa), endpoint(seg, xb), seg.base, seg.t_at(xa), seg.t_at(xb)
                )
            )

    def piece_cover(x: Fraction):
        best = None
        for piece in pieces:
            if piece.lo.follower <= x <= piece.hi.follower:
                v = piece.value_at(x)
                if best is None or v > best:
                    best = v
        return best

    # Points: keep the best point at each follower coordinate when it is a
    # spike above the pieces, a pure witness lying exactly on one, or in a
    # gap no piece covers.
    point_best: dict[Fraction, Fraction] = {}
    for p in points:
        prev = point_best.get(p.follower)
        if prev is None or p.leader > prev:
            point_best[p.follower] = p.leader
    for p in points:
        if p.leader != point_best[p.follower]:
            continue
        cover = piece_cover(p.follower)
        if cover is None or p.leader >= cover:
            retained.setdefault(p.pair(), p)

    out_points = sorted(retained.values(), key=lambda p: (p.follower, p.leader))
    pieces.sort(key=lambda s: (s.lo.follower, s.hi.follower))
    return Frontier(tuple(out_points), tuple(pieces))


def prune_envelope(frontier: Frontier) -> Frontier:
    """Re-prune a frontier; idempotent on already-pruned input."""
    return _prune(frontier.points, frontier.segments)


def merge_leader(children: Mapping[str, Frontier]) -> Frontier:
    """Frontier of a leader node from its children's frontiers.

    The leader may pick one action (inheriting child elements) or mix two
    actions, which adds the cross segments joining every pair of points
    from distinct children.  Cross pairs with equal follower value add
    nothing above the better point and are skipped.
    """
    if not children:
        raise ValueError("leader node has no children to merge")
    actions = sorted(children)
    points: list[FrontierPoint] = []
    segments: list[FrontierSegment] = []
    by_action: dict[str, list[FrontierPoint]] = {}
    for action in actions:
        ps, ss = _relabel_child(action, children[action])
        by_action[action] = ps
        points.extend(ps)
        segments.extend(ss)
    for i, a_one in enumerate(actions):
        for a_two in actions[i + 1 :]:
            for p in by_action[a_one]:
                for q in by_action[a_two]:
                    if p.follower == q.follower:
                        continue
                    if p.follower < q.follower:
                        lo, a_lo, hi, a_hi = p, a_one, q, a_two
                    else:
                        lo, a_lo, hi, a_hi = q, a_two, p, a_one
                    base = ("cross", a_lo, lo.prov[2], a_hi, hi.prov[2])
                    segments.append(
                        FrontierSegment(lo, hi, base, Fraction(0), Fraction(1))
                    )
    return _prune(points, segments)


def sigma_thresholds(
    children: Mapping[str, NodeId], tree: GameTree
) -> dict[str, Fraction]:
    """Deviation floor per follower action: best sibling minimax value.

    For each action the follower compares staying on path against
    deviating to a sibling where the leader then punishes; the floor is
    the max sibling minimax follower value, float("-inf") when there is
    no sibling.
    """
    values = {a: minimax_follower_value(tree, nid) for a, nid in children.items()}
    return _sigmas_from_values(values)


def _sigmas_from_values(values: Mapping[str, Fraction]) -> dict:
    sigmas = {}
    for action in values:
        rest = [v for a, v in values.items() if a != action]
        sigmas[action] = max(rest) if rest else NEG_INF
    return sigmas


def merge_follower(
    children: Mapping[str, Frontier], sigmas: Mapping[str, Fraction]
) -> Frontier:
    """Frontier of a follower node given per-action deviation floors.

    Each child frontier is clipped at its floor before the union; an
    element the follower values below what a deviation guarantees cannot
    be part of any credible commitment.  The union can only be empty if
    every child clips empty, which cannot happen at a well-formed node
    (the child with the largest minimax value always survives), but the
    empty frontier is returned rather than raised to keep merges total.
    """
    points: list[FrontierPoint] = []
    segments: list[FrontierSegment] = []
    for action in sorted(children):
        ps, ss = _relabel_child(action, children[action])
        ps, ss = _clip_elements(ps, ss, sigmas[action])
        points.extend(ps)
        segments.extend(ss)
    return _prune(points, segments)


def solve_keyed(
    root_key,
    expand: Callable[[object], tuple],
) -> dict:
    """Bottom-up frontier solve over an arbitrary keyed game DAG.

    expand(key) returns ("leaf", (r_leader, r_follower)) or
    (owner, ((action, child_key), ...)) with owner LEADER or FOLLOWER.
    Returns {key: (Frontier, minimax_follower_value)}; keys reached from
    several parents are expanded once, so transposition-style sharing is
    free.  Iterative, so recursion depth does not bound tree depth.
    """
    solved: dict = {}
    stack: list[tuple[object, bool]] = [(root_key, False)]
    while stack:
        key, expanded = stack.pop()
        if key in solved:
            continue
        shape = expand(key)
        if shape[0] == "leaf":
            point = leaf_frontier(shape[1])
            solved[key] = (point, Fraction(shape[1][1]))
            continue
        owner, child_items = shape
        if not expanded:
            stack.append((key, True))
            for _, child_key in child_items:
                if child_key not in solved:
                    stack.append((child_key, False))
            continue
        frontiers = {a: solved[k][0] for a, k in child_items}
        values = {a: solved[k][1] for a, k in child_items}
        if owner == LEADER:
            frontier = merge_leader(frontiers)
            minimax = min(values.values())
        else:
            frontier = merge_follower(frontiers, _sigmas_from_values(values))
            minimax = max(values.values())
        solved[key] = (frontier, minimax)
    return solved


class FrontierMap(dict):
    """node id -> Frontier for a solved tree; .minimax maps node id to the
    follower's minimax value of that subtree (the leader's harshest credible
    threat), which unroll_policy uses to fill off-path commitments."""

    __slots__ = ("minimax",)

    def __init__(self, frontiers: dict, minimax: dict) -> None:
        super().__init__(frontiers)
        self.minimax = minimax


def solve_frontier(tree: GameTree) -> FrontierMap:
    """Frontiers for every node of a validated tree.

    Structurally identical subtrees are canonicalised to one signature and
    solved once; their nodes share the same Frontier object.  Large games
    built from repeated positions collapse to a handful of signatures.
    """
    report = validate_tree(tree)
    if not report.ok():
        raise ValueError(f"cannot solve invalid tree: {report.errors[0]}")

    sig_of: dict[NodeId, int] = {}
    intern: dict[tuple, int] = {}
    exemplar: dict[int, NodeId] = {}
    stack: list[tuple[NodeId, bool]] = [(tree.root, False)]
    while stack:
        nid, expanded = stack.pop()
        if nid in sig_of:
            continue
        node = tree.node(nid)
        if node.children and not expanded:
            stack.append((nid, True))
            for _, cid in node.children:
                if cid not in sig_of:
                    stack.append((cid, False))
            continue
        if node.is_leaf():
            key = ("L", node.reward)
        else:
            key = ("I", node.owner, tuple((a, sig_of[c]) for a, c in node.children))
        sig = intern.setdefault(key, len(intern))
        exemplar.setdefault(sig, nid)
        sig_of[nid] = sig

    def expand(sig: int) -> tuple:
        node = tree.node(exemplar[sig])
        if node.is_leaf():
            return ("leaf", node.reward)
        return (node.owner, tuple((a, sig_of[c]) for a, c in node.children))

    solved = solve_keyed(sig_of[tree.root], expand)
    frontiers = {nid: solved[sig][0] for nid, sig in sig_of.items()}
    minimax = {nid: solved[sig][1] for nid, sig in sig_of.items()}
    root_frontier = frontiers[tree.root]
    assert not root_frontier.is_empty(), "root frontier cannot be empty"
    return FrontierMap(frontiers, minimax)


def extract_equilibrium(root_frontier: Frontier) -> TargetPoint:
    """Leader-optimal element: max leader value, ties to max follower value.

    Segment suprema occur at endpoints, which are always retained as
    points, so scanning points suffices and the support is always pure.
    """
    if root_frontier.is_empty():
        raise ValueError("cannot extract from an empty frontier")
    best = None
    for p in root_frontier.points:
        if best is None or (p.leader, p.follower) > (best.leader, best.follower):
            best = p
    return TargetPoint(best.leader, best.follower, ("point", best))


def extract_punishment(root_frontier: Frontier, theta: Theta) -> TargetPoint:
    """Leader-optimal element among those with follower value <= theta.

    theta is in cents; float("inf") recovers extract_equilibrium.  Points
    are considered before segment interpolations so equal-value ties keep
    pure support.  Raises InfeasibleCap when theta is below every
    achievable follower value (the minimax floor).
    """
    if root_frontier.is_empty():
        raise ValueError("cannot extract from an empty frontier")
    if theta == float("inf"):
        return extract_equilibrium(root_frontier)
    best = None
    for p in root_frontier.points:
        if p.follower <= theta:
            if best is None or (p.leader, p.follower) > (best.leader, best.follower):
                best = TargetPoint(p.leader, p.follower, ("point", p))
    cap = Fraction(theta)
    for s in root_frontier.segments:
        if s.lo.follower < cap < s.hi.follower:
            leader = s.value_at(cap)
            if best is None or (leader, cap) > (best.leader, best.follower):
                lam = (cap - s.lo.follower) / (s.hi.follower - s.lo.follower)
                best = TargetPoint(leader, cap, ("segment", s, lam))
    if best is None:
        raise InfeasibleCap(theta, root_frontier.min_follower())
    return best


def unroll_policy(
    tree: GameTree, frontiers: FrontierMap, target: TargetPoint
) -> Policy:
    """Leader commitment realising a target element of the root frontier.

    Walks the target's provenance chain down the tree, assigning the
    leader's on-path (possibly two-action mixed) choices, and fills every
    off-path leader node with the follower-minimax action so deviations
    are punished as harshly as the subtree allows.  The returned policy
    makes the follower's best response achieve exactly the target pair.
    """
    kind = target.support[0]
    root_frontier = frontiers[tree.root]
    if kind == "point":
        element = target.support[1]
        if element not in root_frontier.points:
            raise ValueError("target point does not belong to the root frontier")
    else:
        segment, lam = target.support[1], target.support[2]
        if segment not in root_frontier.segments:
            raise ValueError("target segment does not belong to the root frontier")

    minimax = frontiers.minimax
    policy: Policy = {}

    def fill_threat(nid: NodeId) -> None:
        node = tree.node(nid)
        if node.is_leaf():
            return
        if node.owner == LEADER:
            action, child = min(node.children, key=lambda ac: minimax[ac[1]])
            policy[nid] = {action: Fraction(1)}
            fill_threat(child)
        else:
            for _, child in node.children:
                fill_threat(child)

    def descend(nid: NodeId, action: str) -> NodeId:
        node = tree.node(nid)
        if node.owner == FOLLOWER:
            for other, child in node.children:
                if other != action:
                    fill_threat(child)
        return node.child(action)

    def realize_point(nid: NodeId, prov: tuple) -> None:
        tag = prov[0]
        if tag == "leaf":
            return
        if tag == "child":
            _, action, element = prov
            if tree.node(nid).owner == LEADER:
                policy[nid] = {action: Fraction(1)}
            realize_point(descend(nid, action), element.prov)
            return
        if tag == "mix":
            realize_base(nid, prov[1], prov[2])
            return
        raise ValueError(f"unknown provenance tag {tag!r}")

    def realize_base(nid: NodeId, base: tuple, t: Fraction) -> None:
        if base[0] == "cross":
            _, a_lo, p_lo, a_hi, p_hi = base
            node = tree.node(nid)
            assert node.owner == LEADER, "cross mixes arise only at leader nodes"
            if t == 0:
                policy[nid] = {a_lo: Fraction(1)}
                realize_point(node.child(a_lo), p_lo.prov)
            elif t == 1:
                policy[nid] = {a_hi: Fraction(1)}
                realize_point(node.child(a_hi), p_hi.prov)
            else:
                policy[nid] = {a_lo: 1 - t, a_hi: t}
                realize_point(node.child(a_lo), p_lo.prov)
                realize_point(node.child(a_hi), p_hi.prov)
            return
        _, action, child_seg = base
        if tree.node(nid).owner == LEADER:
            policy[nid] = {action: Fraction(1)}
        child = descend(nid, action)
        # t spans the child segment's own endpoints; map into its base window.
        t_child = child_seg.t_lo + t * (child_seg.t_hi - child_seg.t_lo)
        realize_base(child, child_seg.base, t_child)

    if kind == "point":
        realize_point(tree.root, element.prov)
    else:
        realize_base(tree.root, segment.base, segment.t_lo + lam * (segment.t_hi - segment.t_lo))
    return policy


def _cents_to_dollars(value: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 50
        dollars = Decimal(value.numerator) / Decimal(value.denominator) / Decimal(100)
        return str(dollars.quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


def export_frontier_csv(frontiers: Mapping[NodeId, Frontier], path) -> None:
    """Write every node's frontier as CSV rows, payoffs in dollars.

    Columns: kind, node_id, leader_lo, follower_lo, leader_hi, follower_hi.
    Point rows repeat the pair in the _hi columns.  Nodes are ordered by
    string id, points before segments, so output is reproducible byte
    for byte.
    """
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["kind", "node_id", "leader_lo", "follower_lo", "leader_hi", "follower_hi"]
        )
        for nid in sorted(frontiers, key=str):
            frontier = frontiers[nid]
            for p in frontier.points:
                leader = _cents_to_dollars(p.leader)
                follower = _cents_to_dollars(p.follower)
                writer.writerow(["point", str(nid), leader, follower, leader, follower])
            for s in frontier.segments:
                writer.writerow(
                    [
                        "segment",
                        str(nid),
                        _cents_to_dollars(s.lo.leader),
                        _cents_to_dollars(s.lo.follower),
                        _cents_to_dollars(s.hi.leader),
                        _cents_to_dollars(s.hi.follower),
                    ]
                )
