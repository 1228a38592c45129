"""Exact statistics for the session experiment.

The contingency table splits sessions whose human bullied at least once
into one-time and repeat offenders, by group.  Significance comes from
Fisher's exact test, two tailed in the minimum-likelihood sense: the
p-value sums every table with the observed margins whose probability
does not exceed the observed table's.  All arithmetic stays in exact
integers until the final float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb


def fisher_exact(table) -> float:
    """Two-tailed Fisher p-value for a 2x2 table of counts."""
    try:
        (a, b), (c, d) = table
    except (TypeError, ValueError):
        raise ValueError("expected a 2x2 table") from None
    cells = (a, b, c, d)
    if any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for x in cells):
        raise ValueError("cell counts must be non-negative integers")
    r1, r2 = a + b, c + d
    c1, c2 = a + c, b + d
    if min(r1, r2, c1, c2) == 0:
        raise ValueError("degenerate table: empty row or column")
    n = r1 + r2

    # all tables sharing the margins are indexed by their top-left cell;
    # with the common denominator comb(n, r1) factored out, probability
    # order is integer weight order, so the tail test stays exact
    def weight(k: int) -> int:
        return comb(c1, k) * comb(c2, r1 - k)

    observed = weight(a)
    lo = max(0, r1 - c2)
    hi = min(r1, c1)
    tail = sum(w for k in range(lo, hi + 1) if (w := weight(k)) <= observed)
    return float(Fraction(tail, comb(n, r1)))


@dataclass(frozen=True, slots=True)
class ContingencyTable:
    """Once-vs-more bully counts per group; zero-bully sessions drop out."""

    once_control: int
    once_experimental: int
    more_control: int
    more_experimental: int

    @classmethod
    def from_sessions(cls, sessions) -> "ContingencyTable":
        counts = {"once_control": 0, "once_experimental": 0,
                  "more_control": 0, "more_experimental": 0}
        for session in sessions:
            bullied = session.bullied_episodes()
            if bullied == 0:
                continue
            row = "once" if bullied == 1 else "more"
            counts[f"{row}_{session.group}"] += 1
        return cls(**counts)

    def as_rows(self):
        return [
            [self.once_control, self.once_experimental],
            [self.more_control, self.more_experimental],
        ]

    def p_value(self) -> float:
        return fisher_exact(self.as_rows())
