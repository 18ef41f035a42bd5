"""Per-player win rates, quality bands and revenue distributions.

Win rate is milli-big-blinds per hand: 1000 * net big blinds / hands.
All arithmetic is exact (fractions of cents over big blinds) until a
caller asks for floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .hand_history import HandRecord, Street, has_revealed_showdown

DEFAULT_MIN_HANDS = 100


@dataclass
class PlayerStats:
    player_name: str
    hands_played: int = 0
    net_bb: Fraction = Fraction(0)
    per_hand_deltas_bb: list[Fraction] = field(default_factory=list)

    @property
    def win_rate_mbb_h(self) -> Fraction:
        if self.hands_played == 0:
            return Fraction(0)
        return 1000 * self.net_bb / self.hands_played

    @property
    def stddev_mbb(self) -> float:
        """Sample std of per-hand deltas, in mbb."""
        n = len(self.per_hand_deltas_bb)
        if n < 2:
            return 0.0
        mean = float(self.net_bb) / n
        var = sum((float(d) - mean) ** 2 for d in self.per_hand_deltas_bb) / (n - 1)
        return 1000.0 * math.sqrt(var)


@dataclass(frozen=True)
class WinRateBand:
    """Half-open win-rate interval (lower, upper] in mbb/h.

    A missing bound leaves that side unbounded, so (1500, None) is the
    'above 1500' band and (None, 0) the negative-example pool.
    """

    lower: Optional[int] = None
    upper: Optional[int] = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.lower is not None and self.upper is not None:
            if not self.lower < self.upper:
                raise ValueError("band lower bound must be below upper bound")

    def contains(self, win_rate: Fraction) -> bool:
        if self.lower is not None and win_rate <= self.lower:
            return False
        if self.upper is not None and win_rate > self.upper:
            return False
        return True

    def describe(self) -> str:
        if self.label:
            return self.label
        low = "-inf" if self.lower is None else str(self.lower)
        high = "+inf" if self.upper is None else str(self.upper)
        return f"({low},{high}] mbb/h"


def hand_delta_bb(record: HandRecord, player: str) -> Fraction:
    """Player's net result for one hand, in big blinds."""
    if player not in record.results:
        raise KeyError(f"{player!r} did not play hand {record.hand_id}")
    return Fraction(record.results[player], record.blinds.big_blind)


def compute_stats(corpus: Iterable[HandRecord]) -> dict[str, PlayerStats]:
    stats: dict[str, PlayerStats] = {}
    for record in corpus:
        for entry in record.seats:
            name = entry.player_name
            delta = hand_delta_bb(record, name)
            ps = stats.setdefault(name, PlayerStats(name))
            ps.hands_played += 1
            ps.net_bb += delta
            ps.per_hand_deltas_bb.append(delta)
    return stats


def rank_players(
    stats: dict[str, PlayerStats], min_hands: int = DEFAULT_MIN_HANDS
) -> list[PlayerStats]:
    """Qualified players sorted by win rate, then volume, then name."""
    eligible = [s for s in stats.values() if s.hands_played >= min_hands]
    return sorted(
        eligible,
        key=lambda s: (-s.win_rate_mbb_h, -s.hands_played, s.player_name),
    )


@dataclass(frozen=True)
class TaggedHand:
    """A showdown-revealed hand with the banded players marked as heroes."""

    record: HandRecord
    heroes: tuple[str, ...]


def partition_hands(
    corpus: Sequence[HandRecord],
    band: WinRateBand,
    stats: dict[str, PlayerStats],
    min_hands: int = 1,
) -> list[TaggedHand]:
    """Hands where at least one revealed player's win rate falls in the band."""
    out: list[TaggedHand] = []
    for record in corpus:
        if not has_revealed_showdown(record):
            continue
        heroes = tuple(
            name
            for name in sorted(record.hole_cards)
            if name in stats
            and stats[name].hands_played >= min_hands
            and band.contains(stats[name].win_rate_mbb_h)
        )
        if heroes:
            out.append(TaggedHand(record, heroes))
    return out


@dataclass(frozen=True)
class Histogram:
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]

    def rows(self) -> list[tuple[float, float, int]]:
        return [
            (self.bin_edges[i], self.bin_edges[i + 1], self.counts[i])
            for i in range(len(self.counts))
        ]


def revenue_histogram(
    deltas_bb: Sequence[float | Fraction], bin_edges: Sequence[float]
) -> Histogram:
    """Counts per [lo, hi) bin; out-of-range values land in the end bins."""
    if len(bin_edges) < 2 or any(
        bin_edges[i] >= bin_edges[i + 1] for i in range(len(bin_edges) - 1)
    ):
        raise ValueError("bin edges must be strictly increasing, length >= 2")
    counts = [0] * (len(bin_edges) - 1)
    for value in deltas_bb:
        v = float(value)
        if v < bin_edges[0]:
            counts[0] += 1
            continue
        if v >= bin_edges[-1]:
            counts[-1] += 1
            continue
        lo, hi = 0, len(counts)
        while lo + 1 < hi:  # rightmost edge <= v
            mid = (lo + hi) // 2
            if bin_edges[mid] <= v:
                lo = mid
            else:
                hi = mid
        counts[lo] += 1
    return Histogram(tuple(float(e) for e in bin_edges), tuple(counts))


def staged_revenue_histograms(
    corpus: Sequence[HandRecord],
    player: str,
    bin_edges: Sequence[float],
) -> dict[Street, Histogram]:
    """Per-final-street histograms of the player's per-hand deltas."""
    by_street: dict[Street, list[Fraction]] = {}
    for record in corpus:
        if player not in record.results:
            continue
        street = record.final_street()
        by_street.setdefault(street, []).append(hand_delta_bb(record, player))
    return {
        street: revenue_histogram(deltas, bin_edges)
        for street, deltas in by_street.items()
    }


def stats_report_rows(
    stats: dict[str, PlayerStats], min_hands: int = 1
) -> list[tuple[str, int, float, float, float]]:
    """(name, hands, net_bb, mbb_h, stddev) rows for the CLI report."""
    return [
        (
            s.player_name,
            s.hands_played,
            float(s.net_bb),
            float(s.win_rate_mbb_h),
            s.stddev_mbb / math.sqrt(s.hands_played) if s.hands_played else 0.0,
        )
        for s in rank_players(stats, min_hands)
    ]
