"""Cards, best-hand evaluation and hole-card characteristics.

Cards are immutable (rank, suit) pairs using the two-character text form
found in hand-history logs (``Th``, ``5c``). Hand strength is a
(category, tiebreaks) pair that compares like a tuple; ties are real and
mean split pots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum, unique
from typing import Iterable, Optional, Sequence

RANK_CHARS = "23456789TJQKA"
SUIT_CHARS = "cdhs"

RANK_FROM_CHAR = {ch: i + 2 for i, ch in enumerate(RANK_CHARS)}
CHAR_FROM_RANK = {i + 2: ch for i, ch in enumerate(RANK_CHARS)}

HIDDEN_CARD = "**"

RANK_NAMES = {
    2: "Deuce", 3: "Trey", 4: "Four", 5: "Five", 6: "Six", 7: "Seven",
    8: "Eight", 9: "Nine", 10: "Ten", 11: "Jack", 12: "Queen", 13: "King",
    14: "Ace",
}
RANK_PLURALS = {
    2: "Deuces", 3: "Treys", 4: "Fours", 5: "Fives", 6: "Sixes",
    7: "Sevens", 8: "Eights", 9: "Nines", 10: "Tens", 11: "Jacks",
    12: "Queens", 13: "Kings", 14: "Aces",
}


class CardError(ValueError):
    """Malformed card text or an impossible card set."""


@unique
class Suit(IntEnum):
    CLUBS = 0
    DIAMONDS = 1
    HEARTS = 2
    SPADES = 3

    @property
    def char(self) -> str:
        return SUIT_CHARS[self]


@dataclass(frozen=True, order=True)
class Card:
    """One playing card; rank 2-14 with T=10, J=11, Q=12, K=13, A=14."""

    rank: int
    suit: Suit

    def __post_init__(self) -> None:
        if not 2 <= self.rank <= 14:
            raise CardError(f"rank out of range: {self.rank}")

    def __str__(self) -> str:
        return CHAR_FROM_RANK[self.rank] + self.suit.char

    def __repr__(self) -> str:
        return f"Card({str(self)!r})"


def parse_card(text: str) -> Card:
    """Parse a two-character label like ``Th`` into a Card."""
    if not isinstance(text, str) or len(text) != 2:
        raise CardError(f"card label must be 2 characters, got {text!r}")
    rank_ch, suit_ch = text[0], text[1]
    if rank_ch not in RANK_FROM_CHAR:
        raise CardError(f"bad rank character in card label {text!r}")
    if suit_ch not in SUIT_CHARS:
        raise CardError(f"bad suit character in card label {text!r}")
    return Card(RANK_FROM_CHAR[rank_ch], Suit(SUIT_CHARS.index(suit_ch)))


def format_card(card: Card) -> str:
    return str(card)


def full_deck() -> list[Card]:
    """All 52 cards in a fixed (suit-major) order."""
    return [Card(rank, suit) for suit in Suit for rank in range(2, 15)]


@unique
class HandCategory(IntEnum):
    """Hand strength ladder, weakest to strongest."""

    HIGH_CARD = 0
    ONE_PAIR = 1
    TWO_PAIR = 2
    THREE_OF_A_KIND = 3
    STRAIGHT = 4
    FLUSH = 5
    FULL_HOUSE = 6
    FOUR_OF_A_KIND = 7
    STRAIGHT_FLUSH = 8
    ROYAL_FLUSH = 9

    @property
    def display_name(self) -> str:
        return _CATEGORY_DISPLAY[self]


_CATEGORY_DISPLAY = {
    HandCategory.HIGH_CARD: "High card",
    HandCategory.ONE_PAIR: "One pair",
    HandCategory.TWO_PAIR: "Two pair",
    HandCategory.THREE_OF_A_KIND: "Three of a kind",
    HandCategory.STRAIGHT: "Straight",
    HandCategory.FLUSH: "Flush",
    HandCategory.FULL_HOUSE: "Full house",
    HandCategory.FOUR_OF_A_KIND: "Four of a kind",
    HandCategory.STRAIGHT_FLUSH: "Straight flush",
    HandCategory.ROYAL_FLUSH: "Royal flush",
}


@dataclass(frozen=True)
class HandValue:
    """Evaluated strength: category plus most-significant-first tiebreaks."""

    category: HandCategory
    tiebreaks: tuple[int, ...]

    @property
    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (int(self.category), self.tiebreaks)

    def __lt__(self, other: "HandValue") -> bool:
        return self.sort_key < other.sort_key

    def __le__(self, other: "HandValue") -> bool:
        return self.sort_key <= other.sort_key


def compare(a: HandValue, b: HandValue) -> int:
    """-1, 0 or 1 for a < b, a == b, a > b."""
    if a.sort_key < b.sort_key:
        return -1
    if a.sort_key > b.sort_key:
        return 1
    return 0


def _straight_high(rank_mask: int) -> int:
    """Highest rank completing a 5-long run in the mask, 0 if none.

    Bit 1 must be pre-set for an ace so the wheel (A-2-3-4-5) is found.
    A bit survives the AND chain iff it starts a 5-long run.
    """
    runs = (
        rank_mask
        & (rank_mask >> 1)
        & (rank_mask >> 2)
        & (rank_mask >> 3)
        & (rank_mask >> 4)
    )
    return runs.bit_length() + 3 if runs else 0


def score_cards(cards: Sequence[Card]) -> tuple[int, tuple[int, ...]]:
    """Comparable (category value, tiebreaks) of the best 5-card hand.

    Accepts 5, 6 or 7 cards. This is the hot path for equity sampling, so
    it avoids building HandValue objects.
    """
    ranks = [c.rank for c in cards]
    counts = [0] * 15
    mask = 0
    for r in ranks:
        counts[r] += 1
        mask |= 1 << r
    if mask & (1 << 14):
        mask |= 1 << 1

    suit_counts = [0, 0, 0, 0]
    for c in cards:
        suit_counts[c.suit] += 1
    flush_suit = -1
    for s in range(4):
        if suit_counts[s] >= 5:
            flush_suit = s
            break

    if flush_suit >= 0:
        fmask = 0
        for c in cards:
            if c.suit == flush_suit:
                fmask |= 1 << c.rank
        if fmask & (1 << 14):
            fmask |= 1 << 1
        sf_high = _straight_high(fmask)
        if sf_high == 14:
            return (int(HandCategory.ROYAL_FLUSH), ())
        if sf_high:
            return (int(HandCategory.STRAIGHT_FLUSH), (sf_high,))

    quads = trips = 0
    pairs: list[int] = []
    singles: list[int] = []
    for r in range(14, 1, -1):
        n = counts[r]
        if n == 4:
            quads = r
        elif n == 3:
            if trips:
                pairs.append(r)  # second trips plays as a pair
            else:
                trips = r
        elif n == 2:
            pairs.append(r)
        elif n == 1:
            singles.append(r)

    if quads:
        kicker = max(r for r in range(2, 15) if counts[r] and r != quads)
        return (int(HandCategory.FOUR_OF_A_KIND), (quads, kicker))
    if trips and pairs:
        return (int(HandCategory.FULL_HOUSE), (trips, pairs[0]))
    if flush_suit >= 0:
        flush_ranks = sorted(
            (c.rank for c in cards if c.suit == flush_suit), reverse=True
        )
        return (int(HandCategory.FLUSH), tuple(flush_ranks[:5]))
    straight = _straight_high(mask)
    if straight:
        return (int(HandCategory.STRAIGHT), (straight,))
    if trips:
        return (int(HandCategory.THREE_OF_A_KIND), (trips,) + tuple(singles[:2]))
    if len(pairs) >= 2:
        kicker_pool = pairs[2:] + singles
        kicker = max(kicker_pool)
        return (int(HandCategory.TWO_PAIR), (pairs[0], pairs[1], kicker))
    if pairs:
        return (int(HandCategory.ONE_PAIR), (pairs[0],) + tuple(singles[:3]))
    return (int(HandCategory.HIGH_CARD), tuple(singles[:5]))


def evaluate_best(hole: Sequence[Card], board: Sequence[Card]) -> HandValue:
    """Best achievable HandValue from two hole cards and 0/3/4/5 board cards.

    Preflop (empty board) grades the hole pair itself: a pocket pair is
    OnePair, anything else HighCard.
    """
    if len(hole) != 2:
        raise CardError(f"expected 2 hole cards, got {len(hole)}")
    if len(board) not in (0, 3, 4, 5):
        raise CardError(f"board must have 0, 3, 4 or 5 cards, got {len(board)}")
    cards = list(hole) + list(board)
    if len(set(cards)) != len(cards):
        raise CardError("duplicate cards in hole/board")

    if not board:
        a, b = hole[0].rank, hole[1].rank
        if a == b:
            return HandValue(HandCategory.ONE_PAIR, (a,))
        return HandValue(HandCategory.HIGH_CARD, (max(a, b), min(a, b)))

    cat, tb = score_cards(cards)
    return HandValue(HandCategory(cat), tb)


def hole_characteristics(hole: Sequence[Card]) -> frozenset[str]:
    """Flags of the two private cards: 'suit', 'high', 'close'.

    suit: same suit; high: a card above nine; close: rank gap under five
    (ace always counts as 14 here).
    """
    if len(hole) != 2 or hole[0] == hole[1]:
        raise CardError("hole characteristics need two distinct cards")
    a, b = hole
    flags = set()
    if a.suit == b.suit:
        flags.add("suit")
    if max(a.rank, b.rank) > 9:
        flags.add("high")
    if abs(a.rank - b.rank) < 5:
        flags.add("close")
    return frozenset(flags)


CHARACTERISTIC_ORDER = ("suit", "high", "close")


def best_five_brute_force(cards: Sequence[Card]) -> tuple[int, tuple[int, ...]]:
    """Max score over every 5-card subset; slow, kept for cross-checks."""
    return max(score_cards(combo) for combo in itertools.combinations(cards, 5))


def _straight_span(high: int) -> str:
    low_name = "Ace" if high == 5 else RANK_NAMES[high - 4]
    return f"{low_name} to {RANK_NAMES[high]}"


def describe_hand(value: HandValue) -> str:
    """Log-style phrase for a hand, e.g. 'two pair, Tens and Fives'."""
    cat, tb = value.category, value.tiebreaks
    if cat == HandCategory.ROYAL_FLUSH:
        return "a royal flush"
    if cat == HandCategory.STRAIGHT_FLUSH:
        return f"a straight flush, {_straight_span(tb[0])}"
    if cat == HandCategory.FOUR_OF_A_KIND:
        return f"four of a kind, {RANK_PLURALS[tb[0]]}"
    if cat == HandCategory.FULL_HOUSE:
        return f"a full house, {RANK_PLURALS[tb[0]]} full of {RANK_PLURALS[tb[1]]}"
    if cat == HandCategory.FLUSH:
        return f"a flush, {RANK_NAMES[tb[0]]} high"
    if cat == HandCategory.STRAIGHT:
        return f"a straight, {_straight_span(tb[0])}"
    if cat == HandCategory.THREE_OF_A_KIND:
        return f"three of a kind, {RANK_PLURALS[tb[0]]}"
    if cat == HandCategory.TWO_PAIR:
        return f"two pair, {RANK_PLURALS[tb[0]]} and {RANK_PLURALS[tb[1]]}"
    if cat == HandCategory.ONE_PAIR:
        return f"a pair of {RANK_PLURALS[tb[0]]}"
    return f"high card {RANK_NAMES[tb[0]]}"


_CATEGORY_PHRASES = [
    ("a royal flush", HandCategory.ROYAL_FLUSH),
    ("a straight flush", HandCategory.STRAIGHT_FLUSH),
    ("four of a kind", HandCategory.FOUR_OF_A_KIND),
    ("a full house", HandCategory.FULL_HOUSE),
    ("a flush", HandCategory.FLUSH),
    ("a straight", HandCategory.STRAIGHT),
    ("three of a kind", HandCategory.THREE_OF_A_KIND),
    ("two pair", HandCategory.TWO_PAIR),
    ("a pair of", HandCategory.ONE_PAIR),
    ("a pair", HandCategory.ONE_PAIR),
    ("high card", HandCategory.HIGH_CARD),
]


def category_from_phrase(text: str) -> Optional[HandCategory]:
    """Recover the category from a log phrase, None if unrecognized."""
    lowered = text.lower()
    for prefix, cat in _CATEGORY_PHRASES:
        if lowered.startswith(prefix):
            return cat
    return None


def parse_cards(labels: Iterable[str]) -> list[Card]:
    return [parse_card(label) for label in labels]
