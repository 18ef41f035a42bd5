"""PokerStars-style hand-history parsing into structured HandRecords.

A hand block has three layers: the header/seating preamble, the per-street
action lines, and the summary. Money is kept in integer cents; per-hand
conservation (sum of net results == -rake) is enforced at parse time.
Unknown lines never fail a hand; they become diagnostics.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum, unique
from typing import Iterator, Optional

from .cards import Card, HandCategory, category_from_phrase, parse_card
from .money import fmt_cents, to_cents

SCHEMA_VERSION = "hand_record.v1"


class HandParseError(ValueError):
    """A hand block that cannot be turned into a consistent record."""

    def __init__(self, message: str, line_no: int = 0):
        super().__init__(message)
        self.line_no = line_no


class HandStructureError(HandParseError):
    """Missing header/summary or malformed required line."""


class HandSemanticError(HandParseError):
    """Amounts that do not add up (overspent stacks, bad pot totals)."""


@dataclass(frozen=True)
class Diagnostic:
    source: str
    line_no: int
    message: str

    def __str__(self) -> str:
        return f"{self.source}:{self.line_no}: {self.message}"


@unique
class Street(IntEnum):
    PREFLOP = 0
    FLOP = 1
    TURN = 2
    RIVER = 3
    SHOWDOWN = 4


@unique
class ActionKind(str, Enum):
    POST_BLIND = "post_blind"
    FOLD = "fold"
    CHECK = "check"
    CALL = "call"
    BET = "bet"
    RAISE = "raise"
    ALL_IN = "all_in"
    SHOW = "show"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


MONEY_KINDS = frozenset(
    {ActionKind.POST_BLIND, ActionKind.CALL, ActionKind.BET, ActionKind.RAISE, ActionKind.ALL_IN}
)


@dataclass(frozen=True)
class BlindStructure:
    small_blind: int
    big_blind: int
    currency: str = "USD"

    def __post_init__(self) -> None:
        if not 0 < self.small_blind < self.big_blind:
            raise ValueError(
                f"blinds must satisfy 0 < small < big, got {self.small_blind}/{self.big_blind}"
            )


@dataclass(frozen=True)
class SeatEntry:
    seat_no: int
    player_name: str
    starting_stack: int


@dataclass(frozen=True)
class ActionEvent:
    street: Street
    actor: str
    kind: ActionKind
    amount: int = 0
    raise_to: Optional[int] = None


@dataclass
class HandRecord:
    hand_id: str
    blinds: BlindStructure
    dealer_seat: int
    seats: list[SeatEntry]
    hole_cards: dict[str, tuple[Card, Card]]
    board: list[tuple[Card, Street]]
    actions: list[ActionEvent]
    pot_total: int
    rake: int
    results: dict[str, int]
    shown_ranks: dict[str, HandCategory]
    uncalled_returns: dict[str, int] = field(default_factory=dict)
    raw_text: str = ""

    @property
    def big_blind(self) -> int:
        return self.blinds.big_blind

    def seat_of(self, player: str) -> Optional[int]:
        for entry in self.seats:
            if entry.player_name == player:
                return entry.seat_no
        return None

    def player_at(self, seat_no: int) -> Optional[str]:
        for entry in self.seats:
            if entry.seat_no == seat_no:
                return entry.player_name
        return None

    def board_cards(self) -> list[Card]:
        return [card for card, _ in self.board]

    def folded_players(self) -> set[str]:
        return {a.actor for a in self.actions if a.kind == ActionKind.FOLD}

    def final_street(self) -> Street:
        return max((a.street for a in self.actions), default=Street.PREFLOP)


_RE_HEADER = re.compile(
    r"^PokerStars (?:Zoom )?(?:Hand|Game) #(?P<id>[\w-]+):\s+Hold'em No Limit\s+"
    r"\((?:[$€£])?(?P<sb>[\d.]+)/(?:[$€£])?(?P<bb>[\d.]+)(?:\s+(?P<cur>[A-Z]{3}))?\)"
)
_RE_TABLE = re.compile(r"^Table '[^']*' \d+-max Seat #(?P<btn>\d+) is the button")
_RE_SEAT = re.compile(
    r"^Seat (?P<no>\d+): (?P<name>.+?) \((?:[$€£])?(?P<stack>[\d.,]+) in chips\)"
)
_RE_POST = re.compile(
    r"^(?P<name>.+?): posts (?P<which>small blind|big blind) (?:[$€£])?(?P<amt>[\d.,]+)"
    r"(?P<allin> and is all-in)?$"
)
_RE_ACTION = re.compile(
    r"^(?P<name>.+?): (?P<verb>folds|checks|calls|bets|raises)"
    r"(?:\s+(?:[$€£])?(?P<amt>[\d.,]+))?(?:\s+to\s+(?:[$€£])?(?P<to>[\d.,]+))?"
    r"(?P<allin> and is all-in)?$"
)
_RE_FLOP = re.compile(r"^\*\*\* FLOP \*\*\* \[(?P<cards>[^\]]+)\]")
_RE_TURN = re.compile(r"^\*\*\* TURN \*\*\* \[[^\]]+\] \[(?P<card>\w\w)\]")
_RE_RIVER = re.compile(r"^\*\*\* RIVER \*\*\* \[[^\]]+\] \[(?P<card>\w\w)\]")
_RE_SHOWDOWN = re.compile(r"^\*\*\* SHOW ?DOWN \*\*\*")
_RE_HOLE_MARK = re.compile(r"^\*\*\* HOLE CARDS \*\*\*")
_RE_SUMMARY_MARK = re.compile(r"^\*\*\* SUMMARY \*\*\*")
_RE_DEALT = re.compile(r"^Dealt to (?P<name>.+?) \[(?P<cards>\w\w \w\w)\]")
_RE_SHOWS = re.compile(
    r"^(?P<name>.+?): shows \[(?P<cards>\w\w \w\w)\](?: \((?P<desc>[^)]*)\))?$"
)
_RE_MUCKS = re.compile(r"^(?P<name>.+?): mucks hand$")
_RE_NO_SHOW = re.compile(r"^(?P<name>.+?): doesn't show hand$")
_RE_UNCALLED = re.compile(
    r"^Uncalled bet \((?:[$€£])?(?P<amt>[\d.,]+)\) returned to (?P<name>.+)$"
)
_RE_COLLECTED = re.compile(
    r"^(?P<name>.+?) collected (?:[$€£])?(?P<amt>[\d.,]+) from (?:main |side )?pot(?:-\d+)?$"
)
_RE_TOTAL_POT = re.compile(
    r"^Total pot (?:[$€£])?(?P<pot>[\d.,]+)(?: Main pot.*)?\s*\|\s*Rake (?:[$€£])?(?P<rake>[\d.,]+)"
)
_RE_SUMMARY_BOARD = re.compile(r"^Board \[(?P<cards>[^\]]+)\]$")
_RE_SUMMARY_SEAT = re.compile(r"^Seat (?P<no>\d+): (?P<name>.+?) (?P<rest>\(.*|folded.*|showed.*|mucked.*|collected.*)$")
_RE_SUMMARY_CARDS = re.compile(r"(?:showed|mucked) \[(?P<cards>\w\w \w\w)\]")


def _parse_card_pair(text: str, line_no: int) -> tuple[Card, Card]:
    parts = text.split()
    if len(parts) != 2:
        raise HandStructureError(f"expected two cards, got {text!r}", line_no)
    return (parse_card(parts[0]), parse_card(parts[1]))


def parse_hand(
    text: str,
    *,
    source: str = "<hand>",
    line_offset: int = 0,
    diagnostics: Optional[list[Diagnostic]] = None,
) -> HandRecord:
    """Parse one hand block into a HandRecord.

    Unrecognized lines are appended to `diagnostics` (when given) and
    otherwise ignored; structural or semantic inconsistencies raise.
    """
    sink = diagnostics if diagnostics is not None else []
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise HandStructureError("empty hand block", line_offset + 1)

    header = _RE_HEADER.match(lines[0])
    if not header:
        raise HandStructureError(
            f"missing hand header: {lines[0][:60]!r}", line_offset + 1
        )
    blinds = BlindStructure(
        small_blind=to_cents(header.group("sb")),
        big_blind=to_cents(header.group("bb")),
        currency=header.group("cur") or "USD",
    )
    hand_id = header.group("id")

    dealer_seat: Optional[int] = None
    seats: list[SeatEntry] = []
    seat_names: dict[str, SeatEntry] = {}
    hole_cards: dict[str, tuple[Card, Card]] = {}
    board: list[tuple[Card, Street]] = []
    actions: list[ActionEvent] = []
    shown_ranks: dict[str, HandCategory] = {}
    uncalled: dict[str, int] = {}
    collected: dict[str, int] = {}
    contributed: dict[str, int] = {}
    street_contrib: dict[str, int] = {}
    pot_total: Optional[int] = None
    rake = 0
    summary_board: Optional[list[Card]] = None

    street = Street.PREFLOP
    in_summary = False
    seen_summary_mark = False

    def note(line_no: int, message: str) -> None:
        sink.append(Diagnostic(source, line_offset + line_no, message))

    def spend(name: str, amount: int, line_no: int) -> None:
        if name not in seat_names:
            raise HandStructureError(f"action by unseated player {name!r}", line_no)
        entry = seat_names[name]
        already = contributed.get(name, 0)
        if already + amount > entry.starting_stack:
            raise HandSemanticError(
                f"{name} commits {fmt_cents(already + amount)} exceeding "
                f"stack {fmt_cents(entry.starting_stack)}",
                line_no,
            )
        contributed[name] = already + amount
        street_contrib[name] = street_contrib.get(name, 0) + amount

    for i, raw_line in enumerate(lines[1:], start=2):
        line = raw_line.rstrip()
        abs_no = line_offset + i
        if not line:
            continue

        if _RE_SUMMARY_MARK.match(line):
            in_summary = True
            seen_summary_mark = True
            continue

        if in_summary:
            m = _RE_TOTAL_POT.match(line)
            if m:
                pot_total = to_cents(m.group("pot"))
                rake = to_cents(m.group("rake"))
                continue
            m = _RE_SUMMARY_BOARD.match(line)
            if m:
                summary_board = [parse_card(t) for t in m.group("cards").split()]
                continue
            m = _RE_SUMMARY_SEAT.match(line)
            if m:
                cards_m = _RE_SUMMARY_CARDS.search(m.group("rest"))
                name = m.group("name")
                if cards_m and name in seat_names and name not in hole_cards:
                    hole_cards[name] = _parse_card_pair(cards_m.group("cards"), abs_no)
                continue
            m = _RE_COLLECTED.match(line)
            if m:
                # some rooms repeat collections only in the summary; ours do not
                continue
            note(i, f"unrecognized summary line: {line!r}")
            continue

        if _RE_HOLE_MARK.match(line):
            continue
        m = _RE_FLOP.match(line)
        if m:
            street = Street.FLOP
            street_contrib.clear()
            for tok in m.group("cards").split():
                board.append((parse_card(tok), Street.FLOP))
            continue
        m = _RE_TURN.match(line)
        if m:
            street = Street.TURN
            street_contrib.clear()
            board.append((parse_card(m.group("card")), Street.TURN))
            continue
        m = _RE_RIVER.match(line)
        if m:
            street = Street.RIVER
            street_contrib.clear()
            board.append((parse_card(m.group("card")), Street.RIVER))
            continue
        if _RE_SHOWDOWN.match(line):
            street = Street.SHOWDOWN
            continue

        m = _RE_TABLE.match(line)
        if m:
            dealer_seat = int(m.group("btn"))
            continue
        m = _RE_SEAT.match(line)
        if m:
            entry = SeatEntry(
                seat_no=int(m.group("no")),
                player_name=m.group("name"),
                starting_stack=to_cents(m.group("stack")),
            )
            if any(s.seat_no == entry.seat_no for s in seats):
                raise HandStructureError(f"duplicate seat {entry.seat_no}", abs_no)
            seats.append(entry)
            seat_names[entry.player_name] = entry
            continue
        m = _RE_POST.match(line)
        if m:
            # a short all-in post still parses as a blind so replay can
            # distinguish forced bets from voluntary ones
            amt = to_cents(m.group("amt"))
            spend(m.group("name"), amt, abs_no)
            actions.append(ActionEvent(street, m.group("name"), ActionKind.POST_BLIND, amt))
            continue
        m = _RE_DEALT.match(line)
        if m:
            if m.group("name") in seat_names:
                hole_cards[m.group("name")] = _parse_card_pair(m.group("cards"), abs_no)
            continue
        m = _RE_SHOWS.match(line)
        if m:
            name = m.group("name")
            if name not in seat_names:
                raise HandStructureError(f"show by unseated player {name!r}", abs_no)
            hole_cards[name] = _parse_card_pair(m.group("cards"), abs_no)
            desc = m.group("desc")
            if desc:
                cat = category_from_phrase(desc)
                if cat is not None:
                    shown_ranks[name] = cat
                else:
                    note(i, f"unrecognized hand phrase: {desc!r}")
            actions.append(ActionEvent(Street.SHOWDOWN, name, ActionKind.SHOW))
            continue
        if _RE_MUCKS.match(line) or _RE_NO_SHOW.match(line):
            continue
        m = _RE_UNCALLED.match(line)
        if m:
            name = m.group("name")
            amt = to_cents(m.group("amt"))
            if contributed.get(name, 0) < amt:
                raise HandSemanticError(
                    f"uncalled return {fmt_cents(amt)} exceeds {name}'s contribution",
                    abs_no,
                )
            uncalled[name] = uncalled.get(name, 0) + amt
            contributed[name] -= amt
            continue
        m = _RE_COLLECTED.match(line)
        if m:
            name = m.group("name")
            if name not in seat_names:
                raise HandStructureError(f"collection by unseated player {name!r}", abs_no)
            collected[name] = collected.get(name, 0) + to_cents(m.group("amt"))
            continue
        m = _RE_ACTION.match(line)
        if m:
            name, verb = m.group("name"), m.group("verb")
            amt = to_cents(m.group("amt")) if m.group("amt") else 0
            is_all_in = bool(m.group("allin"))
            if verb == "folds":
                actions.append(ActionEvent(street, name, ActionKind.FOLD))
            elif verb == "checks":
                actions.append(ActionEvent(street, name, ActionKind.CHECK))
            elif verb == "calls":
                spend(name, amt, abs_no)
                kind = ActionKind.ALL_IN if is_all_in else ActionKind.CALL
                actions.append(ActionEvent(street, name, kind, amt))
            elif verb == "bets":
                spend(name, amt, abs_no)
                kind = ActionKind.ALL_IN if is_all_in else ActionKind.BET
                actions.append(ActionEvent(street, name, kind, amt))
            else:  # raises $inc to $total
                if not m.group("to"):
                    raise HandStructureError(f"raise without target: {line!r}", abs_no)
                target = to_cents(m.group("to"))
                added = target - street_contrib.get(name, 0)
                if added <= 0:
                    raise HandSemanticError(
                        f"raise to {fmt_cents(target)} adds nothing for {name}", abs_no
                    )
                spend(name, added, abs_no)
                if is_all_in:
                    actions.append(ActionEvent(street, name, ActionKind.ALL_IN, added))
                else:
                    actions.append(
                        ActionEvent(street, name, ActionKind.RAISE, added, raise_to=target)
                    )
            continue

        note(i, f"unrecognized line: {line!r}")

    if not seen_summary_mark:
        raise HandStructureError("hand block has no summary section", line_offset + len(lines))
    if dealer_seat is None:
        raise HandStructureError("missing table/button line", line_offset + 1)
    if not seats:
        raise HandStructureError("no seat entries", line_offset + 1)
    if pot_total is None:
        raise HandStructureError("summary lacks a total pot line", line_offset + len(lines))

    total_contributed = sum(contributed.values())
    if total_contributed != pot_total:
        raise HandSemanticError(
            f"contributions {fmt_cents(total_contributed)} do not match "
            f"pot {fmt_cents(pot_total)}",
            line_offset + len(lines),
        )
    total_collected = sum(collected.values())
    if total_collected != pot_total - rake:
        raise HandSemanticError(
            f"collections {fmt_cents(total_collected)} do not match "
            f"pot minus rake {fmt_cents(pot_total - rake)}",
            line_offset + len(lines),
        )
    if summary_board is not None and summary_board != [c for c, _ in board]:
        raise HandSemanticError("summary board disagrees with dealt board", line_offset + len(lines))

    results = {
        entry.player_name: collected.get(entry.player_name, 0)
        - contributed.get(entry.player_name, 0)
        for entry in seats
    }

    return HandRecord(
        hand_id=hand_id,
        blinds=blinds,
        dealer_seat=dealer_seat,
        seats=seats,
        hole_cards=hole_cards,
        board=board,
        actions=actions,
        pot_total=pot_total,
        rake=rake,
        results=results,
        shown_ranks=shown_ranks,
        uncalled_returns=uncalled,
        raw_text="\n".join(lines) + "\n",
    )


def iter_hand_blocks(text: str) -> Iterator[tuple[int, str]]:
    """Yield (starting line number, block text) for blank-line-separated blocks."""
    block: list[str] = []
    start = 0
    for i, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            if not block:
                start = i
            block.append(line)
        elif block:
            yield start, "\n".join(block)
            block = []
    if block:
        yield start, "\n".join(block)


def parse_file(
    text: str, source: str = "<string>"
) -> tuple[list[HandRecord], list[Diagnostic]]:
    """Parse a concatenation of hands; per-hand failures become diagnostics."""
    records: list[HandRecord] = []
    diagnostics: list[Diagnostic] = []
    for start, block in iter_hand_blocks(text):
        try:
            records.append(
                parse_hand(
                    block,
                    source=source,
                    line_offset=start - 1,
                    diagnostics=diagnostics,
                )
            )
        except HandParseError as exc:
            diagnostics.append(Diagnostic(source, exc.line_no or start, str(exc)))
    return records, diagnostics


def has_revealed_showdown(record: HandRecord) -> bool:
    """True when the hand reached a showdown whose outcome is fully observable.

    Requires two or more players surviving to the end, a complete board,
    and known hole cards for every survivor; a mucked, unlogged hand makes
    the winner/loser relationship unobservable and excludes the hand.
    """
    folded = record.folded_players()
    live = [s.player_name for s in record.seats if s.player_name not in folded]
    if len(live) < 2:
        return False
    if len(record.board) != 5:
        return False
    return all(name in record.hole_cards for name in live)


# --- hand_record.v1 serialization -------------------------------------------


def to_json_dict(record: HandRecord) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "hand_id": record.hand_id,
        "currency": record.blinds.currency,
        "small_blind": record.blinds.small_blind,
        "big_blind": record.blinds.big_blind,
        "dealer_seat": record.dealer_seat,
        "seats": [
            {"seat": s.seat_no, "name": s.player_name, "stack": s.starting_stack}
            for s in record.seats
        ],
        "hole_cards": {
            name: [str(a), str(b)] for name, (a, b) in sorted(record.hole_cards.items())
        },
        "board": [[str(card), street.name] for card, street in record.board],
        "actions": [
            {
                "street": a.street.name,
                "actor": a.actor,
                "kind": a.kind.value,
                "amount": a.amount,
                **({"raise_to": a.raise_to} if a.raise_to is not None else {}),
            }
            for a in record.actions
        ],
        "pot_total": record.pot_total,
        "rake": record.rake,
        "results": dict(sorted(record.results.items())),
        "shown_ranks": {
            name: cat.name for name, cat in sorted(record.shown_ranks.items())
        },
        "uncalled_returns": dict(sorted(record.uncalled_returns.items())),
        "raw": record.raw_text,
    }


def from_json_dict(data: dict) -> HandRecord:
    if data.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema: {data.get('schema')!r}")
    return HandRecord(
        hand_id=data["hand_id"],
        blinds=BlindStructure(
            small_blind=data["small_blind"],
            big_blind=data["big_blind"],
            currency=data["currency"],
        ),
        dealer_seat=data["dealer_seat"],
        seats=[
            SeatEntry(s["seat"], s["name"], s["stack"]) for s in data["seats"]
        ],
        hole_cards={
            name: (parse_card(pair[0]), parse_card(pair[1]))
            for name, pair in data["hole_cards"].items()
        },
        board=[
            (parse_card(card), Street[street]) for card, street in data["board"]
        ],
        actions=[
            ActionEvent(
                street=Street[a["street"]],
                actor=a["actor"],
                kind=ActionKind(a["kind"]),
                amount=a["amount"],
                raise_to=a.get("raise_to"),
            )
            for a in data["actions"]
        ],
        pot_total=data["pot_total"],
        rake=data["rake"],
        results=dict(data["results"]),
        shown_ranks={
            name: HandCategory[cat] for name, cat in data["shown_ranks"].items()
        },
        uncalled_returns=dict(data["uncalled_returns"]),
        raw_text=data["raw"],
    )


def dumps_record(record: HandRecord) -> str:
    return json.dumps(to_json_dict(record), sort_keys=True, ensure_ascii=True)


def loads_record(line: str) -> HandRecord:
    return from_json_dict(json.loads(line))
