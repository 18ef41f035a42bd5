"""Render decision-point game states into the advice-prompt text.

The wording lives in a versioned template asset (`prompt.v1`) so the
exact phrasing is testable and can evolve without touching code. A full
prompt is a constant block (fixed once per hand) plus a dynamic block
(rebuilt at every decision).
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence

from .cards import (
    Card,
    CHARACTERISTIC_ORDER,
    HandCategory,
    HandValue,
    evaluate_best,
    hole_characteristics,
)
from .engine import (
    GameState,
    LegalActionSet,
    TableConfig,
    legal_actions,
    replay_hand,
)
from .grid import amount_menu, snap_amount  # re-exported; part of this surface
from .hand_history import (
    ActionEvent,
    ActionKind,
    Diagnostic,
    HandRecord,
    Street,
)
from .money import fmt_compact

__all__ = [
    "DecisionPoint",
    "TableContext",
    "amount_menu",
    "snap_amount",
    "build_constant_block",
    "build_dynamic_block",
    "full_prompt",
    "extract_decision_points",
    "decision_point_from_state",
    "action_texts_from_history",
    "PromptRecord",
    "legal_action_order",
    "rank_display",
]

TEMPLATE_VERSION = "prompt.v1"

DECISION_KINDS = frozenset(
    {
        ActionKind.FOLD,
        ActionKind.CHECK,
        ActionKind.CALL,
        ActionKind.BET,
        ActionKind.RAISE,
        ActionKind.ALL_IN,
    }
)

ACTION_WORDS = {
    ActionKind.FOLD: "fold",
    ActionKind.CHECK: "check",
    ActionKind.CALL: "call",
    ActionKind.BET: "bet",
    ActionKind.RAISE: "raise",
    ActionKind.ALL_IN: "all-in",
}


def _load_template() -> dict[str, string.Template]:
    text = (
        resources.files("holdemlab.templates").joinpath("prompt_v1.txt").read_text()
    )
    sections: dict[str, list[str]] = {}
    current: Optional[str] = None
    for line in text.splitlines():
        if line.startswith("### "):
            current = line[4:].strip()
            sections[current] = []
        elif current is not None:
            sections[current].append(line)
    return {
        name: string.Template("\n".join(lines).strip("\n"))
        for name, lines in sections.items()
    }


_TEMPLATE = _load_template()


@dataclass(frozen=True)
class TableContext:
    """Everything fixed at the start of a hand, for the constant block."""

    num_players: int
    currency: str
    small_blind: int
    big_blind: int
    seat_order: tuple[int, ...]
    small_blind_seat: int
    hero_seat: int
    hero_cards: tuple[Card, Card]

    @classmethod
    def from_record(cls, record: HandRecord, hero: str) -> "TableContext":
        if hero not in record.hole_cards:
            raise ValueError(f"hero {hero!r} has no revealed hole cards")
        seat_order = tuple(sorted(s.seat_no for s in record.seats))
        return cls(
            num_players=len(record.seats),
            currency=record.blinds.currency,
            small_blind=record.blinds.small_blind,
            big_blind=record.blinds.big_blind,
            seat_order=seat_order,
            small_blind_seat=small_blind_seat(seat_order, record.dealer_seat),
            hero_seat=record.seat_of(hero) or 0,
            hero_cards=record.hole_cards[hero],
        )

    @classmethod
    def from_config(
        cls, config: TableConfig, hero_seat: int, hero_cards: tuple[Card, Card]
    ) -> "TableContext":
        seat_order = tuple(config.seat_numbers)
        return cls(
            num_players=len(config.seats),
            currency=config.blinds.currency,
            small_blind=config.blinds.small_blind,
            big_blind=config.blinds.big_blind,
            seat_order=seat_order,
            small_blind_seat=small_blind_seat(seat_order, config.dealer_seat),
            hero_seat=hero_seat,
            hero_cards=hero_cards,
        )


def small_blind_seat(seat_order: Sequence[int], dealer_seat: int) -> int:
    """Heads-up the dealer posts the small blind, otherwise the next seat."""
    ring = sorted(seat_order)
    if len(ring) == 2:
        return dealer_seat
    idx = ring.index(dealer_seat)
    return ring[(idx + 1) % len(ring)]


@dataclass
class DecisionPoint:
    """One to-act state for the hero, optionally with the real action."""

    hand_id: str
    street: Street
    hero: str
    hero_seat: int
    hole: tuple[Card, Card]
    board_visible: tuple[Optional[Card], ...]  # always 5 slots
    stacks: dict[int, int]
    action_history: dict[int, list[str]]
    discard_flags: dict[int, bool]
    pot: int
    legal_kinds: frozenset[ActionKind]
    amount_menu: tuple[int, ...]
    shown_cards: dict[int, tuple[Optional[Card], Optional[Card]]] = field(
        default_factory=dict
    )
    label: Optional[ActionEvent] = None
    terminal: bool = False

    @property
    def characteristics(self) -> frozenset[str]:
        return hole_characteristics(self.hole)

    @property
    def rank(self) -> HandValue:
        board = [c for c in self.board_visible if c is not None]
        return evaluate_best(self.hole, board)

    def label_decision(self) -> tuple[ActionKind, int]:
        """Ground-truth (kind, amount) with the amount snapped to the menu.

        A logged shove maps onto the offered action set: it becomes a
        raise/bet to the all-in menu amount unless the only way in was
        the short-call "all-in" action itself.
        """
        if self.label is None:
            raise ValueError("decision point carries no label")
        event = self.label
        if event.kind == ActionKind.RAISE:
            assert event.raise_to is not None
            return (ActionKind.RAISE, snap_amount(event.raise_to, list(self.amount_menu)))
        if event.kind == ActionKind.BET:
            return (ActionKind.BET, snap_amount(event.amount, list(self.amount_menu)))
        if event.kind == ActionKind.ALL_IN:
            top = self.amount_menu[-1]
            if ActionKind.RAISE in self.legal_kinds:
                return (ActionKind.RAISE, top)
            if ActionKind.BET in self.legal_kinds:
                return (ActionKind.BET, top)
            return (ActionKind.ALL_IN, top)
        return (event.kind, 0)


def _quote_single(items: Sequence[str]) -> str:
    return ", ".join(f"'{item}'" for item in items)


def _quote_double(items: Sequence[str]) -> str:
    return ", ".join(f'"{item}"' for item in items)


def _board_slots(board_visible: Sequence[Optional[Card]]) -> str:
    return " ".join(
        f"'{card}'" if card is not None else "'**'" for card in board_visible
    )


def rank_display(dp: DecisionPoint) -> str:
    value = dp.rank
    if value.category == HandCategory.HIGH_CARD and all(
        c is None for c in dp.board_visible
    ):
        return "High"
    return value.category.display_name


def legal_action_order(kinds: frozenset[ActionKind]) -> list[ActionKind]:
    order: list[ActionKind] = [ActionKind.FOLD]
    if ActionKind.CHECK in kinds:
        order.append(ActionKind.CHECK)
        for k in (ActionKind.BET, ActionKind.RAISE):
            if k in kinds:
                order.append(k)
    else:
        for k in (ActionKind.RAISE, ActionKind.CALL, ActionKind.ALL_IN):
            if k in kinds:
                order.append(k)
    return order


def build_constant_block(ctx: TableContext) -> str:
    role = _TEMPLATE["role"].template
    constant = _TEMPLATE["constant"].substitute(
        player_amount=ctx.num_players,
        currency=ctx.currency,
        small_blind=fmt_compact(ctx.small_blind),
        big_blind=fmt_compact(ctx.big_blind),
        seat_order=_quote_single([str(s) for s in ctx.seat_order]),
        small_blind_seat=ctx.small_blind_seat,
        hero_cards=_quote_single([str(c) for c in ctx.hero_cards]),
        characteristics=_quote_double(
            [c for c in CHARACTERISTIC_ORDER if c in hole_characteristics(ctx.hero_cards)]
        ),
        hero_seat=ctx.hero_seat,
    )
    return role + "\n" + constant


def build_dynamic_block(dp: DecisionPoint) -> str:
    lines = [
        _TEMPLATE["dynamic_header"].substitute(
            stage=dp.street.name,
            board=_board_slots(dp.board_visible),
            rank=rank_display(dp),
            hero_money=fmt_compact(dp.stacks[dp.hero_seat]),
            hero_actions=_quote_double(dp.action_history.get(dp.hero_seat, [])),
        )
    ]
    for seat in sorted(dp.stacks):
        if seat == dp.hero_seat:
            continue
        shown = dp.shown_cards.get(seat, (None, None))
        cards = _quote_single([str(c) if c is not None else "**" for c in shown])
        lines.append(
            _TEMPLATE["opponent_row"].substitute(
                seat=seat,
                cards=cards,
                money=fmt_compact(dp.stacks[seat]),
                actions=_quote_double(dp.action_history.get(seat, [])),
                discard=str(dp.discard_flags.get(seat, False)),
            )
        )
    lines.append(_TEMPLATE["pot"].substitute(pot=fmt_compact(dp.pot)))
    if dp.terminal:
        lines.append(_TEMPLATE["terminal"].template)
    else:
        lines.append(
            _TEMPLATE["question"].substitute(
                legal_actions=_quote_double(
                    [ACTION_WORDS[k] for k in legal_action_order(dp.legal_kinds)]
                ),
                amount_menu=", ".join(fmt_compact(a) for a in dp.amount_menu),
            )
        )
    return "\n".join(lines)


def full_prompt(ctx: TableContext, dp: DecisionPoint) -> str:
    return build_constant_block(ctx) + "\n" + build_dynamic_block(dp)


def action_texts_from_history(
    config: TableConfig, history: Sequence[ActionEvent]
) -> dict[int, list[str]]:
    """Per-seat prompt phrases for every voluntary action so far."""
    texts: dict[int, list[str]] = {s.seat_no: [] for s in config.seats}
    current_bet = 0
    street = Street.PREFLOP
    street_contrib: dict[int, int] = {s.seat_no: 0 for s in config.seats}
    for event in history:
        if event.street != street:
            street = event.street
            current_bet = 0
            street_contrib = {s: 0 for s in street_contrib}
        seat = config.seat_of(event.actor)
        if event.kind == ActionKind.POST_BLIND:
            street_contrib[seat] += event.amount
            current_bet = max(current_bet, street_contrib[seat])
            continue
        if event.kind == ActionKind.SHOW:
            continue
        if event.kind == ActionKind.FOLD:
            texts[seat].append("fold")
        elif event.kind == ActionKind.CHECK:
            texts[seat].append("check")
        elif event.kind == ActionKind.CALL:
            street_contrib[seat] += event.amount
            texts[seat].append("call")
        elif event.kind == ActionKind.BET:
            street_contrib[seat] += event.amount
            current_bet = street_contrib[seat]
            texts[seat].append(f"bets {fmt_compact(event.amount)}")
        elif event.kind == ActionKind.RAISE:
            assert event.raise_to is not None
            street_contrib[seat] += event.amount
            inc = event.raise_to - current_bet
            current_bet = event.raise_to
            texts[seat].append(
                f"raises {fmt_compact(inc)} to {fmt_compact(event.raise_to)}"
            )
        elif event.kind == ActionKind.ALL_IN:
            street_contrib[seat] += event.amount
            level = street_contrib[seat]
            current_bet = max(current_bet, level)
            texts[seat].append("all-in")
    return texts


def decision_point_from_state(
    state: GameState,
    hero_seat: int,
    hand_id: str,
    label: Optional[ActionEvent] = None,
    shown_cards: Optional[dict[int, tuple[Optional[Card], Optional[Card]]]] = None,
) -> DecisionPoint:
    """Snapshot the acting hero's view of a live engine state."""
    if hero_seat not in state.hole_cards:
        raise ValueError(f"seat {hero_seat} has no known hole cards")
    terminal = state.terminal
    legal: Optional[LegalActionSet] = None
    if not terminal and state.to_act == hero_seat:
        legal = legal_actions(state)
    board_visible = tuple(state.board) + (None,) * (5 - len(state.board))
    stack = state.stacks[hero_seat]
    menu = tuple(
        legal.menu if legal is not None else amount_menu(state.config.blinds.big_blind, stack)
    )
    return DecisionPoint(
        hand_id=hand_id,
        street=state.street,
        hero=state.config.name_of(hero_seat),
        hero_seat=hero_seat,
        hole=state.hole_cards[hero_seat],
        board_visible=board_visible,
        stacks=dict(state.stacks),
        action_history=action_texts_from_history(state.config, state.history),
        discard_flags={s: s in state.folded for s in state.config.seat_numbers},
        pot=state.pot,
        legal_kinds=legal.kinds if legal is not None else frozenset(),
        amount_menu=menu,
        shown_cards=dict(shown_cards or {}),
        label=label,
        terminal=terminal,
    )


def extract_decision_points(
    record: HandRecord,
    hero: str,
    diagnostics: Optional[list[Diagnostic]] = None,
) -> list[DecisionPoint]:
    """One labeled DecisionPoint per hero action, replayed through the engine.

    An irrecoverable log inconsistency skips the hand with a diagnostic
    rather than raising.
    """
    if hero not in record.hole_cards:
        raise ValueError(f"hero {hero!r} has no revealed hole cards in {record.hand_id}")
    points: list[DecisionPoint] = []
    hero_seat = record.seat_of(hero)
    assert hero_seat is not None
    try:
        for state, event in replay_hand(record):
            if event.actor != hero or event.kind not in DECISION_KINDS:
                continue
            points.append(
                decision_point_from_state(state, hero_seat, record.hand_id, label=event)
            )
    except Exception as exc:  # ReplayError or a malformed record
        if diagnostics is not None:
            diagnostics.append(Diagnostic(record.hand_id, 0, f"replay failed: {exc}"))
        return []
    return points


@dataclass(frozen=True)
class PromptRecord:
    """The unit handed to dataset emission: prompt text plus its label."""

    prompt: str
    label_action: str
    label_amount: int
    meta: dict

    def response_sentence(self) -> str:
        word = self.label_action
        if word == "bet":
            return f"You should bet {fmt_compact(self.label_amount)}."
        if word == "raise":
            return f"You should raise to {fmt_compact(self.label_amount)}."
        if word == "all-in":
            return "You should all-in."
        return f"You should {word}."


def prompt_records_for_hero(
    record: HandRecord,
    hero: str,
    band_label: str = "",
    diagnostics: Optional[list[Diagnostic]] = None,
    raw_prompt: bool = False,
) -> list[PromptRecord]:
    """Labelled prompt/response records for one hero in one hand."""
    ctx = TableContext.from_record(record, hero)
    out: list[PromptRecord] = []
    for dp in extract_decision_points(record, hero, diagnostics):
        kind, amount = dp.label_decision()
        prompt = record.raw_text if raw_prompt else full_prompt(ctx, dp)
        out.append(
            PromptRecord(
                prompt=prompt,
                label_action=ACTION_WORDS[kind],
                label_amount=amount,
                meta={
                    "hand_id": record.hand_id,
                    "street": dp.street.name,
                    "hero": hero,
                    "winrate_band": band_label,
                },
            )
        )
    return out
