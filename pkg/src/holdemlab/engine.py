"""No-limit Texas Hold'em state machine for 2-15 players.

Betting follows standard no-limit rules: min-raise equals the size of the
last full raise, an all-in that increases the price reopens action, side
pots stratify by contribution level, and the odd cent of a split goes to
the earliest seat after the dealer. Chip conservation is asserted after
every transition.

Two board modes exist: a seeded deck that deals automatically (simulation)
and a manual mode where board cards arrive from outside (log replay, the
live advisor mirror).
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .cards import Card, HandValue, HandCategory, describe_hand,  full_deck, score_cards
from .grid import amount_menu
from .hand_history import (
    ActionEvent,
    ActionKind,
    BlindStructure,
    HandRecord,
    SeatEntry,
    Street,
)
from .money import fmt_cents
from .policies import PolicyDecision, PolicyView


class EngineError(Exception):
    """Engine misuse that is a bug in the caller, not a rule rejection."""


class IllegalActionError(ValueError):
    """A decision that violates the betting rules; names the violated rule."""

    def __init__(self, rule: str, detail: str = ""):
        super().__init__(f"{rule}{': ' + detail if detail else ''}")
        self.rule = rule


@dataclass(frozen=True)
class TableConfig:
    seats: tuple[SeatEntry, ...]
    blinds: BlindStructure
    dealer_seat: int
    rng_seed: Optional[int] = None  # None: board cards are supplied manually

    def __post_init__(self) -> None:
        if not 2 <= len(self.seats) <= 15:
            raise ValueError(f"player count must be 2-15, got {len(self.seats)}")
        numbers = [s.seat_no for s in self.seats]
        if len(set(numbers)) != len(numbers):
            raise ValueError("seat numbers must be unique")
        if self.dealer_seat not in numbers:
            raise ValueError(f"dealer seat {self.dealer_seat} is not occupied")
        if any(s.starting_stack <= 0 for s in self.seats):
            raise ValueError("all starting stacks must be positive")
        names = [s.player_name for s in self.seats]
        if len(set(names)) != len(names):
            raise ValueError("player names must be unique")

    @property
    def seat_numbers(self) -> list[int]:
        return sorted(s.seat_no for s in self.seats)

    def entry(self, seat_no: int) -> SeatEntry:
        for s in self.seats:
            if s.seat_no == seat_no:
                return s
        raise KeyError(seat_no)

    def name_of(self, seat_no: int) -> str:
        return self.entry(seat_no).player_name

    def seat_of(self, name: str) -> int:
        for s in self.seats:
            if s.player_name == name:
                return s.seat_no
        raise KeyError(name)


class Phase(enum.Enum):
    ACTING = "acting"
    AWAITING_BOARD = "awaiting_board"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class LegalActionSet:
    kinds: frozenset[ActionKind]
    call_amount: int
    min_raise_to: int
    max_raise_to: int
    menu: tuple[int, ...]


_STREET_CARDS = {Street.FLOP: 3, Street.TURN: 1, Street.RIVER: 1}


@dataclass
class GameState:
    config: TableConfig
    street: Street = Street.PREFLOP
    phase: Phase = Phase.ACTING
    deck: Optional[list[Card]] = None
    hole_cards: dict[int, tuple[Card, Card]] = field(default_factory=dict)
    board: list[Card] = field(default_factory=list)
    stacks: dict[int, int] = field(default_factory=dict)
    street_contrib: dict[int, int] = field(default_factory=dict)
    total_contrib: dict[int, int] = field(default_factory=dict)
    folded: set[int] = field(default_factory=set)
    all_in: set[int] = field(default_factory=set)
    current_bet: int = 0
    min_raise: int = 0
    last_aggressor: Optional[int] = None
    to_act: Optional[int] = None
    pending: list[int] = field(default_factory=list)  # acting order queue
    history: list[ActionEvent] = field(default_factory=list)
    collected: dict[int, int] = field(default_factory=dict)
    returned: dict[int, int] = field(default_factory=dict)
    unresolved: bool = False  # showdown reached with unknown hole cards

    # --- derived views -----------------------------------------------------

    @property
    def pot(self) -> int:
        return sum(self.total_contrib.values()) - sum(self.returned.values())

    @property
    def terminal(self) -> bool:
        return self.phase == Phase.TERMINAL

    def live_seats(self) -> list[int]:
        return [s for s in self.config.seat_numbers if s not in self.folded]

    def actionable_seats(self) -> list[int]:
        return [
            s
            for s in self.config.seat_numbers
            if s not in self.folded and s not in self.all_in
        ]

    def seats_after(self, seat: int) -> list[int]:
        """All occupied seats in play order starting left of `seat`."""
        ring = self.config.seat_numbers
        idx = ring.index(seat)
        return ring[idx + 1 :] + ring[: idx + 1]

    def results(self) -> dict[str, int]:
        """Net chip deltas per player name; valid once terminal."""
        out = {}
        for s in self.config.seats:
            seat = s.seat_no
            out[s.player_name] = (
                self.collected.get(seat, 0)
                + self.returned.get(seat, 0)
                - self.total_contrib.get(seat, 0)
            )
        return out

    def assert_conservation(self) -> None:
        total = sum(self.stacks.values()) + self.pot - sum(self.collected.values())
        start = sum(s.starting_stack for s in self.config.seats)
        if total != start:
            raise EngineError(
                f"chip conservation violated: {fmt_cents(total)} != {fmt_cents(start)}"
            )
        if self.phase == Phase.TERMINAL and not self.unresolved:
            unawarded = self.pot - sum(self.collected.values())
            if unawarded != 0:
                raise EngineError(
                    f"terminal state left {fmt_cents(unawarded)} unawarded"
                )

    def pots(self) -> list[tuple[int, list[int]]]:
        """Side-pot strata as (amount, eligible live seats), main pot first."""
        contrib = {
            s: self.total_contrib.get(s, 0) - self.returned.get(s, 0)
            for s in self.config.seat_numbers
        }
        levels = sorted({v for v in contrib.values() if v > 0})
        pots: list[tuple[int, list[int]]] = []
        prev = 0
        for level in levels:
            amount = sum(min(c, level) - min(c, prev) for c in contrib.values())
            eligible = [
                s
                for s in self.config.seat_numbers
                if s not in self.folded and contrib[s] >= level
            ]
            if pots and pots[-1][1] == eligible:
                pots[-1] = (pots[-1][0] + amount, eligible)
            else:
                pots.append((amount, eligible))
            prev = level
        return pots


def _post_blind(state: GameState, seat: int, amount: int) -> None:
    pay = min(amount, state.stacks[seat])
    state.stacks[seat] -= pay
    state.street_contrib[seat] += pay
    state.total_contrib[seat] += pay
    if state.stacks[seat] == 0:
        state.all_in.add(seat)
    state.history.append(
        ActionEvent(Street.PREFLOP, state.config.name_of(seat), ActionKind.POST_BLIND, pay)
    )


def new_hand(config: TableConfig) -> GameState:
    """Deal a fresh hand: blinds posted, cards dealt (when seeded), action set."""
    state = GameState(config=config)
    for s in config.seats:
        state.stacks[s.seat_no] = s.starting_stack
        state.street_contrib[s.seat_no] = 0
        state.total_contrib[s.seat_no] = 0

    order = state.seats_after(config.dealer_seat)
    if len(config.seats) == 2:
        sb_seat, bb_seat = config.dealer_seat, order[0]
    else:
        sb_seat, bb_seat = order[0], order[1]

    _post_blind(state, sb_seat, config.blinds.small_blind)
    _post_blind(state, bb_seat, config.blinds.big_blind)
    state.current_bet = max(state.street_contrib[sb_seat], state.street_contrib[bb_seat])
    state.min_raise = config.blinds.big_blind

    if config.rng_seed is not None:
        rng = random.Random(config.rng_seed)
        deck = full_deck()
        rng.shuffle(deck)
        state.deck = deck
        for seat in state.seats_after(config.dealer_seat):
            state.hole_cards[seat] = (deck.pop(), deck.pop())

    queue = [s for s in state.seats_after(bb_seat) if s not in state.all_in]
    state.pending = queue
    if queue:
        state.to_act = queue[0]
    else:
        # the blinds already put everyone all-in
        state.to_act = None
        _close_street(state)
    state.assert_conservation()
    return state


def legal_actions(state: GameState) -> LegalActionSet:
    if state.phase != Phase.ACTING or state.to_act is None:
        raise EngineError("no player is to act")
    seat = state.to_act
    stack = state.stacks[seat]
    contrib = state.street_contrib[seat]
    need = state.current_bet - contrib
    kinds: set[ActionKind] = {ActionKind.FOLD}
    call_amount = 0
    min_raise_to = 0
    all_in_level = contrib + stack

    # aggression needs someone left who could respond to it
    has_live_opponent = any(
        s != seat and s not in state.folded and s not in state.all_in
        for s in state.config.seat_numbers
    )

    if need <= 0:
        kinds.add(ActionKind.CHECK)
        if state.current_bet == 0:
            if stack > 0 and has_live_opponent:
                kinds.add(ActionKind.BET)
        elif all_in_level > state.current_bet and has_live_opponent:
            # big-blind option: the blind counts as the bet to beat
            kinds.add(ActionKind.RAISE)
            min_raise_to = state.current_bet + state.min_raise
    else:
        if stack > need:
            kinds.add(ActionKind.CALL)
            call_amount = need
            if all_in_level > state.current_bet and has_live_opponent:
                kinds.add(ActionKind.RAISE)
                min_raise_to = state.current_bet + state.min_raise
        else:
            kinds.add(ActionKind.ALL_IN)
            call_amount = stack

    menu = tuple(amount_menu(state.config.blinds.big_blind, stack))
    return LegalActionSet(
        kinds=frozenset(kinds),
        call_amount=call_amount,
        min_raise_to=min_raise_to,
        max_raise_to=all_in_level,
        menu=menu,
    )


def policy_view(state: GameState, seat: Optional[int] = None) -> PolicyView:
    """The acting seat's knowledge of the hand, for a policy decision."""
    if seat is None:
        seat = state.to_act
    if seat is None:
        raise EngineError("no acting seat for policy view")
    if seat not in state.hole_cards:
        raise EngineError(f"seat {seat} has no known hole cards")
    legal = legal_actions(state)
    return PolicyView(
        hero_seat=seat,
        hole=state.hole_cards[seat],
        board=tuple(state.board),
        street=state.street,
        pot=state.pot,
        current_bet=state.current_bet,
        street_contrib=state.street_contrib[seat],
        stack=state.stacks[seat],
        call_amount=legal.call_amount,
        kinds=legal.kinds,
        menu=legal.menu,
        min_raise_to=legal.min_raise_to,
        big_blind=state.config.blinds.big_blind,
        n_opponents=len(state.live_seats()) - 1,
    )


def _commit(state: GameState, seat: int, amount: int) -> None:
    if amount > state.stacks[seat]:
        raise IllegalActionError(
            "insufficient stack",
            f"needs {fmt_cents(amount)}, has {fmt_cents(state.stacks[seat])}",
        )
    state.stacks[seat] -= amount
    state.street_contrib[seat] += amount
    state.total_contrib[seat] += amount
    if state.stacks[seat] == 0:
        state.all_in.add(seat)


def _reopen_action(state: GameState, aggressor: int) -> None:
    """After a price increase everyone else gets to act again."""
    order = state.seats_after(aggressor)[:-1]
    state.pending = [s for s in order if s not in state.folded and s not in state.all_in]
    state.last_aggressor = aggressor


def apply_action(state: GameState, decision: PolicyDecision) -> GameState:
    """Apply the acting seat's decision, advancing street/terminal state.

    Raises IllegalActionError (state untouched) when the decision breaks a
    rule; the message names the violated constraint.
    """
    if state.phase == Phase.AWAITING_BOARD:
        raise IllegalActionError("awaiting board cards", "no betting until the board is dealt")
    if state.phase == Phase.TERMINAL:
        raise IllegalActionError("hand is over")
    seat = state.to_act
    assert seat is not None
    legal = legal_actions(state)
    kind = decision.kind
    # "all-in" is always available shorthand for committing the whole
    # stack, even when the advertised action set spells it bet or raise
    if kind == ActionKind.ALL_IN and state.stacks[seat] == 0:
        raise IllegalActionError("all_in with an empty stack")
    if kind not in legal.kinds and kind != ActionKind.ALL_IN:
        allowed = ", ".join(sorted(k.value for k in legal.kinds))
        raise IllegalActionError(
            f"{kind.value} not legal here", f"allowed: {allowed}"
        )

    contrib = state.street_contrib[seat]
    stack = state.stacks[seat]
    name = state.config.name_of(seat)

    if kind == ActionKind.FOLD:
        state.folded.add(seat)
        state.history.append(ActionEvent(state.street, name, ActionKind.FOLD))
    elif kind == ActionKind.CHECK:
        state.history.append(ActionEvent(state.street, name, ActionKind.CHECK))
    elif kind == ActionKind.CALL:
        _commit(state, seat, legal.call_amount)
        event_kind = ActionKind.ALL_IN if state.stacks[seat] == 0 else ActionKind.CALL
        state.history.append(
            ActionEvent(state.street, name, event_kind, legal.call_amount)
        )
    elif kind == ActionKind.BET:
        level = decision.amount
        if level < min(state.config.blinds.big_blind, stack):
            raise IllegalActionError(
                "bet below minimum",
                f"minimum {fmt_cents(min(state.config.blinds.big_blind, stack))}",
            )
        if level > stack:
            raise IllegalActionError("bet exceeds stack")
        _commit(state, seat, level)
        state.current_bet = level
        state.min_raise = level
        _reopen_action(state, seat)
        event_kind = ActionKind.ALL_IN if state.stacks[seat] == 0 else ActionKind.BET
        state.history.append(ActionEvent(state.street, name, event_kind, level))
    elif kind == ActionKind.RAISE:
        level = decision.amount
        added = level - contrib
        all_in_level = contrib + stack
        if level <= state.current_bet:
            raise IllegalActionError(
                "raise must exceed the current bet",
                f"current bet {fmt_cents(state.current_bet)}",
            )
        if level > all_in_level:
            raise IllegalActionError("raise exceeds stack")
        if level < legal.min_raise_to and level != all_in_level:
            raise IllegalActionError(
                "raise below minimum",
                f"minimum raise to {fmt_cents(legal.min_raise_to)}",
            )
        _commit(state, seat, added)
        increment = level - state.current_bet
        if increment >= state.min_raise:
            state.min_raise = increment
        state.current_bet = level
        _reopen_action(state, seat)
        if state.stacks[seat] == 0:
            state.history.append(ActionEvent(state.street, name, ActionKind.ALL_IN, added))
        else:
            state.history.append(
                ActionEvent(state.street, name, ActionKind.RAISE, added, raise_to=level)
            )
    elif kind == ActionKind.ALL_IN:
        level = contrib + stack
        _commit(state, seat, stack)
        if level > state.current_bet:
            increment = level - state.current_bet
            if increment >= state.min_raise:
                state.min_raise = increment
            state.current_bet = level
            _reopen_action(state, seat)
        state.history.append(ActionEvent(state.street, name, ActionKind.ALL_IN, stack))
    else:
        raise IllegalActionError(f"unsupported action kind {kind.value}")

    if state.pending and state.pending[0] == seat:
        state.pending.pop(0)
    else:
        state.pending = [s for s in state.pending if s != seat]
    state.pending = [
        s for s in state.pending if s not in state.folded and s not in state.all_in
    ]
    # with everyone else all-in, a lone player who owes nothing cannot
    # bet into anyone: the betting round is over
    actionable = state.actionable_seats()
    if len(actionable) <= 1 and not any(
        state.street_contrib[s] < state.current_bet for s in actionable
    ):
        state.pending = []

    if len(state.live_seats()) == 1:
        _settle_fold_win(state)
    elif not state.pending:
        _close_street(state)
    else:
        state.to_act = state.pending[0]
    state.assert_conservation()
    return state


def _close_street(state: GameState) -> None:
    """Betting round closed: advance streets, run out boards, or settle."""
    state.to_act = None
    state.pending = []
    while True:
        if len(state.live_seats()) == 1:
            _settle_fold_win(state)
            return
        if state.street == Street.RIVER:
            _settle_showdown(state)
            return
        next_street = Street(state.street + 1)
        needed = _STREET_CARDS[next_street]
        if state.deck is None:
            state.phase = Phase.AWAITING_BOARD
            state.street = next_street
            return
        for _ in range(needed):
            state.board.append(state.deck.pop())
        state.street = next_street
        _open_street(state)
        if state.pending:
            return


def _open_street(state: GameState) -> None:
    for seat in state.street_contrib:
        state.street_contrib[seat] = 0
    state.current_bet = 0
    state.min_raise = state.config.blinds.big_blind
    state.last_aggressor = None
    actionable = [
        s
        for s in state.seats_after(state.config.dealer_seat)
        if s not in state.folded and s not in state.all_in
    ]
    if len(actionable) >= 2:
        state.pending = actionable
        state.to_act = actionable[0]
        state.phase = Phase.ACTING
    else:
        state.pending = []
        state.to_act = None


def reveal_board(state: GameState, cards: list[Card]) -> GameState:
    """Supply the next street's cards in manual-board mode."""
    if state.phase != Phase.AWAITING_BOARD:
        raise IllegalActionError("not awaiting board cards")
    needed = _STREET_CARDS[state.street]
    if len(cards) != needed:
        raise IllegalActionError(
            "wrong number of board cards",
            f"{state.street.name} needs {needed}, got {len(cards)}",
        )
    clash = set(cards) & (set(state.board) | {c for pair in state.hole_cards.values() for c in pair})
    if clash:
        raise IllegalActionError(
            "board card already in play", ", ".join(str(c) for c in sorted(clash))
        )
    state.board.extend(cards)
    _open_street(state)
    if not state.pending:
        if state.street == Street.RIVER:
            if _can_settle(state):
                _settle_showdown(state)
            else:
                state.phase = Phase.ACTING  # terminal showdown left to the mirror owner
                _mark_showdown_pause(state)
        else:
            state.phase = Phase.AWAITING_BOARD
            state.street = Street(state.street + 1)
    state.assert_conservation()
    return state


def _mark_showdown_pause(state: GameState) -> None:
    # mirror mode without full card knowledge: betting is over, outcome unknown
    state.street = Street.SHOWDOWN
    state.phase = Phase.TERMINAL
    state.to_act = None
    state.unresolved = True


def _can_settle(state: GameState) -> bool:
    return all(seat in state.hole_cards for seat in state.live_seats())


def _return_uncalled(state: GameState) -> None:
    contrib = state.total_contrib
    ordered = sorted(contrib, key=lambda s: contrib[s], reverse=True)
    if not ordered:
        return
    top = ordered[0]
    second_best = contrib[ordered[1]] if len(ordered) > 1 else 0
    excess = contrib[top] - second_best
    if excess > 0:
        state.returned[top] = state.returned.get(top, 0) + excess
        state.stacks[top] += excess


def _settle_fold_win(state: GameState) -> None:
    _return_uncalled(state)
    winner = state.live_seats()[0]
    amount = state.pot
    state.collected[winner] = state.collected.get(winner, 0) + amount
    state.stacks[winner] += amount
    state.phase = Phase.TERMINAL
    state.to_act = None
    state.pending = []


def _settle_showdown(state: GameState) -> None:
    _return_uncalled(state)
    if not _can_settle(state):
        _mark_showdown_pause(state)
        return
    state.street = Street.SHOWDOWN
    payouts = _showdown_payouts(state)
    for seat in state.seats_after(state.config.dealer_seat):
        if seat in state.live_seats() and seat in state.hole_cards:
            name = state.config.name_of(seat)
            state.history.append(ActionEvent(Street.SHOWDOWN, name, ActionKind.SHOW))
    for seat, amount in payouts.items():
        state.collected[seat] = state.collected.get(seat, 0) + amount
        state.stacks[seat] += amount
    state.phase = Phase.TERMINAL
    state.to_act = None
    state.pending = []


def _showdown_payouts(state: GameState) -> dict[int, int]:
    """Award each pot stratum to its best eligible hand; split ties evenly."""
    scores = {
        seat: score_cards(list(state.hole_cards[seat]) + state.board)
        for seat in state.live_seats()
    }
    payouts: dict[int, int] = {}
    dealer_order = state.seats_after(state.config.dealer_seat)
    for amount, eligible in state.pots():
        if not eligible:
            continue
        best = max(scores[s] for s in eligible)
        winners = [s for s in dealer_order if s in eligible and scores[s] == best]
        share, odd = divmod(amount, len(winners))
        for i, seat in enumerate(winners):
            payouts[seat] = payouts.get(seat, 0) + share + (1 if i < odd else 0)
    return payouts


def resolve_showdown(state: GameState) -> dict[int, int]:
    """Payout map for a hand whose betting is complete (cards all known)."""
    if len(state.live_seats()) == 1:
        return {state.live_seats()[0]: state.pot}
    if not _can_settle(state):
        raise EngineError("cannot resolve showdown without every live hand")
    if len(state.board) != 5:
        raise EngineError("cannot resolve showdown before the river")
    return _showdown_payouts(state)


def hand_value_at_showdown(state: GameState, seat: int) -> HandValue:
    cat, tb = score_cards(list(state.hole_cards[seat]) + state.board)
    return HandValue(HandCategory(cat), tb)


# --- replay of parsed hands ---------------------------------------------------


class ReplayError(ValueError):
    """A parsed hand that cannot be replayed under the engine's rules."""


def config_from_record(record: HandRecord) -> TableConfig:
    return TableConfig(
        seats=tuple(record.seats),
        blinds=record.blinds,
        dealer_seat=record.dealer_seat,
        rng_seed=None,
    )


def _board_for(record: HandRecord, street: Street) -> list[Card]:
    return [card for card, st in record.board if st == street]


_DECISION_KINDS = frozenset(
    {ActionKind.FOLD, ActionKind.CHECK, ActionKind.CALL, ActionKind.BET, ActionKind.RAISE, ActionKind.ALL_IN}
)


def decision_from_event(state: GameState, event: ActionEvent) -> PolicyDecision:
    """Translate a log event into the engine decision it encodes."""
    seat = state.config.seat_of(event.actor)
    contrib = state.street_contrib[seat]
    if event.kind == ActionKind.RAISE:
        assert event.raise_to is not None
        return PolicyDecision(ActionKind.RAISE, event.raise_to)
    if event.kind == ActionKind.BET:
        return PolicyDecision(ActionKind.BET, event.amount)
    if event.kind == ActionKind.ALL_IN:
        level = contrib + event.amount
        legal = legal_actions(state)
        if ActionKind.ALL_IN in legal.kinds and level <= state.current_bet:
            return PolicyDecision(ActionKind.ALL_IN)
        if level > state.current_bet:
            if state.current_bet == 0:
                return PolicyDecision(ActionKind.BET, level)
            return PolicyDecision(ActionKind.RAISE, level)
        return PolicyDecision(ActionKind.ALL_IN)
    return PolicyDecision(event.kind)


def replay_hand(record: HandRecord) -> Iterator[tuple[GameState, ActionEvent]]:
    """Drive a parsed hand through the engine, yielding pre-action states.

    Yields (state, event) just before each voluntary action is applied.
    The consumer may inspect the final state via the generator's return
    value semantics (use `replay_final_state` for a plain call).
    """
    config = config_from_record(record)
    state = new_hand(config)
    for name, cards in record.hole_cards.items():
        state.hole_cards[config.seat_of(name)] = cards

    post_events = [e for e in record.actions if e.kind == ActionKind.POST_BLIND]
    engine_posts = [e for e in state.history if e.kind == ActionKind.POST_BLIND]
    if [(e.actor, e.amount) for e in post_events] != [
        (e.actor, e.amount) for e in engine_posts
    ]:
        raise ReplayError(
            f"hand {record.hand_id}: blind posts do not match the seating order"
        )

    for event in record.actions:
        if event.kind == ActionKind.POST_BLIND or event.kind == ActionKind.SHOW:
            continue
        if event.kind not in _DECISION_KINDS:
            continue
        while state.phase == Phase.AWAITING_BOARD:
            cards = _board_for(record, state.street)
            if not cards:
                raise ReplayError(
                    f"hand {record.hand_id}: log ends before {state.street.name} card"
                )
            reveal_board(state, cards)
        if state.terminal:
            raise ReplayError(
                f"hand {record.hand_id}: action {event.kind.value} after hand end"
            )
        actor_seat = config.seat_of(event.actor)
        if state.to_act != actor_seat:
            raise ReplayError(
                f"hand {record.hand_id}: expected seat {state.to_act} to act, "
                f"log has {event.actor} (seat {actor_seat})"
            )
        yield state, event
        try:
            apply_action(state, decision_from_event(state, event))
        except IllegalActionError as exc:
            raise ReplayError(
                f"hand {record.hand_id}: {event.actor} {event.kind.value}: {exc}"
            ) from exc

    while state.phase == Phase.AWAITING_BOARD:
        cards = _board_for(record, state.street)
        if not cards:
            break
        reveal_board(state, cards)


def settle_from_record(state: GameState, record: HandRecord) -> None:
    """Award the pot per the log when the engine cannot evaluate it itself
    (a surviving player mucked unseen)."""
    if not state.unresolved:
        return
    for entry in record.seats:
        seat = state.config.seat_of(entry.player_name)
        delta = record.results.get(entry.player_name, 0)
        collected = (
            delta
            + state.total_contrib.get(seat, 0)
            - state.returned.get(seat, 0)
        )
        if collected > 0:
            state.collected[seat] = collected
            state.stacks[seat] += collected
    state.unresolved = False


def replay_final_state(record: HandRecord) -> GameState:
    """Replay to completion and return the terminal state.

    If the engine cannot resolve the showdown (unseen mucked cards), the
    pot is awarded per the log's own collection lines.
    """
    gen = replay_hand(record)
    state: Optional[GameState] = None
    for state, _ in gen:
        pass
    if state is None:
        # hand with no voluntary actions (everyone all-in from the blinds)
        config = config_from_record(record)
        state = new_hand(config)
        for name, cards in record.hole_cards.items():
            state.hole_cards[config.seat_of(name)] = cards
        while state.phase == Phase.AWAITING_BOARD:
            cards = _board_for(record, state.street)
            if not cards:
                break
            reveal_board(state, cards)
    # the generator mutates the same state object it yielded
    settle_from_record(state, record)
    return state


# --- transcript export ---------------------------------------------------------


def export_hand_text(
    state: GameState, hand_id: str, table_name: str = "SimTable"
) -> str:
    """Terminal state -> hand-history text in the format the parser reads."""
    if not state.terminal:
        raise EngineError("can only export a finished hand")
    cfg = state.config
    bl = cfg.blinds
    lines = [
        f"PokerStars Hand #{hand_id}:  Hold'em No Limit "
        f"(${fmt_cents(bl.small_blind)}/${fmt_cents(bl.big_blind)} {bl.currency}) - "
        f"2024/01/01 00:00:00 ET",
        f"Table '{table_name}' {len(cfg.seats)}-max Seat #{cfg.dealer_seat} is the button",
    ]
    for entry in sorted(cfg.seats, key=lambda s: s.seat_no):
        lines.append(
            f"Seat {entry.seat_no}: {entry.player_name} "
            f"(${fmt_cents(entry.starting_stack)} in chips)"
        )

    stacks = {s.seat_no: s.starting_stack for s in cfg.seats}
    street_contrib = {s.seat_no: 0 for s in cfg.seats}
    current_bet = 0
    announced = Street.PREFLOP
    posts_seen = 0
    hole_marker_done = False

    def announce_up_to(target: Street) -> None:
        nonlocal announced, current_bet, street_contrib
        while announced < min(target, Street.RIVER):
            announced = Street(announced + 1)
            _emit_street_marker(lines, announced, state.board)
            street_contrib = {s: 0 for s in street_contrib}
            current_bet = 0

    for event in state.history:
        if event.kind == ActionKind.SHOW:
            continue  # shows emitted below in showdown section
        announce_up_to(event.street)
        seat = cfg.seat_of(event.actor)
        suffix = ""
        if event.kind == ActionKind.POST_BLIND:
            which = "small blind" if posts_seen == 0 else "big blind"
            posts_seen += 1
            stacks[seat] -= event.amount
            street_contrib[seat] += event.amount
            current_bet = max(current_bet, street_contrib[seat])
            if stacks[seat] == 0:
                suffix = " and is all-in"
            lines.append(
                f"{event.actor}: posts {which} ${fmt_cents(event.amount)}{suffix}"
            )
            if posts_seen == 2 and not hole_marker_done:
                lines.append("*** HOLE CARDS ***")
                hole_marker_done = True
            continue
        if event.kind == ActionKind.FOLD:
            lines.append(f"{event.actor}: folds")
            continue
        if event.kind == ActionKind.CHECK:
            lines.append(f"{event.actor}: checks")
            continue
        if event.kind == ActionKind.CALL:
            stacks[seat] -= event.amount
            street_contrib[seat] += event.amount
            lines.append(f"{event.actor}: calls ${fmt_cents(event.amount)}")
            continue
        if event.kind == ActionKind.BET:
            stacks[seat] -= event.amount
            street_contrib[seat] += event.amount
            current_bet = street_contrib[seat]
            lines.append(f"{event.actor}: bets ${fmt_cents(event.amount)}")
            continue
        if event.kind == ActionKind.RAISE:
            assert event.raise_to is not None
            stacks[seat] -= event.amount
            street_contrib[seat] += event.amount
            inc = event.raise_to - current_bet
            current_bet = event.raise_to
            lines.append(
                f"{event.actor}: raises ${fmt_cents(inc)} to ${fmt_cents(event.raise_to)}"
            )
            continue
        if event.kind == ActionKind.ALL_IN:
            level = street_contrib[seat] + event.amount
            stacks[seat] -= event.amount
            street_contrib[seat] += event.amount
            if level > current_bet:
                if current_bet == 0:
                    lines.append(
                        f"{event.actor}: bets ${fmt_cents(event.amount)} and is all-in"
                    )
                else:
                    inc = level - current_bet
                    lines.append(
                        f"{event.actor}: raises ${fmt_cents(inc)} to "
                        f"${fmt_cents(level)} and is all-in"
                    )
                current_bet = level
            else:
                lines.append(
                    f"{event.actor}: calls ${fmt_cents(event.amount)} and is all-in"
                )
            continue

    # all-in run-outs deal more board without any action events
    if len(state.board) >= 5:
        announce_up_to(Street.RIVER)
    elif len(state.board) == 4:
        announce_up_to(Street.TURN)
    elif len(state.board) == 3:
        announce_up_to(Street.FLOP)

    for seat, amount in state.returned.items():
        lines.append(
            f"Uncalled bet (${fmt_cents(amount)}) returned to {cfg.name_of(seat)}"
        )

    live = state.live_seats()
    if len(live) > 1 and state.street == Street.SHOWDOWN:
        lines.append("*** SHOW DOWN ***")
        for seat in state.seats_after(cfg.dealer_seat):
            if seat in live and seat in state.hole_cards:
                a, b = state.hole_cards[seat]
                phrase = describe_hand(hand_value_at_showdown(state, seat))
                lines.append(f"{cfg.name_of(seat)}: shows [{a} {b}] ({phrase})")
    for seat in state.seats_after(cfg.dealer_seat):
        amount = state.collected.get(seat, 0)
        if amount:
            lines.append(f"{cfg.name_of(seat)} collected ${fmt_cents(amount)} from pot")

    lines.append("*** SUMMARY ***")
    lines.append(f"Total pot ${fmt_cents(state.pot)} | Rake $0.00")
    if state.board:
        lines.append("Board [" + " ".join(str(c) for c in state.board) + "]")
    return "\n".join(lines) + "\n"


def _emit_street_marker(lines: list[str], street: Street, board: list[Card]) -> None:
    if street == Street.FLOP and len(board) >= 3:
        cards = " ".join(str(c) for c in board[:3])
        lines.append(f"*** FLOP *** [{cards}]")
    elif street == Street.TURN and len(board) >= 4:
        first = " ".join(str(c) for c in board[:3])
        lines.append(f"*** TURN *** [{first}] [{board[3]}]")
    elif street == Street.RIVER and len(board) >= 5:
        first = " ".join(str(c) for c in board[:4])
        lines.append(f"*** RIVER *** [{first}] [{board[4]}]")
