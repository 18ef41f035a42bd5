"""Live advisor HTTP service.

A session mirrors one running hand: the table config is registered once,
game events are posted as they happen, and the current prompt plus a
recommendation can be fetched at any time. The mirror is the same engine
the simulator uses, so event legality and the rendered prompt have a
single source of truth.

Sessions persist as append-only event logs; a restarted service rebuilds
its state by replaying them.
"""

from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .cards import Card, full_deck, parse_card
from .engine import (
    GameState,
    IllegalActionError,
    Phase,
    TableConfig,
    apply_action,
    legal_actions,
    new_hand,
    policy_view,
    reveal_board,
)
from .hand_history import ActionKind, BlindStructure, SeatEntry
from .money import to_cents
from .policies import (
    EquityParams,
    EquityPolicy,
    PolicyDecision,
    RemoteEndpoint,
    format_response,
    remote_decide,
)
from .prompts import (
    ACTION_WORDS,
    TableContext,
    build_constant_block,
    decision_point_from_state,
    full_prompt,
    legal_action_order,
    rank_display,
)

logger = logging.getLogger(__name__)

DEFAULT_ADVISOR_TIMEOUT_S = 10.0


class ApiError(Exception):
    def __init__(
        self,
        status: int,
        code: str,
        message: str,
        violated_rule: Optional[str] = None,
    ):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.violated_rule = violated_rule

    def body(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.violated_rule:
            out["violated_rule"] = self.violated_rule
        return out


@dataclass
class ServiceSettings:
    advisor: str = "equity"  # "equity" or "remote:<url>"
    advisor_timeout_s: float = DEFAULT_ADVISOR_TIMEOUT_S
    persist_dir: Optional[Path] = None
    equity_samples: int = 400
    ui_dir: Optional[Path] = None


class SeatModel(BaseModel):
    seat: int
    stack: float
    name: Optional[str] = None


class BlindsModel(BaseModel):
    small: float
    big: float
    currency: str = "USD"


class CreateSessionModel(BaseModel):
    players: list[SeatModel]
    blinds: BlindsModel
    dealer_seat: int
    hero_seat: int
    hero_cards: list[str] = Field(min_length=2, max_length=2)
    advisor: Optional[str] = None


class EventModel(BaseModel):
    type: str  # action | board | show
    seat: Optional[int] = None
    action: Optional[str] = None
    amount: Optional[float] = None
    cards: Optional[list[Optional[str]]] = None


class AdviceModel(BaseModel):
    directive: Optional[str] = None


_EVENT_ACTIONS = {
    "fold": ActionKind.FOLD,
    "check": ActionKind.CHECK,
    "call": ActionKind.CALL,
    "bet": ActionKind.BET,
    "raise": ActionKind.RAISE,
    "all-in": ActionKind.ALL_IN,
    "all_in": ActionKind.ALL_IN,
}


@dataclass
class Session:
    session_id: str
    config: TableConfig
    hero_seat: int
    hero_cards: tuple[Card, Card]
    advisor: str
    state: GameState = field(init=False)
    ctx: TableContext = field(init=False)
    constant_block: str = field(init=False)
    shown_cards: dict[int, tuple[Optional[Card], Optional[Card]]] = field(
        default_factory=dict
    )
    event_log: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self) -> None:
        self.state = new_hand(self.config)
        self.state.hole_cards[self.hero_seat] = self.hero_cards
        self.ctx = TableContext.from_config(
            self.config, self.hero_seat, self.hero_cards
        )
        self.constant_block = build_constant_block(self.ctx)

    # -- events ---------------------------------------------------------

    def apply_event(self, event: EventModel) -> None:
        if event.type == "action":
            self._apply_action_event(event)
        elif event.type == "board":
            self._apply_board_event(event)
        elif event.type == "show":
            self._apply_show_event(event)
        else:
            raise ApiError(400, "bad_event", f"unknown event type {event.type!r}")

    def _apply_action_event(self, event: EventModel) -> None:
        if event.seat is None or event.action is None:
            raise ApiError(400, "bad_event", "action events need seat and action")
        kind = _EVENT_ACTIONS.get(event.action)
        if kind is None:
            raise ApiError(400, "bad_event", f"unknown action {event.action!r}")
        if self.state.terminal:
            raise ApiError(
                409, "illegal_event", "the hand is already over", "hand is over"
            )
        if self.state.phase == Phase.AWAITING_BOARD:
            raise ApiError(
                409,
                "illegal_event",
                f"waiting for the {self.state.street.name} cards",
                "awaiting board cards",
            )
        if self.state.to_act != event.seat:
            raise ApiError(
                409,
                "illegal_event",
                f"it is seat {self.state.to_act}'s turn, not seat {event.seat}'s",
                "out of turn",
            )
        amount = to_cents(event.amount) if event.amount is not None else 0
        try:
            apply_action(self.state, PolicyDecision(kind, amount))
        except IllegalActionError as exc:
            raise ApiError(409, "illegal_event", str(exc), exc.rule) from exc

    def _apply_board_event(self, event: EventModel) -> None:
        if not event.cards:
            raise ApiError(400, "bad_event", "board events need cards")
        try:
            cards = [parse_card(c) for c in event.cards if c]
            reveal_board(self.state, cards)
        except IllegalActionError as exc:
            raise ApiError(409, "illegal_event", str(exc), exc.rule) from exc
        except ValueError as exc:
            raise ApiError(400, "bad_event", str(exc)) from exc

    def _apply_show_event(self, event: EventModel) -> None:
        if event.seat is None or not event.cards:
            raise ApiError(400, "bad_event", "show events need seat and cards")
        if event.seat == self.hero_seat:
            raise ApiError(400, "bad_event", "hero cards are set at session start")
        if event.seat not in self.config.seat_numbers:
            raise ApiError(409, "illegal_event", f"seat {event.seat} is empty", "unknown seat")
        known = set(self.state.board) | {self.hero_cards[0], self.hero_cards[1]}
        for pair in self.shown_cards.values():
            known |= {c for c in pair if c is not None}
        slots: list[Optional[Card]] = [None, None]
        for i, text in enumerate(event.cards[:2]):
            if text:
                card = parse_card(text)
                if card in known:
                    raise ApiError(
                        409, "illegal_event", f"{card} is already visible", "duplicate card"
                    )
                slots[i] = card
        prev = self.shown_cards.get(event.seat, (None, None))
        merged = (slots[0] or prev[0], slots[1] or prev[1])
        self.shown_cards[event.seat] = merged

    # -- views ----------------------------------------------------------

    def snapshot(self) -> dict:
        state = self.state
        acting = (
            state.phase == Phase.ACTING
            and not state.terminal
            and state.to_act is not None
        )
        legal = legal_actions(state) if acting else None
        dp = decision_point_from_state(
            state, self.hero_seat, self.session_id, shown_cards=self.shown_cards
        )
        seats = []
        for entry in sorted(self.config.seats, key=lambda s: s.seat_no):
            seat_no = entry.seat_no
            shown = self.shown_cards.get(seat_no, (None, None))
            seats.append(
                {
                    "seat": seat_no,
                    "name": entry.player_name,
                    "stack": state.stacks[seat_no] / 100,
                    "folded": seat_no in state.folded,
                    "all_in": seat_no in state.all_in,
                    "actions": dp.action_history.get(seat_no, []),
                    "shown": [str(c) if c else None for c in shown],
                }
            )
        return {
            "session_id": self.session_id,
            "street": state.street.name,
            "phase": state.phase.value,
            "terminal": state.terminal,
            "pot": state.pot / 100,
            "board": [str(c) for c in state.board],
            "hero_seat": self.hero_seat,
            "hero_cards": [str(c) for c in self.hero_cards],
            "hero_rank": rank_display(dp),
            "seats": seats,
            "characteristics": [
                c for c in ("suit", "high", "close") if c in dp.characteristics
            ],
            "to_act": state.to_act,
            "awaiting_board": state.street.name
            if state.phase == Phase.AWAITING_BOARD
            else None,
            "legal_actions": [
                ACTION_WORDS[k] for k in legal_action_order(legal.kinds)
            ]
            if legal
            else [],
            "call_amount": (legal.call_amount / 100) if legal else 0,
            "min_raise_to": (legal.min_raise_to / 100) if legal else 0,
            "amount_menu": [a / 100 for a in legal.menu] if legal else [],
            "event_count": len(self.event_log),
        }

    def current_prompt(self, directive: Optional[str] = None) -> str:
        dp = decision_point_from_state(
            self.state, self.hero_seat, self.session_id, shown_cards=self.shown_cards
        )
        prompt = full_prompt(self.ctx, dp)
        if directive:
            prompt += "\n" + directive
        return prompt


class SessionStore:
    def __init__(self, settings: ServiceSettings):
        self.settings = settings
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        if settings.persist_dir:
            settings.persist_dir.mkdir(parents=True, exist_ok=True)
            self._load_persisted()

    def _log_path(self, session_id: str) -> Optional[Path]:
        if self.settings.persist_dir is None:
            return None
        return self.settings.persist_dir / f"{session_id}.jsonl"

    def _append(self, session_id: str, kind: str, payload: dict) -> None:
        path = self._log_path(session_id)
        if path is None:
            return
        with path.open("a", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {"ts": time.time(), "kind": kind, "payload": payload},
                    sort_keys=True,
                )
                + "\n"
            )

    def _load_persisted(self) -> None:
        assert self.settings.persist_dir is not None
        for path in sorted(self.settings.persist_dir.glob("*.jsonl")):
            try:
                self._replay_log(path)
            except Exception:  # noqa: BLE001 - a bad log must not kill startup
                logger.exception("could not replay session log %s", path)

    def _replay_log(self, path: Path) -> None:
        session: Optional[Session] = None
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                entry = json.loads(line)
                if entry["kind"] == "created":
                    session = _build_session(
                        CreateSessionModel(**entry["payload"]),
                        self.settings,
                        session_id=path.stem,
                    )
                elif entry["kind"] == "event" and session is not None:
                    event = EventModel(**entry["payload"])
                    session.apply_event(event)
                    session.event_log.append(entry["payload"])
        if session is not None:
            self.sessions[session.session_id] = session
            logger.info(
                "restored session %s (%d events)",
                session.session_id,
                len(session.event_log),
            )

    def create(self, body: CreateSessionModel) -> Session:
        session = _build_session(body, self.settings)
        with self._lock:
            self.sessions[session.session_id] = session
        self._append(session.session_id, "created", body.model_dump())
        return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, "not_found", f"no session {session_id!r}")
        return session

    def record_event(self, session: Session, event: EventModel) -> None:
        session.event_log.append(event.model_dump())
        self._append(session.session_id, "event", event.model_dump())


def _build_session(
    body: CreateSessionModel,
    settings: ServiceSettings,
    session_id: Optional[str] = None,
) -> Session:
    try:
        blinds = BlindStructure(
            small_blind=to_cents(body.blinds.small),
            big_blind=to_cents(body.blinds.big),
            currency=body.blinds.currency,
        )
    except ValueError as exc:
        raise ApiError(400, "invalid_config", str(exc)) from exc
    seats = []
    for p in body.players:
        name = p.name or f"seat{p.seat}"
        seats.append(SeatEntry(p.seat, name, to_cents(p.stack)))
    try:
        config = TableConfig(
            seats=tuple(seats),
            blinds=blinds,
            dealer_seat=body.dealer_seat,
            rng_seed=None,
        )
    except ValueError as exc:
        raise ApiError(400, "invalid_config", str(exc)) from exc
    if body.hero_seat not in config.seat_numbers:
        raise ApiError(400, "invalid_config", f"hero seat {body.hero_seat} is empty")
    try:
        hero_cards = (parse_card(body.hero_cards[0]), parse_card(body.hero_cards[1]))
    except ValueError as exc:
        raise ApiError(400, "invalid_config", str(exc)) from exc
    if hero_cards[0] == hero_cards[1]:
        raise ApiError(400, "invalid_config", "hero cards must differ")
    return Session(
        session_id=session_id or uuid.uuid4().hex[:12],
        config=config,
        hero_seat=body.hero_seat,
        hero_cards=hero_cards,
        advisor=body.advisor or settings.advisor,
    )


def _advise(session: Session, settings: ServiceSettings, directive: Optional[str]) -> dict:
    state = session.state
    if state.terminal:
        raise ApiError(409, "hand_over", "the hand is over; no advice to give")
    if state.phase == Phase.AWAITING_BOARD:
        raise ApiError(
            409, "awaiting_board", f"enter the {state.street.name} cards first"
        )
    if state.to_act != session.hero_seat:
        raise ApiError(
            409, "not_hero_turn", f"seat {state.to_act} is to act, not the hero"
        )
    prompt = session.current_prompt(directive)
    view = policy_view(state, session.hero_seat)

    if session.advisor.startswith("remote:"):
        endpoint = RemoteEndpoint(
            url=session.advisor.split(":", 1)[1],
            timeout=settings.advisor_timeout_s,
            session_id=session.session_id,
        )
        result = remote_decide(endpoint, prompt, view)
        decision, rationale, fallback = (
            result.decision,
            result.response_text,
            result.fallback,
        )
    else:
        # cards an opponent has flashed cannot be dealt to anyone else
        shown = {
            c
            for pair in session.shown_cards.values()
            for c in pair
            if c is not None
        }
        deck = [c for c in full_deck() if c not in shown]
        policy = EquityPolicy(
            EquityParams(samples=settings.equity_samples, rng_seed=0)
        )
        decision = policy.decide(view, deck=deck)
        rationale = format_response(decision)
        fallback = False

    return {
        "action": ACTION_WORDS[decision.kind],
        "amount": decision.amount / 100,
        "prompt_used": prompt,
        "rationale_text": rationale,
        "fallback": fallback,
    }


def create_app(settings: Optional[ServiceSettings] = None) -> FastAPI:
    settings = settings or ServiceSettings()
    app = FastAPI(title="holdemlab advisor", version="1.0")
    store = SessionStore(settings)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(
        _request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "invalid_request", "message": str(exc.errors()[:3])},
        )

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionModel) -> dict:
        session = store.create(body)
        with session.lock:
            return {
                "session_id": session.session_id,
                "constant_block": session.constant_block,
                "state": session.snapshot(),
            }

    @app.get("/v1/sessions/{session_id}")
    def get_state(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            return session.snapshot()

    @app.post("/v1/sessions/{session_id}/events")
    def post_event(session_id: str, event: EventModel) -> dict:
        session = store.get(session_id)
        with session.lock:
            session.apply_event(event)  # raises before anything is recorded
            store.record_event(session, event)
            return session.snapshot()

    @app.get("/v1/sessions/{session_id}/prompt")
    def get_prompt(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            return {"prompt": session.current_prompt(), "template": "prompt.v1"}

    @app.post("/v1/sessions/{session_id}/advice")
    def get_advice(session_id: str, body: Optional[AdviceModel] = None) -> dict:
        session = store.get(session_id)
        directive = body.directive if body else None
        with session.lock:
            return _advise(session, settings, directive)

    if settings.ui_dir and settings.ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=settings.ui_dir, html=True), name="ui")

    return app
