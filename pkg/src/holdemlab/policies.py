"""Pluggable decision makers: equity baseline, random, scripted, remote.

A policy sees only a PolicyView (its own cards plus public state) and
returns a PolicyDecision. Bet/raise amounts are street bet levels in
cents, all-in is expressed by its own kind.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import requests

from .cards import Card, full_deck, score_cards
from .grid import snap_amount
from .hand_history import ActionKind, Street
from .money import fmt_compact, to_cents

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolicyDecision:
    kind: ActionKind
    amount: int = 0  # bet/raise target level; 0 otherwise

    def __post_init__(self) -> None:
        if self.amount < 0:
            raise ValueError("decision amount cannot be negative")


@dataclass(frozen=True)
class PolicyView:
    """What a seat is allowed to know when it acts."""

    hero_seat: int
    hole: tuple[Card, Card]
    board: tuple[Card, ...]
    street: Street
    pot: int
    current_bet: int
    street_contrib: int
    stack: int
    call_amount: int
    kinds: frozenset[ActionKind]
    menu: tuple[int, ...]
    min_raise_to: int
    big_blind: int
    n_opponents: int  # live (non-folded) opponents

    @property
    def can_check(self) -> bool:
        return ActionKind.CHECK in self.kinds


@dataclass
class EquityParams:
    samples: int = 1000
    call_threshold: Optional[float] = None  # None: 0.3 + 0.05 per extra opponent
    raise_threshold: float = 0.6
    rng_seed: Optional[int] = None

    def call_threshold_for(self, n_opponents: int) -> float:
        if self.call_threshold is not None:
            return self.call_threshold
        return 0.3 + 0.05 * (n_opponents - 1)


class Policy(Protocol):
    name: str

    def decide(self, view: PolicyView) -> PolicyDecision: ...


def mc_equity(
    hole: Sequence[Card],
    board: Sequence[Card],
    n_opponents: int,
    samples: int,
    seed: Optional[int] = None,
    *,
    deck: Optional[Sequence[Card]] = None,
    rng: Optional[random.Random] = None,
) -> float:
    """Monte-Carlo estimate of the chance the hole cards win at showdown.

    Each sample completes the board and deals the opponents from the
    remaining deck; a k-way tie credits 1/k. Deterministic for a fixed
    seed. `deck` narrows the card universe for reduced-deck studies.
    """
    if n_opponents < 1:
        raise ValueError("need at least one opponent")
    if samples < 1:
        raise ValueError("need at least one sample")
    cards = list(hole) + list(board)
    if len(set(cards)) != len(cards):
        raise ValueError("duplicate cards between hole and board")
    universe = list(deck) if deck is not None else full_deck()
    used = set(cards)
    remaining = [c for c in universe if c not in used]
    need = 2 * n_opponents + (5 - len(board))
    if need > len(remaining):
        raise ValueError("not enough cards left to deal the scenario")
    if rng is None:
        rng = random.Random(seed)

    hole_list = list(hole)
    board_list = list(board)
    missing = 5 - len(board_list)
    total = 0.0
    n = len(remaining)
    randrange = rng.randrange

    for _ in range(samples):
        # partial Fisher-Yates over one shared pool keeps the whole deal
        # mutually consistent (no card dealt twice within a sample)
        pool = remaining[:]
        drawn = 0
        full_board = hole_list + board_list  # hero's seven cards, board shared
        for _ in range(missing):
            j = randrange(drawn, n)
            pool[drawn], pool[j] = pool[j], pool[drawn]
            full_board.append(pool[drawn])
            drawn += 1
        hero_score = score_cards(full_board)
        shared_board = full_board[2:]
        tied = 1
        beaten = False
        for _ in range(n_opponents):
            j = randrange(drawn, n)
            pool[drawn], pool[j] = pool[j], pool[drawn]
            c1 = pool[drawn]
            drawn += 1
            j = randrange(drawn, n)
            pool[drawn], pool[j] = pool[j], pool[drawn]
            c2 = pool[drawn]
            drawn += 1
            opp_score = score_cards([c1, c2] + shared_board)
            if opp_score > hero_score:
                beaten = True
                break
            if opp_score == hero_score:
                tied += 1
        if not beaten:
            total += 1.0 / tied
    return total / samples


class EquityPolicy:
    """Threshold rule on estimated equity, the stock simulation opponent.

    Below the call threshold it gives up (checks when free), between the
    thresholds it calls, above the raise threshold it bets or raises to
    the smallest menu amount covering half the pot. Boundary equity takes
    the less aggressive branch.
    """

    def __init__(self, params: Optional[EquityParams] = None, name: str = "equity"):
        self.params = params or EquityParams()
        self.name = name
        self.rng = random.Random(self.params.rng_seed)

    def reseed(self, seed: int) -> None:
        self.rng.seed(seed)

    def decide(
        self, view: PolicyView, deck: Optional[Sequence[Card]] = None
    ) -> PolicyDecision:
        n_opp = max(1, view.n_opponents)
        equity = mc_equity(
            view.hole,
            view.board,
            n_opp,
            self.params.samples,
            rng=self.rng,
            deck=deck,
        )
        raise_threshold = self.params.raise_threshold
        call_threshold = min(
            self.params.call_threshold_for(n_opp), raise_threshold
        )

        if equity > raise_threshold:
            aggressive = self._aggressive_decision(view)
            if aggressive is not None:
                return aggressive
        if equity > call_threshold:
            if ActionKind.CALL in view.kinds:
                return PolicyDecision(ActionKind.CALL)
            if ActionKind.CHECK in view.kinds:
                return PolicyDecision(ActionKind.CHECK)
            if ActionKind.ALL_IN in view.kinds:  # short-stack call
                return PolicyDecision(ActionKind.ALL_IN)
        if ActionKind.CHECK in view.kinds:
            return PolicyDecision(ActionKind.CHECK)
        return PolicyDecision(ActionKind.FOLD)

    def _aggressive_decision(self, view: PolicyView) -> Optional[PolicyDecision]:
        target = snap_amount(max(view.pot // 2, 1), list(view.menu))
        if ActionKind.BET in view.kinds:
            level = min(max(target, view.big_blind), view.stack)
            return PolicyDecision(ActionKind.BET, level)
        if ActionKind.RAISE in view.kinds:
            all_in_level = view.street_contrib + view.stack
            level = min(max(target, view.min_raise_to), all_in_level)
            if level > view.current_bet:
                return PolicyDecision(ActionKind.RAISE, level)
        return None


class RandomPolicy:
    """Uniform choice over the legal action kinds; random menu bet sizes."""

    def __init__(self, seed: Optional[int] = None, name: str = "random"):
        self.name = name
        self.rng = random.Random(seed)

    def reseed(self, seed: int) -> None:
        self.rng.seed(seed)

    def decide(self, view: PolicyView) -> PolicyDecision:
        kind = self.rng.choice(sorted(view.kinds, key=lambda k: k.value))
        if kind == ActionKind.BET:
            choices = [a for a in view.menu if view.big_blind <= a <= view.stack]
            level = self.rng.choice(choices) if choices else view.stack
            return PolicyDecision(ActionKind.BET, level)
        if kind == ActionKind.RAISE:
            all_in_level = view.street_contrib + view.stack
            choices = [a for a in view.menu if view.min_raise_to <= a <= all_in_level]
            level = self.rng.choice(choices) if choices else all_in_level
            return PolicyDecision(ActionKind.RAISE, level)
        return PolicyDecision(kind)


class CheckCallPolicy:
    """Always checks or calls; folds only when it cannot continue."""

    def __init__(self, name: str = "check-call"):
        self.name = name

    def reseed(self, seed: int) -> None:  # stateless
        pass

    def decide(self, view: PolicyView) -> PolicyDecision:
        if ActionKind.CHECK in view.kinds:
            return PolicyDecision(ActionKind.CHECK)
        if ActionKind.CALL in view.kinds:
            return PolicyDecision(ActionKind.CALL)
        if ActionKind.ALL_IN in view.kinds:
            return PolicyDecision(ActionKind.ALL_IN)
        return PolicyDecision(ActionKind.FOLD)


class ScriptedPolicy:
    """Plays back a fixed decision list; raises when the script runs dry."""

    def __init__(self, decisions: Sequence[PolicyDecision], name: str = "scripted"):
        self.name = name
        self._decisions = list(decisions)
        self._next = 0

    def reseed(self, seed: int) -> None:
        pass

    def decide(self, view: PolicyView) -> PolicyDecision:
        if self._next >= len(self._decisions):
            raise RuntimeError("scripted policy exhausted")
        decision = self._decisions[self._next]
        self._next += 1
        return decision


class ActionTextError(ValueError):
    """Model response with no recognizable action verb."""


_VERB_KINDS = [
    (re.compile(r"\ball[- ]?in\b", re.IGNORECASE), ActionKind.ALL_IN),
    (re.compile(r"\bfold(?:s|ing)?\b", re.IGNORECASE), ActionKind.FOLD),
    (re.compile(r"\bcheck(?:s|ing)?\b", re.IGNORECASE), ActionKind.CHECK),
    (re.compile(r"\bcall(?:s|ing)?\b", re.IGNORECASE), ActionKind.CALL),
    (re.compile(r"\bbet(?:s|ting)?\b", re.IGNORECASE), ActionKind.BET),
    (re.compile(r"\brais(?:e|es|ing)\b", re.IGNORECASE), ActionKind.RAISE),
]
_RE_AMOUNT = re.compile(r"(?:\bto\s+)?\$?(\d+(?:\.\d+)?)")


def parse_action_text(text: str) -> PolicyDecision:
    """Extract (action, amount) from a model response sentence.

    The earliest action verb wins; a following number (optionally after
    "to") becomes the amount for value-bearing actions.
    """
    earliest: Optional[tuple[int, ActionKind, int]] = None
    for pattern, kind in _VERB_KINDS:
        m = pattern.search(text)
        if m and (earliest is None or m.start() < earliest[0]):
            earliest = (m.start(), kind, m.end())
    if earliest is None:
        raise ActionTextError(f"no action verb in response: {text!r}")
    _, kind, end = earliest
    amount = 0
    if kind in (ActionKind.BET, ActionKind.RAISE):
        am = _RE_AMOUNT.search(text, end)
        if am:
            amount = to_cents(am.group(1))
    return PolicyDecision(kind, amount)


def format_response(decision: PolicyDecision) -> str:
    """Render a decision as the advice sentence used for dataset labels."""
    kind = decision.kind
    if kind == ActionKind.BET:
        return f"You should bet {fmt_compact(decision.amount)}."
    if kind == ActionKind.RAISE:
        return f"You should raise to {fmt_compact(decision.amount)}."
    if kind == ActionKind.ALL_IN:
        return "You should all-in."
    return f"You should {kind.value}."


@dataclass
class RemoteEndpoint:
    """`policy_http.v1`: POST {prompt, session_id} -> {text}."""

    url: str
    timeout: float = 10.0
    retries: int = 1
    session_id: str = "default"


class RemotePolicyError(RuntimeError):
    pass


def query_remote(endpoint: RemoteEndpoint, prompt: str) -> str:
    last_error: Optional[Exception] = None
    for _ in range(max(1, endpoint.retries)):
        try:
            resp = requests.post(
                endpoint.url,
                json={"prompt": prompt, "session_id": endpoint.session_id},
                timeout=endpoint.timeout,
            )
            resp.raise_for_status()
            body = resp.json()
            if "text" not in body:
                raise RemotePolicyError("response missing 'text' field")
            return str(body["text"])
        except Exception as exc:  # noqa: BLE001 - every failure falls back
            last_error = exc
    raise RemotePolicyError(f"remote policy failed: {last_error}")


@dataclass
class RemoteDecision:
    decision: PolicyDecision
    response_text: str
    fallback: bool = False


def _fallback_decision(view: PolicyView) -> PolicyDecision:
    if ActionKind.CHECK in view.kinds:
        return PolicyDecision(ActionKind.CHECK)
    return PolicyDecision(ActionKind.FOLD)


def remote_decide(
    endpoint: RemoteEndpoint, prompt: str, view: PolicyView
) -> RemoteDecision:
    """Query the endpoint and snap its answer onto the offered menu.

    Any transport or parse failure logs an incident and degrades to a
    free check, else a fold.
    """
    try:
        text = query_remote(endpoint, prompt)
    except RemotePolicyError as exc:
        logger.warning("remote advisor unavailable (%s); falling back", exc)
        return RemoteDecision(_fallback_decision(view), str(exc), fallback=True)
    try:
        decision = parse_action_text(text)
    except ActionTextError as exc:
        logger.warning("unparseable advisor response (%s); falling back", exc)
        return RemoteDecision(_fallback_decision(view), text, fallback=True)
    if decision.kind in (ActionKind.BET, ActionKind.RAISE):
        decision = PolicyDecision(
            decision.kind, snap_amount(decision.amount, list(view.menu))
        )
    return RemoteDecision(decision, text)


class RemotePolicy:
    """Seat policy backed by a `policy_http.v1` endpoint.

    The prompt for the current view must be supplied by the caller via
    `set_prompt` before `decide`; the harness renders it from the same
    state the view was built from.
    """

    def __init__(self, endpoint: RemoteEndpoint, name: str = "remote"):
        self.endpoint = endpoint
        self.name = name
        self._prompt: Optional[str] = None
        self.last: Optional[RemoteDecision] = None

    def reseed(self, seed: int) -> None:
        pass

    def set_prompt(self, prompt: str) -> None:
        self._prompt = prompt

    def decide(self, view: PolicyView) -> PolicyDecision:
        if self._prompt is None:
            raise RuntimeError("remote policy needs a prompt before deciding")
        result = remote_decide(self.endpoint, self._prompt, view)
        self.last = result
        self._prompt = None
        return result.decision


@dataclass
class PolicySpec:
    """Parsed CLI policy description, e.g. 'equity:samples=200'."""

    kind: str
    options: dict[str, str] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "PolicySpec":
        kind, _, rest = text.partition(":")
        kind = kind.strip().lower()
        options: dict[str, str] = {}
        if kind == "remote":
            if not rest:
                raise ValueError("remote policy needs an endpoint URL")
            options["url"] = rest
        elif rest:
            for item in rest.split(","):
                key, _, value = item.partition("=")
                if not value:
                    raise ValueError(f"bad policy option {item!r}")
                options[key.strip()] = value.strip()
        return cls(kind, options)


def make_policy(spec: "PolicySpec | str", seed: Optional[int] = None):
    """Build a policy instance from a spec string or PolicySpec."""
    if isinstance(spec, str):
        spec = PolicySpec.parse(spec)
    if spec.kind == "equity":
        params = EquityParams(rng_seed=seed)
        if "samples" in spec.options:
            params.samples = int(spec.options["samples"])
        if "call" in spec.options:
            params.call_threshold = float(spec.options["call"])
        if "raise" in spec.options:
            params.raise_threshold = float(spec.options["raise"])
        return EquityPolicy(params)
    if spec.kind == "random":
        return RandomPolicy(seed=seed)
    if spec.kind in ("check-call", "checkcall", "calling-station"):
        return CheckCallPolicy()
    if spec.kind == "remote":
        endpoint = RemoteEndpoint(
            url=spec.options["url"],
            timeout=float(spec.options.get("timeout", 10.0)),
            retries=int(spec.options.get("retries", 1)),
        )
        return RemotePolicy(endpoint)
    raise ValueError(f"unknown policy kind {spec.kind!r}")
