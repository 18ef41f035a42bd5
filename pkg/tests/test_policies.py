import itertools
import random

import pytest

from holdemlab.cards import Card, Suit, parse_card
from holdemlab.engine import TableConfig, apply_action, new_hand, policy_view
from holdemlab.grid import amount_menu
from holdemlab.hand_history import ActionKind, BlindStructure, SeatEntry, Street
from holdemlab.policies import (
    ActionTextError,
    CheckCallPolicy,
    EquityParams,
    EquityPolicy,
    PolicyDecision,
    PolicySpec,
    PolicyView,
    RandomPolicy,
    RemoteEndpoint,
    RemotePolicy,
    format_response,
    make_policy,
    mc_equity,
    parse_action_text,
    remote_decide,
)

import oracle


def cards(*labels):
    return [parse_card(label) for label in labels]


REDUCED_DECK = [Card(rank, suit) for suit in Suit for rank in range(10, 15)]


def make_view(**overrides):
    base = dict(
        hero_seat=1,
        hole=tuple(cards("Ah", "Kh")),
        board=tuple(cards("Qh", "Jh", "Th")),
        street=Street.FLOP,
        pot=100,
        current_bet=0,
        street_contrib=0,
        stack=500,
        call_amount=0,
        kinds=frozenset({ActionKind.FOLD, ActionKind.CHECK, ActionKind.BET}),
        menu=tuple(amount_menu(5, 500)),
        min_raise_to=0,
        big_blind=5,
        n_opponents=1,
    )
    base.update(overrides)
    return PolicyView(**base)


# --- Monte-Carlo equity --------------------------------------------------------


def test_nuts_on_river_is_certain():
    equity = mc_equity(
        cards("Ah", "Kh"), cards("Qh", "Jh", "Th", "2c", "2d"), 1, samples=50, seed=3
    )
    assert equity == 1.0


def test_board_royal_ties_everyone():
    equity = mc_equity(
        cards("2c", "3d"), cards("Ah", "Kh", "Qh", "Jh", "Th"), 1, samples=40, seed=5
    )
    assert equity == 0.5


def test_three_way_board_royal_splits_thirds():
    equity = mc_equity(
        cards("2c", "3d"), cards("Ah", "Kh", "Qh", "Jh", "Th"), 2, samples=30, seed=5
    )
    assert abs(equity - 1 / 3) < 1e-9


def test_equity_deterministic_given_seed():
    args = (cards("9h", "9d"), cards("2c", "7s", "Jd"), 2)
    a = mc_equity(*args, samples=500, seed=42)
    b = mc_equity(*args, samples=500, seed=42)
    c = mc_equity(*args, samples=500, seed=43)
    assert a == b
    assert a != c  # astronomically unlikely to collide


def test_equity_matches_exhaustive_on_reduced_turn_state():
    hole = cards("Ah", "As")
    board = cards("Kd", "Qc", "Jh", "Td")
    exact = oracle.exhaustive_equity(hole, board, 1, REDUCED_DECK)
    estimate = mc_equity(hole, board, 1, samples=20000, seed=9, deck=REDUCED_DECK)
    sigma = (exact * (1 - exact) / 20000) ** 0.5
    assert abs(estimate - exact) < 4 * sigma + 1e-9


def test_joint_shares_sum_to_one_on_reduced_deck():
    # three fully known hands: fractional tie credit makes shares sum to 1
    holes = [cards("Th", "Td"), cards("Ah", "Kh"), cards("Qc", "Qd")]
    board = cards("Js", "Ts", "As")
    used = set(itertools.chain(*holes)) | set(board)
    remaining = [c for c in REDUCED_DECK if c not in used]
    shares = [0.0, 0.0, 0.0]
    runouts = 0
    for runout in itertools.combinations(remaining, 2):
        full_board = board + list(runout)
        scores = [oracle.best_of_seven(h + full_board) for h in holes]
        best = max(scores)
        winners = [i for i, s in enumerate(scores) if s == best]
        for i in winners:
            shares[i] += 1 / len(winners)
        runouts += 1
    assert abs(sum(shares) - runouts) < 1e-9


def test_equity_validates_inputs():
    with pytest.raises(ValueError):
        mc_equity(cards("Ah", "Ah"), [], 1, samples=10)
    with pytest.raises(ValueError):
        mc_equity(cards("Ah", "Kh"), [], 0, samples=10)
    with pytest.raises(ValueError):
        mc_equity(cards("Th", "Td"), [], 9, samples=10, deck=REDUCED_DECK)


# --- equity policy ----------------------------------------------------------------


def test_high_equity_bets():
    policy = EquityPolicy(EquityParams(samples=50, rng_seed=1))
    decision = policy.decide(make_view())
    assert decision.kind == ActionKind.BET
    assert decision.amount == 50  # half of the 100 pot, on the menu


def test_low_equity_facing_bet_folds():
    policy = EquityPolicy(EquityParams(samples=80, rng_seed=1))
    view = make_view(
        hole=tuple(cards("2c", "7d")),
        board=tuple(cards("Ah", "Kh", "Qs")),
        current_bet=50,
        call_amount=50,
        kinds=frozenset({ActionKind.FOLD, ActionKind.CALL, ActionKind.RAISE}),
        min_raise_to=100,
        n_opponents=2,
    )
    assert policy.decide(view).kind == ActionKind.FOLD


def test_boundary_equity_takes_less_aggressive_branch():
    # a board-royal ties every opponent: equity is exactly one half
    view = make_view(
        hole=tuple(cards("2c", "3d")),
        board=tuple(cards("Ah", "Kh", "Qh", "Jh", "Th")),
        street=Street.RIVER,
    )
    at_raise_threshold = EquityPolicy(
        EquityParams(samples=30, call_threshold=0.2, raise_threshold=0.5, rng_seed=2)
    )
    assert at_raise_threshold.decide(view).kind == ActionKind.CHECK
    below = EquityPolicy(
        EquityParams(samples=30, call_threshold=0.2, raise_threshold=0.49, rng_seed=2)
    )
    assert below.decide(view).kind == ActionKind.BET
    at_call_threshold = EquityPolicy(
        EquityParams(samples=30, call_threshold=0.5, raise_threshold=0.9, rng_seed=2)
    )
    # not above the call threshold either: checks when free
    assert at_call_threshold.decide(view).kind == ActionKind.CHECK


def test_call_threshold_tightens_with_opponent_count():
    params = EquityParams()
    assert params.call_threshold_for(1) == pytest.approx(0.3)
    assert params.call_threshold_for(5) == pytest.approx(0.5)


def test_equity_policy_decisions_always_legal():
    for seed in range(30):
        n = 2 + seed % 4
        config = TableConfig(
            seats=tuple(SeatEntry(i + 1, f"p{i}", 400) for i in range(n)),
            blinds=BlindStructure(2, 5),
            dealer_seat=1,
            rng_seed=seed,
        )
        state = new_hand(config)
        policy = EquityPolicy(EquityParams(samples=40, rng_seed=seed))
        while not state.terminal:
            view = policy_view(state)
            decision = policy.decide(view)
            assert decision.kind in view.kinds
            apply_action(state, decision)


# --- action-text grammar -------------------------------------------------------------


def test_parse_plain_call():
    assert parse_action_text("You should call.") == PolicyDecision(ActionKind.CALL)


def test_parse_bet_with_amount():
    assert parse_action_text("You should bet 1.") == PolicyDecision(ActionKind.BET, 100)


def test_parse_raise_to_amount():
    assert parse_action_text("You should raise to 0.5.") == PolicyDecision(
        ActionKind.RAISE, 50
    )


def test_parse_all_in_with_preamble():
    decision = parse_action_text("As you have a flush, all-in is fine.")
    assert decision.kind == ActionKind.ALL_IN


def test_parse_unknown_text_raises():
    with pytest.raises(ActionTextError):
        parse_action_text("The weather is nice today.")


def test_format_response_round_trips():
    fixtures = [
        PolicyDecision(ActionKind.FOLD),
        PolicyDecision(ActionKind.CHECK),
        PolicyDecision(ActionKind.CALL),
        PolicyDecision(ActionKind.BET, 100),
        PolicyDecision(ActionKind.RAISE, 30),
        PolicyDecision(ActionKind.ALL_IN),
    ]
    for decision in fixtures:
        parsed = parse_action_text(format_response(decision))
        assert parsed == decision


# --- remote policy ---------------------------------------------------------------------


def test_remote_stub_fold(stub_advisor):
    endpoint = RemoteEndpoint(url=stub_advisor.url, timeout=2)
    result = remote_decide(endpoint, "prompt text", make_view())
    assert result.decision == PolicyDecision(ActionKind.FOLD)
    assert not result.fallback
    assert stub_advisor.requests[0]["prompt"] == "prompt text"


def test_remote_garbage_falls_back(stub_advisor):
    stub_advisor.responder = lambda prompt: "beep boop"
    endpoint = RemoteEndpoint(url=stub_advisor.url, timeout=2)
    result = remote_decide(endpoint, "p", make_view())
    assert result.fallback
    assert result.decision.kind == ActionKind.CHECK  # free check available


def test_remote_http_error_falls_back_to_fold(stub_advisor):
    stub_advisor.fail_with = 500
    endpoint = RemoteEndpoint(url=stub_advisor.url, timeout=2, retries=2)
    view = make_view(
        kinds=frozenset({ActionKind.FOLD, ActionKind.CALL}), current_bet=50
    )
    result = remote_decide(endpoint, "p", view)
    assert result.fallback
    assert result.decision.kind == ActionKind.FOLD
    assert len(stub_advisor.requests) == 2  # retried once


def test_remote_raise_snapped_to_menu(stub_advisor):
    stub_advisor.responder = lambda prompt: "You should raise to 0.8."
    endpoint = RemoteEndpoint(url=stub_advisor.url, timeout=2)
    result = remote_decide(endpoint, "p", make_view())
    # 0.80 is not on the menu; the next value up is 1.00
    assert result.decision == PolicyDecision(ActionKind.RAISE, 100)


def test_remote_policy_requires_prompt(stub_advisor):
    policy = RemotePolicy(RemoteEndpoint(url=stub_advisor.url))
    with pytest.raises(RuntimeError):
        policy.decide(make_view())


# --- policy construction ----------------------------------------------------------------


def test_policy_spec_parsing():
    spec = PolicySpec.parse("equity:samples=200,call=0.35")
    assert spec.kind == "equity"
    assert spec.options == {"samples": "200", "call": "0.35"}
    remote = PolicySpec.parse("remote:http://host:1234/path")
    assert remote.options["url"] == "http://host:1234/path"


def test_make_policy_variants():
    assert isinstance(make_policy("equity"), EquityPolicy)
    assert isinstance(make_policy("random"), RandomPolicy)
    assert isinstance(make_policy("check-call"), CheckCallPolicy)
    assert isinstance(make_policy("remote:http://x/"), RemotePolicy)
    with pytest.raises(ValueError):
        make_policy("cfr")


def test_random_policy_uses_menu_amounts():
    rng_policy = RandomPolicy(seed=3)
    for _ in range(50):
        decision = rng_policy.decide(make_view())
        if decision.kind == ActionKind.BET:
            assert decision.amount in make_view().menu
