import copy
from pathlib import Path

import pytest

from holdemlab.cards import parse_card
from holdemlab.engine import (
    GameState,
    Phase,
    IllegalActionError,
    TableConfig,
    apply_action,
    export_hand_text,
    legal_actions,
    new_hand,
    policy_view,
    replay_final_state,
    replay_hand,
    resolve_showdown,
    reveal_board,
)
from holdemlab.hand_history import (
    ActionKind,
    BlindStructure,
    SeatEntry,
    Street,
    parse_file,
    parse_hand,
)
from holdemlab.policies import PolicyDecision, RandomPolicy

import oracle

DATA = Path(__file__).parent / "data"


def two_seats(stack_a=500, stack_b=500):
    return TableConfig(
        seats=(SeatEntry(1, "alice", stack_a), SeatEntry(2, "bob", stack_b)),
        blinds=BlindStructure(2, 5),
        dealer_seat=1,
        rng_seed=99,
    )


def manual_config(stacks, dealer=1, blinds=(2, 5)):
    seats = tuple(
        SeatEntry(i + 1, name, stack) for i, (name, stack) in enumerate(stacks)
    )
    return TableConfig(
        seats=seats,
        blinds=BlindStructure(*blinds),
        dealer_seat=dealer,
        rng_seed=None,
    )


def give_cards(state: GameState, mapping: dict):
    for seat, labels in mapping.items():
        state.hole_cards[seat] = (parse_card(labels[0]), parse_card(labels[1]))


# --- hand setup ---------------------------------------------------------------


def test_heads_up_dealer_posts_small_blind_and_acts_first():
    state = new_hand(two_seats())
    assert state.street_contrib == {1: 2, 2: 5}
    assert state.to_act == 1


def test_multiway_blind_order_and_first_actor():
    config = manual_config([("a", 500), ("b", 500), ("c", 500), ("d", 500)])
    state = new_hand(config)
    # dealer 1: seat 2 small blind, seat 3 big blind, seat 4 opens
    assert state.street_contrib == {1: 0, 2: 2, 3: 5, 4: 0}
    assert state.to_act == 4


def test_seeded_deal_is_deterministic():
    a = new_hand(two_seats())
    b = new_hand(two_seats())
    assert a.hole_cards == b.hole_cards
    assert a.deck == b.deck


def test_stack_below_blind_posts_all_in():
    config = TableConfig(
        seats=(SeatEntry(1, "alice", 500), SeatEntry(2, "bob", 3)),
        blinds=BlindStructure(2, 5),
        dealer_seat=1,
        rng_seed=4,
    )
    state = new_hand(config)
    assert 2 in state.all_in
    assert state.street_contrib[2] == 3


def test_player_count_bounds():
    with pytest.raises(ValueError):
        manual_config([("only", 500)])
    with pytest.raises(ValueError):
        manual_config([(f"p{i}", 500) for i in range(16)])


# --- legal actions --------------------------------------------------------------


def test_facing_raise_offers_fold_call_raise():
    state = new_hand(two_seats())
    apply_action(state, PolicyDecision(ActionKind.RAISE, 15))
    legal = legal_actions(state)
    assert legal.kinds == {ActionKind.FOLD, ActionKind.CALL, ActionKind.RAISE}
    assert legal.call_amount == 10
    assert legal.min_raise_to == 25  # raise of 10 on top of the 15


def test_unopened_flop_offers_fold_check_bet():
    state = new_hand(two_seats())
    apply_action(state, PolicyDecision(ActionKind.CALL))
    apply_action(state, PolicyDecision(ActionKind.CHECK))
    assert state.street == Street.FLOP
    legal = legal_actions(state)
    assert legal.kinds == {ActionKind.FOLD, ActionKind.CHECK, ActionKind.BET}


def test_big_blind_option_offers_raise():
    state = new_hand(two_seats())
    apply_action(state, PolicyDecision(ActionKind.CALL))  # dealer limps
    legal = legal_actions(state)
    assert state.to_act == 2
    assert legal.kinds == {ActionKind.FOLD, ActionKind.CHECK, ActionKind.RAISE}
    assert legal.min_raise_to == 10


def test_short_stack_facing_bet_gets_fold_or_all_in():
    state = new_hand(two_seats(stack_a=500, stack_b=60))
    apply_action(state, PolicyDecision(ActionKind.RAISE, 200))
    legal = legal_actions(state)
    assert legal.kinds == {ActionKind.FOLD, ActionKind.ALL_IN}
    assert legal.call_amount == 55  # bob's whole remaining stack


def test_amount_menu_attached_to_legal_actions():
    state = new_hand(two_seats(stack_a=394, stack_b=500))
    legal = legal_actions(state)
    assert legal.menu == (0, 5, 15, 30, 50, 100, 250, 392)


# --- betting rules ---------------------------------------------------------------


def test_raise_below_minimum_rejected():
    state = new_hand(two_seats())
    apply_action(state, PolicyDecision(ActionKind.RAISE, 15))
    with pytest.raises(IllegalActionError) as exc_info:
        apply_action(state, PolicyDecision(ActionKind.RAISE, 20))
    assert "minimum" in str(exc_info.value)


def test_all_in_raise_below_minimum_allowed():
    state = new_hand(two_seats(stack_a=500, stack_b=22))
    apply_action(state, PolicyDecision(ActionKind.RAISE, 15))
    apply_action(state, PolicyDecision(ActionKind.RAISE, 22))  # all-in short raise
    assert 2 in state.all_in
    assert state.current_bet == 22


def test_bet_below_big_blind_rejected():
    state = new_hand(two_seats())
    apply_action(state, PolicyDecision(ActionKind.CALL))
    apply_action(state, PolicyDecision(ActionKind.CHECK))
    with pytest.raises(IllegalActionError):
        apply_action(state, PolicyDecision(ActionKind.BET, 3))


def test_illegal_action_leaves_state_unchanged():
    state = new_hand(two_seats())
    apply_action(state, PolicyDecision(ActionKind.RAISE, 15))
    before = copy.deepcopy(state)
    with pytest.raises(IllegalActionError):
        apply_action(state, PolicyDecision(ActionKind.CHECK))
    with pytest.raises(IllegalActionError):
        apply_action(state, PolicyDecision(ActionKind.RAISE, 16))
    assert state.stacks == before.stacks
    assert state.street_contrib == before.street_contrib
    assert state.history == before.history
    assert state.to_act == before.to_act


def test_check_through_advances_street_without_pot_change():
    state = new_hand(two_seats())
    apply_action(state, PolicyDecision(ActionKind.CALL))
    apply_action(state, PolicyDecision(ActionKind.CHECK))
    pot = state.pot
    apply_action(state, PolicyDecision(ActionKind.CHECK))
    apply_action(state, PolicyDecision(ActionKind.CHECK))
    assert state.street == Street.TURN
    assert state.pot == pot


def test_raise_reopens_action():
    config = manual_config([("a", 500), ("b", 500), ("c", 500)])
    state = new_hand(config)
    apply_action(state, PolicyDecision(ActionKind.CALL))  # dealer a calls
    apply_action(state, PolicyDecision(ActionKind.CALL))  # sb b completes
    apply_action(state, PolicyDecision(ActionKind.RAISE, 20))  # bb c squeezes
    # both limpers must act again
    assert state.to_act == 1
    apply_action(state, PolicyDecision(ActionKind.CALL))
    assert state.to_act == 2
    apply_action(state, PolicyDecision(ActionKind.CALL))
    assert state.street == Street.FLOP


def test_fold_win_is_immediate_and_returns_uncalled():
    state = new_hand(two_seats())
    apply_action(state, PolicyDecision(ActionKind.RAISE, 15))
    apply_action(state, PolicyDecision(ActionKind.FOLD))
    assert state.terminal
    assert state.returned == {1: 10}
    assert state.results() == {"alice": 5, "bob": -5}


# --- side pots and showdown -------------------------------------------------------


def build_three_way_all_in():
    """a(500, dealer) vs b(100) vs c(300); b all-in preflop, c on later streets."""
    config = manual_config([("a", 500), ("b", 100), ("c", 300)])
    state = new_hand(config)
    give_cards(state, {1: ("Kd", "Kc"), 2: ("Jd", "Jc"), 3: ("Ah", "Ad")})
    apply_action(state, PolicyDecision(ActionKind.RAISE, 100))  # a
    apply_action(state, PolicyDecision(ActionKind.ALL_IN))      # b, 98 more
    apply_action(state, PolicyDecision(ActionKind.CALL))        # c, 95 more
    reveal_board(state, [parse_card(c) for c in ("2h", "7d", "9c")])
    apply_action(state, PolicyDecision(ActionKind.BET, 150))    # c first to act
    apply_action(state, PolicyDecision(ActionKind.CALL))        # a
    reveal_board(state, [parse_card("3s")])
    apply_action(state, PolicyDecision(ActionKind.ALL_IN))      # c, last 50
    apply_action(state, PolicyDecision(ActionKind.CALL))        # a
    reveal_board(state, [parse_card("Js")])
    return state


def test_three_way_all_in_builds_main_and_side_pot():
    state = build_three_way_all_in()
    assert state.pots() == [(300, [1, 2, 3]), (400, [1, 3])]
    assert state.terminal
    # b's jacks hit trips for the main pot; c's aces take the side pot
    assert state.collected == {2: 300, 3: 400}
    assert state.results() == {"a": -300, "b": 200, "c": 100}


def test_side_pot_winner_can_differ_from_main_pot_winner():
    state = build_three_way_all_in()
    assert state.collected[2] == 300 and state.collected[3] == 400


def test_showdown_matches_bruteforce_reevaluation():
    state = build_three_way_all_in()
    board = state.board
    for amount, eligible in state.pots():
        best = max(
            oracle.best_of_seven(list(state.hole_cards[s]) + board) for s in eligible
        )
        winners = [
            s
            for s in eligible
            if oracle.best_of_seven(list(state.hole_cards[s]) + board) == best
        ]
        for winner in winners:
            assert state.collected.get(winner, 0) >= amount // len(winners)


def test_split_pot_divides_evenly():
    config = manual_config([("a", 500), ("b", 500)])
    state = new_hand(config)
    give_cards(state, {1: ("2c", "3d"), 2: ("2d", "3h")})
    apply_action(state, PolicyDecision(ActionKind.CALL))
    apply_action(state, PolicyDecision(ActionKind.CHECK))
    reveal_board(state, [parse_card(c) for c in ("Ah", "Kh", "Qs")])
    for _ in range(2):
        apply_action(state, PolicyDecision(ActionKind.CHECK))
    reveal_board(state, [parse_card("Jd")])
    for _ in range(2):
        apply_action(state, PolicyDecision(ActionKind.CHECK))
    reveal_board(state, [parse_card("Tc")])
    for _ in range(2):
        apply_action(state, PolicyDecision(ActionKind.CHECK))
    # both play the board's broadway straight
    assert state.terminal
    assert state.collected == {1: 5, 2: 5}
    assert state.results() == {"a": 0, "b": 0}


def test_odd_cent_goes_to_earliest_seat_after_dealer():
    # the folded small blind leaves an odd cent in the pot
    config = manual_config([("a", 500), ("b", 500), ("c", 500)], blinds=(1, 3))
    state = new_hand(config)
    give_cards(state, {1: ("2c", "3d"), 3: ("2d", "3h")})
    apply_action(state, PolicyDecision(ActionKind.CALL))  # a calls 3
    apply_action(state, PolicyDecision(ActionKind.FOLD))  # b leaves its 1 in
    apply_action(state, PolicyDecision(ActionKind.CHECK))  # c's blind option
    reveal_board(state, [parse_card(x) for x in ("Ah", "Kh", "Qs")])
    for _ in range(2):
        apply_action(state, PolicyDecision(ActionKind.CHECK))
    reveal_board(state, [parse_card("Jd")])
    for _ in range(2):
        apply_action(state, PolicyDecision(ActionKind.CHECK))
    reveal_board(state, [parse_card("Tc")])
    for _ in range(2):
        apply_action(state, PolicyDecision(ActionKind.CHECK))
    assert state.terminal
    assert state.pot == 7
    # both live hands play the board; seat 3 sits closer after the dealer
    assert state.collected == {3: 4, 1: 3}
    assert state.results() == {"a": 0, "b": -1, "c": 1}


def test_resolve_showdown_public_endpoint():
    state = build_three_way_all_in()
    assert resolve_showdown(state) == {2: 300, 3: 400}


def test_lone_player_cannot_bet_into_all_ins():
    """Once everyone else is all-in, a player owing nothing is done acting;
    the uncontested side-pot layer must come back at showdown."""
    config = manual_config([("a", 1000), ("b", 100), ("c", 1000)])
    state = new_hand(config)
    give_cards(state, {1: ("Kd", "Kc"), 2: ("Jd", "Jc"), 3: ("Ah", "Ad")})
    apply_action(state, PolicyDecision(ActionKind.RAISE, 400))   # a
    apply_action(state, PolicyDecision(ActionKind.ALL_IN))       # b for 100
    apply_action(state, PolicyDecision(ActionKind.CALL))         # c
    reveal_board(state, [parse_card(x) for x in ("2h", "7d", "9c")])
    # a and c still have chips and do bet this street
    apply_action(state, PolicyDecision(ActionKind.BET, 100))     # c acts first
    apply_action(state, PolicyDecision(ActionKind.CALL))         # a
    reveal_board(state, [parse_card("3s")])
    apply_action(state, PolicyDecision(ActionKind.CHECK))        # c
    apply_action(state, PolicyDecision(ActionKind.ALL_IN))       # a shoves 500
    apply_action(state, PolicyDecision(ActionKind.FOLD))         # c folds
    # b (all-in) and a remain; a owes nothing, so the street is over and
    # the hand runs out instead of offering a another action
    assert state.phase == Phase.AWAITING_BOARD
    reveal_board(state, [parse_card("Qs")])
    assert state.terminal
    assert state.street == Street.SHOWDOWN
    # a's uncalled shove came back; kings beat jacks for the main pot and
    # c's abandoned chips sit in a layer only a can win
    assert state.returned == {1: 500}
    assert state.collected == {1: 1100}
    assert state.pot == sum(state.collected.values())
    assert state.results() == {"a": 600, "b": -100, "c": -500}


# --- conservation under random play ------------------------------------------------


def test_chip_conservation_under_random_play():
    for seed in range(40):
        n = 2 + seed % 5
        config = TableConfig(
            seats=tuple(SeatEntry(i + 1, f"p{i}", 300 + 50 * i) for i in range(n)),
            blinds=BlindStructure(2, 5),
            dealer_seat=1,
            rng_seed=seed,
        )
        state = new_hand(config)
        policy = RandomPolicy(seed=seed * 7 + 1)
        while not state.terminal:
            view = policy_view(state)
            apply_action(state, policy.decide(view))  # asserts conservation inside
        assert sum(state.results().values()) == 0
        assert sum(state.stacks.values()) == sum(
            s.starting_stack for s in config.seats
        )


# --- replay and export --------------------------------------------------------------


def test_replay_showdown_example_hand_matches_summary():
    record = parse_hand((DATA / "showdown_example_hand.txt").read_text())
    states = [
        (event.actor, event.kind) for _, event in replay_hand(record)
    ]
    assert states[0] == ("phalves77", ActionKind.RAISE)
    final = replay_final_state(record)
    assert final.terminal
    assert final.pot == record.pot_total
    engine_results = final.results()
    for name, parsed_delta in record.results.items():
        # the engine plays rake-free; the winner's delta differs by the rake
        assert abs(engine_results[name] - parsed_delta) <= record.rake


def test_replay_yields_states_with_matching_pots():
    record = parse_hand((DATA / "showdown_example_hand.txt").read_text())
    pots = [state.pot for state, event in replay_hand(record) if event.actor == "phalves77"]
    # before: his preflop raise (0.07), flop call (0.46), turn call (0.93), river call (2.45)
    assert pots == [7, 46, 93, 245]


def _assert_payouts_match_bruteforce(state):
    dealer_order = state.seats_after(state.config.dealer_seat)
    expected = {}
    for amount, eligible in state.pots():
        scores = {
            s: oracle.best_of_seven(list(state.hole_cards[s]) + state.board)
            for s in eligible
        }
        best = max(scores.values())
        winners = [s for s in dealer_order if s in eligible and scores[s] == best]
        share, odd = divmod(amount, len(winners))
        for i, seat in enumerate(winners):
            expected[seat] = expected.get(seat, 0) + share + (1 if i < odd else 0)
    assert state.collected == expected


def test_export_then_parse_round_trip_random_hands():
    for seed in range(25):
        n = 2 + seed % 4
        config = TableConfig(
            seats=tuple(SeatEntry(i + 1, f"p{i}", 400) for i in range(n)),
            blinds=BlindStructure(2, 5),
            dealer_seat=(seed % n) + 1,
            rng_seed=seed + 1000,
        )
        state = new_hand(config)
        policy = RandomPolicy(seed=seed)
        while not state.terminal:
            apply_action(state, policy.decide(policy_view(state)))
        if state.street == Street.SHOWDOWN:
            _assert_payouts_match_bruteforce(state)
        text = export_hand_text(state, hand_id=f"rt-{seed}")
        records, diagnostics = parse_file(text, source=f"rt-{seed}")
        assert diagnostics == []
        assert len(records) == 1
        record = records[0]
        assert record.pot_total == state.pot
        assert record.results == state.results()
        assert record.board_cards() == state.board
        final = replay_final_state(record)
        assert final.pot == record.pot_total
        assert final.results() == record.results
