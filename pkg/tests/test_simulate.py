
import pytest

from holdemlab.engine import new_hand, policy_view, TableConfig
from holdemlab.hand_history import BlindStructure, SeatEntry, parse_file
from holdemlab.policies import CheckCallPolicy, EquityParams, EquityPolicy
from holdemlab.simulate import (
    MatchSpec,
    measure_response_time,
    play_hand,
    run_match,
    seat_rotation,
)


def small_spec(**overrides):
    base = dict(
        policies=("check-call", "check-call"),
        hands=20,
        blinds=BlindStructure(2, 5),
        base_seed=5,
    )
    base.update(overrides)
    return MatchSpec(**base)


def test_spec_validation():
    with pytest.raises(ValueError):
        MatchSpec(policies=("random",), hands=10)
    with pytest.raises(ValueError):
        MatchSpec(policies=("random",) * 16, hands=10)
    with pytest.raises(ValueError):
        MatchSpec(policies=("random", "random"), hands=0)
    with pytest.raises(ValueError):
        MatchSpec(policies=("random", "random"), hands=1, stacks=(500,))


def test_rotation_swaps_heads_up_seats():
    spec = small_spec()
    assert seat_rotation(spec, 0) == {1: 0, 2: 1}
    assert seat_rotation(spec, 1) == {2: 0, 1: 1}


def test_rotation_cycles_all_seats_once():
    spec = small_spec(policies=("random",) * 6, hands=6)
    seats_of_policy0 = [
        next(seat for seat, p in seat_rotation(spec, h).items() if p == 0)
        for h in range(6)
    ]
    assert sorted(seats_of_policy0) == [1, 2, 3, 4, 5, 6]


def test_rotation_off_keeps_fixed_assignment():
    spec = small_spec(rotation=False)
    assert seat_rotation(spec, 0) == seat_rotation(spec, 7) == {1: 0, 2: 1}


def test_match_is_zero_sum_per_hand():
    spec = small_spec(policies=("random", "random", "random"), hands=30)
    for h in range(spec.hands):
        outcome = play_hand(spec, h)
        assert sum(outcome.deltas_bb.values()) == pytest.approx(0.0, abs=1e-9)


def test_match_report_deterministic_bytes():
    spec = small_spec(policies=("equity:samples=30", "random"), hands=15, base_seed=3)
    a = run_match(spec).stable_json()
    b = run_match(spec).stable_json()
    assert a == b


def test_different_seed_changes_outcomes():
    a = run_match(small_spec(policies=("random", "random"), base_seed=1))
    b = run_match(small_spec(policies=("random", "random"), base_seed=2))
    assert a.stable_json() != b.stable_json()


def test_per_policy_stats_track_identity_not_seat():
    spec = small_spec(policies=("equity:samples=25", "check-call"), hands=10)
    report = run_match(spec)
    assert [s.policy for s in report.per_policy] == ["equity[0]", "check-call[1]"]
    assert all(s.hands == 10 for s in report.per_policy)
    total = sum(sum(s.deltas_bb) for s in report.per_policy)
    assert total == pytest.approx(0.0, abs=1e-9)


def test_playlines_capture_streets_and_investment():
    spec = small_spec(hands=5)
    outcome = play_hand(spec, 0)
    for playline in outcome.playlines.values():
        assert 1 <= playline.streets_reached <= 4
        assert playline.invested_bb >= 0


def test_transcript_dump_parses_back(tmp_path):
    path = tmp_path / "hands.txt"
    spec = small_spec(hands=8, transcript_path=str(path))
    run_match(spec)
    records, diagnostics = parse_file(path.read_text(), source="dump")
    assert len(records) == 8
    assert not diagnostics


def test_parallel_jobs_match_sequential():
    spec_seq = small_spec(policies=("random", "random"), hands=12, jobs=1)
    spec_par = small_spec(policies=("random", "random"), hands=12, jobs=2)
    assert run_match(spec_seq).stable_json() == run_match(spec_par).stable_json()


def test_measure_response_time_orders_policies():
    config = TableConfig(
        seats=(SeatEntry(1, "a", 500), SeatEntry(2, "b", 500)),
        blinds=BlindStructure(2, 5),
        dealer_seat=1,
        rng_seed=8,
    )
    views = [policy_view(new_hand(config)) for _ in range(10)]
    fast_mean, _ = measure_response_time(CheckCallPolicy(), views)
    slow_mean, _ = measure_response_time(
        EquityPolicy(EquityParams(samples=800, rng_seed=1)), views
    )
    assert 0 <= fast_mean < slow_mean


def test_remote_match_error_budget_aborts(stub_advisor):
    stub_advisor.fail_with = 500
    spec = MatchSpec(
        policies=(f"remote:{stub_advisor.url}", "check-call"),
        hands=200,
        blinds=BlindStructure(2, 5),
        base_seed=2,
    )
    report = run_match(spec)
    assert report.aborted
    assert report.hands_played < 200
    assert report.remote_fallbacks > 2
