"""Policy-vs-policy matches: rotation, aggregation, response timing.

Each hand is independent (fresh stacks, per-hand seed derived from the
base seed), so hands can run on a worker pool and aggregate in any
order while the final report stays byte-identical for local policies.
"""

from __future__ import annotations

import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .engine import (
    Phase,
    TableConfig,
    apply_action,
    export_hand_text,
    new_hand,
    policy_view,
)
from .hand_history import ActionKind, BlindStructure, SeatEntry
from .metrics import GamePlayline, MatchStats, streets_reached
from .money import in_big_blinds
from .policies import PolicyView, RemotePolicy, make_policy
from .prompts import ACTION_WORDS, TableContext, decision_point_from_state, full_prompt

DEFAULT_STACK_BB = 100
REMOTE_ERROR_BUDGET = 0.01  # fraction of hands allowed to fall back


@dataclass(frozen=True)
class MatchSpec:
    policies: tuple[str, ...]  # policy spec strings, one per seat
    hands: int
    blinds: BlindStructure = BlindStructure(2, 5)
    stacks: Optional[tuple[int, ...]] = None  # per seat; default 100 bb each
    base_seed: int = 0
    rotation: bool = True
    jobs: int = 1
    transcript_path: Optional[str] = None

    def __post_init__(self) -> None:
        if not 2 <= len(self.policies) <= 15:
            raise ValueError("a match needs 2-15 seats")
        if self.hands < 1:
            raise ValueError("a match needs at least one hand")
        if self.stacks is not None and len(self.stacks) != len(self.policies):
            raise ValueError("one stack per seat required")

    @property
    def n_seats(self) -> int:
        return len(self.policies)

    def stack_for(self, seat_index: int) -> int:
        if self.stacks is not None:
            return self.stacks[seat_index]
        return DEFAULT_STACK_BB * self.blinds.big_blind

    def policy_names(self) -> list[str]:
        return [f"{spec.split(':')[0]}[{i}]" for i, spec in enumerate(self.policies)]


def seat_rotation(spec: MatchSpec, hand_index: int) -> dict[int, int]:
    """seat_no -> policy index for one hand.

    With rotation on, policy p sits at seat ((p + hand) mod n) + 1 so a
    full cycle of n hands gives every policy every position once (the
    dealer stays at seat 1). With rotation off the seats are fixed and
    the dealer button moves instead.
    """
    n = spec.n_seats
    if spec.rotation:
        return {((p + hand_index) % n) + 1: p for p in range(n)}
    return {p + 1: p for p in range(n)}


def _dealer_seat(spec: MatchSpec, hand_index: int) -> int:
    if spec.rotation:
        return 1
    return (hand_index % spec.n_seats) + 1


@dataclass
class HandOutcome:
    hand_index: int
    deltas_bb: dict[int, float]  # policy index -> delta
    playlines: dict[int, GamePlayline]
    decision_seconds: dict[int, list[float]]
    remote_fallbacks: int = 0
    transcript: Optional[str] = None


def play_hand(spec: MatchSpec, hand_index: int, keep_transcript: bool = False) -> HandOutcome:
    """Play one hand to completion with freshly built, per-hand-seeded policies."""
    assignment = seat_rotation(spec, hand_index)
    names = spec.policy_names()
    policies = {}
    for seat_no, p_idx in assignment.items():
        policy = make_policy(spec.policies[p_idx])
        policy.reseed((spec.base_seed ^ (hand_index * 1000003)) + 7919 * p_idx)
        policies[seat_no] = policy

    seats = tuple(
        SeatEntry(seat_no, names[p_idx], spec.stack_for(p_idx))
        for seat_no, p_idx in sorted(assignment.items())
    )
    config = TableConfig(
        seats=seats,
        blinds=spec.blinds,
        dealer_seat=_dealer_seat(spec, hand_index),
        rng_seed=spec.base_seed ^ hand_index,
    )
    state = new_hand(config)
    hand_id = f"{spec.base_seed}-{hand_index}"

    decision_seconds: dict[int, list[float]] = {p: [] for p in range(spec.n_seats)}
    remote_fallbacks = 0
    contexts: dict[int, TableContext] = {}

    while not state.terminal:
        assert state.phase == Phase.ACTING and state.to_act is not None
        seat = state.to_act
        p_idx = assignment[seat]
        policy = policies[seat]
        if isinstance(policy, RemotePolicy):
            ctx = contexts.get(seat)
            if ctx is None:
                ctx = TableContext.from_config(config, seat, state.hole_cards[seat])
                contexts[seat] = ctx
            dp = decision_point_from_state(state, seat, hand_id)
            policy.set_prompt(full_prompt(ctx, dp))
        view = policy_view(state, seat)
        started = time.perf_counter()
        decision = policy.decide(view)
        decision_seconds[p_idx].append(time.perf_counter() - started)
        if isinstance(policy, RemotePolicy) and policy.last and policy.last.fallback:
            remote_fallbacks += 1
        apply_action(state, decision)

    results = state.results()
    bb = spec.blinds.big_blind
    deltas = {
        assignment[config.seat_of(name)]: float(in_big_blinds(delta, bb))
        for name, delta in results.items()
    }

    playlines: dict[int, GamePlayline] = {}
    for seat_no, p_idx in assignment.items():
        name = config.name_of(seat_no)
        actions = []
        last_street = 0
        for event in state.history:
            if event.actor != name:
                continue
            if event.kind in (ActionKind.POST_BLIND, ActionKind.SHOW):
                continue
            actions.append(ACTION_WORDS[event.kind])
            last_street = max(last_street, int(event.street))
        invested = state.total_contrib[seat_no] - state.returned.get(seat_no, 0)
        playlines[p_idx] = GamePlayline(
            actions=tuple(actions),
            streets_reached=streets_reached(last_street),
            invested_bb=float(in_big_blinds(invested, bb)),
            delta_bb=deltas[p_idx],
        )

    transcript = export_hand_text(state, hand_id) if keep_transcript else None
    return HandOutcome(
        hand_index=hand_index,
        deltas_bb=deltas,
        playlines=playlines,
        decision_seconds=decision_seconds,
        remote_fallbacks=remote_fallbacks,
        transcript=transcript,
    )


@dataclass
class MatchReport:
    spec: MatchSpec
    per_policy: list[MatchStats] = field(default_factory=list)
    aborted: bool = False
    remote_fallbacks: int = 0
    hands_played: int = 0

    def to_json_dict(self) -> dict:
        return {
            "hands": self.hands_played,
            "seats": self.spec.n_seats,
            "base_seed": self.spec.base_seed,
            "rotation": self.spec.rotation,
            "aborted": self.aborted,
            "remote_fallbacks": self.remote_fallbacks,
            "per_policy": [s.to_report_dict() for s in self.per_policy],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def stable_json(self) -> str:
        """The report minus wall-clock fields: byte-identical across runs
        of the same spec and seed with local policies."""
        data = self.to_json_dict()
        for row in data["per_policy"]:
            row.pop("mean_response_s", None)
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def run_match(spec: MatchSpec) -> MatchReport:
    """Play the whole match and aggregate per-policy statistics."""
    names = spec.policy_names()
    stats = [MatchStats(policy=name) for name in names]
    keep_transcript = spec.transcript_path is not None
    budget = max(1, int(REMOTE_ERROR_BUDGET * spec.hands))
    has_remote = any(p.startswith("remote") for p in spec.policies)

    transcripts: list[str] = []
    fallbacks = 0
    played = 0
    aborted = False

    def absorb(outcome: HandOutcome) -> None:
        nonlocal fallbacks, played
        played += 1
        fallbacks += outcome.remote_fallbacks
        for p_idx, stat in enumerate(stats):
            stat.hands += 1
            stat.deltas_bb.append(outcome.deltas_bb[p_idx])
            stat.games.append(outcome.playlines[p_idx])
            stat.decision_seconds.extend(outcome.decision_seconds[p_idx])
        if outcome.transcript:
            transcripts.append(outcome.transcript)

    if spec.jobs > 1 and not has_remote:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            for outcome in pool.map(
                _play_hand_task,
                [(spec, h, keep_transcript) for h in range(spec.hands)],
                chunksize=max(1, spec.hands // (spec.jobs * 4) or 1),
            ):
                absorb(outcome)
    else:
        for h in range(spec.hands):
            absorb(play_hand(spec, h, keep_transcript))
            if has_remote and fallbacks > budget:
                aborted = True
                break

    if spec.transcript_path and transcripts:
        Path(spec.transcript_path).write_text(
            "\n\n".join(transcripts) + "\n", encoding="utf-8"
        )

    return MatchReport(
        spec=spec,
        per_policy=stats,
        aborted=aborted,
        remote_fallbacks=fallbacks,
        hands_played=played,
    )


def _play_hand_task(args: tuple[MatchSpec, int, bool]) -> HandOutcome:
    spec, hand_index, keep_transcript = args
    return play_hand(spec, hand_index, keep_transcript)


def measure_response_time(policy, views: Sequence[PolicyView]) -> tuple[float, float]:
    """Mean and sample stddev of wall-clock seconds per decision."""
    if not views:
        raise ValueError("need at least one state to time")
    samples = []
    for view in views:
        started = time.perf_counter()
        policy.decide(view)
        samples.append(time.perf_counter() - started)
    mean = sum(samples) / len(samples)
    std = statistics.stdev(samples) if len(samples) > 1 else 0.0
    return (mean, std)


def sweep_player_counts(
    counts: Sequence[int],
    hands: int,
    hero_policy: str = "equity",
    field_policy: str = "random",
    base_seed: int = 0,
    blinds: Optional[BlindStructure] = None,
    stack_bb: int = DEFAULT_STACK_BB,
) -> dict[int, MatchReport]:
    """Fix one hero policy and fill the table with `field_policy` opponents."""
    reports = {}
    blinds = blinds or BlindStructure(2, 5)
    for n in counts:
        spec = MatchSpec(
            policies=(hero_policy,) + (field_policy,) * (n - 1),
            hands=hands,
            blinds=blinds,
            stacks=tuple([stack_bb * blinds.big_blind] * n),
            base_seed=base_seed + n,
            rotation=True,
        )
        reports[n] = run_match(spec)
    return reports
