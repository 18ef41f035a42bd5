#!/usr/bin/env python3
"""Regenerate the checked-in hand-history fixture corpus.

Simulated hands come from seeded engine play over a fixed player roster,
so analytics over the corpus sees stable identities: the equity players
accumulate winnings, the random players bleed. Output is deterministic.

Usage: python3 scripts/make_corpus.py [out_dir]
"""

import random
import sys
from pathlib import Path

from holdemlab.engine import (
    TableConfig,
    apply_action,
    export_hand_text,
    new_hand,
    policy_view,
)
from holdemlab.hand_history import BlindStructure, SeatEntry, parse_file
from holdemlab.policies import make_policy

SIM_HANDS = 196
BASE_SEED = 20240202

ROSTER = [
    ("marlowe_tt", "equity:samples=60"),
    ("quietgrind", "equity:samples=60"),
    ("ledger_lou", "equity:samples=60,raise=0.55"),
    ("pokerfax", "equity:samples=60,call=0.25"),
    ("wobblyjoe", "random"),
    ("tiltmagnet", "random"),
    ("riverrattle", "random"),
    ("senddit99", "random"),
    ("flatcaller", "check-call"),
    ("stationmary", "check-call"),
    ("peekaboo_pb", "check-call"),
    ("foldside", "random"),
]


def simulate_hand(index: int) -> str:
    rng = random.Random(BASE_SEED + index)
    n = rng.choice([2, 2, 3, 3, 4, 6])
    lineup = rng.sample(ROSTER, n)
    blinds = BlindStructure(2, 5) if rng.random() < 0.8 else BlindStructure(5, 10)
    seats = tuple(
        SeatEntry(i + 1, name, blinds.big_blind * rng.randrange(30, 120))
        for i, (name, _) in enumerate(lineup)
    )
    config = TableConfig(
        seats=seats,
        blinds=blinds,
        dealer_seat=rng.randrange(1, n + 1),
        rng_seed=BASE_SEED * 7 + index,
    )
    policies = {i + 1: make_policy(spec) for i, (_, spec) in enumerate(lineup)}
    for seat_no, policy in policies.items():
        policy.reseed(BASE_SEED ^ (index * 131 + seat_no))
    state = new_hand(config)
    while not state.terminal:
        seat = state.to_act
        apply_action(state, policies[seat].decide(policy_view(state, seat)))
    return export_hand_text(state, hand_id=f"C{index:05d}", table_name="Fixture")


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("tests/data/corpus")
    out_dir.mkdir(parents=True, exist_ok=True)
    here = Path(__file__).parent.parent

    texts = [simulate_hand(i) for i in range(SIM_HANDS)]
    sim_blob = "\n".join(texts)
    (out_dir / "sim_hands.txt").write_text(sim_blob, encoding="utf-8")

    for name in ("showdown_example_hand.txt", "edge_hands.txt"):
        src = here / "tests" / "data" / name
        (out_dir / name).write_text(src.read_text(), encoding="utf-8")

    total = 0
    for path in sorted(out_dir.glob("*.txt")):
        records, diagnostics = parse_file(path.read_text(), source=str(path))
        assert not diagnostics, diagnostics[:3]
        total += len(records)
    print(f"{total} hands in {out_dir}")
    assert total == 200, total


if __name__ == "__main__":
    main()
