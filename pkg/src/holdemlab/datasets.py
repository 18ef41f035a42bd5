"""Assemble fine-tuning data artifacts from parsed hands.

SFT records pair a rendered prompt with the hero's real action sentence;
reward records score the same pairs by the acting hero's win rate. The
train/test split is by hand, never by decision point, so near-duplicate
states cannot leak across the boundary.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .analytics import (
    PlayerStats,
    TaggedHand,
    WinRateBand,
    compute_stats,
    partition_hands,
)
from .hand_history import Diagnostic, HandRecord
from .prompts import PromptRecord, prompt_records_for_hero

SPLIT_RATIO = 0.9
REWARD_SCALE_MBB = 1500  # top win-rate band edge; scores clamp to [-1, 1]

SFT_SCHEMA = "sft_record.v1"
REWARD_SCHEMA = "reward_record.v1"


class EmptyDatasetError(ValueError):
    """The band/filter selected no hands at all."""


@dataclass(frozen=True)
class SftRecord:
    prompt: str
    response: str
    meta: dict

    def to_json_dict(self) -> dict:
        return {"prompt": self.prompt, "response": self.response, "meta": self.meta}


@dataclass(frozen=True)
class RewardRecord:
    prompt: str
    response: str
    score: float

    def to_json_dict(self) -> dict:
        return {"prompt": self.prompt, "response": self.response, "score": self.score}


@dataclass
class DatasetManifest:
    variant: str
    band: str
    seed: int
    split_ratio: float = SPLIT_RATIO
    train_hands: int = 0
    test_hands: int = 0
    train_records: int = 0
    test_records: int = 0
    reward_records: int = 0
    diagnostics: int = 0

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant,
            "band": self.band,
            "seed": self.seed,
            "split_ratio": self.split_ratio,
            "train_hands": self.train_hands,
            "test_hands": self.test_hands,
            "train_records": self.train_records,
            "test_records": self.test_records,
            "reward_records": self.reward_records,
            "diagnostics": self.diagnostics,
        }


@dataclass
class SftDataset:
    train: list[SftRecord] = field(default_factory=list)
    test: list[SftRecord] = field(default_factory=list)
    manifest: Optional[DatasetManifest] = None


def _sentence_for(pr: PromptRecord) -> str:
    return pr.response_sentence()


def _sft_records(
    tagged: Sequence[TaggedHand],
    diagnostics: list[Diagnostic],
    raw_prompt: bool = False,
) -> dict[str, list[SftRecord]]:
    """hand_id -> SFT records, keeping hand atomicity for the split."""
    by_hand: dict[str, list[SftRecord]] = {}
    for th in tagged:
        records: list[SftRecord] = []
        for hero in th.heroes:
            for pr in prompt_records_for_hero(
                th.record,
                hero,
                diagnostics=diagnostics,
                raw_prompt=raw_prompt,
            ):
                records.append(
                    SftRecord(
                        prompt=pr.prompt,
                        response=_sentence_for(pr),
                        meta=pr.meta,
                    )
                )
        if records:
            by_hand[th.record.hand_id] = records
    return by_hand


def _split_hands(hand_ids: Sequence[str], seed: int) -> tuple[list[str], list[str]]:
    ordered = sorted(hand_ids)
    rng = random.Random(seed)
    rng.shuffle(ordered)
    cut = int(len(ordered) * SPLIT_RATIO)
    return ordered[:cut], ordered[cut:]


def emit_sft(
    corpus: Sequence[HandRecord],
    band: Optional[WinRateBand],
    seed: int,
    stats: Optional[dict[str, PlayerStats]] = None,
    min_hands: int = 1,
    variant: str = "banded",
    raw_prompt: bool = False,
) -> SftDataset:
    """Band-filtered SFT dataset with a deterministic hand-level 90/10 split.

    `band=None` keeps every showdown-revealed hand (the info-filtering
    variant); `raw_prompt=True` swaps rendered prompts for the verbatim
    log text (the raw-data ablation).
    """
    if stats is None:
        stats = compute_stats(corpus)
    effective_band = band if band is not None else WinRateBand(label="all")
    tagged = partition_hands(corpus, effective_band, stats, min_hands=min_hands)
    diagnostics: list[Diagnostic] = []
    by_hand = _sft_records(tagged, diagnostics, raw_prompt=raw_prompt)
    for th in tagged:
        # stamp the band onto each record's meta
        for rec in by_hand.get(th.record.hand_id, []):
            rec.meta["winrate_band"] = effective_band.describe()
    if not by_hand:
        raise EmptyDatasetError(
            f"no decision points matched band {effective_band.describe()}"
        )
    train_ids, test_ids = _split_hands(list(by_hand), seed)
    dataset = SftDataset()
    for hand_id in train_ids:
        dataset.train.extend(by_hand[hand_id])
    for hand_id in test_ids:
        dataset.test.extend(by_hand[hand_id])
    dataset.manifest = DatasetManifest(
        variant=variant,
        band=effective_band.describe(),
        seed=seed,
        train_hands=len(train_ids),
        test_hands=len(test_ids),
        train_records=len(dataset.train),
        test_records=len(dataset.test),
        diagnostics=len(diagnostics),
    )
    return dataset


def emit_raw_variant(
    corpus: Sequence[HandRecord],
    seed: int = 0,
    stats: Optional[dict[str, PlayerStats]] = None,
) -> SftDataset:
    """Dataset-I style records: the prompt is the unprocessed log block."""
    return emit_sft(
        corpus, band=None, seed=seed, stats=stats, variant="raw", raw_prompt=True
    )


def reward_score(win_rate_mbb_h: float) -> float:
    """Monotone map from win rate to [-1, 1], saturating at +/-1500 mbb/h."""
    return max(-1.0, min(1.0, win_rate_mbb_h / REWARD_SCALE_MBB))


def emit_reward(
    corpus: Sequence[HandRecord],
    stats: Optional[dict[str, PlayerStats]] = None,
    seed: int = 0,
    min_hands: int = 1,
) -> list[RewardRecord]:
    """Reward-model records across all quality levels, scored by win rate."""
    if stats is None:
        stats = compute_stats(corpus)
    tagged = partition_hands(corpus, WinRateBand(), stats, min_hands=min_hands)
    diagnostics: list[Diagnostic] = []
    records: list[RewardRecord] = []
    for th in tagged:
        for hero in th.heroes:
            score = reward_score(float(stats[hero].win_rate_mbb_h))
            for pr in prompt_records_for_hero(th.record, hero, diagnostics=diagnostics):
                records.append(
                    RewardRecord(
                        prompt=pr.prompt,
                        response=pr.response_sentence(),
                        score=score,
                    )
                )
    rng = random.Random(seed)
    rng.shuffle(records)
    return records


def _dump_jsonl(path: Path, rows: Sequence[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=True) + "\n")


def write_dataset(
    out_dir: Path,
    dataset: SftDataset,
    reward: Optional[Sequence[RewardRecord]] = None,
) -> DatasetManifest:
    """Write sft_train.jsonl / sft_test.jsonl / reward.jsonl / manifest.json."""
    out_dir.mkdir(parents=True, exist_ok=True)
    assert dataset.manifest is not None
    _dump_jsonl(out_dir / "sft_train.jsonl", [r.to_json_dict() for r in dataset.train])
    _dump_jsonl(out_dir / "sft_test.jsonl", [r.to_json_dict() for r in dataset.test])
    if reward is not None:
        _dump_jsonl(out_dir / "reward.jsonl", [r.to_json_dict() for r in reward])
        dataset.manifest.reward_records = len(reward)
    (out_dir / "manifest.json").write_text(
        json.dumps(dataset.manifest.to_json_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return dataset.manifest
