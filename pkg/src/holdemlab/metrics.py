"""Policy evaluation measurements over the five-action label space.

Macro-F1 averages per-class F1 over exactly the five poker actions, so a
class that never appears contributes zero rather than being skipped.
Action scores and average investment describe play style per game; both
are means over games.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Iterable, Sequence


@unique
class ActionLabel(str, Enum):
    CHECK = "check"
    CALL = "call"
    FOLD = "fold"
    BET = "bet"
    RAISE = "raise"


LABELS: tuple[ActionLabel, ...] = tuple(ActionLabel)
N_CLASSES = len(LABELS)  # fixed at 5

# action scores also track shoves, which the classification labels fold
# into bet/raise
SCORE_ACTIONS: tuple[str, ...] = ("check", "call", "fold", "bet", "raise", "all-in")


def _as_label(value: "ActionLabel | str") -> ActionLabel:
    if isinstance(value, ActionLabel):
        return value
    return ActionLabel(value)


def confusion_matrix(
    pred: Sequence["ActionLabel | str"], truth: Sequence["ActionLabel | str"]
) -> list[list[int]]:
    """5x5 counts, rows = truth, columns = predicted, label order as LABELS."""
    if len(pred) != len(truth):
        raise ValueError("prediction and truth lengths differ")
    index = {label: i for i, label in enumerate(LABELS)}
    matrix = [[0] * N_CLASSES for _ in range(N_CLASSES)]
    for p, t in zip(pred, truth):
        matrix[index[_as_label(t)]][index[_as_label(p)]] += 1
    return matrix


def macro_f1(
    pred: Sequence["ActionLabel | str"], truth: Sequence["ActionLabel | str"]
) -> float:
    """Mean per-class F1 over all five classes."""
    if not pred:
        raise ValueError("cannot score an empty prediction list")
    matrix = confusion_matrix(pred, truth)
    total = 0.0
    for i in range(N_CLASSES):
        tp = matrix[i][i]
        fn = sum(matrix[i]) - tp
        fp = sum(matrix[r][i] for r in range(N_CLASSES)) - tp
        if tp == 0:
            continue  # zero-support or never-correct classes contribute 0
        precision = tp / (tp + fp)
        recall = tp / (tp + fn)
        total += 2 * precision * recall / (precision + recall)
    return total / N_CLASSES


def macro_f1_from_confusion(matrix: Sequence[Sequence[int]]) -> float:
    total = 0.0
    n = len(matrix)
    for i in range(n):
        tp = matrix[i][i]
        fn = sum(matrix[i]) - tp
        fp = sum(matrix[r][i] for r in range(n)) - tp
        if tp == 0:
            continue
        precision = tp / (tp + fp)
        recall = tp / (tp + fn)
        total += 2 * precision * recall / (precision + recall)
    return total / n


def amount_mse_bb(
    pred_amounts: Sequence[float],
    truth_amounts: Sequence[float],
    big_blind: float = 1.0,
) -> float:
    """Mean squared difference of paired amounts, in big-blind units.

    Callers pass only the value-bearing pairs whose predicted action was
    correct.
    """
    if len(pred_amounts) != len(truth_amounts):
        raise ValueError("amount vectors must pair up")
    if not pred_amounts:
        return 0.0
    if big_blind <= 0:
        raise ValueError("big blind must be positive")
    return sum(
        ((p - t) / big_blind) ** 2 for p, t in zip(pred_amounts, truth_amounts)
    ) / len(pred_amounts)


def perplexity(token_probs: Sequence[float]) -> float:
    """Inverse geometric mean of the probabilities, computed in log space."""
    if not token_probs:
        raise ValueError("perplexity needs at least one probability")
    if any(not 0 < p <= 1 for p in token_probs):
        raise ValueError("probabilities must lie in (0, 1]")
    log_sum = sum(math.log(p) for p in token_probs)
    return math.exp(-log_sum / len(token_probs))


@dataclass(frozen=True)
class GamePlayline:
    """One game from the hero's perspective: actions taken, streets seen,
    chips committed and net result (both in bb)."""

    actions: tuple[str, ...]
    streets_reached: int
    invested_bb: float
    delta_bb: float = 0.0

    def __post_init__(self) -> None:
        if not 1 <= self.streets_reached <= 4:
            raise ValueError("streets reached must be 1..4")


def action_scores(games: Iterable[GamePlayline]) -> dict[str, float]:
    """Mean over games of per-game action frequency over streets reached.

    Per game, score(a) = count(a) / streets_reached, capped at 1 so a
    re-raise-heavy game cannot push a score beyond the documented range.
    """
    sums = {action: 0.0 for action in SCORE_ACTIONS}
    count = 0
    for game in games:
        count += 1
        for action in SCORE_ACTIONS:
            occurrences = sum(1 for a in game.actions if a == action)
            sums[action] += min(occurrences / game.streets_reached, 1.0)
    if count == 0:
        return {action: 0.0 for action in SCORE_ACTIONS}
    return {action: sums[action] / count for action in SCORE_ACTIONS}


def average_investment(games: Iterable[GamePlayline]) -> float:
    """Mean chips the hero committed per game, in big blinds."""
    total = 0.0
    count = 0
    for game in games:
        total += game.invested_bb
        count += 1
    return total / count if count else 0.0


def mbb_per_hand(deltas_bb: Sequence[float]) -> tuple[float, float]:
    """(mean, sample stddev) of per-hand deltas, both in mbb/h."""
    if not deltas_bb:
        return (0.0, 0.0)
    n = len(deltas_bb)
    mean_bb = sum(deltas_bb) / n
    if n < 2:
        return (1000.0 * mean_bb, 0.0)
    var = sum((d - mean_bb) ** 2 for d in deltas_bb) / (n - 1)
    return (1000.0 * mean_bb, 1000.0 * math.sqrt(var))


@dataclass
class MatchStats:
    """Aggregated per-policy results of a simulated match."""

    policy: str
    hands: int = 0
    deltas_bb: list[float] = field(default_factory=list)
    games: list[GamePlayline] = field(default_factory=list)
    decision_seconds: list[float] = field(default_factory=list)

    @property
    def mbb_h(self) -> float:
        return mbb_per_hand(self.deltas_bb)[0]

    @property
    def stddev_mbb(self) -> float:
        return mbb_per_hand(self.deltas_bb)[1]

    @property
    def stderr_mbb(self) -> float:
        if not self.deltas_bb:
            return 0.0
        return self.stddev_mbb / math.sqrt(len(self.deltas_bb))

    @property
    def per_action_scores(self) -> dict[str, float]:
        return action_scores(self.games)

    @property
    def avg_investment_bb(self) -> float:
        return average_investment(self.games)

    @property
    def mean_response_s(self) -> float:
        if not self.decision_seconds:
            return 0.0
        return sum(self.decision_seconds) / len(self.decision_seconds)

    def to_report_dict(self) -> dict:
        return {
            "policy": self.policy,
            "hands": self.hands,
            "mbb_h": round(self.mbb_h, 3),
            "stddev_mbb": round(self.stddev_mbb, 3),
            "stderr_mbb": round(self.stderr_mbb, 3),
            "action_scores": {
                k: round(v, 4) for k, v in self.per_action_scores.items()
            },
            "avg_investment_bb": round(self.avg_investment_bb, 4),
            "mean_response_s": round(self.mean_response_s, 6),
        }


def streets_reached(final_street_index: int) -> int:
    """Betting streets seen for a hand that ended on the given street.

    Street indexes follow hand_history.Street; SHOWDOWN collapses to the
    river since only four betting stages exist.
    """
    return min(final_street_index, 3) + 1
