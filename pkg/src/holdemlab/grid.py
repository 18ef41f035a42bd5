"""Discretized bet-size grid shared by prompts, policies and the engine.

Amounts are street bet levels ("raise to X") in cents. The grid is the
fixed big-blind multiples {0, 1, 3, 6, 10, 20, 50, 100} capped by the
player's remaining money, with that remaining money appended as all-in.
"""

from __future__ import annotations

from dataclasses import dataclass

GRID_MULTIPLES = (0, 1, 3, 6, 10, 20, 50, 100)


@dataclass(frozen=True)
class AmountGrid:
    big_blind: int
    all_in: int

    @property
    def amounts(self) -> tuple[int, ...]:
        return tuple(amount_menu(self.big_blind, self.all_in))


def amount_menu(big_blind: int, stack: int) -> list[int]:
    """Ascending menu of playable amounts for a stack, ending at all-in."""
    if big_blind <= 0:
        raise ValueError("big blind must be positive")
    if stack < 0:
        raise ValueError("stack cannot be negative")
    menu = [m * big_blind for m in GRID_MULTIPLES if m * big_blind <= stack]
    if not menu or menu[-1] != stack:
        menu.append(stack)
    return menu


def snap_amount(amount: int, menu: list[int]) -> int:
    """Round up to the menu: smallest entry >= amount, else the maximum."""
    if not menu:
        raise ValueError("empty amount menu")
    for value in menu:
        if value >= amount:
            return value
    return menu[-1]
