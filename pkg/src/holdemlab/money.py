"""Money as integer minor units (cents) so conservation checks are exact."""

from __future__ import annotations

from fractions import Fraction


def to_cents(text_or_number: "str | float | int") -> int:
    """Parse an amount like '0.15', '$1', 1.21 into cents."""
    if isinstance(text_or_number, int):
        return text_or_number * 100
    if isinstance(text_or_number, float):
        return round(text_or_number * 100)
    text = text_or_number.strip().lstrip("$\u20ac\u00a3").replace(",", "")
    if "." in text:
        whole, _, frac = text.partition(".")
        frac = (frac + "00")[:2]
        sign = -1 if whole.startswith("-") else 1
        return sign * (abs(int(whole or "0")) * 100 + int(frac))
    return int(text) * 100


def fmt_cents(cents: int) -> str:
    """Two-decimal log form: 392 -> '3.92', 500 -> '5.00'."""
    sign = "-" if cents < 0 else ""
    cents = abs(cents)
    return f"{sign}{cents // 100}.{cents % 100:02d}"


def fmt_compact(cents: int) -> str:
    """Prompt form with trailing zeros trimmed: 100 -> '1', 30 -> '0.3'."""
    sign = "-" if cents < 0 else ""
    cents = abs(cents)
    if cents % 100 == 0:
        return f"{sign}{cents // 100}"
    if cents % 10 == 0:
        return f"{sign}{cents // 100}.{(cents % 100) // 10}"
    return f"{sign}{cents // 100}.{cents % 100:02d}"


def in_big_blinds(cents: int, big_blind_cents: int) -> Fraction:
    return Fraction(cents, big_blind_cents)
