"""Shared detector helpers."""

from __future__ import annotations

from decimal import Decimal


def ratio(part: int, whole: int) -> Decimal:
    return Decimal(part) / Decimal(whole) if whole else Decimal(0)
