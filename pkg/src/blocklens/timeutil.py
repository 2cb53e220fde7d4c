"""UTC time helpers. Everything internal is epoch seconds."""

from __future__ import annotations

from datetime import datetime, timezone


def parse_iso_utc(value: str) -> int:
    """ISO-8601 timestamp to UTC epoch seconds, sub-second digits dropped.

    Naive timestamps are taken as UTC (EOSIO block times come without a
    zone suffix).
    """
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def iso_from_epoch(epoch: int) -> str:
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
