"""Small shared helpers for the chain adapters."""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation

from ..errors import MalformedBlock
from ..timeutil import parse_iso_utc as _parse_iso_utc

_ASSET_RE = re.compile(r"^(-?\d+(?:\.\d+)?) ([A-Z]{1,12})$")


def parse_iso_utc(value: str) -> int:
    """ISO-8601 timestamp to UTC epoch seconds, sub-second digits dropped."""
    try:
        return _parse_iso_utc(value)
    except ValueError as exc:
        raise MalformedBlock(f"bad timestamp {value!r}") from exc


def parse_asset(value: str) -> tuple[Decimal, str] | None:
    """Split an asset string like '1.0000 EOS' into (amount, ticker)."""
    if not isinstance(value, str):
        return None
    m = _ASSET_RE.match(value.strip())
    if not m:
        return None
    try:
        return Decimal(m.group(1)), m.group(2)
    except InvalidOperation:
        return None


def require(doc: dict, key: str, context: str):
    if key not in doc:
        raise MalformedBlock(f"{context}: missing field {key!r}")
    return doc[key]
