"""Exchange-rate oracle for issued currencies.

Rates are 30-day averages against XRP keyed by (currency, issuer) and the
window start date. Lookups pick the window containing the date; dates
before the earliest window use the earliest, dates past the last window
use the last. A missing (currency, issuer) is unknown, which is distinct
from a zero rate.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from decimal import Decimal

from ..timeutil import parse_iso_utc

WINDOW_DAYS = 30


@dataclass
class RateTable:
    entries: dict[tuple[str, str], list[tuple[int, Decimal]]] = field(default_factory=dict)

    def add(self, currency: str, issuer: str, window_start: int | str, rate: Decimal | str) -> None:
        when = parse_iso_utc(window_start) if isinstance(window_start, str) else int(window_start)
        value = Decimal(str(rate))
        if value < 0:
            raise ValueError(f"negative rate for {currency}/{issuer}: {value}")
        windows = self.entries.setdefault((currency, issuer), [])
        windows.append((when, value))
        windows.sort()

    def lookup(self, currency: str, issuer: str, when: int) -> Decimal | None:
        """Rate in XRP for the window covering `when`; None when unknown."""
        windows = self.entries.get((currency, issuer))
        if not windows:
            return None
        chosen = None
        for start, rate in windows:
            if start <= when:
                chosen = rate
            else:
                break
        return chosen if chosen is not None else windows[0][1]

    @classmethod
    def from_csv(cls, path: str) -> "RateTable":
        """Columns: currency, issuer, window_start, rate."""
        table = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                table.add(row["currency"], row["issuer"], row["window_start"], row["rate"])
        return table

    @classmethod
    def from_json(cls, path: str) -> "RateTable":
        """JSON array of {currency, issuer, window_start, rate}."""
        table = cls()
        with open(path, "rb") as fh:
            for row in json.load(fh):
                table.add(row["currency"], row["issuer"], row["window_start"], row["rate"])
        return table

    @classmethod
    def load(cls, path: str) -> "RateTable":
        return cls.from_json(path) if path.endswith(".json") else cls.from_csv(path)


DATA_API = "https://data.ripple.com/v2"


def fetch_rate(currency: str, issuer: str, date: str, base_url: str = DATA_API,
               session=None, timeout: float = 30.0):
    """One 30-day average rate from the public exchange-rates endpoint.

    GET {base}/exchange_rates/{currency}+{issuer}/XRP?date=...&period=30day;
    returns a Decimal or None when the pair has no rate.
    """
    import requests

    session = session or requests
    url = f"{base_url}/exchange_rates/{currency}+{issuer}/XRP"
    response = session.get(url, params={"date": date, "period": "30day"}, timeout=timeout)
    if response.status_code != 200:
        return None
    body = response.json()
    rate = body.get("rate")
    return Decimal(str(rate)) if rate is not None else None


def fetch_rate_table(pairs, dates, base_url: str = DATA_API, session=None) -> RateTable:
    """Populate a table for (currency, issuer) pairs over window start dates."""
    table = RateTable()
    for currency, issuer in pairs:
        for date in dates:
            rate = fetch_rate(currency, issuer, date, base_url=base_url, session=session)
            if rate is not None:
                table.add(currency, issuer, date, rate)
    return table
