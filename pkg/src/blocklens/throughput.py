"""Throughput statistics.

Average TPS is total transactions over the observation window; maximum TPS
is the average TPS within the densest fixed-size window (6 hours by
default). Partial trailing windows keep the full-window denominator so a
short tail cannot inflate the maximum. Alleged capacity is configuration,
never computed.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable

from .errors import EmptyWindow
from .model import ChainId

#: Seconds in the window the maximum is defined on.
MAX_WINDOW_SECONDS = 21600


def average_tps(total: int, start: int, end: int) -> Decimal:
    """total transactions / seconds in [start, end); exact decimal."""
    if total < 0:
        raise ValueError("transaction total must be non-negative")
    if end <= start:
        raise EmptyWindow(f"window [{start}, {end}) has no duration")
    return Decimal(total) / Decimal(end - start)


def max_tps(
    series: Iterable[tuple[int, int]], window_seconds: int = MAX_WINDOW_SECONDS
) -> tuple[Decimal, int]:
    """(rate, window_start) of the densest window.

    `series` is (window_start_epoch, transaction_count) pairs. Ties go to
    the earliest window.
    """
    best_count: int | None = None
    best_start = 0
    for start, count in sorted(series):
        if best_count is None or count > best_count:
            best_count = count
            best_start = start
    if best_count is None:
        raise EmptyWindow("no windows in series")
    return Decimal(best_count) / Decimal(window_seconds), best_start


def tps_display(rate: Decimal) -> str:
    """Two-decimal display form, rounded half-up."""
    return str(rate.quantize(Decimal("0.01"), ROUND_HALF_UP))


def series_from_result(rows: Iterable[dict]) -> list[tuple[int, int]]:
    """Adapt a count-per-window time-series result to (start, count) pairs."""
    return [(row["window_start"], row["count"]) for row in rows]


@dataclass(frozen=True)
class ThroughputStats:
    chain: ChainId
    observation_start: int
    observation_end: int
    total_transactions: int
    avg_tps: Decimal
    max_tps: Decimal
    max_window_start: int
    alleged_tps: Decimal
    window_mode: str = "calendar"

    def as_row(self) -> dict:
        return {
            "chain": self.chain.value,
            "observation_start": self.observation_start,
            "observation_end": self.observation_end,
            "total_transactions": self.total_transactions,
            "avg_tps": tps_display(self.avg_tps),
            "max_tps": tps_display(self.max_tps),
            "max_window_start": self.max_window_start,
            "alleged_tps": str(self.alleged_tps),
            "window_mode": self.window_mode,
        }


def build_stats(
    chain: ChainId,
    total_transactions: int,
    series: Iterable[tuple[int, int]],
    alleged_tps: Decimal | int | str,
    observation_start: int | None = None,
    observation_end: int | None = None,
    first_block_ts: int | None = None,
    last_block_ts: int | None = None,
    window_seconds: int = MAX_WINDOW_SECONDS,
) -> ThroughputStats:
    """Assemble the per-chain stats record.

    The average uses the configured calendar window when both bounds are
    given; otherwise it falls back to first-to-last block timestamps (the
    end is then exclusive-extended by one second so a single block does not
    produce a zero-length window).
    """
    if observation_start is not None and observation_end is not None:
        start, end, mode = observation_start, observation_end, "calendar"
    elif first_block_ts is not None and last_block_ts is not None:
        start, end, mode = first_block_ts, last_block_ts + 1, "observed"
    else:
        raise EmptyWindow("no observation bounds available")
    rate, window_start = max_tps(series, window_seconds)
    return ThroughputStats(
        chain=chain,
        observation_start=start,
        observation_end=end,
        total_transactions=total_transactions,
        avg_tps=average_tps(total_transactions, start, end),
        max_tps=rate,
        max_window_start=window_start,
        alleged_tps=Decimal(str(alleged_tps)),
        window_mode=mode,
    )
