"""Aggregation processors.

Each processor keeps a mergeable accumulator so chunks can be mapped in
parallel and reduced deterministically: update() folds one block into a
state, merge() combines two partial states, finalize() renders the result.
States are plain dicts/Counters and pickle cleanly across workers.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Iterable

from .classify import ClassificationRules, classify_action
from .errors import ConfigError
from .model import Block

PROCESSOR_TYPES = (
    "count-transactions",
    "group-actions",
    "group-actions-over-time",
    "top-accounts",
    "action-distribution",
)

GROUP_KEYS = ("sender", "receiver", "name", "category")

_DURATION_RE = re.compile(r"^(\d+)([smhd])$")
_DURATION_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400}


def parse_duration(text: str) -> int:
    """'6h' -> 21600. Supports s/m/h/d suffixes."""
    m = _DURATION_RE.match(str(text).strip())
    if not m:
        raise ConfigError(f"bad duration {text!r}, expected forms like '6h', '30m'")
    seconds = int(m.group(1)) * _DURATION_UNITS[m.group(2)]
    if seconds <= 0:
        raise ConfigError(f"duration must be positive, got {text!r}")
    return seconds


def window_start(timestamp: int, duration_s: int) -> int:
    """UTC epoch-aligned window containing the timestamp."""
    return (timestamp // duration_s) * duration_s


@dataclass(frozen=True)
class ProcessorConfig:
    name: str
    type: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.type not in PROCESSOR_TYPES:
            raise ConfigError(
                f"processor {self.name!r}: unknown type {self.type!r} "
                f"(known: {', '.join(PROCESSOR_TYPES)})"
            )


@dataclass
class ProcessorResult:
    name: str
    kind: str
    data: Any


class _CountTransactions:
    """Scalar transaction count; with Duration, a per-window count series."""

    kind = "scalar"

    def __init__(self, config: ProcessorConfig):
        self.name = config.name
        duration = config.params.get("Duration")
        self.duration_s = parse_duration(duration) if duration else None
        if self.duration_s:
            self.kind = "time-series"

    def new_state(self):
        return {} if self.duration_s else 0

    def update(self, state, block: Block):
        if self.duration_s is None:
            return state + block.tx_count
        w = window_start(block.timestamp, self.duration_s)
        state[w] = state.get(w, 0) + block.tx_count
        return state

    def merge(self, a, b):
        if self.duration_s is None:
            return a + b
        for w, n in b.items():
            a[w] = a.get(w, 0) + n
        return a

    def finalize(self, state) -> ProcessorResult:
        if self.duration_s is None:
            return ProcessorResult(self.name, "scalar", state)
        series = [
            {"window_start": w, "count": n} for w, n in sorted(state.items())
        ]
        return ProcessorResult(self.name, "time-series", series)


class _GroupActions:
    kind = "keyed-histogram"

    def __init__(self, config: ProcessorConfig, rules: ClassificationRules):
        self.name = config.name
        self.by = _validated_by(config)
        self.rules = rules

    def new_state(self):
        return Counter()

    def update(self, state: Counter, block: Block):
        by = self.by
        if by == "category":
            rules = self.rules
            for action in block.actions:
                state[classify_action(rules, action).value] += 1
        else:
            for action in block.actions:
                state[getattr(action, by)] += 1
        return state

    def merge(self, a: Counter, b: Counter):
        a.update(b)
        return a

    def finalize(self, state: Counter) -> ProcessorResult:
        return ProcessorResult(self.name, "keyed-histogram", dict(state))


class _GroupActionsOverTime:
    kind = "time-series-of-keyed-histograms"

    def __init__(self, config: ProcessorConfig, rules: ClassificationRules):
        self.name = config.name
        self.by = _validated_by(config)
        duration = config.params.get("Duration")
        if not duration:
            raise ConfigError(f"processor {config.name!r}: Duration param is required")
        self.duration_s = parse_duration(duration)
        self.rules = rules

    def new_state(self):
        return {}

    def update(self, state: dict, block: Block):
        w = window_start(block.timestamp, self.duration_s)
        bucket = state.get(w)
        if bucket is None:
            bucket = state[w] = Counter()
        by = self.by
        if by == "category":
            rules = self.rules
            for action in block.actions:
                bucket[classify_action(rules, action).value] += 1
        else:
            for action in block.actions:
                bucket[getattr(action, by)] += 1
        return state

    def merge(self, a: dict, b: dict):
        for w, counts in b.items():
            if w in a:
                a[w].update(counts)
            else:
                a[w] = counts
        return a

    def finalize(self, state: dict) -> ProcessorResult:
        series = [
            {"window_start": w, "counts": dict(counts)}
            for w, counts in sorted(state.items())
        ]
        return ProcessorResult(self.name, "time-series-of-keyed-histograms", series)


class _TopAccounts:
    kind = "ranking"

    def __init__(self, config: ProcessorConfig):
        self.name = config.name
        direction = config.params.get("Direction", "sent")
        if direction not in ("sent", "received"):
            raise ConfigError(
                f"processor {config.name!r}: Direction must be 'sent' or 'received'"
            )
        self.direction = direction
        n = config.params.get("N", 10)
        if not isinstance(n, int) or n < 1:
            raise ConfigError(f"processor {config.name!r}: N must be an integer >= 1")
        self.n = n

    def new_state(self):
        return {}

    def update(self, state: dict, block: Block):
        sent = self.direction == "sent"
        for action in block.actions:
            account = action.sender if sent else action.receiver
            counterparty = action.receiver if sent else action.sender
            entry = state.get(account)
            if entry is None:
                entry = state[account] = [0, set()]
            entry[0] += 1
            if counterparty:
                entry[1].add(counterparty)
        return state

    def merge(self, a: dict, b: dict):
        for account, (count, parties) in b.items():
            entry = a.get(account)
            if entry is None:
                a[account] = [count, parties]
            else:
                entry[0] += count
                entry[1] |= parties
        return a

    def finalize(self, state: dict) -> ProcessorResult:
        ranked = sorted(state.items(), key=lambda kv: (-kv[1][0], kv[0]))[: self.n]
        rows = []
        for account, (count, parties) in ranked:
            unique = len(parties)
            avg = (
                (Decimal(count) / Decimal(unique)).quantize(Decimal("0.01"), ROUND_HALF_UP)
                if unique
                else Decimal("0.00")
            )
            rows.append(
                {
                    "account": account,
                    "count": count,
                    "unique_counterparties": unique,
                    "avg_per_counterparty": str(avg),
                }
            )
        return ProcessorResult(self.name, "ranking", rows)


class _ActionDistribution:
    """Per (category, name) counts with table-style one-decimal percentages."""

    kind = "distribution"

    def __init__(self, config: ProcessorConfig, rules: ClassificationRules):
        self.name = config.name
        self.rules = rules

    def new_state(self):
        return Counter()

    def update(self, state: Counter, block: Block):
        rules = self.rules
        for action in block.actions:
            state[(classify_action(rules, action).value, action.name)] += 1
        return state

    def merge(self, a: Counter, b: Counter):
        a.update(b)
        return a

    def finalize(self, state: Counter) -> ProcessorResult:
        total = sum(state.values())
        rows = []
        for (category, name), count in sorted(
            state.items(), key=lambda kv: (kv[0][0], -kv[1], kv[0][1])
        ):
            rows.append(
                {
                    "category": category,
                    "name": name,
                    "count": count,
                    "percent": str(percent_of(count, total)),
                }
            )
        return ProcessorResult(self.name, "distribution", rows)


def percent_of(count: int, total: int) -> Decimal:
    """Share as a percentage rounded half-up to one decimal place."""
    if total == 0:
        return Decimal("0.0")
    return (Decimal(count) * 100 / Decimal(total)).quantize(Decimal("0.1"), ROUND_HALF_UP)


def _validated_by(config: ProcessorConfig) -> str:
    by = config.params.get("By")
    if by not in GROUP_KEYS:
        raise ConfigError(
            f"processor {config.name!r}: By must be one of {', '.join(GROUP_KEYS)}"
        )
    return by


def build_processor(config: ProcessorConfig, rules: ClassificationRules):
    if config.type == "count-transactions":
        return _CountTransactions(config)
    if config.type == "group-actions":
        return _GroupActions(config, rules)
    if config.type == "group-actions-over-time":
        return _GroupActionsOverTime(config, rules)
    if config.type == "top-accounts":
        return _TopAccounts(config)
    if config.type == "action-distribution":
        return _ActionDistribution(config, rules)
    raise ConfigError(f"unknown processor type {config.type!r}")


def run_processor_over_blocks(
    config: ProcessorConfig, blocks: Iterable[Block], rules: ClassificationRules
) -> ProcessorResult:
    """Single-threaded convenience path, also the reference for tests."""
    proc = build_processor(config, rules)
    state = proc.new_state()
    for block in blocks:
        state = proc.update(state, block)
    return proc.finalize(state)


def group_actions_over_time(
    blocks: Iterable[Block], by: str, duration: str, rules: ClassificationRules
) -> ProcessorResult:
    config = ProcessorConfig(
        name="group-actions-over-time",
        type="group-actions-over-time",
        params={"By": by, "Duration": duration},
    )
    return run_processor_over_blocks(config, blocks, rules)


def top_accounts(
    blocks: Iterable[Block], direction: str, n: int, rules: ClassificationRules
) -> ProcessorResult:
    config = ProcessorConfig(
        name="top-accounts", type="top-accounts", params={"Direction": direction, "N": n}
    )
    return run_processor_over_blocks(config, blocks, rules)
