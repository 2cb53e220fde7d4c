"""Spam-account heuristics.

Two signatures: an account whose traffic is almost entirely failures
(one spammer produced millions of dry payments with a single success), and
clusters of high-volume accounts that run one transaction type and route
payments through the same destination tag, which marks shared off-chain
control. A volume floor keeps small accounts out of both branches.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable

from ..model import Block
from ._util import ratio
from .report import CLEAN, FLAGGED, AnomalyReport, cap_evidence

DEFAULT_MIN_VOLUME = 100_000
DEFAULT_FAILURE_RATIO = Decimal("0.99")
DEFAULT_SINGLE_TYPE_SHARE = Decimal("0.98")


@dataclass
class AccountTally:
    account: str
    total: int = 0
    failed: int = 0
    type_counts: Counter = field(default_factory=Counter)
    tag_counts: Counter = field(default_factory=Counter)
    sample_tx_ids: list[str] = field(default_factory=list)

    def add(self, name: str, success: bool, destination_tag, tx_id: str) -> None:
        self.total += 1
        if not success:
            self.failed += 1
        self.type_counts[name] += 1
        if destination_tag is not None:
            self.tag_counts[destination_tag] += 1
        if len(self.sample_tx_ids) < 20:
            self.sample_tx_ids.append(tx_id)

    @property
    def failure_ratio(self) -> Decimal:
        return ratio(self.failed, self.total)

    def top_type(self) -> tuple[str, int]:
        return self.type_counts.most_common(1)[0]

    def dominant_tag(self):
        return self.tag_counts.most_common(1)[0][0] if self.tag_counts else None


def tally_blocks(blocks: Iterable[Block]) -> dict[str, AccountTally]:
    """Per-sender tallies over the block stream."""
    tallies: dict[str, AccountTally] = {}
    for block in blocks:
        for action in block.actions:
            tally = tallies.get(action.sender)
            if tally is None:
                tally = tallies[action.sender] = AccountTally(action.sender)
            tally.add(action.name, action.success, action.destination_tag, action.tx_id)
    return tallies


def spam_account_report(
    tallies: dict[str, AccountTally] | Iterable[AccountTally],
    min_volume: int = DEFAULT_MIN_VOLUME,
    failure_threshold: Decimal = DEFAULT_FAILURE_RATIO,
    single_type_threshold: Decimal = DEFAULT_SINGLE_TYPE_SHARE,
) -> list[AnomalyReport]:
    """Per-account spam reports, flagged accounts first."""
    if isinstance(tallies, dict):
        tallies = list(tallies.values())
    else:
        tallies = list(tallies)

    # cluster candidates: high-volume, one dominant type, tagged payments
    clusters: dict[object, list[str]] = defaultdict(list)
    monotype: dict[str, tuple[str, Decimal]] = {}
    for tally in tallies:
        if tally.total == 0 or tally.total < min_volume:
            continue
        name, count = tally.top_type()
        share = ratio(count, tally.total)
        if share >= single_type_threshold:
            monotype[tally.account] = (name, share)
            tag = tally.dominant_tag()
            if tag is not None:
                clusters[tag].append(tally.account)

    reports = []
    for tally in sorted(tallies, key=lambda t: (-t.total, t.account)):
        if tally.total == 0:
            continue
        failure_flag = tally.total >= min_volume and tally.failure_ratio >= failure_threshold
        tag = tally.dominant_tag()
        cluster = clusters.get(tag, []) if tag is not None else []
        cluster_flag = tally.account in monotype and len(cluster) >= 2
        metrics = {
            "transactions": tally.total,
            "failed": tally.failed,
            "failure_ratio": tally.failure_ratio,
            "min_volume": min_volume,
            "failure_threshold": failure_threshold,
            "single_type_threshold": single_type_threshold,
            "top_type": tally.top_type()[0],
            "top_type_share": ratio(tally.top_type()[1], tally.total),
        }
        if tag is not None:
            metrics["dominant_destination_tag"] = tag
            metrics["tag_cluster_size"] = len(cluster)
        reports.append(
            AnomalyReport(
                detector="spam-accounts",
                subject=tally.account,
                metrics=metrics,
                evidence=cap_evidence(tally.sample_tx_ids),
                verdict=FLAGGED if (failure_flag or cluster_flag) else CLEAN,
            )
        )
    reports.sort(key=lambda r: (r.verdict != FLAGGED, -r.metrics["transactions"], r.subject))
    return reports
