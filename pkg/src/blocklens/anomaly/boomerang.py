"""Boomerang transfer detection.

An airdrop farm sends amount x to a contract, the contract returns the
same x in the same transaction and hands out a second token alongside.
One matched pair needs all three legs: the outgoing transfer, an equal
return transfer, and a different-currency transfer from the contract back
to the sender. Matching is per transaction by default; a block window > 0
also matches returns that arrive within that many blocks (the carryover
buffer is bounded by the window).
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable

from ..model import Action, Block
from ._util import ratio
from .report import CLEAN, FLAGGED, AnomalyReport, cap_evidence

TRANSFER_NAME = "transfer"


@dataclass
class _Pending:
    height: int
    tx_id: str
    amount: Decimal
    currency: str


def _transfer_parties(action: Action) -> tuple[str, str] | None:
    """(from, to) of a token transfer, preferring the payload's own fields."""
    if action.name != TRANSFER_NAME or action.amount is None or not action.currency:
        return None
    data = action.payload.get("data") if action.payload else None
    if isinstance(data, dict) and "from" in data and "to" in data:
        return data["from"], data["to"]
    if action.sender and action.receiver:
        return action.sender, action.receiver
    return None


def detect_boomerang(
    blocks: Iterable[Block], window: int = 0, min_pairs: int = 1
) -> list[AnomalyReport]:
    """Per (sender, contract) boomerang reports, flagged pairs first."""
    matched: Counter[tuple[str, str]] = Counter()
    evidence: dict[tuple[str, str], list[str]] = defaultdict(list)
    sent_transfers: Counter[str] = Counter()
    # window > 0: outgoing transfers waiting for their return leg
    pending: dict[tuple[str, str, str, Decimal], list[_Pending]] = defaultdict(list)

    def expire(height: int) -> None:
        for key in list(pending):
            alive = [p for p in pending[key] if height - p.height <= window]
            if alive:
                pending[key] = alive
            else:
                del pending[key]

    for block in blocks:
        if window > 0:
            expire(block.height)
        by_tx: dict[str, list[tuple[str, str, Action]]] = defaultdict(list)
        for action in block.actions:
            parties = _transfer_parties(action)
            if parties is None:
                continue
            sender, recipient = parties
            sent_transfers[sender] += 1
            by_tx[action.tx_id].append((sender, recipient, action))

        for tx_id, transfers in by_tx.items():
            # currencies moved per (from, to) inside this transaction; the
            # second-token test needs them
            currencies_between: dict[tuple[str, str], set[str]] = defaultdict(set)
            for sender, recipient, action in transfers:
                currencies_between[(sender, recipient)].add(action.currency)

            returns: Counter[tuple[str, str, str, Decimal]] = Counter()
            for sender, recipient, action in transfers:
                returns[(sender, recipient, action.currency, action.amount)] += 1

            for sender, recipient, action in transfers:
                key = (recipient, sender, action.currency, action.amount)
                if returns.get(key, 0) <= 0:
                    if window > 0:
                        pending[key].append(
                            _Pending(block.height, tx_id, action.amount, action.currency)
                        )
                    continue
                extra_token = any(
                    c != action.currency for c in currencies_between[(recipient, sender)]
                )
                if not extra_token:
                    continue
                returns[key] -= 1
                returns[(sender, recipient, action.currency, action.amount)] -= 1
                matched[(sender, recipient)] += 1
                evidence[(sender, recipient)].append(tx_id)

            if window > 0:
                # returns arriving later than the outgoing leg
                for sender, recipient, action in transfers:
                    key = (sender, recipient, action.currency, action.amount)
                    waiting = pending.get(key)
                    if not waiting or returns.get(key, 0) <= 0:
                        continue
                    extra_token = any(
                        c != action.currency for c in currencies_between[(sender, recipient)]
                    )
                    if not extra_token:
                        continue
                    entry = waiting.pop(0)
                    if not waiting:
                        del pending[key]
                    returns[key] -= 1
                    matched[(recipient, sender)] += 1
                    evidence[(recipient, sender)].append(entry.tx_id)

    reports = []
    for (sender, contract), pairs in sorted(matched.items()):
        share = ratio(pairs, sent_transfers[sender])
        reports.append(
            AnomalyReport(
                detector="boomerang",
                subject=f"{sender}->{contract}",
                metrics={
                    "matched_pairs": pairs,
                    "sender_transfers": sent_transfers[sender],
                    "traffic_share": share,
                    "window_blocks": window,
                    "min_pairs": min_pairs,
                },
                evidence=cap_evidence(evidence[(sender, contract)]),
                verdict=FLAGGED if pairs >= min_pairs else CLEAN,
            )
        )
    reports.sort(key=lambda r: (r.verdict != FLAGGED, -r.metrics["matched_pairs"], r.subject))
    return reports
