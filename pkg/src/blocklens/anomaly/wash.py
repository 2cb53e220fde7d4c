"""Wash-trade detection over DEX trade receipts.

A trade receipt has a buyer and a seller; when both sides are the same
account nothing moves. An account is flagged when most of its trades are
self-matched and the per-currency net balance change stays within a small
drift of its traded volume, which together rule out honest high-frequency
traders (they move funds) and market makers (they rarely self-match).
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable

from ..model import Action
from ._util import ratio
from .report import CLEAN, FLAGGED, AnomalyReport, cap_evidence

#: Action names that signal a settled trade on the exchange contract.
TRADE_ACTION_NAMES = frozenset({"verifytrade2", "verifytrade3"})


@dataclass(frozen=True)
class TradeRecord:
    buyer: str
    seller: str
    base_amount: Decimal
    quote_amount: Decimal
    base_currency: str
    quote_currency: str
    fee_buyer: Decimal = Decimal(0)
    fee_seller: Decimal = Decimal(0)
    tx_id: str = ""

    def __post_init__(self) -> None:
        for label in ("base_amount", "quote_amount", "fee_buyer", "fee_seller"):
            if getattr(self, label) < 0:
                raise ValueError(f"{label} must be non-negative")


@dataclass(frozen=True)
class WashThresholds:
    self_trade_ratio: Decimal = Decimal("0.5")
    balance_drift: Decimal = Decimal("0.01")
    top_k: int = 5


def trades_from_actions(actions: Iterable[Action]) -> list[TradeRecord]:
    """Extract trade receipts from exchange contract actions.

    Expected payload data: buyer, seller, base and quote as asset strings
    ('1.0000 IQ'), optional fee_buyer/fee_seller asset strings.
    """
    from ..adapters._util import parse_asset

    trades = []
    for action in actions:
        if action.name not in TRADE_ACTION_NAMES:
            continue
        data = action.payload.get("data") if action.payload else None
        if not isinstance(data, dict):
            continue
        base = parse_asset(data.get("base", ""))
        quote = parse_asset(data.get("quote", ""))
        if base is None or quote is None:
            continue
        fee_buyer = parse_asset(data.get("fee_buyer", ""))
        fee_seller = parse_asset(data.get("fee_seller", ""))
        trades.append(
            TradeRecord(
                buyer=data.get("buyer", ""),
                seller=data.get("seller", ""),
                base_amount=base[0],
                base_currency=base[1],
                quote_amount=quote[0],
                quote_currency=quote[1],
                fee_buyer=fee_buyer[0] if fee_buyer else Decimal(0),
                fee_seller=fee_seller[0] if fee_seller else Decimal(0),
                tx_id=action.tx_id,
            )
        )
    return trades


def detect_wash_trades(
    trades: Iterable[TradeRecord], thresholds: WashThresholds = WashThresholds()
) -> list[AnomalyReport]:
    """Per-account wash-trade reports, flagged accounts first.

    Flags an account when its self-trade ratio reaches the threshold and
    more than half of the currencies it traded show a net balance change
    below the drift threshold (relative to the larger of sent/received).
    """
    trades = list(trades)
    involvement: Counter[str] = Counter()
    self_trades: dict[str, list[str]] = defaultdict(list)
    totals: dict[str, int] = defaultdict(int)
    sent: dict[str, dict[str, Decimal]] = defaultdict(lambda: defaultdict(Decimal))
    received: dict[str, dict[str, Decimal]] = defaultdict(lambda: defaultdict(Decimal))

    for t in trades:
        parties = {t.buyer, t.seller}
        for account in parties:
            involvement[account] += 1
            totals[account] += 1
        if t.buyer == t.seller:
            self_trades[t.buyer].append(t.tx_id)
        # buyer receives base and pays quote; seller mirrors
        received[t.buyer][t.base_currency] += t.base_amount
        sent[t.buyer][t.quote_currency] += t.quote_amount
        received[t.seller][t.quote_currency] += t.quote_amount
        sent[t.seller][t.base_currency] += t.base_amount

    top = [account for account, _ in involvement.most_common(thresholds.top_k)]
    top_set = set(top)
    covered = sum(1 for t in trades if t.buyer in top_set or t.seller in top_set)
    concentration = ratio(covered, len(trades))

    reports = []
    for account in sorted(totals):
        total = totals[account]
        self_count = len(self_trades[account])
        self_ratio = ratio(self_count, total)
        currencies = set(sent[account]) | set(received[account])
        below_drift = 0
        max_drift = Decimal(0)
        for currency in currencies:
            out = sent[account][currency]
            back = received[account][currency]
            peak = max(out, back)
            drift = abs(out - back) / peak if peak else Decimal(0)
            if drift < thresholds.balance_drift:
                below_drift += 1
            max_drift = max(max_drift, drift)
        most_below = currencies and below_drift * 2 > len(currencies)
        flagged = self_ratio >= thresholds.self_trade_ratio and most_below
        reports.append(
            AnomalyReport(
                detector="wash-trades",
                subject=account,
                metrics={
                    "trades": total,
                    "self_trades": self_count,
                    "self_trade_ratio": self_ratio,
                    "self_trade_threshold": thresholds.self_trade_ratio,
                    "currencies": len(currencies),
                    "currencies_below_drift": below_drift,
                    "max_balance_drift": max_drift,
                    "balance_drift_threshold": thresholds.balance_drift,
                    "top_k_concentration": concentration,
                },
                evidence=cap_evidence(self_trades[account]),
                verdict=FLAGGED if flagged else CLEAN,
            )
        )
    reports.sort(key=lambda r: (r.verdict != FLAGGED, -r.metrics["trades"], r.subject))
    return reports
