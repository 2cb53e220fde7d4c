"""Case-study detectors: wash trading, boomerang airdrop traffic, spam
accounts and zero-value payment classification."""

from .boomerang import detect_boomerang
from .payment_value import (
    PaymentValueClass,
    classify_payment_value,
    payment_value_summary,
    value_flow,
)
from .rates import RateTable
from .report import AnomalyReport
from .spam import AccountTally, spam_account_report, tally_blocks
from .wash import TradeRecord, WashThresholds, detect_wash_trades, trades_from_actions

__all__ = [
    "AccountTally",
    "AnomalyReport",
    "PaymentValueClass",
    "RateTable",
    "TradeRecord",
    "WashThresholds",
    "classify_payment_value",
    "detect_boomerang",
    "detect_wash_trades",
    "payment_value_summary",
    "spam_account_report",
    "tally_blocks",
    "trades_from_actions",
    "value_flow",
]
