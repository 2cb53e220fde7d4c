"""Zero-value payment classification and value-flow aggregation.

A payment carries value when it moves native XRP or an issued token whose
issuer-specific exchange rate against XRP is positive in the payment's
date window. A zero rate means the token trades for nothing; an absent
rate means nobody can tell, which is reported separately rather than
folded into either side.
"""

from __future__ import annotations

from collections import Counter
from decimal import Decimal
from enum import Enum
from typing import Callable, Iterable, Mapping

from ..model import Action
from ._util import ratio
from .rates import RateTable

PAYMENT_NAME = "Payment"


class PaymentValueClass(str, Enum):
    VALUE_CARRYING = "VALUE_CARRYING"
    ZERO_VALUE = "ZERO_VALUE"
    UNKNOWN_VALUE = "UNKNOWN_VALUE"
    FAILED = "FAILED"


def classify_payment_value(
    payment: Action, rates: RateTable, when: int = 0
) -> PaymentValueClass:
    """Classify one payment; `when` selects the rate window for issued
    tokens (pass the enclosing block's timestamp)."""
    if payment.name != PAYMENT_NAME:
        raise ValueError(f"not a payment action: {payment.name!r}")
    if not payment.success:
        return PaymentValueClass.FAILED
    if payment.amount is None or payment.currency is None:
        return PaymentValueClass.UNKNOWN_VALUE
    if payment.currency == "XRP":
        return (
            PaymentValueClass.VALUE_CARRYING
            if payment.amount > 0
            else PaymentValueClass.ZERO_VALUE
        )
    rate = rates.lookup(payment.currency, payment.issuer or "", when)
    if rate is None:
        return PaymentValueClass.UNKNOWN_VALUE
    return PaymentValueClass.VALUE_CARRYING if rate > 0 else PaymentValueClass.ZERO_VALUE


def payment_value_summary(class_counts: Mapping[PaymentValueClass, int]) -> dict:
    """Value-carrying share under both denominators.

    strict: successful payments only; lenient: every payment including
    failures (both shares are reported because the right denominator is a
    judgment call).
    """
    carrying = class_counts.get(PaymentValueClass.VALUE_CARRYING, 0)
    failed = class_counts.get(PaymentValueClass.FAILED, 0)
    total = sum(class_counts.values())
    successful = total - failed
    return {
        "total_payments": total,
        "successful_payments": successful,
        "value_carrying": carrying,
        "zero_value": class_counts.get(PaymentValueClass.ZERO_VALUE, 0),
        "unknown_value": class_counts.get(PaymentValueClass.UNKNOWN_VALUE, 0),
        "failed": failed,
        "value_share_strict": ratio(carrying, successful),
        "value_share_lenient": ratio(carrying, total),
    }


def classify_payments(
    payments: Iterable[tuple[Action, int]], rates: RateTable
) -> Counter:
    """Class counts over (payment, timestamp) pairs; partitions the input."""
    counts: Counter = Counter()
    for payment, when in payments:
        counts[classify_payment_value(payment, rates, when)] += 1
    return counts


def value_flow(
    payments: Iterable[tuple[Action, int]],
    rates: RateTable,
    entity_of: Mapping[str, str] | Callable[[str], str] | None = None,
) -> dict[tuple[str, str, str], Decimal]:
    """Aggregate XRP-denominated value per (sender, currency, receiver).

    Input pairs are (payment action, block timestamp). Only value-carrying
    payments contribute; XRP converts at 1, issued tokens at their window
    rate. Entities come from the clustering map (identity when absent).
    """
    if entity_of is None:
        resolve = lambda account: account
    elif callable(entity_of):
        resolve = entity_of
    else:
        mapping = entity_of
        resolve = lambda account: mapping.get(account, account)

    flows: dict[tuple[str, str, str], Decimal] = {}
    for payment, when in payments:
        if classify_payment_value(payment, rates, when) is not PaymentValueClass.VALUE_CARRYING:
            continue
        if payment.currency == "XRP":
            xrp_value = payment.amount
        else:
            rate = rates.lookup(payment.currency, payment.issuer or "", when)
            xrp_value = payment.amount * rate
        key = (resolve(payment.sender), payment.currency, resolve(payment.receiver))
        flows[key] = flows.get(key, Decimal(0)) + xrp_value
    return flows
