"""XRPL ledger document parsing.

One stored line is the `ledger` object of a websocket/JSON-RPC `ledger`
response fetched with transactions expanded. Every transaction is a single
action named by its TransactionType. Success comes from the metadata result
code (tesSUCCESS); failed transactions keep the code in error_code. Native
amounts are drop strings (1 XRP = 1e6 drops); issued-currency amounts are
{currency, issuer, value} objects.
"""

from __future__ import annotations

from decimal import Decimal
from typing import Any

from ..errors import ChainMismatch, MalformedBlock
from ..model import Action, Block, ChainId

#: Seconds between the Unix epoch and the ledger close-time epoch
#: (2000-01-01T00:00:00Z).
EPOCH_OFFSET = 946684800

_UNIFORM_KEYS = frozenset(
    {"hash", "TransactionType", "Account", "Destination", "DestinationTag", "Amount"}
)


def block_height(doc: dict[str, Any]) -> int:
    if "ledger_index" not in doc:
        raise ChainMismatch("not an XRPL ledger document (no ledger_index)")
    return int(doc["ledger_index"])


def _parse_amount(raw: Any) -> tuple[Decimal | None, str | None, str | None]:
    if raw is None:
        return None, None, None
    if isinstance(raw, str):
        return Decimal(raw) / Decimal(10) ** 6, "XRP", None
    if isinstance(raw, dict):
        value = raw.get("value")
        return (
            Decimal(value) if value is not None else None,
            raw.get("currency"),
            raw.get("issuer"),
        )
    raise MalformedBlock(f"unsupported XRPL amount: {raw!r}")


def parse_block(doc: dict[str, Any]) -> Block:
    height = block_height(doc)
    if "close_time" not in doc:
        raise MalformedBlock("XRPL ledger: missing close_time")
    timestamp = int(doc["close_time"]) + EPOCH_OFFSET
    transactions = doc.get("transactions", [])
    if not isinstance(transactions, list):
        raise MalformedBlock("XRPL ledger: transactions must be a list")

    actions: list[Action] = []
    for tx in transactions:
        if not isinstance(tx, dict):
            raise MalformedBlock("XRPL ledger: transactions must be expanded objects")
        tx_type = tx.get("TransactionType")
        if tx_type is None:
            raise MalformedBlock("XRPL transaction: missing TransactionType")
        meta = tx.get("metaData") or tx.get("meta") or {}
        result = meta.get("TransactionResult", "tesSUCCESS")
        success = result == "tesSUCCESS"
        amount, currency, issuer = _parse_amount(tx.get("Amount"))
        payload = {k: v for k, v in tx.items() if k not in _UNIFORM_KEYS}
        actions.append(
            Action(
                chain=ChainId.XRPL,
                tx_id=tx.get("hash", ""),
                sender=tx.get("Account", ""),
                receiver=tx.get("Destination", ""),
                name=tx_type,
                success=success,
                error_code=None if success else result,
                amount=amount,
                currency=currency,
                issuer=issuer,
                destination_tag=tx.get("DestinationTag"),
                payload=payload,
            )
        )

    return Block(
        chain=ChainId.XRPL,
        height=height,
        timestamp=timestamp,
        tx_count=len(transactions),
        actions=tuple(actions),
    )
