"""EOSIO get_block response parsing.

One stored line is one get_block response. A transaction's `trx` field is
either an object (expanded, with actions) or a bare hash string (deferred);
both count toward tx_count, only expanded ones yield actions. The sender is
the first authorization actor, the receiver is the contract account the
action is sent to.
"""

from __future__ import annotations

from typing import Any

from ..errors import ChainMismatch, MalformedBlock
from ..model import Action, Block, ChainId
from ._util import parse_asset, parse_iso_utc, require


def block_height(doc: dict[str, Any]) -> int:
    if "block_num" not in doc:
        raise ChainMismatch("not an EOSIO block document (no block_num)")
    return int(doc["block_num"])


def _action_from(raw: dict[str, Any], tx_id: str, success: bool, error_code: str | None) -> Action:
    contract = require(raw, "account", "EOSIO action")
    name = require(raw, "name", "EOSIO action")
    auth = raw.get("authorization") or []
    sender = auth[0].get("actor", "") if auth and isinstance(auth[0], dict) else ""
    data = raw.get("data")
    payload: dict[str, Any] = {"data": data} if data is not None else {}

    amount = currency = None
    if isinstance(data, dict):
        asset = parse_asset(data.get("quantity", ""))
        if asset is not None:
            amount, currency = asset
    return Action(
        chain=ChainId.EOSIO,
        tx_id=tx_id,
        sender=sender,
        receiver=contract,
        name=name,
        success=success,
        error_code=error_code,
        amount=amount,
        currency=currency,
        payload=payload,
    )


def parse_block(doc: dict[str, Any]) -> Block:
    height = block_height(doc)
    timestamp = parse_iso_utc(require(doc, "timestamp", "EOSIO block"))
    transactions = doc.get("transactions", [])
    if not isinstance(transactions, list):
        raise MalformedBlock("EOSIO block: transactions must be a list")

    actions: list[Action] = []
    for tx in transactions:
        status = tx.get("status", "executed")
        success = status == "executed"
        error_code = None if success else status
        trx = tx.get("trx")
        if isinstance(trx, str):
            continue  # deferred transaction, referenced by hash only
        if not isinstance(trx, dict):
            raise MalformedBlock("EOSIO transaction: trx must be object or hash")
        tx_id = require(trx, "id", "EOSIO transaction")
        inner = trx.get("transaction", {})
        for raw_action in inner.get("actions", []):
            actions.append(_action_from(raw_action, tx_id, success, error_code))

    return Block(
        chain=ChainId.EOSIO,
        height=height,
        timestamp=timestamp,
        tx_count=len(transactions),
        actions=tuple(actions),
    )
