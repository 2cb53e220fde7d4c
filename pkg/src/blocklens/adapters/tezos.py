"""Tezos block RPC response parsing.

A block document carries operations in four validation passes (consensus,
voting, anonymous, manager); every operation counts once toward tx_count
and every item of its `contents` becomes one action named by its kind.
For endorsements the sender is the endorsing delegate (from metadata);
amounts are mutez strings converted to XTZ.
"""

from __future__ import annotations

from decimal import Decimal
from typing import Any

from ..errors import ChainMismatch, MalformedBlock
from ..model import Action, Block, ChainId
from ._util import parse_iso_utc, require

_MUTEZ = Decimal(10) ** 6


def block_height(doc: dict[str, Any]) -> int:
    header = doc.get("header")
    if not isinstance(header, dict) or "level" not in header:
        raise ChainMismatch("not a Tezos block document (no header.level)")
    return int(header["level"])


def _status_of(content: dict[str, Any]) -> tuple[bool, str | None]:
    metadata = content.get("metadata")
    if not isinstance(metadata, dict):
        return True, None
    result = metadata.get("operation_result")
    if not isinstance(result, dict):
        return True, None
    status = result.get("status", "applied")
    if status == "applied":
        return True, None
    errors = result.get("errors") or []
    code = errors[0].get("id", status) if errors and isinstance(errors[0], dict) else status
    return False, code


def _sender_of(content: dict[str, Any]) -> str:
    if "source" in content:
        return content["source"]
    metadata = content.get("metadata")
    if isinstance(metadata, dict) and "delegate" in metadata:
        return metadata["delegate"]
    return ""


def parse_block(doc: dict[str, Any]) -> Block:
    height = block_height(doc)
    header = doc["header"]
    timestamp = parse_iso_utc(require(header, "timestamp", "Tezos header"))
    passes = doc.get("operations", [])
    if not isinstance(passes, list):
        raise MalformedBlock("Tezos block: operations must be a list of passes")

    tx_count = 0
    actions: list[Action] = []
    for validation_pass in passes:
        for op in validation_pass:
            tx_count += 1
            op_hash = op.get("hash", "")
            for content in op.get("contents", []):
                kind = require(content, "kind", "Tezos operation content")
                success, error_code = _status_of(content)
                amount = currency = None
                if kind == "transaction" and "amount" in content:
                    amount = Decimal(content["amount"]) / _MUTEZ
                    currency = "XTZ"
                payload = {
                    k: v
                    for k, v in content.items()
                    if k not in ("kind", "source", "destination", "amount", "metadata")
                }
                actions.append(
                    Action(
                        chain=ChainId.TEZOS,
                        tx_id=op_hash,
                        sender=_sender_of(content),
                        receiver=content.get("destination", ""),
                        name=kind,
                        success=success,
                        error_code=error_code,
                        amount=amount,
                        currency=currency,
                        payload=payload,
                    )
                )

    return Block(
        chain=ChainId.TEZOS,
        height=height,
        timestamp=timestamp,
        tx_count=tx_count,
        actions=tuple(actions),
    )
