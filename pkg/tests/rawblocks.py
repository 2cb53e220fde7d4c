"""Builders for raw chain documents shaped like real node responses."""

from __future__ import annotations

import json
from typing import Any

from blocklens.adapters.xrpl import EPOCH_OFFSET


def eosio_action(contract: str, name: str, actor: str, data: dict | None = None) -> dict:
    return {
        "account": contract,
        "name": name,
        "authorization": [{"actor": actor, "permission": "active"}],
        "data": data if data is not None else {},
    }


def eosio_transfer(actor: str, to: str, quantity: str, memo: str = "", contract: str = "eosio.token") -> dict:
    return eosio_action(
        contract, "transfer", actor, {"from": actor, "to": to, "quantity": quantity, "memo": memo}
    )


def eosio_block(height: int, iso_ts: str, transactions: list[tuple[str, list[dict]]],
                statuses: list[str] | None = None) -> dict:
    txs = []
    for i, (tx_id, actions) in enumerate(transactions):
        status = statuses[i] if statuses else "executed"
        txs.append(
            {
                "status": status,
                "cpu_usage_us": 100,
                "net_usage_words": 12,
                "trx": {"id": tx_id, "transaction": {"actions": actions}},
            }
        )
    return {
        "timestamp": iso_ts,
        "producer": "eosproducer1",
        "confirmed": 0,
        "block_num": height,
        "transactions": txs,
    }


def tezos_endorsement(op_hash: str, delegate: str, level: int) -> dict:
    return {
        "hash": op_hash,
        "contents": [
            {"kind": "endorsement", "level": level, "metadata": {"delegate": delegate, "slots": [0]}}
        ],
    }


def tezos_transaction_op(op_hash: str, source: str, destination: str, mutez: int,
                         status: str = "applied") -> dict:
    content = {
        "kind": "transaction",
        "source": source,
        "destination": destination,
        "amount": str(mutez),
        "fee": "1300",
        "metadata": {"operation_result": {"status": status}},
    }
    return {"hash": op_hash, "contents": [content]}


def tezos_block(height: int, iso_ts: str, consensus_ops: list[dict] | None = None,
                manager_ops: list[dict] | None = None) -> dict:
    return {
        "protocol": "PsBabyM1eUXZseaJdmXFApDSBqj8YBfwELoxZHHW77EMcAbbwAS",
        "hash": f"BL{height:062d}",
        "header": {"level": height, "timestamp": iso_ts, "priority": 0},
        "operations": [consensus_ops or [], [], [], manager_ops or []],
    }


def xrpl_tx(tx_hash: str, tx_type: str, account: str, destination: str | None = None,
            amount: Any = None, result: str = "tesSUCCESS",
            destination_tag: int | None = None, **extra) -> dict:
    tx: dict[str, Any] = {
        "hash": tx_hash,
        "TransactionType": tx_type,
        "Account": account,
        "Fee": "10",
        "Sequence": 1,
        "metaData": {"TransactionResult": result, "TransactionIndex": 0},
    }
    if destination is not None:
        tx["Destination"] = destination
    if amount is not None:
        tx["Amount"] = amount
    if destination_tag is not None:
        tx["DestinationTag"] = destination_tag
    tx.update(extra)
    return tx


def iou(value: str, currency: str, issuer: str) -> dict:
    return {"currency": currency, "issuer": issuer, "value": value}


def xrpl_ledger(height: int, unix_ts: int, transactions: list[dict]) -> dict:
    return {
        "ledger_index": str(height),
        "ledger_hash": f"{height:064X}"[:64],
        "close_time": unix_ts - EPOCH_OFFSET,
        "close_time_human": "",
        "closed": True,
        "transactions": transactions,
    }


def as_line(doc: dict) -> bytes:
    return json.dumps(doc, separators=(",", ":")).encode()
