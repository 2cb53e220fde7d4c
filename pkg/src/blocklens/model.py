"""Chain-agnostic block/action model.

Every chain adapter normalizes raw node documents into these types and
every processor consumes them. Amounts are decimal.Decimal (never binary
floats) so balance sums stay exact; timestamps are UTC epoch seconds with
sub-second precision discarded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from typing import Any, Mapping


class ChainId(str, Enum):
    EOSIO = "EOSIO"
    TEZOS = "TEZOS"
    XRPL = "XRPL"


class ActionCategory(str, Enum):
    PEER_TO_PEER = "PEER_TO_PEER"
    ACCOUNT = "ACCOUNT"
    CONSENSUS = "CONSENSUS"
    DEX = "DEX"
    GAMBLING = "GAMBLING"
    TOKEN = "TOKEN"
    OTHER = "OTHER"


#: Tickers whose amounts live natively on their chain; IOU issuers never
#: apply to these.
NATIVE_CURRENCIES = frozenset({"XRP", "EOS", "XTZ"})

#: Maximum fractional digits kept on amounts.
AMOUNT_PRECISION = 18


def _quantize_amount(value: Decimal | str | int) -> Decimal:
    d = value if isinstance(value, Decimal) else Decimal(str(value))
    exponent = d.as_tuple().exponent
    if isinstance(exponent, int) and exponent < -AMOUNT_PRECISION:
        d = round(d, AMOUNT_PRECISION)
    return d


@dataclass(frozen=True, slots=True)
class Action:
    """One atomic operation inside a transaction.

    `payload` carries chain-specific extras that the uniform fields do not
    cover (fees, flags, raw operation data); it is preserved, not interpreted.
    """

    chain: ChainId
    tx_id: str
    sender: str
    receiver: str
    name: str
    success: bool = True
    error_code: str | None = None
    amount: Decimal | None = None
    currency: str | None = None
    issuer: str | None = None
    destination_tag: int | None = None
    payload: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("action name must be non-empty")
        if self.success and self.error_code is not None:
            raise ValueError("error_code is only valid on failed actions")
        if self.issuer is not None and (
            self.currency is None or self.currency in NATIVE_CURRENCIES
        ):
            raise ValueError("issuer is only valid for non-native currencies")
        if self.amount is not None:
            normalized = _quantize_amount(self.amount)
            if normalized is not self.amount:
                object.__setattr__(self, "amount", normalized)


@dataclass(frozen=True, slots=True)
class Block:
    """One block (XRPL: ledger) in chain-agnostic form.

    tx_count counts distinct top-level transactions; a transaction holding
    k actions contributes k entries to `actions` but 1 to tx_count.
    """

    chain: ChainId
    height: int
    timestamp: int
    tx_count: int
    actions: tuple[Action, ...] = ()

    def __post_init__(self) -> None:
        if self.height < 0:
            raise ValueError("height must be non-negative")
        if self.tx_count < 0:
            raise ValueError("tx_count must be non-negative")
        if not isinstance(self.actions, tuple):
            object.__setattr__(self, "actions", tuple(self.actions))


def throughput_count(block: Block) -> int:
    """Transactions this block contributes to throughput.

    Multi-action transactions count once; this is never the action count.
    """
    return block.tx_count


# ---------------------------------------------------------------------------
# Normalized serialization (round-trips exactly; used by exports and tests)

def action_to_dict(action: Action) -> dict[str, Any]:
    out: dict[str, Any] = {
        "chain": action.chain.value,
        "tx_id": action.tx_id,
        "sender": action.sender,
        "receiver": action.receiver,
        "name": action.name,
        "success": action.success,
    }
    if action.error_code is not None:
        out["error_code"] = action.error_code
    if action.amount is not None:
        out["amount"] = str(action.amount)
    if action.currency is not None:
        out["currency"] = action.currency
    if action.issuer is not None:
        out["issuer"] = action.issuer
    if action.destination_tag is not None:
        out["destination_tag"] = action.destination_tag
    if action.payload:
        out["payload"] = dict(action.payload)
    return out


def action_from_dict(data: Mapping[str, Any]) -> Action:
    amount = data.get("amount")
    return Action(
        chain=ChainId(data["chain"]),
        tx_id=data["tx_id"],
        sender=data["sender"],
        receiver=data["receiver"],
        name=data["name"],
        success=data["success"],
        error_code=data.get("error_code"),
        amount=Decimal(amount) if amount is not None else None,
        currency=data.get("currency"),
        issuer=data.get("issuer"),
        destination_tag=data.get("destination_tag"),
        payload=data.get("payload", {}),
    )


def block_to_dict(block: Block) -> dict[str, Any]:
    return {
        "chain": block.chain.value,
        "height": block.height,
        "timestamp": block.timestamp,
        "tx_count": block.tx_count,
        "actions": [action_to_dict(a) for a in block.actions],
    }


def block_from_dict(data: Mapping[str, Any]) -> Block:
    return Block(
        chain=ChainId(data["chain"]),
        height=data["height"],
        timestamp=data["timestamp"],
        tx_count=data["tx_count"],
        actions=tuple(action_from_dict(a) for a in data["actions"]),
    )


def block_to_json(block: Block) -> str:
    return json.dumps(block_to_dict(block), separators=(",", ":"), sort_keys=True)


def block_from_json(line: str | bytes) -> Block:
    return block_from_dict(json.loads(line))
