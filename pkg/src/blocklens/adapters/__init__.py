"""Per-chain parsing of raw node documents into the uniform model."""

from __future__ import annotations

import json
from decimal import InvalidOperation
from typing import Any

from ..errors import ChainMismatch, MalformedBlock
from ..model import Block, ChainId
from . import eosio, tezos, xrpl

_PARSERS = {
    ChainId.EOSIO: eosio.parse_block,
    ChainId.TEZOS: tezos.parse_block,
    ChainId.XRPL: xrpl.parse_block,
}

_HEIGHT_KEYS = {
    ChainId.EOSIO: eosio.block_height,
    ChainId.TEZOS: tezos.block_height,
    ChainId.XRPL: xrpl.block_height,
}


def _load_document(raw_line: bytes | str) -> dict[str, Any]:
    try:
        doc = json.loads(raw_line)
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedBlock(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedBlock("block document must be a JSON object")
    return doc


def parse_block(chain: ChainId, raw_line: bytes | str) -> Block:
    """Parse one archived line into a normalized Block.

    Raises MalformedBlock on broken JSON or missing mandatory fields and
    ChainMismatch when the document shape belongs to another chain.
    """
    doc = _load_document(raw_line)
    try:
        return _PARSERS[chain](doc)
    except (ValueError, TypeError, KeyError, InvalidOperation) as exc:
        raise MalformedBlock(f"{chain.value} block rejected: {exc}") from exc


def block_height(chain: ChainId, raw_line: bytes | str) -> int:
    """Cheap height probe used by archive integrity checks."""
    return _HEIGHT_KEYS[chain](_load_document(raw_line))


def sniff_chain(raw_line: bytes | str) -> ChainId:
    """Guess the chain from a document's schema markers."""
    doc = _load_document(raw_line)
    if "block_num" in doc:
        return ChainId.EOSIO
    if "header" in doc and "operations" in doc:
        return ChainId.TEZOS
    if "ledger_index" in doc:
        return ChainId.XRPL
    raise ChainMismatch("document does not match any supported chain schema")
