"""XRPL account metadata and entity clustering.

Exchanges run many addresses; a registered username (or the parent's
username for unnamed child accounts) collapses them into one entity for
flow and spam reporting. The registry is a versioned input file, never
fetched during analysis runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from .errors import CyclicParentage

DESCENDANT_SUFFIX = "-descendant"


@dataclass(frozen=True)
class AccountRecord:
    address: str
    username: str | None = None
    parent: str | None = None
    activation_date: str | None = None

    def __post_init__(self) -> None:
        if self.parent == self.address:
            raise CyclicParentage(f"{self.address} is its own parent")


def load_registry(path: str) -> dict[str, AccountRecord]:
    """Load a JSON array of account records and validate parent links."""
    with open(path, "rb") as fh:
        raw = json.load(fh)
    registry = {}
    for entry in raw:
        record = AccountRecord(
            address=entry["address"],
            username=entry.get("username"),
            parent=entry.get("parent"),
            activation_date=entry.get("activation_date"),
        )
        registry[record.address] = record
    _check_acyclic(registry)
    return registry


def _check_acyclic(registry: Mapping[str, AccountRecord]) -> None:
    for start in registry:
        seen = {start}
        cursor = registry[start].parent
        while cursor is not None:
            if cursor in seen:
                raise CyclicParentage(f"parent cycle through {cursor}")
            seen.add(cursor)
            record = registry.get(cursor)
            cursor = record.parent if record else None


def fetch_account_record(address: str, base_url: str, session=None,
                         timeout: float = 30.0) -> AccountRecord | None:
    """One record from a ledger-explorer account API
    (GET {base}/account/{address} returning username/parent/inception)."""
    import requests

    session = session or requests
    response = session.get(f"{base_url.rstrip('/')}/account/{address}", timeout=timeout)
    if response.status_code != 200:
        return None
    body = response.json()
    return AccountRecord(
        address=address,
        username=body.get("username"),
        parent=body.get("parent"),
        activation_date=body.get("inception"),
    )


def resolve_entity(address: str, registry: Mapping[str, AccountRecord]) -> str:
    """Entity label: own username, else parent's username + '-descendant',
    else the raw address. Only one parent hop is consulted."""
    record = registry.get(address)
    if record is None:
        return address
    if record.username:
        return record.username
    if record.parent is not None:
        if record.parent == address:
            raise CyclicParentage(f"{address} is its own parent")
        parent = registry.get(record.parent)
        if parent is not None and parent.username:
            return parent.username + DESCENDANT_SUFFIX
    return address
