"""Historical block fetching into the chunked archive.

Fetch runs are resumable: the out directory is inspected first and only
heights missing from it are requested. Partial results land in irregular
chunk files (contiguous sub-runs), so a rerun fills exactly the holes.
Every request obeys the endpoint's rate limit and is retried with
exponential backoff and jitter before the height is recorded as failed.
"""

from __future__ import annotations

import json
import os
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import requests

from .errors import EndpointUnavailable
from .model import ChainId
from .storage import (
    CHAIN_PREFIX,
    ArchivePattern,
    check_integrity,
    chunk_filename,
    write_chunk,
)
from .wsclient import WebsocketClient, WebsocketError

TRANSPORT_HTTP = "HTTP_RPC"
TRANSPORT_WEBSOCKET = "WEBSOCKET"

BACKOFF_BASE_S = 0.5
BACKOFF_FACTOR = 2.0
BACKOFF_JITTER = 0.2

DEFAULT_CHUNK_SIZE = 10_000


@dataclass(frozen=True)
class EndpointSpec:
    chain: ChainId
    url: str
    transport: str = TRANSPORT_HTTP
    rate_limit: float = 10.0
    max_retries: int = 5
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.transport not in (TRANSPORT_HTTP, TRANSPORT_WEBSOCKET):
            raise ValueError(f"unknown transport {self.transport!r}")
        if self.transport == TRANSPORT_WEBSOCKET and self.chain is not ChainId.XRPL:
            raise ValueError("websocket transport is only used for XRPL")
        if self.chain in (ChainId.EOSIO, ChainId.TEZOS) and self.transport != TRANSPORT_HTTP:
            raise ValueError(f"{self.chain.value} endpoints use HTTP RPC")
        if self.rate_limit <= 0:
            raise ValueError("rate_limit must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")


class FetchError(Exception):
    """One failed request attempt (retried by the caller)."""


def _compact(doc) -> bytes:
    return json.dumps(doc, separators=(",", ":")).encode()


class EosioSource:
    """get_block over HTTP RPC; the response body is the block document."""

    def __init__(self, endpoint: EndpointSpec, session: requests.Session | None = None):
        self.endpoint = endpoint
        self.session = session or requests.Session()

    def fetch(self, height: int) -> bytes:
        url = self.endpoint.url.rstrip("/") + "/v1/chain/get_block"
        try:
            response = self.session.post(
                url, json={"block_num_or_id": height}, timeout=self.endpoint.timeout
            )
        except requests.RequestException as exc:
            raise FetchError(f"height {height}: {exc}") from exc
        if response.status_code != 200:
            raise FetchError(f"height {height}: HTTP {response.status_code}")
        return _compact(response.json())

    def close(self) -> None:
        self.session.close()


class TezosSource:
    """Block RPC, GET by level."""

    def __init__(self, endpoint: EndpointSpec, session: requests.Session | None = None):
        self.endpoint = endpoint
        self.session = session or requests.Session()

    def fetch(self, height: int) -> bytes:
        url = self.endpoint.url.rstrip("/") + f"/chains/main/blocks/{height}"
        try:
            response = self.session.get(url, timeout=self.endpoint.timeout)
        except requests.RequestException as exc:
            raise FetchError(f"height {height}: {exc}") from exc
        if response.status_code != 200:
            raise FetchError(f"height {height}: HTTP {response.status_code}")
        return _compact(response.json())

    def close(self) -> None:
        self.session.close()


_LEDGER_PARAMS = {"transactions": True, "expand": True, "accounts": False}


class XrplWebsocketSource:
    """`ledger` command over the websocket API; stores the ledger object."""

    def __init__(self, endpoint: EndpointSpec):
        self.endpoint = endpoint
        self.client = WebsocketClient(endpoint.url, timeout=endpoint.timeout)
        self._next_id = 0

    def fetch(self, height: int) -> bytes:
        self._next_id += 1
        request = {"id": self._next_id, "command": "ledger", "ledger_index": height}
        request.update(_LEDGER_PARAMS)
        try:
            response = self.client.request(request)
        except (WebsocketError, OSError) as exc:
            self.client.close()
            raise FetchError(f"height {height}: {exc}") from exc
        if response.get("status") != "success":
            raise FetchError(f"height {height}: {response.get('error', 'request failed')}")
        ledger = response.get("result", {}).get("ledger")
        if ledger is None:
            raise FetchError(f"height {height}: response carries no ledger")
        return _compact(ledger)

    def close(self) -> None:
        self.client.close()


class XrplHttpSource:
    """`ledger` method over JSON-RPC for nodes without websocket exposure."""

    def __init__(self, endpoint: EndpointSpec, session: requests.Session | None = None):
        self.endpoint = endpoint
        self.session = session or requests.Session()

    def fetch(self, height: int) -> bytes:
        body = {"method": "ledger", "params": [dict(_LEDGER_PARAMS, ledger_index=height)]}
        try:
            response = self.session.post(
                self.endpoint.url, json=body, timeout=self.endpoint.timeout
            )
        except requests.RequestException as exc:
            raise FetchError(f"height {height}: {exc}") from exc
        if response.status_code != 200:
            raise FetchError(f"height {height}: HTTP {response.status_code}")
        result = response.json().get("result", {})
        if result.get("status") not in (None, "success"):
            raise FetchError(f"height {height}: {result.get('error', 'request failed')}")
        ledger = result.get("ledger")
        if ledger is None:
            raise FetchError(f"height {height}: response carries no ledger")
        return _compact(ledger)

    def close(self) -> None:
        self.session.close()


def open_source(endpoint: EndpointSpec):
    if endpoint.chain is ChainId.EOSIO:
        return EosioSource(endpoint)
    if endpoint.chain is ChainId.TEZOS:
        return TezosSource(endpoint)
    if endpoint.transport == TRANSPORT_WEBSOCKET:
        return XrplWebsocketSource(endpoint)
    return XrplHttpSource(endpoint)


class ArchiveWriter:
    """Buffers fetched lines and writes chunk files.

    Chunk boundaries align to the run's start height. Groups are flushed
    as soon as every height in them is present; leftovers are written at
    finalize as contiguous sub-runs so nothing fetched is ever dropped.
    """

    def __init__(self, out_dir: str, chain: ChainId, anchor: int,
                 chunk_size: int = DEFAULT_CHUNK_SIZE):
        if chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        self.out_dir = out_dir
        self.chain = chain
        self.anchor = anchor
        self.chunk_size = chunk_size
        self.pending: dict[int, dict[int, bytes]] = {}
        self.written: list[str] = []
        os.makedirs(out_dir, exist_ok=True)

    def _group_range(self, group: int) -> tuple[int, int]:
        first = self.anchor + group * self.chunk_size
        return first, first + self.chunk_size - 1

    def add(self, height: int, line: bytes) -> None:
        group = (height - self.anchor) // self.chunk_size
        bucket = self.pending.setdefault(group, {})
        bucket[height] = line
        first, last = self._group_range(group)
        if len(bucket) == last - first + 1:
            self._write_run(sorted(bucket.items()))
            del self.pending[group]

    def _write_run(self, rows: list[tuple[int, bytes]]) -> None:
        first, last = rows[0][0], rows[-1][0]
        path = os.path.join(self.out_dir, chunk_filename(self.chain, first, last))
        write_chunk(rows, path)
        self.written.append(path)

    def finalize(self) -> list[str]:
        for group in sorted(self.pending):
            rows = sorted(self.pending[group].items())
            run: list[tuple[int, bytes]] = []
            for height, line in rows:
                if run and height != run[-1][0] + 1:
                    self._write_run(run)
                    run = []
                run.append((height, line))
            if run:
                self._write_run(run)
        self.pending.clear()
        return self.written


@dataclass
class FetchSummary:
    requested: int
    fetched: int
    failures: list[int] = field(default_factory=list)
    written: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.failures


def archive_pattern(out_dir: str, chain: ChainId, start: int, end: int) -> ArchivePattern:
    glob = os.path.join(out_dir, f"{CHAIN_PREFIX[chain]}_blocks-*.jsonl.gz")
    return ArchivePattern(glob, start, end)


def missing_heights(out_dir: str, chain: ChainId, start: int, end: int) -> list[tuple[int, int]]:
    return check_integrity(archive_pattern(out_dir, chain, start, end), deep=False)


def fetch_blocks(
    source,
    endpoint: EndpointSpec,
    start: int,
    end: int,
    out_dir: str,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    sleep: Callable[[float], None] = time.sleep,
    clock: Callable[[], float] = time.monotonic,
    jitter: random.Random | None = None,
) -> FetchSummary:
    """Fetch every missing height in [start, end] into the archive.

    Returns a summary listing heights that kept failing after retries.
    Raises EndpointUnavailable when the endpoint never serves a single
    request.
    """
    if start > end:
        raise ValueError(f"start {start} > end {end}")
    jitter = jitter or random.Random()
    gaps = missing_heights(out_dir, endpoint.chain, start, end)
    writer = ArchiveWriter(out_dir, endpoint.chain, anchor=start, chunk_size=chunk_size)
    min_interval = 1.0 / endpoint.rate_limit

    requested = sum(b - a + 1 for a, b in gaps)
    fetched = 0
    failures: list[int] = []
    successes = 0
    consecutive_failures = 0
    last_request = -min_interval

    for lo, hi in gaps:
        for height in range(lo, hi + 1):
            line = None
            for attempt in range(endpoint.max_retries + 1):
                wait = min_interval - (clock() - last_request)
                if wait > 0:
                    sleep(wait)
                last_request = clock()
                try:
                    line = source.fetch(height)
                    break
                except FetchError:
                    if attempt < endpoint.max_retries:
                        backoff = BACKOFF_BASE_S * (BACKOFF_FACTOR**attempt)
                        backoff *= 1 + BACKOFF_JITTER * (2 * jitter.random() - 1)
                        sleep(backoff)
            if line is None:
                failures.append(height)
                consecutive_failures += 1
                if successes == 0 and consecutive_failures >= 3:
                    writer.finalize()
                    raise EndpointUnavailable(
                        f"{endpoint.url} served none of the first "
                        f"{consecutive_failures} requests"
                    )
                continue
            consecutive_failures = 0
            successes += 1
            fetched += 1
            writer.add(height, line)

    written = writer.finalize()
    return FetchSummary(requested=requested, fetched=fetched, failures=failures, written=written)
