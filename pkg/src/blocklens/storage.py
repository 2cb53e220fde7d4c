"""Chunked gzip JSON Lines block archive.

One chunk file holds a contiguous height range, one block document per
line, LF-terminated, gzip level 6 (RFC 1952). The filename carries the
range (`<chain>_blocks-<first>-<last>.jsonl.gz`) so coverage can be checked
before decompressing anything. Chunk files are immutable once written;
writes go to a temp file and are renamed into place.
"""

from __future__ import annotations

import glob as globlib
import gzip
import json
import os
import re
import tempfile
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import DuplicateHeight, MissingChunk, NonContiguous
from .model import ChainId

GZIP_LEVEL = 6

CHAIN_PREFIX = {ChainId.EOSIO: "eos", ChainId.TEZOS: "tezos", ChainId.XRPL: "xrp"}
PREFIX_CHAIN = {v: k for k, v in CHAIN_PREFIX.items()}

_CHUNK_NAME_RE = re.compile(r"^(?P<prefix>[a-z0-9]+)_blocks-(?P<first>\d+)-(?P<last>\d+)\.jsonl\.gz$")


@dataclass(frozen=True)
class ArchiveChunk:
    path: str
    chain: ChainId | None
    first_height: int
    last_height: int
    line_count: int

    @property
    def expected_lines(self) -> int:
        return self.last_height - self.first_height + 1


@dataclass(frozen=True)
class ArchivePattern:
    """Glob plus the height range a run should cover."""

    glob: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"start {self.start} > end {self.end}")


def chunk_filename(chain: ChainId, first: int, last: int) -> str:
    return f"{CHAIN_PREFIX[chain]}_blocks-{first}-{last}.jsonl.gz"


def parse_chunk_name(path: str) -> tuple[ChainId | None, int, int] | None:
    """(chain, first, last) from a chunk filename, or None if not a chunk."""
    m = _CHUNK_NAME_RE.match(os.path.basename(path))
    if not m:
        return None
    chain = PREFIX_CHAIN.get(m.group("prefix"))
    return chain, int(m.group("first")), int(m.group("last"))


def generic_height(line: bytes | str) -> int:
    """Height probe that understands all supported block document shapes."""
    doc = json.loads(line)
    if "block_num" in doc:
        return int(doc["block_num"])
    if "ledger_index" in doc:
        return int(doc["ledger_index"])
    header = doc.get("header")
    if isinstance(header, dict) and "level" in header:
        return int(header["level"])
    if "height" in doc:
        return int(doc["height"])
    raise ValueError("no height field found in block document")


def write_chunk(rows: Iterable[tuple[int, bytes | str]], path: str) -> ArchiveChunk:
    """Write contiguous (height, line) rows as one gzip chunk, atomically.

    mtime in the gzip header is pinned to 0 so identical content yields
    identical bytes.
    """
    items = list(rows)
    if not items:
        raise NonContiguous("refusing to write an empty chunk")
    heights = [h for h, _ in items]
    for prev, cur in zip(heights, heights[1:]):
        if cur != prev + 1:
            raise NonContiguous(f"heights {prev} -> {cur} are not contiguous ascending")

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            with gzip.GzipFile(fileobj=fh, mode="wb", compresslevel=GZIP_LEVEL, mtime=0) as gz:
                for _, line in items:
                    data = line.encode() if isinstance(line, str) else line
                    gz.write(data.rstrip(b"\n") + b"\n")
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    parsed = parse_chunk_name(path)
    chain = parsed[0] if parsed else None
    return ArchiveChunk(
        path=path,
        chain=chain,
        first_height=heights[0],
        last_height=heights[-1],
        line_count=len(items),
    )


def read_chunk_lines(path: str) -> list[bytes]:
    """All lines of one chunk. A broken gzip stream is a hard error."""
    with gzip.open(path, "rb") as fh:
        data = fh.read()
    return [ln for ln in data.split(b"\n") if ln]


def list_chunks(pattern: ArchivePattern) -> list[ArchiveChunk]:
    """Chunks whose name range intersects the pattern range, sorted by height.

    line_count is taken from the filename contract here; actual counts are
    verified by scan/check_integrity.
    """
    chunks = []
    for path in globlib.glob(pattern.glob):
        parsed = parse_chunk_name(path)
        if parsed is None:
            continue
        chain, first, last = parsed
        if last < pattern.start or first > pattern.end:
            continue
        chunks.append(ArchiveChunk(path, chain, first, last, last - first + 1))
    chunks.sort(key=lambda c: (c.first_height, c.last_height))
    return chunks


def coverage_gaps(pattern: ArchivePattern, chunks: list[ArchiveChunk]) -> list[tuple[int, int]]:
    """Height ranges in [start, end] not covered by any chunk name."""
    missing: list[tuple[int, int]] = []
    cursor = pattern.start
    for chunk in chunks:
        if chunk.first_height > cursor:
            missing.append((cursor, min(chunk.first_height - 1, pattern.end)))
        cursor = max(cursor, chunk.last_height + 1)
        if cursor > pattern.end:
            break
    if cursor <= pattern.end:
        missing.append((cursor, pattern.end))
    return missing


def _overlaps(chunks: list[ArchiveChunk]) -> list[tuple[str, str]]:
    out = []
    for a, b in zip(chunks, chunks[1:]):
        if b.first_height <= a.last_height:
            out.append((a.path, b.path))
    return out


def _to_ranges(heights: Iterable[int]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for h in sorted(heights):
        if out and h == out[-1][1] + 1:
            out[-1] = (out[-1][0], h)
        else:
            out.append((h, h))
    return out


def check_integrity(
    pattern: ArchivePattern,
    height_fn: Callable[[bytes], int] = generic_height,
    deep: bool = True,
) -> list[tuple[int, int]]:
    """Missing height ranges in [start, end]; [] means complete.

    deep=True decompresses every chunk and reads per-line heights, so gaps
    inside a chunk are located exactly. deep=False trusts filenames and only
    falls back to per-line heights when a chunk's line count disagrees with
    its name. Duplicate heights (across chunk names or inside chunks) raise
    DuplicateHeight.
    """
    chunks = list_chunks(pattern)
    overlaps = _overlaps(chunks)
    if overlaps:
        pairs = "; ".join(f"{a} overlaps {b}" for a, b in overlaps)
        raise DuplicateHeight(pairs)

    present: set[int] = set()
    for chunk in chunks:
        lines = read_chunk_lines(chunk.path)
        if deep or len(lines) != chunk.expected_lines:
            heights = [height_fn(ln) for ln in lines]
            seen: set[int] = set()
            for h in heights:
                if h in seen:
                    raise DuplicateHeight(f"height {h} appears twice in {chunk.path}")
                seen.add(h)
            present.update(h for h in heights if pattern.start <= h <= pattern.end)
        else:
            lo = max(chunk.first_height, pattern.start)
            hi = min(chunk.last_height, pattern.end)
            present.update(range(lo, hi + 1))

    wanted = pattern.end - pattern.start + 1
    if len(present) == wanted:
        return []
    missing = (
        h for h in range(pattern.start, pattern.end + 1) if h not in present
    )
    return _to_ranges(missing)


def scan(
    pattern: ArchivePattern,
    height_fn: Callable[[bytes], int] | None = None,
    allow_gaps: bool = False,
) -> Iterator[tuple[int, bytes]]:
    """Yield (height, raw_line) for heights in [start, end].

    Ascending within a chunk; chunk visit order follows ascending chunk
    ranges. A name-coverage gap raises MissingChunk up front unless
    allow_gaps. When height_fn is given, per-line heights are verified
    against the filename contract; a short or disordered chunk is a hard
    error either way.
    """
    chunks = list_chunks(pattern)
    gaps = coverage_gaps(pattern, chunks)
    if gaps and not allow_gaps:
        raise MissingChunk(gaps)
    for chunk in chunks:
        lines = read_chunk_lines(chunk.path)
        if len(lines) != chunk.expected_lines:
            raise NonContiguous(
                f"{chunk.path}: {len(lines)} lines, name promises {chunk.expected_lines}"
            )
        for i, line in enumerate(lines):
            height = chunk.first_height + i
            if height_fn is not None:
                actual = height_fn(line)
                if actual != height:
                    raise NonContiguous(
                        f"{chunk.path}: line {i} holds height {actual}, expected {height}"
                    )
            if pattern.start <= height <= pattern.end:
                yield height, line
