"""Exception types shared across the package."""

from __future__ import annotations


class BlocklensError(Exception):
    """Base class for all errors raised by this package."""


class MalformedBlock(BlocklensError):
    """Raw line is not valid JSON or misses mandatory fields."""


class ChainMismatch(BlocklensError):
    """Document schema (or rule set) does not belong to the requested chain."""


class NonContiguous(BlocklensError):
    """Chunk write received heights that are not sorted and gap-free."""


class MissingChunk(BlocklensError):
    """Archive does not cover the requested height range."""

    def __init__(self, missing: list[tuple[int, int]]):
        self.missing = missing
        ranges = ", ".join(f"[{a}, {b}]" for a, b in missing)
        super().__init__(f"archive has gaps: {ranges}")


class DuplicateHeight(BlocklensError):
    """The same height appears in more than one chunk (or twice in one)."""


class EndpointUnavailable(BlocklensError):
    """All retries against an endpoint were exhausted."""


class ConfigError(BlocklensError):
    """Pipeline or CLI configuration is invalid."""


class EmptyWindow(BlocklensError):
    """A throughput computation got a zero- or negative-length window."""


class CyclicParentage(BlocklensError):
    """Account registry contains a parent cycle."""


class MissingResult(BlocklensError):
    """Export asked for a result kind that is absent from the run directory."""
