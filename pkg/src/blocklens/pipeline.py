"""Single-pass parallel pipeline over a block archive.

Chunks are mapped to per-chunk partial states (one private accumulator per
processor per worker) and reduced by merging in fixed chunk-index order, so
results do not depend on worker count or visit order. Configuration is one
JSON file: Pattern, StartBlock, EndBlock, Processors[{Name, Type, Params}],
optional Chain (inferred from chunk filenames when absent).
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from . import adapters
from .classify import ClassificationRules, default_rules
from .errors import ConfigError, MalformedBlock, MissingChunk, NonContiguous
from .model import ChainId
from .processors import ProcessorConfig, ProcessorResult, build_processor
from .storage import ArchiveChunk, ArchivePattern, coverage_gaps, list_chunks, read_chunk_lines


@dataclass(frozen=True)
class PipelineSpec:
    pattern: ArchivePattern
    processors: tuple[ProcessorConfig, ...]
    chain: ChainId | None = None


@dataclass
class RunStats:
    blocks: int = 0
    actions: int = 0
    transactions: int = 0
    skipped_lines: int = 0
    skip_samples: list[str] = field(default_factory=list)
    min_height: int | None = None
    max_height: int | None = None
    min_timestamp: int | None = None
    max_timestamp: int | None = None

    def absorb(self, other: "RunStats") -> None:
        self.blocks += other.blocks
        self.actions += other.actions
        self.transactions += other.transactions
        self.skipped_lines += other.skipped_lines
        self.skip_samples = (self.skip_samples + other.skip_samples)[:10]
        for attr, pick in (
            ("min_height", min),
            ("max_height", max),
            ("min_timestamp", min),
            ("max_timestamp", max),
        ):
            mine, theirs = getattr(self, attr), getattr(other, attr)
            if theirs is not None:
                setattr(self, attr, theirs if mine is None else pick(mine, theirs))


def load_pipeline_config(path: str) -> PipelineSpec:
    """Parse and validate a pipeline configuration file."""
    try:
        with open(path, "rb") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return pipeline_spec_from_dict(doc)


def pipeline_spec_from_dict(doc: dict[str, Any]) -> PipelineSpec:
    for key in ("Pattern", "StartBlock", "EndBlock", "Processors"):
        if key not in doc:
            raise ConfigError(f"config field {key!r} is required")
    if not isinstance(doc["Processors"], list) or not doc["Processors"]:
        raise ConfigError("config field 'Processors' must be a non-empty list")
    try:
        pattern = ArchivePattern(doc["Pattern"], int(doc["StartBlock"]), int(doc["EndBlock"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad block range: {exc}") from exc
    processors = []
    for i, entry in enumerate(doc["Processors"]):
        name = entry.get("Name")
        ptype = entry.get("Type")
        if not name or not ptype:
            raise ConfigError(f"Processors[{i}]: 'Name' and 'Type' are required")
        processors.append(ProcessorConfig(name=name, type=ptype, params=entry.get("Params", {})))
    names = [p.name for p in processors]
    if len(set(names)) != len(names):
        raise ConfigError("processor names must be unique")
    chain = ChainId(doc["Chain"]) if "Chain" in doc else None
    return PipelineSpec(pattern=pattern, processors=tuple(processors), chain=chain)


def infer_chain(pattern: ArchivePattern) -> ChainId:
    """Chain from chunk filename prefixes, else from document schema."""
    chunks = list_chunks(pattern)
    if not chunks:
        raise MissingChunk([(pattern.start, pattern.end)])
    named = {c.chain for c in chunks if c.chain is not None}
    if len(named) == 1:
        return named.pop()
    if len(named) > 1:
        raise ConfigError(f"pattern {pattern.glob!r} mixes chains: {sorted(c.value for c in named)}")
    lines = read_chunk_lines(chunks[0].path)
    if not lines:
        raise ConfigError(f"cannot infer chain from empty chunk {chunks[0].path}")
    return adapters.sniff_chain(lines[0])


def _process_chunk(
    chunk: ArchiveChunk,
    chain: ChainId,
    configs: tuple[ProcessorConfig, ...],
    rules: ClassificationRules,
    start: int,
    end: int,
    strict: bool,
) -> tuple[list[Any], RunStats]:
    procs = [build_processor(c, rules) for c in configs]
    states = [p.new_state() for p in procs]
    stats = RunStats()
    lines = read_chunk_lines(chunk.path)
    if len(lines) != chunk.expected_lines:
        raise NonContiguous(
            f"{chunk.path}: {len(lines)} lines, name promises {chunk.expected_lines}"
        )
    for i, line in enumerate(lines):
        expected_height = chunk.first_height + i
        if not start <= expected_height <= end:
            continue
        try:
            block = adapters.parse_block(chain, line)
        except MalformedBlock as exc:
            if strict:
                raise
            stats.skipped_lines += 1
            if len(stats.skip_samples) < 10:
                stats.skip_samples.append(f"{chunk.path}:{i}: {exc}")
            continue
        if block.height != expected_height:
            raise NonContiguous(
                f"{chunk.path}: line {i} holds height {block.height}, expected {expected_height}"
            )
        stats.blocks += 1
        stats.actions += len(block.actions)
        stats.transactions += block.tx_count
        if stats.min_height is None:
            stats.min_height = block.height
            stats.min_timestamp = block.timestamp
        stats.max_height = block.height
        stats.max_timestamp = (
            block.timestamp
            if stats.max_timestamp is None
            else max(stats.max_timestamp, block.timestamp)
        )
        for j, p in enumerate(procs):
            states[j] = p.update(states[j], block)
    return states, stats


def _chunk_task(args):
    index, chunk, chain, configs, rules, start, end, strict = args
    states, stats = _process_chunk(chunk, chain, configs, rules, start, end, strict)
    return index, states, stats


def run_pipeline(
    configs: list[ProcessorConfig] | tuple[ProcessorConfig, ...],
    pattern: ArchivePattern,
    rules: ClassificationRules | None = None,
    chain: ChainId | None = None,
    workers: int = 1,
    allow_gaps: bool = False,
    strict: bool = False,
) -> tuple[list[ProcessorResult], RunStats]:
    """Run every processor over the archive in one scan.

    strict=True aborts on the first malformed line; otherwise malformed
    lines are skipped and counted. Gaps in name coverage raise MissingChunk
    unless allow_gaps.
    """
    configs = tuple(configs)
    if not configs:
        raise ConfigError("no processors configured")
    if chain is None:
        chain = infer_chain(pattern)
    if rules is None:
        rules = default_rules(chain)
    chunks = list_chunks(pattern)
    gaps = coverage_gaps(pattern, chunks)
    if gaps and not allow_gaps:
        raise MissingChunk(gaps)

    tasks = [
        (i, chunk, chain, configs, rules, pattern.start, pattern.end, strict)
        for i, chunk in enumerate(chunks)
    ]
    partials: list[tuple[list[Any], RunStats]] = [None] * len(tasks)  # type: ignore[list-item]
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            index, states, stats = _chunk_task(task)
            partials[index] = (states, stats)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, states, stats in pool.map(_chunk_task, tasks):
                partials[index] = (states, stats)

    procs = [build_processor(c, rules) for c in configs]
    merged = [p.new_state() for p in procs]
    total_stats = RunStats()
    for states, stats in partials:
        total_stats.absorb(stats)
        for j, p in enumerate(procs):
            merged[j] = p.merge(merged[j], states[j])
    results = [p.finalize(s) for p, s in zip(procs, merged)]
    return results, total_stats


def result_to_dict(result: ProcessorResult) -> dict[str, Any]:
    return {"name": result.name, "kind": result.kind, "data": result.data}


def results_digest(results: list[ProcessorResult]) -> str:
    """Canonical sha256 over all results; equal runs hash equal."""
    payload = json.dumps(
        [result_to_dict(r) for r in results], sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def effective_workers(requested: int | None) -> int:
    if requested and requested > 0:
        return requested
    return os.cpu_count() or 1
