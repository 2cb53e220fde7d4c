"""Canonical CSV exports.

These files are the stable surface downstream tooling (the report
generator) consumes; column sets here are a contract. Result JSONs from a
process run plus the run manifest are the inputs.
"""

from __future__ import annotations

import csv
import json
import os
from decimal import Decimal
from typing import Any

from .errors import MissingResult
from .model import ChainId
from .throughput import build_stats, series_from_result
from .timeutil import iso_from_epoch

DISTRIBUTION_COLUMNS = ["chain", "category", "name", "count", "percent"]
CHARACTERIZATION_COLUMNS = [
    "chain", "start_height", "end_height", "block_count", "transaction_count",
    "alleged_tps", "max_tps", "avg_tps", "max_window_start",
    "observation_start", "observation_end", "window_mode",
]
SERIES_COLUMNS = ["chain", "window_start", "count"]
BY_CATEGORY_COLUMNS = ["chain", "window_start", "category", "count"]
TOP_ACCOUNTS_COLUMNS = [
    "chain", "direction", "account", "count", "unique_counterparties",
    "avg_per_counterparty",
]
ANOMALY_COLUMNS = ["detector", "subject", "verdict", "metrics", "evidence"]
FLOW_COLUMNS = ["sender_entity", "currency", "receiver_entity", "xrp_value"]
BREAKDOWN_COLUMNS = ["chain", "window_start", "tx_type", "status", "value_class", "count"]


def write_csv(path: str, columns: list[str], rows: list[dict[str, Any]]) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def _load_result(results_dir: str, name: str) -> dict:
    path = os.path.join(results_dir, f"{name}.json")
    if not os.path.exists(path):
        raise MissingResult(f"no result file {path}")
    with open(path, "rb") as fh:
        return json.load(fh)


def _manifest(results_dir: str) -> dict:
    path = os.path.join(results_dir, "manifest.json")
    if not os.path.exists(path):
        raise MissingResult(f"no run manifest at {path}")
    with open(path, "rb") as fh:
        return json.load(fh)


def _processors_of_type(manifest: dict, ptype: str, **params) -> list[dict]:
    out = []
    for entry in manifest["processors"]:
        if entry["type"] != ptype:
            continue
        if all(entry.get("params", {}).get(k) == v for k, v in params.items()):
            out.append(entry)
    return out


def export_distribution(results_dir: str, out_dir: str) -> str:
    manifest = _manifest(results_dir)
    chain = manifest["chain"]
    entries = _processors_of_type(manifest, "action-distribution")
    if not entries:
        raise MissingResult("run has no action-distribution processor")
    rows = []
    for entry in entries:
        result = _load_result(results_dir, entry["name"])
        for row in result["data"]:
            rows.append(dict(row, chain=chain))
    return write_csv(os.path.join(out_dir, "distribution.csv"), DISTRIBUTION_COLUMNS, rows)


def export_throughput_series(results_dir: str, out_dir: str) -> str:
    manifest = _manifest(results_dir)
    chain = manifest["chain"]
    entries = [
        e for e in _processors_of_type(manifest, "count-transactions")
        if e.get("params", {}).get("Duration")
    ]
    if not entries:
        raise MissingResult("run has no windowed count-transactions processor")
    result = _load_result(results_dir, entries[0]["name"])
    rows = [
        {"chain": chain, "window_start": iso_from_epoch(r["window_start"]), "count": r["count"]}
        for r in result["data"]
    ]
    return write_csv(os.path.join(out_dir, "throughput_series.csv"), SERIES_COLUMNS, rows)


def export_throughput_by_category(results_dir: str, out_dir: str) -> str:
    manifest = _manifest(results_dir)
    chain = manifest["chain"]
    entries = _processors_of_type(manifest, "group-actions-over-time", By="category")
    if not entries:
        raise MissingResult("run has no group-actions-over-time By=category processor")
    result = _load_result(results_dir, entries[0]["name"])
    rows = []
    for window in result["data"]:
        start = iso_from_epoch(window["window_start"])
        for category in sorted(window["counts"]):
            rows.append(
                {"chain": chain, "window_start": start, "category": category,
                 "count": window["counts"][category]}
            )
    return write_csv(
        os.path.join(out_dir, "throughput_by_category.csv"), BY_CATEGORY_COLUMNS, rows
    )


def export_top_accounts(results_dir: str, out_dir: str) -> str:
    manifest = _manifest(results_dir)
    chain = manifest["chain"]
    entries = _processors_of_type(manifest, "top-accounts")
    if not entries:
        raise MissingResult("run has no top-accounts processor")
    rows = []
    for entry in entries:
        result = _load_result(results_dir, entry["name"])
        direction = entry.get("params", {}).get("Direction", "sent")
        for row in result["data"]:
            rows.append(dict(row, chain=chain, direction=direction))
    return write_csv(os.path.join(out_dir, "top_accounts.csv"), TOP_ACCOUNTS_COLUMNS, rows)


def export_characterization(
    results_dir: str,
    out_dir: str,
    alleged_tps: str | Decimal = "0",
    observation_start: int | None = None,
    observation_end: int | None = None,
) -> str:
    manifest = _manifest(results_dir)
    chain = ChainId(manifest["chain"])
    scalar_entries = [
        e for e in _processors_of_type(manifest, "count-transactions")
        if not e.get("params", {}).get("Duration")
    ]
    series_entries = [
        e for e in _processors_of_type(manifest, "count-transactions")
        if e.get("params", {}).get("Duration")
    ]
    if not scalar_entries or not series_entries:
        raise MissingResult(
            "characterization needs count-transactions both plain and windowed"
        )
    total = _load_result(results_dir, scalar_entries[0]["name"])["data"]
    series = series_from_result(_load_result(results_dir, series_entries[0]["name"])["data"])
    stats = build_stats(
        chain,
        total,
        series,
        alleged_tps,
        observation_start=observation_start,
        observation_end=observation_end,
        first_block_ts=manifest["stats"].get("min_timestamp"),
        last_block_ts=manifest["stats"].get("max_timestamp"),
    )
    row = stats.as_row()
    rows = [{
        "chain": row["chain"],
        "start_height": manifest["range"]["start"],
        "end_height": manifest["range"]["end"],
        "block_count": manifest["stats"]["blocks"],
        "transaction_count": row["total_transactions"],
        "alleged_tps": row["alleged_tps"],
        "max_tps": row["max_tps"],
        "avg_tps": row["avg_tps"],
        "max_window_start": iso_from_epoch(row["max_window_start"]),
        "observation_start": iso_from_epoch(row["observation_start"]),
        "observation_end": iso_from_epoch(row["observation_end"]),
        "window_mode": row["window_mode"],
    }]
    return write_csv(os.path.join(out_dir, "characterization.csv"), CHARACTERIZATION_COLUMNS, rows)


def export_anomalies(reports: list[dict], out_dir: str) -> str:
    rows = [
        {
            "detector": r["detector"],
            "subject": r["subject"],
            "verdict": r["verdict"],
            "metrics": json.dumps(r["metrics"], sort_keys=True),
            "evidence": " ".join(r["evidence"]),
        }
        for r in reports
    ]
    return write_csv(os.path.join(out_dir, "anomalies.csv"), ANOMALY_COLUMNS, rows)


def export_flows(flows: dict, out_dir: str) -> str:
    rows = [
        {
            "sender_entity": sender,
            "currency": currency,
            "receiver_entity": receiver,
            "xrp_value": str(value),
        }
        for (sender, currency, receiver), value in sorted(flows.items())
    ]
    return write_csv(os.path.join(out_dir, "flows.csv"), FLOW_COLUMNS, rows)


EXPORT_KINDS = {
    "distribution": export_distribution,
    "characterization": export_characterization,
    "throughput-series": export_throughput_series,
    "throughput-by-category": export_throughput_by_category,
    "top-accounts": export_top_accounts,
}
