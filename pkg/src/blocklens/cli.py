"""Command-line frontend.

Subcommands: fetch (archive block ranges), check (archive integrity),
process (run a pipeline config), export (canonical CSVs), detect
(anomaly detectors). Exit codes: 0 ok, 1 configuration, 2 network,
3 archive integrity, 4 internal.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from decimal import Decimal

from . import __version__, adapters
from .accounts import load_registry, resolve_entity
from .anomaly import (
    WashThresholds,
    detect_boomerang,
    detect_wash_trades,
    spam_account_report,
    tally_blocks,
    trades_from_actions,
)
from .anomaly.payment_value import (
    PAYMENT_NAME,
    PaymentValueClass,
    classify_payment_value,
    payment_value_summary,
    value_flow,
)
from .anomaly.rates import RateTable
from .anomaly.wash import TradeRecord
from .classify import default_rules
from .errors import (
    BlocklensError,
    ConfigError,
    DuplicateHeight,
    EndpointUnavailable,
    MissingChunk,
    MissingResult,
    NonContiguous,
)
from .export import (
    BREAKDOWN_COLUMNS,
    EXPORT_KINDS,
    export_anomalies,
    export_flows,
    write_csv,
)
from .fetch import (
    TRANSPORT_HTTP,
    TRANSPORT_WEBSOCKET,
    EndpointSpec,
    fetch_blocks,
    open_source,
)
from .model import ChainId
from .pipeline import (
    effective_workers,
    infer_chain,
    load_pipeline_config,
    result_to_dict,
    results_digest,
    run_pipeline,
)
from .processors import parse_duration, window_start
from .storage import (
    ArchivePattern,
    check_integrity,
    coverage_gaps,
    list_chunks,
    read_chunk_lines,
)
from .timeutil import iso_from_epoch, parse_iso_utc

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NETWORK = 2
EXIT_ARCHIVE = 3
EXIT_INTERNAL = 4


def _chain_arg(value: str) -> ChainId:
    try:
        return ChainId(value.upper())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown chain {value!r} (choose from EOSIO, TEZOS, XRPL)"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocklens",
        description="Fetch, archive and analyze EOSIO / Tezos / XRPL block history.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fetch = sub.add_parser("fetch", help="fetch a block range into a chunked archive")
    fetch.add_argument("--chain", type=_chain_arg, required=True)
    fetch.add_argument("--endpoint", required=True, help="node URL (env BLOCKLENS_<CHAIN>_URL overrides)")
    fetch.add_argument("--transport", choices=["http", "websocket"], default=None)
    fetch.add_argument("--start", type=int, required=True)
    fetch.add_argument("--end", type=int, required=True)
    fetch.add_argument("--out", required=True, help="archive directory")
    fetch.add_argument("--chunk-size", type=int, default=10_000)
    fetch.add_argument("--rate-limit", type=float, default=10.0, help="requests per second")
    fetch.add_argument("--max-retries", type=int, default=5)
    fetch.add_argument("--timeout", type=float, default=30.0)

    check = sub.add_parser("check", help="verify archive integrity for a range")
    check.add_argument("--pattern", required=True, help="chunk glob, e.g. data/eos_blocks-*.jsonl.gz")
    check.add_argument("--start", type=int, required=True)
    check.add_argument("--end", type=int, required=True)
    check.add_argument("--fast", action="store_true",
                       help="trust filenames and line counts, skip per-line heights")

    process = sub.add_parser("process", help="run a pipeline configuration")
    process.add_argument("config", help="pipeline JSON (Pattern/StartBlock/EndBlock/Processors)")
    process.add_argument("--out", default=None, help="result directory (default: alongside config)")
    process.add_argument("--workers", type=int, default=None)
    process.add_argument("--strict", action="store_true",
                         help="abort on the first malformed line instead of skipping")
    process.add_argument("--allow-gaps", action="store_true")

    export = sub.add_parser("export", help="emit canonical CSVs from a result directory")
    export.add_argument("--results", required=True)
    export.add_argument("--out", default=None, help="default: the results directory")
    export.add_argument("--kinds", default=None,
                        help=f"comma list of {', '.join(sorted(EXPORT_KINDS))} (default: all present)")
    export.add_argument("--alleged-tps", default="0")
    export.add_argument("--obs-start", default=None, help="ISO observation start (calendar mode)")
    export.add_argument("--obs-end", default=None, help="ISO observation end (calendar mode)")

    detect = sub.add_parser("detect", help="run an anomaly detector over an archive")
    detect_sub = detect.add_subparsers(dest="detector", required=True)

    def archive_args(p):
        p.add_argument("--pattern", required=True)
        p.add_argument("--start", type=int, required=True)
        p.add_argument("--end", type=int, required=True)
        p.add_argument("--chain", type=_chain_arg, default=None)
        p.add_argument("--out", required=True)
        p.add_argument("--allow-gaps", action="store_true")

    wash = detect_sub.add_parser("wash", help="wash-trade detector (DEX trade receipts)")
    wash.add_argument("--pattern")
    wash.add_argument("--start", type=int)
    wash.add_argument("--end", type=int)
    wash.add_argument("--chain", type=_chain_arg, default=None)
    wash.add_argument("--trades", help="trade CSV instead of an archive")
    wash.add_argument("--out", required=True)
    wash.add_argument("--allow-gaps", action="store_true")
    wash.add_argument("--self-trade-threshold", default="0.5")
    wash.add_argument("--drift-threshold", default="0.01")
    wash.add_argument("--top-k", type=int, default=5)

    boom = detect_sub.add_parser("boomerang", help="boomerang transfer detector")
    archive_args(boom)
    boom.add_argument("--window", type=int, default=0, help="blocks; 0 = same transaction only")
    boom.add_argument("--min-pairs", type=int, default=1)

    spam = detect_sub.add_parser("spam", help="spam account heuristics")
    archive_args(spam)
    spam.add_argument("--min-volume", type=int, default=100_000)
    spam.add_argument("--failure-threshold", default="0.99")
    spam.add_argument("--single-type-threshold", default="0.98")

    value = detect_sub.add_parser("payment-value", help="zero-value payment classification")
    archive_args(value)
    value.add_argument("--rates", required=True, help="rate table CSV or JSON")
    value.add_argument("--registry", default=None, help="account registry JSON for clustering")
    value.add_argument("--duration", default="6h", help="breakdown window size")

    return parser


# ---------------------------------------------------------------------------
# result serialization

def _result_rows(result: dict) -> tuple[list[str], list[dict]]:
    kind, data = result["kind"], result["data"]
    if kind == "scalar":
        return ["name", "value"], [{"name": result["name"], "value": data}]
    if kind == "keyed-histogram":
        ordered = sorted(data.items(), key=lambda kv: (-kv[1], kv[0]))
        return ["key", "count"], [{"key": k, "count": v} for k, v in ordered]
    if kind == "time-series":
        return ["window_start", "count"], [
            {"window_start": iso_from_epoch(r["window_start"]), "count": r["count"]}
            for r in data
        ]
    if kind == "time-series-of-keyed-histograms":
        rows = []
        for window in data:
            start = iso_from_epoch(window["window_start"])
            for key in sorted(window["counts"]):
                rows.append({"window_start": start, "key": key, "count": window["counts"][key]})
        return ["window_start", "key", "count"], rows
    if kind == "ranking":
        return ["account", "count", "unique_counterparties", "avg_per_counterparty"], data
    if kind == "distribution":
        return ["category", "name", "count", "percent"], data
    raise ConfigError(f"unknown result kind {kind!r}")


def write_results(out_dir: str, results, manifest: dict) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    outputs = {}
    for result in results:
        doc = result_to_dict(result)
        json_path = os.path.join(out_dir, f"{result.name}.json")
        with open(json_path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
        columns, rows = _result_rows(doc)
        csv_path = os.path.join(out_dir, f"{result.name}.csv")
        write_csv(csv_path, columns, rows)
        outputs[result.name] = {"json": json_path, "csv": csv_path}
    manifest["outputs"] = outputs
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return outputs


# ---------------------------------------------------------------------------
# subcommands

def cmd_fetch(args) -> int:
    url = os.environ.get(f"BLOCKLENS_{args.chain.value}_URL", args.endpoint)
    if args.transport is None:
        transport = TRANSPORT_WEBSOCKET if args.chain is ChainId.XRPL else TRANSPORT_HTTP
        if args.chain is ChainId.XRPL and not url.startswith(("ws://", "wss://")):
            transport = TRANSPORT_HTTP
    else:
        transport = TRANSPORT_HTTP if args.transport == "http" else TRANSPORT_WEBSOCKET
    endpoint = EndpointSpec(
        chain=args.chain, url=url, transport=transport,
        rate_limit=args.rate_limit, max_retries=args.max_retries, timeout=args.timeout,
    )
    source = open_source(endpoint)
    try:
        summary = fetch_blocks(
            source, endpoint, args.start, args.end, args.out, chunk_size=args.chunk_size
        )
    finally:
        source.close()
    print(
        f"fetched {summary.fetched}/{summary.requested} blocks "
        f"({len(summary.written)} chunk files written)"
    )
    if summary.failures:
        preview = ", ".join(str(h) for h in summary.failures[:10])
        print(f"unresolved heights ({len(summary.failures)}): {preview}", file=sys.stderr)
        return EXIT_NETWORK
    return EXIT_OK


def cmd_check(args) -> int:
    pattern = ArchivePattern(args.pattern, args.start, args.end)
    missing = check_integrity(pattern, deep=not args.fast)
    if not missing:
        print(f"archive complete for [{args.start}, {args.end}]")
        return EXIT_OK
    for lo, hi in missing:
        print(f"missing heights [{lo}, {hi}]", file=sys.stderr)
    return EXIT_ARCHIVE


def cmd_process(args) -> int:
    started = time.monotonic()
    spec = load_pipeline_config(args.config)
    chain = spec.chain or infer_chain(spec.pattern)
    rules = default_rules(chain)
    workers = effective_workers(args.workers)
    results, stats = run_pipeline(
        spec.processors, spec.pattern, rules=rules, chain=chain,
        workers=workers, allow_gaps=args.allow_gaps, strict=args.strict,
    )
    out_dir = args.out or os.path.join(
        os.path.dirname(os.path.abspath(args.config)), "results"
    )
    with open(args.config, "rb") as fh:
        config_hash = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "tool_version": __version__,
        "config_hash": config_hash,
        "chain": chain.value,
        "pattern": spec.pattern.glob,
        "range": {"start": spec.pattern.start, "end": spec.pattern.end},
        "workers": workers,
        "strict": args.strict,
        "allow_gaps": args.allow_gaps,
        "window_alignment": "utc-epoch",
        "duration_seconds": round(time.monotonic() - started, 3),
        "stats": {
            "blocks": stats.blocks,
            "actions": stats.actions,
            "transactions": stats.transactions,
            "skipped_lines": stats.skipped_lines,
            "skip_samples": stats.skip_samples,
            "min_height": stats.min_height,
            "max_height": stats.max_height,
            "min_timestamp": stats.min_timestamp,
            "max_timestamp": stats.max_timestamp,
        },
        "processors": [
            {"name": p.name, "type": p.type, "params": p.params} for p in spec.processors
        ],
        "results_digest": results_digest(results),
    }
    write_results(out_dir, results, manifest)
    print(f"{len(results)} results in {out_dir} (digest {manifest['results_digest'][:16]})")
    if stats.skipped_lines:
        print(f"skipped {stats.skipped_lines} malformed lines", file=sys.stderr)
    return EXIT_OK


def cmd_export(args) -> int:
    out_dir = args.out or args.results
    os.makedirs(out_dir, exist_ok=True)
    kinds = args.kinds.split(",") if args.kinds else None
    obs_start = parse_iso_utc(args.obs_start) if args.obs_start else None
    obs_end = parse_iso_utc(args.obs_end) if args.obs_end else None
    written = []
    requested = kinds or sorted(EXPORT_KINDS)
    for kind in requested:
        if kind not in EXPORT_KINDS:
            raise ConfigError(
                f"unknown export kind {kind!r} (known: {', '.join(sorted(EXPORT_KINDS))})"
            )
        try:
            if kind == "characterization":
                path = EXPORT_KINDS[kind](
                    args.results, out_dir, alleged_tps=args.alleged_tps,
                    observation_start=obs_start, observation_end=obs_end,
                )
            else:
                path = EXPORT_KINDS[kind](args.results, out_dir)
        except MissingResult:
            if kinds is not None:
                raise
            continue
        written.append(path)
    if kinds is None and not written:
        raise MissingResult(f"nothing exportable in {args.results}")
    for path in written:
        print(path)
    return EXIT_OK


def _scan_blocks(args, chain=None):
    pattern = ArchivePattern(args.pattern, args.start, args.end)
    chain = chain or args.chain or infer_chain(pattern)
    chunks = list_chunks(pattern)
    gaps = coverage_gaps(pattern, chunks)
    if gaps and not args.allow_gaps:
        raise MissingChunk(gaps)
    for chunk in chunks:
        for line in read_chunk_lines(chunk.path):
            block = adapters.parse_block(chain, line)
            if args.start <= block.height <= args.end:
                yield block


def _write_reports(reports, out_dir: str, extra: dict | None = None) -> None:
    os.makedirs(out_dir, exist_ok=True)
    docs = [r.as_dict() for r in reports]
    payload = {"reports": docs}
    if extra:
        payload.update(extra)
    with open(os.path.join(out_dir, "anomalies.json"), "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    export_anomalies(docs, out_dir)
    flagged = sum(1 for r in reports if r.flagged)
    print(f"{len(reports)} reports, {flagged} flagged -> {out_dir}")


def _trades_from_csv(path: str) -> list[TradeRecord]:
    trades = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            trades.append(
                TradeRecord(
                    buyer=row["buyer"],
                    seller=row["seller"],
                    base_amount=Decimal(row["base_amount"]),
                    quote_amount=Decimal(row["quote_amount"]),
                    base_currency=row["base_currency"],
                    quote_currency=row["quote_currency"],
                    fee_buyer=Decimal(row.get("fee_buyer") or 0),
                    fee_seller=Decimal(row.get("fee_seller") or 0),
                    tx_id=row.get("tx_id", ""),
                )
            )
    return trades


def cmd_detect(args) -> int:
    if args.detector == "wash":
        if args.trades:
            trades = _trades_from_csv(args.trades)
        elif args.pattern and args.start is not None and args.end is not None:
            actions = (a for block in _scan_blocks(args) for a in block.actions)
            trades = trades_from_actions(actions)
        else:
            raise ConfigError("wash detector needs --trades or --pattern/--start/--end")
        thresholds = WashThresholds(
            self_trade_ratio=Decimal(args.self_trade_threshold),
            balance_drift=Decimal(args.drift_threshold),
            top_k=args.top_k,
        )
        reports = detect_wash_trades(trades, thresholds)
        _write_reports(reports, args.out, {"trades": len(trades)})
        return EXIT_OK

    if args.detector == "boomerang":
        reports = detect_boomerang(
            _scan_blocks(args), window=args.window, min_pairs=args.min_pairs
        )
        _write_reports(reports, args.out)
        return EXIT_OK

    if args.detector == "spam":
        tallies = tally_blocks(_scan_blocks(args))
        reports = spam_account_report(
            tallies,
            min_volume=args.min_volume,
            failure_threshold=Decimal(args.failure_threshold),
            single_type_threshold=Decimal(args.single_type_threshold),
        )
        _write_reports(reports, args.out)
        return EXIT_OK

    if args.detector == "payment-value":
        return _detect_payment_value(args)
    raise ConfigError(f"unknown detector {args.detector!r}")


def _detect_payment_value(args) -> int:
    rates = RateTable.load(args.rates)
    registry = load_registry(args.registry) if args.registry else {}
    duration_s = parse_duration(args.duration)
    os.makedirs(args.out, exist_ok=True)

    class_counts: dict[PaymentValueClass, int] = {}
    breakdown: dict[tuple[int, str, str, str], int] = {}
    payment_pairs = []
    chain_name = None
    for block in _scan_blocks(args):
        chain_name = chain_name or block.chain.value
        window = window_start(block.timestamp, duration_s)
        for action in block.actions:
            status = "success" if action.success else "failed"
            value_class = ""
            if action.name == PAYMENT_NAME:
                cls = classify_payment_value(action, rates, block.timestamp)
                class_counts[cls] = class_counts.get(cls, 0) + 1
                value_class = cls.value
                payment_pairs.append((action, block.timestamp))
            key = (window, action.name, status, value_class)
            breakdown[key] = breakdown.get(key, 0) + 1

    entity = (lambda account: resolve_entity(account, registry)) if registry else None
    flows = value_flow(payment_pairs, rates, entity)
    export_flows(flows, args.out)

    summary = payment_value_summary(class_counts)
    with open(os.path.join(args.out, "payment_value_summary.json"), "w") as fh:
        json.dump({k: str(v) for k, v in summary.items()}, fh, sort_keys=True, indent=1)
        fh.write("\n")

    rows = [
        {
            "chain": chain_name or "",
            "window_start": iso_from_epoch(window),
            "tx_type": name,
            "status": status,
            "value_class": value_class,
            "count": count,
        }
        for (window, name, status, value_class), count in sorted(breakdown.items())
    ]
    write_csv(os.path.join(args.out, "xrpl_value_breakdown.csv"), BREAKDOWN_COLUMNS, rows)
    carrying = class_counts.get(PaymentValueClass.VALUE_CARRYING, 0)
    print(
        f"{sum(class_counts.values())} payments classified "
        f"({carrying} value-carrying), {len(flows)} flows -> {args.out}"
    )
    return EXIT_OK


COMMANDS = {
    "fetch": cmd_fetch,
    "check": cmd_check,
    "process": cmd_process,
    "export": cmd_export,
    "detect": cmd_detect,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EndpointUnavailable as exc:
        print(f"endpoint unavailable: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except (MissingChunk, DuplicateHeight, NonContiguous) as exc:
        print(f"archive error: {exc}", file=sys.stderr)
        return EXIT_ARCHIVE
    except MissingResult as exc:
        print(f"export error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlocklensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
