import csv
import glob
import json
import os

import pytest

import rawblocks as rb
import synth
from blocklens.cli import main
from blocklens.model import ChainId
from mockserver import MockChainServer


def eosio_doc(height):
    return rb.eosio_block(
        height, "2019-11-01T00:00:00.000",
        [(f"{height:064x}", [rb.eosio_transfer("a", "b", "1.0000 EOS")])],
    )


def run(argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def processed(tmp_path_factory):
    """A processed archive: 120 EOSIO blocks through a five-processor run."""
    base = tmp_path_factory.mktemp("cli-run")
    archive = base / "archive"
    docs = synth.eosio_docs(2000, 120, seed=3)
    synth.write_archive(str(archive), ChainId.EOSIO, docs, chunk_size=40)
    config = {
        "Pattern": os.path.join(str(archive), "eos_blocks-*.jsonl.gz"),
        "StartBlock": 2000,
        "EndBlock": 2119,
        "Processors": [
            {"Name": "TransactionsCount", "Type": "count-transactions"},
            {"Name": "TransactionsOverTime", "Type": "count-transactions",
             "Params": {"Duration": "6h"}},
            {"Name": "GroupedActionsOverTime", "Type": "group-actions-over-time",
             "Params": {"By": "category", "Duration": "6h"}},
            {"Name": "ActionsByName", "Type": "group-actions", "Params": {"By": "name"}},
            {"Name": "TopReceivers", "Type": "top-accounts",
             "Params": {"Direction": "received", "N": 5}},
            {"Name": "Distribution", "Type": "action-distribution"},
        ],
    }
    config_path = base / "pipeline.json"
    config_path.write_text(json.dumps(config, indent=1))
    out = base / "results"
    code = run(["process", config_path, "--out", out, "--workers", 2])
    assert code == 0
    return base, config_path, out


class TestProcess:
    def test_result_files_exist(self, processed):
        _, _, out = processed
        for name in ("TransactionsCount", "GroupedActionsOverTime", "ActionsByName"):
            assert (out / f"{name}.json").exists()
            assert (out / f"{name}.csv").exists()
        assert (out / "manifest.json").exists()

    def test_manifest_contents(self, processed):
        _, config_path, out = processed
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["chain"] == "EOSIO"
        assert manifest["range"] == {"start": 2000, "end": 2119}
        assert manifest["stats"]["blocks"] == 120
        assert manifest["stats"]["skipped_lines"] == 0
        assert manifest["workers"] == 2
        assert len(manifest["results_digest"]) == 64
        import hashlib

        assert manifest["config_hash"] == hashlib.sha256(config_path.read_bytes()).hexdigest()

    def test_rerun_is_deterministic(self, processed, tmp_path):
        base, config_path, out = processed
        out2 = tmp_path / "results2"
        assert run(["process", config_path, "--out", out2, "--workers", 4]) == 0
        d1 = json.loads((out / "manifest.json").read_text())["results_digest"]
        d2 = json.loads((out2 / "manifest.json").read_text())["results_digest"]
        assert d1 == d2
        for name in ("TransactionsCount", "ActionsByName", "Distribution"):
            assert (out / f"{name}.json").read_bytes() == (out2 / f"{name}.json").read_bytes()
            assert (out / f"{name}.csv").read_bytes() == (out2 / f"{name}.csv").read_bytes()

    def test_unknown_processor_type_exits_1(self, tmp_path, capsys):
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({
            "Pattern": "x-*.jsonl.gz", "StartBlock": 1, "EndBlock": 2,
            "Processors": [{"Name": "X", "Type": "mystery-stat"}],
        }))
        assert run(["process", config]) == 1
        assert "mystery-stat" in capsys.readouterr().err

    def test_missing_chunk_exits_3(self, processed, tmp_path, capsys):
        base, config_path, _ = processed
        config = json.loads(config_path.read_text())
        config["EndBlock"] = 9999
        bad = tmp_path / "gap.json"
        bad.write_text(json.dumps(config))
        assert run(["process", bad, "--out", tmp_path / "r"]) == 3
        assert "gap" in capsys.readouterr().err.lower()

    def test_allow_gaps_overrides(self, processed, tmp_path):
        base, config_path, _ = processed
        config = json.loads(config_path.read_text())
        config["EndBlock"] = 2999
        cfg = tmp_path / "gap.json"
        cfg.write_text(json.dumps(config))
        assert run(["process", cfg, "--out", tmp_path / "r", "--allow-gaps"]) == 0


class TestCheck:
    def test_complete_and_gappy(self, tmp_path, capsys):
        archive = tmp_path / "archive"
        docs = synth.eosio_docs(0, 20, seed=1)
        synth.write_archive(str(archive), ChainId.EOSIO, docs, chunk_size=10)
        pattern = os.path.join(str(archive), "eos_blocks-*.jsonl.gz")
        assert run(["check", "--pattern", pattern, "--start", 0, "--end", 19]) == 0
        os.unlink(os.path.join(str(archive), "eos_blocks-0-9.jsonl.gz"))
        assert run(["check", "--pattern", pattern, "--start", 0, "--end", 19]) == 3
        assert "[0, 9]" in capsys.readouterr().err


class TestFetchCommand:
    def test_fetch_hundred_blocks_ten_chunks(self, tmp_path):
        with MockChainServer(eosio_doc) as server:
            code = run([
                "fetch", "--chain", "EOSIO", "--endpoint", server.url,
                "--start", 1, "--end", 100, "--out", tmp_path / "a",
                "--chunk-size", 10, "--rate-limit", 100000,
            ])
        assert code == 0
        assert len(glob.glob(str(tmp_path / "a" / "*.jsonl.gz"))) == 10

    def test_unreachable_endpoint_exit_2(self, tmp_path, capsys):
        code = run([
            "fetch", "--chain", "EOSIO", "--endpoint", "http://127.0.0.1:9",
            "--start", 1, "--end", 3, "--out", tmp_path / "a",
            "--max-retries", 0, "--rate-limit", 100000,
        ])
        assert code == 2
        assert "127.0.0.1:9" in capsys.readouterr().err

    def test_rerun_on_complete_archive_fetches_zero(self, tmp_path, capsys):
        with MockChainServer(eosio_doc) as server:
            args = [
                "fetch", "--chain", "EOSIO", "--endpoint", server.url,
                "--start", 5, "--end", 14, "--out", tmp_path / "a",
                "--chunk-size", 5, "--rate-limit", 100000,
            ]
            assert run(args) == 0
            capsys.readouterr()
            assert run(args) == 0
            assert "fetched 0/0" in capsys.readouterr().out

    def test_env_var_overrides_endpoint_url(self, tmp_path, monkeypatch):
        with MockChainServer(eosio_doc) as server:
            monkeypatch.setenv("BLOCKLENS_EOSIO_URL", server.url)
            code = run([
                "fetch", "--chain", "EOSIO", "--endpoint", "http://127.0.0.1:9",
                "--start", 1, "--end", 2, "--out", tmp_path / "a",
                "--rate-limit", 100000,
            ])
        assert code == 0


class TestExport:
    def test_distribution_schema(self, processed, tmp_path):
        _, _, results = processed
        out = tmp_path / "export"
        assert run(["export", "--results", results, "--out", out,
                    "--kinds", "distribution"]) == 0
        rows = read_csv(out / "distribution.csv")
        assert list(rows[0]) == ["chain", "category", "name", "count", "percent"]
        assert all(r["chain"] == "EOSIO" for r in rows)

    def test_distribution_percentages_sum_to_hundred(self, processed, tmp_path):
        _, _, results = processed
        out = tmp_path / "export"
        run(["export", "--results", results, "--out", out, "--kinds", "distribution"])
        rows = read_csv(out / "distribution.csv")
        recomputed = sum(float(r["percent"]) for r in rows)
        assert abs(recomputed - 100.0) <= 0.1
        # percent column matches recomputation from the count column
        total = sum(int(r["count"]) for r in rows)
        import bruteforce

        for r in rows:
            assert r["percent"] == bruteforce.percent_halfup(int(r["count"]), total)

    def test_characterization_row(self, processed, tmp_path):
        _, _, results = processed
        out = tmp_path / "export"
        assert run([
            "export", "--results", results, "--out", out,
            "--kinds", "characterization", "--alleged-tps", "4000",
            "--obs-start", "2019-11-01T00:00:00Z", "--obs-end", "2019-11-02T00:00:00Z",
        ]) == 0
        (row,) = read_csv(out / "characterization.csv")
        assert row["chain"] == "EOSIO"
        assert row["alleged_tps"] == "4000"
        assert row["block_count"] == "120"
        assert row["window_mode"] == "calendar"
        manifest = json.loads((results / "manifest.json").read_text())
        assert int(row["transaction_count"]) == manifest["stats"]["transactions"]

    def test_all_kinds_emitted(self, processed, tmp_path):
        _, _, results = processed
        out = tmp_path / "export"
        assert run(["export", "--results", results, "--out", out]) == 0
        names = {os.path.basename(p) for p in glob.glob(str(out / "*.csv"))}
        assert {
            "distribution.csv", "characterization.csv", "throughput_series.csv",
            "throughput_by_category.csv", "top_accounts.csv",
        } <= names

    def test_missing_kind_errors_when_requested(self, tmp_path, capsys):
        results = tmp_path / "empty"
        results.mkdir()
        (results / "manifest.json").write_text(json.dumps({
            "chain": "EOSIO", "processors": [], "range": {"start": 0, "end": 0},
            "stats": {"blocks": 0},
        }))
        assert run(["export", "--results", results, "--kinds", "distribution"]) == 1
        assert "distribution" in capsys.readouterr().err


class TestFlows:
    def test_flow_schema(self, tmp_path):
        from blocklens.export import export_flows
        from decimal import Decimal

        export_flows(
            {("Binance", "XRP", "Huobi-descendant"): Decimal("30")}, str(tmp_path)
        )
        (row,) = read_csv(tmp_path / "flows.csv")
        assert row == {
            "sender_entity": "Binance", "currency": "XRP",
            "receiver_entity": "Huobi-descendant", "xrp_value": "30",
        }
