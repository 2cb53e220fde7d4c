import csv
import json
import os

import pytest

import rawblocks as rb
import synth
from blocklens.cli import main
from blocklens.model import ChainId


def run(argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def eosio_archive(directory, blocks):
    synth.write_archive(str(directory), ChainId.EOSIO, blocks, chunk_size=50)
    return os.path.join(str(directory), "eos_blocks-*.jsonl.gz")


def xrpl_archive(directory, blocks):
    synth.write_archive(str(directory), ChainId.XRPL, blocks, chunk_size=50)
    return os.path.join(str(directory), "xrp_blocks-*.jsonl.gz")


class TestWashCli:
    def test_from_trade_csv(self, tmp_path):
        trades = tmp_path / "trades.csv"
        with open(trades, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["buyer", "seller", "base_amount", "base_currency",
                 "quote_amount", "quote_currency", "fee_buyer", "fee_seller", "tx_id"]
            )
            for i in range(9):
                writer.writerow(["washy", "washy", "5", "IQ", "2", "EOS", "0", "0", f"t{i}"])
            # two opposite cross legs net out, keeping the drift tiny
            writer.writerow(["washy", "other", "5", "IQ", "2", "EOS", "0", "0", "t9"])
            writer.writerow(["other", "washy", "5", "IQ", "2", "EOS", "0", "0", "t10"])
        out = tmp_path / "out"
        assert run(["detect", "wash", "--trades", trades, "--out", out]) == 0
        reports = json.loads((out / "anomalies.json").read_text())["reports"]
        verdicts = {r["subject"]: r["verdict"] for r in reports}
        assert verdicts["washy"] == "flagged"
        rows = read_csv(out / "anomalies.csv")
        assert rows[0]["detector"] == "wash-trades"

    def test_from_archive(self, tmp_path):
        trade_data = {
            "buyer": "selftrader",
            "seller": "selftrader",
            "base": "10.0000 IQ",
            "quote": "1.0000 EOS",
            "fee_buyer": "0.0000 EOS",
            "fee_seller": "0.0000 EOS",
        }
        blocks = []
        for h in range(10):
            action = rb.eosio_action("whaleextrust", "verifytrade2", "relayer", trade_data)
            blocks.append(
                (h, rb.eosio_block(h, "2019-11-01T00:00:00.000", [(f"{h:064x}", [action])]))
            )
        pattern = eosio_archive(tmp_path / "archive", blocks)
        out = tmp_path / "out"
        assert run([
            "detect", "wash", "--pattern", pattern, "--start", 0, "--end", 9, "--out", out,
        ]) == 0
        payload = json.loads((out / "anomalies.json").read_text())
        assert payload["trades"] == 10
        assert payload["reports"][0]["subject"] == "selftrader"
        assert payload["reports"][0]["verdict"] == "flagged"


class TestBoomerangCli:
    def test_planted_roundtrip(self, tmp_path):
        def roundtrip_tx(txid, user):
            return (
                txid,
                [
                    rb.eosio_transfer(user, "eidosonecoin", "1.0000 EOS"),
                    rb.eosio_transfer("eidosonecoin", user, "1.0000 EOS"),
                    rb.eosio_action(
                        "eidosonecoin", "transfer", "eidosonecoin",
                        {"from": "eidosonecoin", "to": user, "quantity": "0.0001 EIDOS",
                         "memo": ""},
                    ),
                ],
            )

        blocks = [
            (0, rb.eosio_block(0, "2019-11-01T00:00:00.000", [roundtrip_tx("a" * 64, "farmer1")])),
            (1, rb.eosio_block(1, "2019-11-01T00:00:01.000",
                               [(f"b{'0' * 63}", [rb.eosio_transfer("alice", "bob", "5.0000 EOS")])])),
        ]
        pattern = eosio_archive(tmp_path / "archive", blocks)
        out = tmp_path / "out"
        assert run([
            "detect", "boomerang", "--pattern", pattern, "--start", 0, "--end", 1, "--out", out,
        ]) == 0
        reports = json.loads((out / "anomalies.json").read_text())["reports"]
        assert len(reports) == 1
        assert reports[0]["subject"] == "farmer1->eidosonecoin"
        assert reports[0]["metrics"]["matched_pairs"] == "1"


class TestSpamCli:
    def test_flood_of_failures(self, tmp_path):
        blocks = []
        for h in range(20):
            txs = [
                rb.xrpl_tx(f"{h:04d}{i:060d}", "Payment", synth.SPAMMER,
                           destination="rTarget",
                           amount=rb.iou("9", "BTC", "rWorthlessIssuerXXXXXXXXXXXXXXXXXX"),
                           result="tecPATH_DRY")
                for i in range(10)
            ]
            blocks.append((h, rb.xrpl_ledger(h, 1_569_888_000 + h, txs)))
        pattern = xrpl_archive(tmp_path / "archive", blocks)
        out = tmp_path / "out"
        assert run([
            "detect", "spam", "--pattern", pattern, "--start", 0, "--end", 19,
            "--out", out, "--min-volume", 100,
        ]) == 0
        reports = json.loads((out / "anomalies.json").read_text())["reports"]
        flagged = [r for r in reports if r["verdict"] == "flagged"]
        assert [r["subject"] for r in flagged] == [synth.SPAMMER]
        assert flagged[0]["metrics"]["transactions"] == "200"


class TestPaymentValueCli:
    @pytest.fixture()
    def archive_and_inputs(self, tmp_path):
        bitstamp = "rvYAfWj5gh67oV6fW32ZzP3Aw4Eubs59B"
        worthless = "rpJZ5WyotdphojwMLxCr2prhULvG3Voe3X"
        txs = [
            rb.xrpl_tx("A" * 64, "Payment", "rBinanceHot", destination="rChild",
                       amount=rb.iou("2", "BTC", bitstamp)),
            rb.xrpl_tx("B" * 64, "Payment", "rSpam1", destination="rSpam2",
                       amount=rb.iou("1000", "BTC", worthless)),
            rb.xrpl_tx("C" * 64, "Payment", "rX", destination="rY",
                       amount=rb.iou("5", "ZZZ", "rMysteryIssuer")),
            rb.xrpl_tx("D" * 64, "Payment", "rX", destination="rY", amount="3000000",
                       result="tecPATH_DRY"),
            rb.xrpl_tx("E" * 64, "Payment", "rBinanceHot", destination="rChild",
                       amount="7000000"),
            rb.xrpl_tx("F" * 64, "OfferCreate", "rTrader"),
        ]
        blocks = [(0, rb.xrpl_ledger(0, 1_577_836_800, txs))]  # 2020-01-01
        pattern = xrpl_archive(tmp_path / "archive", blocks)
        rates = tmp_path / "rates.csv"
        rates.write_text(
            "currency,issuer,window_start,rate\n"
            f"BTC,{bitstamp},2020-01-01,36050\n"
            f"BTC,{worthless},2020-01-01,0\n"
        )
        registry = tmp_path / "registry.json"
        registry.write_text(json.dumps([
            {"address": "rBinanceHot", "username": "Binance"},
            {"address": "rChild", "parent": "rBinanceHot"},
        ]))
        return pattern, rates, registry, tmp_path / "out"

    def test_summary_flows_and_breakdown(self, archive_and_inputs):
        pattern, rates, registry, out = archive_and_inputs
        assert run([
            "detect", "payment-value", "--pattern", pattern, "--start", 0, "--end", 0,
            "--rates", rates, "--registry", registry, "--out", out,
        ]) == 0
        summary = json.loads((out / "payment_value_summary.json").read_text())
        assert summary["total_payments"] == "5"
        assert summary["value_carrying"] == "2"
        assert summary["zero_value"] == "1"
        assert summary["unknown_value"] == "1"
        assert summary["failed"] == "1"
        # strict: 2 of 4 successful; lenient: 2 of 5
        assert summary["value_share_strict"] == "0.5"
        assert summary["value_share_lenient"] == "0.4"

        flows = {(r["sender_entity"], r["currency"], r["receiver_entity"]): r["xrp_value"]
                 for r in read_csv(out / "flows.csv")}
        assert flows[("Binance", "BTC", "Binance-descendant")] == "72100"
        assert flows[("Binance", "XRP", "Binance-descendant")] == "7"

        rows = read_csv(out / "xrpl_value_breakdown.csv")
        offers = [r for r in rows if r["tx_type"] == "OfferCreate"]
        assert offers[0]["value_class"] == ""
        failed = [r for r in rows if r["status"] == "failed"]
        assert failed[0]["value_class"] == "FAILED"
