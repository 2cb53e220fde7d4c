import gzip
import json
import os

import pytest

from blocklens.errors import DuplicateHeight, MissingChunk, NonContiguous
from blocklens.model import ChainId
from blocklens.storage import (
    ArchivePattern,
    check_integrity,
    chunk_filename,
    coverage_gaps,
    list_chunks,
    parse_chunk_name,
    read_chunk_lines,
    scan,
    write_chunk,
)


def line_for(height: int) -> bytes:
    return json.dumps({"height": height, "body": f"payload-{height}"}).encode()


def write_range(directory, first, last, chain=ChainId.EOSIO):
    path = os.path.join(directory, chunk_filename(chain, first, last))
    return write_chunk([(h, line_for(h)) for h in range(first, last + 1)], path)


class TestWriteChunk:
    def test_hundred_contiguous_blocks(self, tmp_path):
        chunk = write_range(tmp_path, 0, 99)
        assert chunk.line_count == 100
        assert chunk.first_height == 0
        assert chunk.last_height == 99

    def test_gap_rejected(self, tmp_path):
        path = os.path.join(tmp_path, chunk_filename(ChainId.EOSIO, 5, 8))
        with pytest.raises(NonContiguous):
            write_chunk([(5, b"{}"), (6, b"{}"), (8, b"{}")], path)
        assert not os.path.exists(path)

    def test_round_trip_is_byte_identical(self, tmp_path):
        lines = [line_for(h) for h in range(10, 20)]
        path = os.path.join(tmp_path, chunk_filename(ChainId.EOSIO, 10, 19))
        write_chunk(list(zip(range(10, 20), lines)), path)
        assert read_chunk_lines(str(path)) == lines

    def test_writes_are_deterministic_bytes(self, tmp_path):
        rows = [(h, line_for(h)) for h in range(5)]
        p1 = os.path.join(tmp_path, chunk_filename(ChainId.EOSIO, 0, 4))
        write_chunk(rows, p1)
        p2 = os.path.join(tmp_path, "copy_" + chunk_filename(ChainId.EOSIO, 0, 4))
        write_chunk(rows, p2)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_payload_is_rfc1952_gzip_jsonl(self, tmp_path):
        chunk = write_range(tmp_path, 0, 2)
        raw = open(chunk.path, "rb").read()
        assert raw[:2] == b"\x1f\x8b"  # gzip magic
        text = gzip.decompress(raw)
        assert text.endswith(b"\n")
        assert [json.loads(ln)["height"] for ln in text.splitlines()] == [0, 1, 2]

    def test_filename_convention_parses_back(self, tmp_path):
        assert parse_chunk_name("eos_blocks-100-199.jsonl.gz") == (ChainId.EOSIO, 100, 199)
        assert parse_chunk_name("tezos_blocks-0-9.jsonl.gz") == (ChainId.TEZOS, 0, 9)
        assert parse_chunk_name("xrp_blocks-5-5.jsonl.gz") == (ChainId.XRPL, 5, 5)
        assert parse_chunk_name("notes.txt") is None


class TestScan:
    @pytest.fixture()
    def archive(self, tmp_path):
        for first in (0, 10, 20):
            write_range(tmp_path, first, first + 9)
        return tmp_path

    def test_full_cover(self, archive):
        pattern = ArchivePattern(os.path.join(archive, "eos_blocks-*.jsonl.gz"), 0, 29)
        rows = list(scan(pattern))
        assert len(rows) == 30
        assert [h for h, _ in rows] == list(range(30))

    def test_inner_range(self, archive):
        pattern = ArchivePattern(os.path.join(archive, "eos_blocks-*.jsonl.gz"), 15, 24)
        rows = list(scan(pattern))
        # oracle: brute-force filter of every archived line
        want = [
            (h, line_for(h)) for h in range(30) if 15 <= h <= 24
        ]
        assert rows == want

    def test_gap_raises_missing_chunk(self, archive):
        os.unlink(os.path.join(archive, chunk_filename(ChainId.EOSIO, 10, 19)))
        pattern = ArchivePattern(os.path.join(archive, "eos_blocks-*.jsonl.gz"), 0, 29)
        with pytest.raises(MissingChunk) as err:
            list(scan(pattern))
        assert err.value.missing == [(10, 19)]

    def test_allow_gaps_yields_the_rest(self, archive):
        os.unlink(os.path.join(archive, chunk_filename(ChainId.EOSIO, 10, 19)))
        pattern = ArchivePattern(os.path.join(archive, "eos_blocks-*.jsonl.gz"), 0, 29)
        rows = list(scan(pattern, allow_gaps=True))
        assert [h for h, _ in rows] == list(range(0, 10)) + list(range(20, 30))

    def test_height_fn_verifies_lines(self, archive):
        pattern = ArchivePattern(os.path.join(archive, "eos_blocks-*.jsonl.gz"), 0, 29)
        rows = list(scan(pattern, height_fn=lambda ln: json.loads(ln)["height"]))
        assert len(rows) == 30

    def test_short_chunk_is_hard_error(self, archive):
        # rewrite chunk 10-19 with a line missing, keeping the name
        path = os.path.join(archive, chunk_filename(ChainId.EOSIO, 10, 19))
        lines = read_chunk_lines(path)
        with gzip.open(path, "wb") as fh:
            fh.write(b"\n".join(lines[:5] + lines[6:]) + b"\n")
        pattern = ArchivePattern(os.path.join(archive, "eos_blocks-*.jsonl.gz"), 0, 29)
        with pytest.raises(NonContiguous):
            list(scan(pattern))


class TestCheckIntegrity:
    def test_complete_archive(self, tmp_path):
        for first in (0, 10, 20):
            write_range(tmp_path, first, first + 9)
        pattern = ArchivePattern(os.path.join(tmp_path, "eos_blocks-*.jsonl.gz"), 0, 29)
        assert check_integrity(pattern) == []

    def test_missing_heights_located_exactly(self, tmp_path):
        # chunk written as 0-9 but with heights 7..9 deleted from the payload
        path = os.path.join(tmp_path, chunk_filename(ChainId.EOSIO, 0, 9))
        write_chunk([(h, line_for(h)) for h in range(10)], path)
        lines = read_chunk_lines(path)
        with gzip.open(path, "wb") as fh:
            fh.write(b"\n".join(lines[:7]) + b"\n")
        pattern = ArchivePattern(os.path.join(tmp_path, "eos_blocks-*.jsonl.gz"), 0, 9)
        assert check_integrity(pattern) == [(7, 9)]

    def test_missing_chunk_reported_as_range(self, tmp_path):
        write_range(tmp_path, 0, 9)
        write_range(tmp_path, 20, 29)
        pattern = ArchivePattern(os.path.join(tmp_path, "eos_blocks-*.jsonl.gz"), 0, 29)
        assert check_integrity(pattern) == [(10, 19)]

    def test_duplicate_across_chunks(self, tmp_path):
        write_range(tmp_path, 0, 9)
        write_range(tmp_path, 5, 14)
        pattern = ArchivePattern(os.path.join(tmp_path, "eos_blocks-*.jsonl.gz"), 0, 14)
        with pytest.raises(DuplicateHeight):
            check_integrity(pattern)

    def test_duplicate_inside_chunk(self, tmp_path):
        path = os.path.join(tmp_path, chunk_filename(ChainId.EOSIO, 0, 4))
        write_chunk([(h, line_for(h)) for h in range(5)], path)
        lines = read_chunk_lines(path)
        with gzip.open(path, "wb") as fh:
            fh.write(b"\n".join([lines[0], lines[1], lines[1], lines[3], lines[4]]) + b"\n")
        pattern = ArchivePattern(os.path.join(tmp_path, "eos_blocks-*.jsonl.gz"), 0, 4)
        with pytest.raises(DuplicateHeight):
            check_integrity(pattern)

    def test_shallow_mode_trusts_complete_names(self, tmp_path):
        write_range(tmp_path, 0, 9)
        pattern = ArchivePattern(os.path.join(tmp_path, "eos_blocks-*.jsonl.gz"), 0, 9)
        assert check_integrity(pattern, deep=False) == []

    def test_scan_count_matches_integrity_accounting(self, tmp_path):
        write_range(tmp_path, 0, 9)
        write_range(tmp_path, 20, 29)
        pattern = ArchivePattern(os.path.join(tmp_path, "eos_blocks-*.jsonl.gz"), 0, 29)
        missing = check_integrity(pattern)
        missing_total = sum(b - a + 1 for a, b in missing)
        rows = list(scan(pattern, allow_gaps=True))
        assert len(rows) == (29 - 0 + 1) - missing_total


class TestCoverage:
    def test_gap_math(self, tmp_path):
        write_range(tmp_path, 10, 19)
        pattern = ArchivePattern(os.path.join(tmp_path, "eos_blocks-*.jsonl.gz"), 0, 39)
        chunks = list_chunks(pattern)
        assert coverage_gaps(pattern, chunks) == [(0, 9), (20, 39)]
