"""Tests for the Typer CLI: demo, scheme commands, bench tables and exit codes."""

from __future__ import annotations

import csv
import io

import pytest
from typer.testing import CliRunner

from phrbridge.cli import EXIT_CRYPTO, EXIT_DECODE, EXIT_SCENARIO, EXIT_STORE, EXIT_USAGE, app

runner = CliRunner()


def _invoke(store, *args):
    return runner.invoke(app, ["--store-dir", str(store), *args])


class TestDemo:
    def test_seeded_demo_is_deterministic(self, tmp_path):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"{run}.txt"
            result = _invoke(tmp_path / run, "--seed", "7", "demo", "--transcript-out", str(out))
            assert result.exit_code == 0, result.output
            outs.append(out.read_text())
        assert outs[0] == outs[1]
        lines = outs[0].splitlines()
        assert [line.split()[1] for line in lines] == ["M1", "M2", "RELAY_JOB", "M3"]
        assert lines[0].startswith("data_user->data_owner ")

    def test_seeded_demo_reruns_in_same_store(self, tmp_path):
        for _ in range(2):
            result = _invoke(tmp_path, "--seed", "7", "demo")
            assert result.exit_code == 0, result.output
        assert len((tmp_path / "access.list").read_text().splitlines()) == 1

    def test_zero_window_fails_at_verification(self, tmp_path):
        result = _invoke(tmp_path, "--seed", "7", "--window-s", "0", "demo")
        assert result.exit_code == EXIT_SCENARIO
        assert "verify_request" in result.output
        assert "Stale" in result.output

    def test_demo_with_phr_file(self, tmp_path):
        phr = tmp_path / "record.json"
        phr.write_bytes(b'{"patient": "P-7"}')
        result = _invoke(tmp_path / "store", "--seed", "1", "demo", "--phr", str(phr))
        assert result.exit_code == 0, result.output
        assert "M3" in result.output
        assert (tmp_path / "store" / "access.list").exists()

    def test_missing_phr_file(self, tmp_path):
        result = _invoke(tmp_path, "--seed", "1", "demo", "--phr", str(tmp_path / "absent"))
        assert result.exit_code == EXIT_STORE


@pytest.fixture(scope="module")
def keys(tmp_path_factory):
    """Owner alice, users bob and carol, issued through the CLI in one store dir."""
    store = tmp_path_factory.mktemp("store")
    for role, name in (("ibe", "alice"), ("clc", "bob"), ("clc", "carol")):
        result = _invoke(store, "keygen", "--role", role, "--id", f"{name}@example", "--out", str(store / name))
        assert result.exit_code == 0, result.output
    return store


class TestSchemeCommands:
    def test_keygen_writes_files(self, keys):
        for name in ("alice", "bob", "carol"):
            assert (keys / f"{name}.key").exists()
            assert (keys / f"{name}.pub").exists()
        assert (keys / "ibe.params").exists()
        assert (keys / "clc.master").exists()

    def test_full_roundtrip(self, keys, tmp_path):
        plain = tmp_path / "phr.txt"
        plain.write_bytes(b"blood_type: AB-\n")
        steps = [
            ("encrypt", str(keys / "alice.pub"), str(plain), str(tmp_path / "ct1")),
            ("rekey", str(keys / "alice.key"), str(keys / "bob.pub"), str(tmp_path / "rk")),
            ("reencrypt", str(tmp_path / "ct1"), str(tmp_path / "rk"), str(tmp_path / "ct2")),
            ("decrypt", str(keys / "bob.key"), str(tmp_path / "ct2"), str(tmp_path / "out2")),
            ("decrypt", str(keys / "alice.key"), str(tmp_path / "ct1"), str(tmp_path / "out1")),
        ]
        for step in steps:
            result = _invoke(keys, *step)
            assert result.exit_code == 0, result.output
        assert (tmp_path / "out1").read_bytes() == plain.read_bytes()
        assert (tmp_path / "out2").read_bytes() == plain.read_bytes()

        wrong = _invoke(keys, "decrypt", str(keys / "carol.key"), str(tmp_path / "ct2"), str(tmp_path / "bad"))
        assert wrong.exit_code == EXIT_CRYPTO
        assert not (tmp_path / "bad").exists()

        again = _invoke(keys, "reencrypt", str(tmp_path / "ct2"), str(tmp_path / "rk"), str(tmp_path / "ct3"))
        assert again.exit_code == EXIT_DECODE

    def test_malformed_ciphertext(self, keys, tmp_path):
        junk = tmp_path / "junk"
        junk.write_bytes(b"\x06\x03truncated")
        result = _invoke(keys, "decrypt", str(keys / "alice.key"), str(junk), str(tmp_path / "out"))
        assert result.exit_code == EXIT_DECODE

    def test_encrypt_needs_parameters(self, keys, tmp_path):
        plain = tmp_path / "phr.txt"
        plain.write_bytes(b"x")
        result = _invoke(tmp_path / "empty", "encrypt", str(keys / "alice.pub"), str(plain), str(tmp_path / "ct"))
        assert result.exit_code == EXIT_STORE

    def test_public_key_is_not_a_private_key(self, keys, tmp_path):
        result = _invoke(keys, "decrypt", str(keys / "alice.pub"), str(keys / "alice.pub"), str(tmp_path / "o"))
        assert result.exit_code == EXIT_DECODE


class TestBench:
    def test_sizes_markdown(self, tmp_path):
        result = _invoke(tmp_path, "bench", "sizes")
        assert result.exit_code == 0, result.output
        assert "| CT' | 2 | 2 | 0 | 512 |" in result.stdout
        assert "1792" in result.stdout

    def test_sizes_csv_actual(self, tmp_path):
        result = _invoke(tmp_path, "--format", "csv", "bench", "sizes", "--model", "actual")
        assert result.exit_code == 0, result.output
        data = [line for line in result.stdout.splitlines() if line and not line.startswith("#")]
        rows = list(csv.reader(io.StringIO("\n".join(data))))
        assert rows[1] == ["Key_DO", "2", "0", "0", "192"]

    def test_sizes_published(self, tmp_path):
        result = _invoke(tmp_path, "bench", "sizes", "--published")
        assert result.exit_code == 0, result.output
        assert "published, not measured" in result.stdout
        assert "### ABE-IBE" in result.stdout

    def test_bench_leaves_store_untouched(self, tmp_path):
        result = _invoke(tmp_path / "store", "bench", "sizes")
        assert result.exit_code == 0, result.output
        assert not (tmp_path / "store").exists()

    def test_sizes_rejects_bad_element_size(self, tmp_path):
        result = _invoke(tmp_path, "bench", "sizes", "--g1-bytes", "0")
        assert result.exit_code == EXIT_USAGE

    def test_ops_verify(self, tmp_path):
        result = _invoke(tmp_path, "--seed", "3", "--format", "csv", "bench", "ops", "--verify")
        assert result.exit_code == 0, result.output
        rows = list(csv.reader(io.StringIO(result.stdout)))
        assert rows[0][0] == "op_kind"
        assert all(row[-1] == "yes" for row in rows[1:])

    def test_timing(self, tmp_path):
        result = _invoke(tmp_path, "--seed", "3", "--format", "csv", "bench", "timing",
                         "--users", "1", "--trials", "1", "--payload-size", "8")
        assert result.exit_code == 0, result.output
        rows = list(csv.reader(io.StringIO(result.stdout)))
        assert rows[1][0] == "1"

    def test_timing_rejects_zero_users(self, tmp_path):
        result = _invoke(tmp_path, "bench", "timing", "--users", "0")
        assert result.exit_code == EXIT_USAGE


class TestConfiguration:
    def test_unknown_format(self, tmp_path):
        result = _invoke(tmp_path, "--format", "xlsx", "bench", "sizes")
        assert result.exit_code == EXIT_USAGE

    def test_bad_config_file(self, tmp_path):
        config = tmp_path / "phrbridge.toml"
        config.write_text('colour = "blue"\n')
        result = _invoke(tmp_path, "--config", str(config), "bench", "sizes")
        assert result.exit_code == EXIT_USAGE

    def test_config_file_sets_format(self, tmp_path):
        config = tmp_path / "phrbridge.toml"
        config.write_text('[phrbridge]\nformat = "csv"\n')
        result = _invoke(tmp_path, "--config", str(config), "bench", "sizes")
        assert result.exit_code == 0, result.output
        assert result.stdout.startswith("component,n_g1,n_g2,n_zq,bytes")

    def test_unsupported_curve(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PHRBRIDGE_CURVE", "bn254")
        result = _invoke(tmp_path, "bench", "sizes")
        assert result.exit_code == EXIT_USAGE
