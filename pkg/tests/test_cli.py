import io
import json
import subprocess
import sys

import pytest

from covers import ramp_cover
from rdhsort import read_pgm, write_pgm
from rdhsort.bits import bits_to_bytes, random_bits
from rdhsort.cli import EXIT_CODES, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cover_path(tmp_path):
    path = tmp_path / "cover.pgm"
    write_pgm(path, ramp_cover(96))
    return path


class TestCli:
    def test_embed_extract(self, tmp_path, cover_path):
        marked = tmp_path / "m.pgm"
        code, out, _ = call("embed", "--cover", cover_path, "--out", marked, "--bits", 800, "--seed", 4)
        assert code == 0
        assert "ec_bits 800" in out and "psnr_db" in out and "levels 1" in out
        restored, payload = tmp_path / "r.pgm", tmp_path / "p.bin"
        code, out, _ = call("extract", "--marked", marked, "--out", restored, "--payload", payload)
        assert code == 0 and "payload_bits 800" in out
        assert read_pgm(restored) == read_pgm(cover_path)
        assert payload.read_bytes() == bits_to_bytes(random_bits(800, 4))

    def test_payload_file(self, tmp_path, cover_path):
        src = tmp_path / "msg.bin"
        src.write_bytes(b"hello, reversible world")
        marked = tmp_path / "m.pgm"
        assert call("embed", "--cover", cover_path, "--out", marked, "--payload", src)[0] == 0
        got = tmp_path / "got.bin"
        assert call("extract", "--marked", marked, "--out", tmp_path / "r.pgm", "--payload", got)[0] == 0
        assert got.read_bytes() == src.read_bytes()

    def test_bit_payload_file(self, tmp_path, cover_path):
        src = tmp_path / "bits.txt"
        src.write_text("1011001\n")
        marked = tmp_path / "m.pgm"
        assert call("embed", "--cover", cover_path, "--out", marked, "--payload", src,
                    "--payload-format", "bits")[0] == 0
        got = tmp_path / "got.txt"
        call("extract", "--marked", marked, "--out", tmp_path / "r.pgm", "--payload", got, "--payload-format", "bits")
        assert got.read_text() == "1011001"

    def test_verify(self, tmp_path, cover_path):
        code, out, _ = call("verify", "--cover", cover_path, "--bits", 1000, "--seed", 7)
        assert code == 0 and out.startswith("PASS") and "psnr_db=" in out
        assert sorted(p.name for p in tmp_path.iterdir()) == ["cover.pgm"]

    def test_capacity_error(self, tmp_path, cover_path):
        marked = tmp_path / "m.pgm"
        code, _, err = call("embed", "--cover", cover_path, "--out", marked, "--bits", 10 ** 6)
        assert code == EXIT_CODES["capacity_exceeded"]
        assert err.startswith("error: capacity_exceeded:") and err.count("\n") == 1
        assert not marked.exists()

    def test_bad_image(self, tmp_path):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"P6\n1 1\n255\n\0\0\0")
        code, _, err = call("capacity", "--cover", bad)
        assert code == EXIT_CODES["bad_image"] and "bad_image" in err

    def test_missing_file(self, tmp_path):
        code, _, err = call("capacity", "--cover", tmp_path / "nope.pgm")
        assert code == EXIT_CODES["io_error"]

    def test_bad_header(self, tmp_path, cover_path):
        code, _, err = call("extract", "--marked", cover_path, "--out", tmp_path / "r.pgm")
        assert code == EXIT_CODES["bad_header"] and "bad_header" in err

    @pytest.mark.parametrize("flags", [["--thresholds", "1,2,3"], ["--k", "0"], ["--f-threshold", "0.01,0.02"],
                                       ["--tau1", "300"], ["--thresholds", "3,2,4,5,6,7"]])
    def test_bad_config(self, cover_path, flags):
        code, _, err = call("capacity", "--cover", cover_path, *flags)
        assert code == EXIT_CODES["bad_config"] and "bad_config" in err

    def test_analyze(self, tmp_path, cover_path):
        csv = tmp_path / "profile.csv"
        code, out, _ = call("analyze", "--cover", cover_path, "--csv", csv)
        assert code == 0
        assert "number,sv,n_sv,n_usv,hi,poh" in out and "ULCF1," in out
        data = csv.read_bytes()
        assert b"\r" not in data
        lines = data.decode().splitlines()
        assert lines[0] == "intensity,n,m,f" and len(lines) == 257

    def test_analyze_band_scope(self, cover_path):
        code, out, _ = call("analyze", "--cover", cover_path, "--band", "VLCF1")
        assert code == 0 and "scope VLCF1" in out
        assert call("analyze", "--cover", cover_path, "--band", "XX")[0] == EXIT_CODES["bad_config"]

    def test_capacity(self, cover_path):
        code, out, _ = call("capacity", "--cover", cover_path)
        lines = out.strip().splitlines()
        assert code == 0 and lines[0].startswith("pass,color,band,sites")
        assert len(lines) == 1 + 16 + 1

    def test_show_config(self, cover_path):
        code, out, _ = call("--show-config")
        cfg = json.loads(out)
        assert cfg["thresholds"][:6] == [3.3, 4.5, 6.0, 9.0, 13.0, 18.0]
        code, out, _ = call("capacity", "--cover", cover_path, "--tau1", "13", "--show-config")
        assert json.loads(out)["tau1"] == 13

    def test_deterministic_outputs(self, tmp_path, cover_path):
        a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
        call("embed", "--cover", cover_path, "--out", a, "--bits", 500, "--seed", 1)
        call("embed", "--cover", cover_path, "--out", b, "--bits", 500, "--seed", 1)
        assert a.read_bytes() == b.read_bytes()

    def test_module_entry_point(self, cover_path):
        proc = subprocess.run([sys.executable, "-m", "rdhsort", "verify", "--cover", str(cover_path),
                               "--bits", "100"], capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout.startswith("PASS")
