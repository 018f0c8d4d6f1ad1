import io
import json
import pathlib

import pytest

from fsrpc.cli import main
from fsrpc.fsr import FsrSpec, canonical_specs

DATA = pathlib.Path(__file__).parent / "data"
MFSR8 = "family=mfsr width=8 conns=[(0,0),(1,5)]"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def errors(capsys):
    return [json.loads(line) for line in capsys.readouterr().err.splitlines()]


def test_find_one_mfsr():
    code, out = run("find", "mfsr", 8, 1)
    assert code == 0
    assert out.strip() == canonical_specs()["mfsr"].to_text()


def test_find_flags_match_positional():
    assert run("find", "--family", "galois", "--width", 6, "--count", 3) == run("find", "galois", 6, 3)


def test_find_unique_quadratic():
    code, out = run("find", "fibonacci", 2, 10)
    assert code == 0 and out.splitlines() == ["family=fibonacci width=2 taps=[0,1]"]


def test_find_width_one_is_usage_error(capsys):
    assert run("find", "galois", 1, 1)[0] == 2
    assert errors(capsys)[0]["error"] == "UsageError"


def test_find_is_deterministic():
    assert run("find", "ca", 12, 4) == run("find", "ca", 12, 4)


def test_seq_radix2():
    assert run("seq", "--family", "radix2", "--width", 4, "--seed", 0, "--steps", 3) == (0, "0\n1\n2\n")


def test_seq_mfsr_full_cycle():
    code, out = run("seq", MFSR8, "--steps", 256)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 256
    assert lines[255] == lines[0] == "01"
    assert len(set(lines[:255])) == 255


def test_seq_zero_warning(capsys):
    code, out = run("seq", MFSR8, "--seed", 0, "--steps", 4)
    assert code == 0 and out == "00\n" * 4
    assert "zero fixed point" in errors(capsys)[0]["warning"]


def test_seq_description_and_spec_file(tmp_path):
    code, out = run("seq", DATA / "tta16.desc", "--steps", 10)
    assert out.splitlines()[:2] == ["008", "009"]
    high = FsrSpec("mfsr", 7, conns=[(0, 0)]).build().next_value(1)
    assert out.splitlines()[8] == f"{high << 3:03x}"   # low segment wrapped, MFSR stepped once
    f = tmp_path / "m.spec"
    f.write_text(MFSR8 + "\n")
    assert run("seq", f, "--steps", 5) == run("seq", MFSR8, "--steps", 5)


def test_seq_bad_seed(capsys):
    assert run("seq", MFSR8, "--seed", 0x100)[0] == 2
    assert run("seq")[0] == 2


def test_asm_hex_and_binary(tmp_path):
    code, out = run("asm", DATA / "radix10.desc", DATA / "loop.asm")
    assert code == 0
    assert out.splitlines() == ["@0", "1001", "2002", "3003", "f002", "f000"]
    target = tmp_path / "img.bin"
    assert run("asm", DATA / "radix10.desc", DATA / "loop.asm", "--format", "binary", "--out", target)[0] == 0
    data = target.read_bytes()
    assert len(data) == 2048 and data[:4] == b"\x01\x10\x02\x20"


def test_asm_errors(tmp_path, capsys):
    bad = tmp_path / "bad.asm"
    bad.write_text("word 1\nbeq 3\n")
    assert run("asm", DATA / "radix10.desc", bad)[0] == 1
    err = errors(capsys)[0]
    assert err["error"] == "DescriptionError" and "PC-relative" in err["message"]
    assert run("asm", DATA / "radix10.desc", DATA / "loop.asm", "--out", tmp_path / "no" / "x.hex")[0] == 2
    assert run("asm", DATA / "nothing.desc", DATA / "loop.asm")[0] == 1


def test_cachesim_width():
    code, out = run("cachesim", "--width", 10)
    rows = [line.split(",") for line in out.splitlines()]
    assert code == 0 and rows[0] == ["pc_kind", "accesses", "misses", "miss_rate"]
    misses = {r[0]: int(r[2]) for r in rows[1:]}
    assert misses["radix2-10"] == misses["hybrid-3+7"] == 127
    assert misses["mfsr-10"] >= 5 * 127


def test_cachesim_description_and_trace(tmp_path):
    code, out = run("cachesim", DATA / "tta16.desc")
    assert out.splitlines()[1:] == ["tta16,1016,127,0.125000", "radix2-10,1016,127,0.125000"]
    t = tmp_path / "t.txt"
    t.write_text("0\n1\n8\n0\n")
    code, out = run("cachesim", "--trace", t, "--lines", 1)
    assert out.splitlines()[1] == "t.txt,4,3,0.750000"


def test_cachesim_usage(capsys):
    assert run("cachesim")[0] == 2
    assert run("cachesim", "--width", 10, "--line-size", 3)[0] == 1


def test_latency_table():
    code, out = run("latency", "30", "--crossover")
    assert code == 0
    assert out.splitlines()[1].startswith("30,4.82,1.8,2.677778,")
    code, out = run("latency", "7-8", "--format", "tsv")
    assert len(out.splitlines()) == 1 + 2 * 3
    assert out.splitlines()[1].split("\t")[:3] == ["7", "radix2", "3.348"]


def test_latency_coeffs(tmp_path, monkeypatch):
    c = tmp_path / "c.txt"
    c.write_text("intercept=1\nslope=1\n")
    assert run("latency", "8", "--coeffs", c)[1].splitlines()[1].startswith("8,radix2,9,")
    monkeypatch.setenv("FSRPC_COEFFS", str(c))
    assert run("latency", "8")[1].splitlines()[1].startswith("8,radix2,9,")


def test_latency_bad_width(capsys):
    assert run("latency", "1")[0] == 1
    assert "width" in errors(capsys)[0]["message"]


def test_emit_hdl(tmp_path):
    code, out = run("emit-hdl", DATA / "tta16.desc", "--out", tmp_path)
    assert code == 0
    assert [pathlib.Path(p).name for p in out.split()] == ["tta16_pc.v", "tta16_tb.v", "tta16_trace.hex"]
    assert len((tmp_path / "tta16_trace.hex").read_text().splitlines()) == 1017
    code, out = run("emit-hdl", "--family", "mfsr", "--width", 8, "--name", "m8", "--steps", 0,
                    "--out", tmp_path)
    assert (tmp_path / "m8_trace.hex").read_text() == "01\n"
    first = (tmp_path / "m8_pc.v").read_bytes()
    run("emit-hdl", "--family", "mfsr", "--width", 8, "--name", "m8", "--steps", 0, "--out", tmp_path)
    assert (tmp_path / "m8_pc.v").read_bytes() == first


def test_emit_hdl_missing_dir(tmp_path):
    assert run("emit-hdl", "--family", "mfsr", "--width", 8, "--out", tmp_path / "a" / "b")[0] == 2


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["find", "mfsr", "x"], ["seq", "--steps"]])
def test_usage_errors(argv, capsys):
    assert run(*argv)[0] == 2
    assert errors(capsys)[0]["error"] == "UsageError"
