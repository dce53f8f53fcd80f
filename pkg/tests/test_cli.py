from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET

import pytest

from zetachi import cli
from zetachi import zeros as zmod

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def cache(tmp_path, small_table):
    path = tmp_path / "small.ztbl"
    zmod.save_table(small_table, path)
    return f"cache:{path}"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_zeros_count(capsys):
    code, out, _ = run(capsys, "zeros", "count", "--T", 100)
    assert code == 0 and out.strip() == "29"


def test_zeros_find_writes_cache(capsys, tmp_path):
    code, out, _ = run(capsys, "zeros", "find", "--tmax", 50, "--output-dir", tmp_path)
    assert code == 0 and out.strip() == "10"
    table = zmod.load_table(tmp_path / "zeros.ztbl")
    assert len(table) == 10 and table.t_max == 50.0


def test_zeros_import_export_roundtrip(capsys, tmp_path, cache):
    code, out, _ = run(capsys, "zeros", "export", "--zeros", cache, "--out", tmp_path / "z.txt",
                       "--decimals", 12)
    assert code == 0 and out.strip() == "649"
    code, out, _ = run(capsys, "zeros", "import", "--file", tmp_path / "z.txt", "--out", tmp_path / "z.ztbl")
    assert code == 0 and out.strip() == "649"
    code, out, _ = run(capsys, "zeros", "export", "--zeros", f"import:{tmp_path / 'z.txt'}",
                       "--out", tmp_path / "again.txt")
    assert (tmp_path / "again.txt").read_bytes() == (tmp_path / "z.txt").read_bytes()


def test_import_error_reports_line(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("14.134725142\n21.022039639\nxyz\n")
    code, _, err = run(capsys, "zeros", "import", "--file", bad)
    assert code == 1 and "line 3" in err


def test_unknown_claim_exits_2(capsys):
    code, _, err = run(capsys, "compare", "--claim", "bogus", "--T", 100)
    assert code == 2 and "bogus" in err
    with pytest.raises(SystemExit) as exc:
        cli.main(["nonsense"])
    assert exc.value.code == 2


def test_sum_json(capsys, cache):
    code, out, _ = run(capsys, "sum", "--kind", "chi-x-rho", "--X", 1, "--hi", 100, "--zeros", cache)
    body = json.loads(out)
    assert code == 0 and body["zeros"] == 29 and body["kind"] == "chi-x-rho"
    code, out2, _ = run(capsys, "sum", "--kind", "chi-x-rho", "--X", 1, "--hi", 100, "--zeros", cache,
                        "--precise")
    precise = json.loads(out2)["value"]
    assert precise["re"] == pytest.approx(body["value"]["re"], abs=1e-9)


def test_cache_extends_but_import_does_not(capsys, cache, tmp_path, small_table):
    code, out, _ = run(capsys, "sum", "--kind", "x-rho", "--X", 2, "--hi", 1100, "--zeros", cache)
    assert code == 0 and json.loads(out)["zeros"] == zmod.count_zeros(1100)
    assert zmod.load_table(cache.partition(":")[2]).t_max == 1100
    txt = tmp_path / "short.txt"
    zmod.export_zero_table(small_table, txt)
    code, _, err = run(capsys, "sum", "--kind", "x-rho", "--X", 2, "--hi", 1100, "--zeros", f"import:{txt}")
    assert code == 1 and "covers up to" in err


def test_predict(capsys):
    code, out, _ = run(capsys, "predict", "--claim", "S", "--X", 2000, "--T", 1e4)
    body = json.loads(out)
    assert code == 0 and body["regime"] == "in-band"
    assert body["main"]["re"] == pytest.approx(2000 * math.log(2000))
    code, _, err = run(capsys, "predict", "--claim", "shanks")
    assert code == 1 and "--T" in err


def test_compare_single_and_grid(capsys, cache, tmp_path):
    code, out, _ = run(capsys, "compare", "--claim", "cor2.2", "--T", 1000, "--zeros", cache)
    body = json.loads(out)
    assert code == 0 and body["passed"] and body["cap"] == 100
    assert body["config"]["zero_source"] == cache
    code, out, _ = run(capsys, "compare", "--claim", "cor2.2", "--grid", "T=400:1000:200", "--zeros", cache,
                       "--output-dir", tmp_path, "--out", "fit.json")
    assert code == 0 and out == ""
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert [g["inputs"]["T"] for g in fit["grid"]] == [400, 600, 800, 1000]
    assert fit["passed"] is True


def test_compare_cap_controls_exit(capsys, cache):
    code, out, _ = run(capsys, "compare", "--claim", "cor2.2", "--T", 1000, "--zeros", cache, "--cap", 1e-9)
    assert code == 1 and json.loads(out)["passed"] is False


def test_compare_is_deterministic(capsys, cache):
    args = ("compare", "--claim", "thm1.6", "--T", 800, "--nu", 2, "--zeros", cache)
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_afe(capsys):
    code, out, _ = run(capsys, "afe", "--t", 1000, "--nu", 1)
    body = json.loads(out)
    assert code == 0 and body["cutoffs"] == [12, 12] and body["ratio"] <= 100


@pytest.mark.parametrize("spec,want", [
    ("T=1000:4000:1000", [{"T": 1000}, {"T": 2000}, {"T": 3000}, {"T": 4000}]),
    ("x=1e3,1e4", [{"x": 1000}, {"x": 10000}]),
])
def test_parse_grid(spec, want):
    assert cli.parse_grid(spec) == want


def test_parse_grid_rejects_garbage():
    for bad in ("T", "T=1:2", "T=a,b"):
        with pytest.raises(ValueError):
            cli.parse_grid(bad)


def test_config_precedence(tmp_path, monkeypatch):
    conf = tmp_path / "run.conf"
    conf.write_text("# settings\nprecision_digits = 40\ncap = 50\n")
    parser = cli.build_parser()
    monkeypatch.delenv(cli.PRECISION_ENV, raising=False)
    cfg = cli.resolve_config(parser.parse_args(["afe", "--t", "100", "--config", str(conf)]))
    assert cfg.precision_digits == 40 and cfg.cap == 50
    monkeypatch.setenv(cli.PRECISION_ENV, "45")
    cfg = cli.resolve_config(parser.parse_args(["afe", "--t", "100", "--config", str(conf)]))
    assert cfg.precision_digits == 45
    cfg = cli.resolve_config(parser.parse_args(["afe", "--t", "100", "--config", str(conf),
                                                "--precision-digits", "50"]))
    assert cfg.precision_digits == 50 and cfg.overrides["precision_digits"] == "50"


def test_config_rejects_bad_values(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("colour = blue\n")
    with pytest.raises(ValueError):
        cli.read_config_file(conf)
    with pytest.raises(ValueError):
        cli.RunConfig(precision_digits=5).validate()
    with pytest.raises(ValueError):
        cli.RunConfig(zero_source="import:/no/such/file").validate()


def test_figure1_outputs(capsys, cache, tmp_path, small_table):
    X, tmax = 20.0, 1000.0
    code, out, _ = run(capsys, "figure1", "--X", X, "--tmax", tmax, "--zeros", cache,
                       "--output-dir", tmp_path, "--prefix", "fig")
    summary = json.loads(out)
    assert code == 0 and summary["rows"] == len(small_table.window(0, tmax))
    assert summary["boundaries"] == [math.pi * X, 2 * math.pi * X]
    assert all(v > 0 for v in summary["classes"].values())

    with open(tmp_path / "fig.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == summary["rows"]
    for row in rows:
        T = float(row["T"])
        want = "above-band" if T < math.pi * X else "in-band" if T < 2 * math.pi * X else "below-band"
        assert row["class"] == want
        complex(float(row["re"]), float(row["im"]))

    root = ET.parse(tmp_path / "fig.svg").getroot()
    assert root.tag == SVG_NS + "svg" and root.get("version") == "1.1"
    assert len(root.findall(f".//{SVG_NS}path")) >= 3

    again = tmp_path / "again"
    run(capsys, "figure1", "--X", X, "--tmax", tmax, "--zeros", cache, "--output-dir", again, "--prefix", "fig")
    assert (again / "fig.csv").read_bytes() == (tmp_path / "fig.csv").read_bytes()
    assert (again / "fig.svg").read_bytes() == (tmp_path / "fig.svg").read_bytes()


def test_figure1_dyadic(capsys, cache, tmp_path):
    code, out, _ = run(capsys, "figure1", "--X", 20, "--tmax", 400, "--zeros", cache, "--mode", "dyadic",
                       "--output-dir", tmp_path)
    assert code == 0 and json.loads(out)["rows"] > 0
