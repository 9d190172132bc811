import csv
import json

import pytest

from monopath.cli import PATH_COLUMNS, build_config, main
from monopath.graph import complete_graph, save_graph
from monopath.height_table import build_height_table


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_paths_csv_and_replay(tmp_path):
    out1, out2 = tmp_path / "a" / "nested", tmp_path / "b"
    args = ["paths", "--n", "8,10", "--seeds", "3"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    text = (out1 / "paths.csv").read_text()
    assert text == (out2 / "paths.csv").read_text()
    rows = _read(out1 / "paths.csv")
    assert list(rows[0]) == PATH_COLUMNS and len(rows) == 2 * 3 * 3
    for row in rows:
        assert row["window_ok"] == "1"
        assert int(row["length"]) <= int(row["oracle_global"])
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["config"]["seeds"] == [0, 1, 2]
    assert _read(out1 / "timings.csv")


def test_paths_strict_mode(tmp_path):
    assert main(["paths", "--n", "16", "--seeds", "2", "--mode", "strict", "--oracle", "off",
                 "--out", str(tmp_path)]) == 0
    rows = _read(tmp_path / "paths.csv")
    assert {r["mode"] for r in rows if r["strategy"] != "greedy"} == {"strict"}
    assert all(r["oracle_global"] == "" for r in rows)


def test_verify_default_matrix(tmp_path, capsys):
    assert main(["verify", "--n", "8,12", "--seeds", "5", "--out", str(tmp_path)]) == 0
    assert "0 failing" in capsys.readouterr().out


def test_verify_catches_corrupted_dump(tmp_path):
    g = complete_graph(6, "uniform-random", seed=2)
    save_graph(g, tmp_path / "g.eog")
    lines = build_height_table(g).dump().splitlines()
    first, second = lines[0].split(), lines[1].split()
    first[-1], second[-1] = second[-1], first[-1]
    lines[0], lines[1] = " ".join(first), " ".join(second)
    (tmp_path / "bad.dump").write_text("\n".join(lines) + "\n")
    out = tmp_path / "out"
    code = main(["verify", "--graph", str(tmp_path / "g.eog"), "--table-dump", str(tmp_path / "bad.dump"),
                 "--out", str(out)])
    assert code == 1
    assert (out / "reproducers" / "g.eog").exists()
    good = tmp_path / "good.dump"
    good.write_text(build_height_table(g).dump())
    assert main(["verify", "--graph", str(tmp_path / "g.eog"), "--table-dump", str(good),
                 "--out", str(out)]) == 0


def test_verify_empty_matrix(tmp_path, capsys):
    assert main(["verify", "--n", "", "--out", str(tmp_path)]) == 0
    assert "empty instance matrix" in capsys.readouterr().out


def test_altitude_command(tmp_path, capsys):
    assert main(["altitude", "K3", "K4", "--out", str(tmp_path)]) == 0
    rows = _read(tmp_path / "altitude.csv")
    assert [(r["shape"], r["altitude"]) for r in rows] == [("K3", "2"), ("K4", "2")]
    assert main(["altitude", "K5", "--out", str(tmp_path)]) == 2
    assert "refusing K5" in capsys.readouterr().err


def test_gen_and_table(tmp_path, capsys):
    assert main(["gen", "complete", "--n", "5", "--seeds", "2", "--out", str(tmp_path)]) == 0
    assert main(["gen", "appendix", "--n", "256", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "appendix-n256-s0.layers").exists()
    graph = tmp_path / "complete-n5-s1.eog"
    assert graph.exists()
    capsys.readouterr()
    assert main(["table", str(graph)]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 10


def test_bad_input_exits_2(tmp_path):
    bad = tmp_path / "bad.eog"
    bad.write_text("p eog 2 1\ne 0 0 1\n")
    assert main(["table", str(bad)]) == 2
    assert main(["paths", "--strategy", "magic", "--out", str(tmp_path)]) == 2


def test_config_precedence(tmp_path, monkeypatch):
    ini = tmp_path / "run.ini"
    ini.write_text("[general]\nout = from-ini\nmode = strict\n[paths]\nn = 9\nseeds = 4\n")
    cfg = build_config("paths", {}, str(ini))
    assert (cfg.out, cfg.mode, cfg.n, cfg.seeds) == ("from-ini", "strict", [9], [0, 1, 2, 3])
    cfg = build_config("paths", {"n": "11", "mode": "best-effort"}, str(ini))
    assert (cfg.n, cfg.mode) == ([11], "best-effort")
    monkeypatch.setenv("MONOPATH_OUT", "from-env")
    assert build_config("paths", {}).out == "from-env"
    assert build_config("paths", {}, str(ini)).out == "from-ini"
    with pytest.raises(FileNotFoundError):
        build_config("paths", {}, str(tmp_path / "missing.ini"))
