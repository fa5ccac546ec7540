import json
import os
import subprocess
import sys

import pytest

from hvd import cli
from hvd.bench import CSV_HEADER
from hvd.generate import disjoint_disks
from hvd.serialize import snapshot_from_doc, write_family
from hvd.structure import check_snapshot

TWO = {"clusters": [{"id": 0, "points": [[0, 0]]}, {"id": 1, "points": [[4, 0]]}]}
CROSS = {"clusters": [{"id": 0, "points": [[-3, 0], [3, 0]]}, {"id": 1, "points": [[0, -3], [0, 3]]}]}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def build(tmp_path, doc, *extra):
    src = write(tmp_path, "in.json", doc)
    out = str(tmp_path / "out.json")
    assert cli.main(["--input", src, "--mode", "build", "--out", out, *extra]) == cli.EXIT_OK
    return json.loads(open(out).read())


def random_family_text(seed=3, k=12):
    return write_family(disjoint_disks(k, [1 + (i * 5 + seed) % 6 for i in range(k)], seed=seed))


def test_two_singletons_build(tmp_path):
    doc = build(tmp_path, TWO)
    (e,) = doc["edges"]
    assert e["kind"] == "HausdorffBoundary" and e["unbounded"]
    assert e["origin"] == pytest.approx([2, 0])


def test_parse_error_exit_code(tmp_path, capsys):
    src = write(tmp_path, "bad.json", '{"clusters": [')
    assert cli.main(["--input", src]) == cli.EXIT_PARSE
    src = write(tmp_path, "schema.json", {"clusters": [{"id": 0}]})
    assert cli.main(["--input", src]) == cli.EXIT_PARSE


def test_crossing_family_is_rejected(tmp_path, capsys):
    src = write(tmp_path, "cross.json", CROSS)
    assert cli.main(["--input", src]) == cli.EXIT_INVALID
    report = json.loads(capsys.readouterr().out)
    assert report["crossing_pairs"] == [[0, 1]] and report["m"] == 2


def test_check_mode_on_families(tmp_path, capsys):
    one = write(tmp_path, "one.json", {"clusters": [{"id": 7, "points": [[0, 0], [1, 0], [0, 1]]}]})
    assert cli.main(["--input", one, "--mode", "check", "--grid", "16"]) == cli.EXIT_OK
    fam = write(tmp_path, "fam.json", random_family_text())
    assert cli.main(["--input", fam, "--mode", "check", "--grid", "32"]) == cli.EXIT_OK
    assert "mismatches: 0 of" in capsys.readouterr().out


def test_check_mode_flags_a_corrupted_diagram(tmp_path, capsys):
    doc = build(tmp_path, random_family_text())
    good = write(tmp_path, "good.json", doc)
    assert cli.main(["--input", good, "--mode", "check"]) == cli.EXIT_OK
    f = next(f for f in doc["faces"] if sum(v is not None for v in f["vertices"]) >= 3)
    f["owner"] = [next(c["id"] for c in doc["clusters"] if c["id"] != f["owner"][0]), 0]
    bad = write(tmp_path, "bad.json", doc)
    assert cli.main(["--input", bad, "--mode", "check"]) == cli.EXIT_CHECK


def test_json_round_trip(tmp_path):
    doc = build(tmp_path, random_family_text(5, 20))
    assert check_snapshot(snapshot_from_doc(doc), deep=False) == []


def test_svg_draws_each_bounded_edge(tmp_path):
    svg = str(tmp_path / "d.svg")
    doc = build(tmp_path, random_family_text(), "--svg", svg)
    text = open(svg).read()
    bounded = sum(not e["unbounded"] for e in doc["edges"])
    assert text.count('class="edge bounded"') == bounded
    # rays that never enter the viewport are clipped away entirely
    assert 0 < text.count('class="edge unbounded"') <= len(doc["edges"]) - bounded


def test_query_mode(tmp_path, capsys):
    src = write(tmp_path, "two.json", TWO)
    assert cli.main(["--input", src, "--mode", "query", "--query", "1", "1", "--query", "2", "7"]) == cli.EXIT_OK
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["cluster"] for r in rows] == [0, 0]
    assert rows[0]["distance"] == pytest.approx(2 ** 0.5)


def test_bad_config_values(tmp_path):
    src = write(tmp_path, "two.json", TWO)
    for flags in (["--beta", "1.5"], ["--epsilon", "0"], ["--grid", "1"]):
        with pytest.raises(SystemExit):
            cli.main(["--input", src, *flags])


def test_bench_header(tmp_path):
    out = str(tmp_path / "b.csv")
    assert cli.main(["--mode", "bench", "--sizes", "64", "128", "--seeds", "1", "--out", out]) == cli.EXIT_OK
    lines = open(out).read().splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 3


def test_output_is_byte_identical_across_processes(tmp_path):
    src = write(tmp_path, "fam.json", random_family_text(9, 16))
    outs = []
    for hashseed in ("1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        r = subprocess.run([sys.executable, "-m", "hvd.cli", "--input", src, "--seed", "4"],
                           capture_output=True, env=env, check=True)
        outs.append(r.stdout)
    assert outs[0] == outs[1] and len(outs[0]) > 1000
