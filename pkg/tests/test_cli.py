from __future__ import annotations

import csv
import io
import json
import random
from pathlib import Path

import pytest

from kernelgf import oracle
from kernelgf.cli import GraphParseError, RunConfig, format_graph, main, parse_graph
from kernelgf.digraph import Digraph
from kernelgf.game import first_player_wins, losing_positions, optimal_move

DATA = Path(__file__).parent / "data"


def run(*argv, stdin=""):
    out = io.StringIO()
    code = main(list(argv), stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


# -- graph format ---------------------------------------------------------------


def test_parse_graph_with_comments():
    d = parse_graph("# a path\n3 2\n1 2  # first arc\n\n2 3\n")
    assert d == Digraph.path(3)


def test_format_roundtrip():
    d = Digraph(4, [(1, 2), (2, 1), (3, 4)])
    assert parse_graph(format_graph(d)) == d


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("3 2\n1 2\n2 x\n", 3, 3),
        ("3 1\n1 4\n", 2, 3),
        ("2 1\n1 1\n", 2, 1),
        ("3 2\n1 2\n", 2, 1),
        ("3\n", 1, 2),
        ("", 1, 1),
    ],
)
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(GraphParseError) as exc:
        parse_graph(text)
    assert (exc.value.line, exc.value.column) == (line, col)


def test_parse_error_exit_code(capsys):
    code, _ = run("kernel", "-e", "3 2;1 2;2 x")
    assert code == 1
    assert "line 3, column 3" in capsys.readouterr().err


# -- kernel ---------------------------------------------------------------------


def test_kernel_three_circuit():
    code, out = run("kernel", stdin="3 3\n1 2\n2 3\n3 1\n")
    assert code == 2
    assert out == "no kernel\n"


def test_kernel_four_circuit():
    code, out = run("kernel", "-e", "4 4;1 2;2 3;3 4;4 1")
    assert code == 0
    assert "kernel 1: {1, 3}" in out and "kernel 2: {2, 4}" in out
    assert "coloring: 1=red 2=green 3=red 4=green" in out


def test_kernel_from_file(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("3 2\n1 2\n2 3\n")
    code, out = run("kernel", str(f), "--format", "json")
    assert code == 0
    assert json.loads(out)["kernels"] == [[1, 3]]


def test_kernel_dot():
    code, out = run("kernel", "-e", "2 1;1 2", "--format", "dot")
    assert code == 0
    assert out.startswith("digraph kernel1 {")
    assert "2 [style=filled" in out and "1 -> 2;" in out


# -- series ---------------------------------------------------------------------


def series_counts(name, order):
    code, out = run("series", name, "--order", str(order), "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "count", "coefficient"]
    return [int(r[1]) for r in rows[1:]]


def test_series_tables():
    assert series_counts("T", 7) == [1, 4, 36, 512, 10000, 248832, 7529536]
    assert series_counts("L", 7) == [1, 3, 8, 42, 264, 2160, 20880]


def test_series_text_shows_coefficients():
    code, out = run("series", "T", "--order", "3")
    assert code == 0
    assert out.splitlines()[1:] == ["   1  1 1", "   2  4 2", "   3 36 6"]


def test_series_order_bound(capsys):
    assert run("series", "T", "--order", "401")[0] == 1
    assert run("series", "T", "--order", "0")[0] == 1
    assert run("series", "Q")[0] == 1


# -- verify ---------------------------------------------------------------------


def test_verify_trees_pass():
    code, out = run("verify", "--family", "trees", "--nmax", "6")
    assert code == 0
    assert out.rstrip().endswith("trees: PASS")


def test_verify_json_lines():
    code, out = run("verify", "--family", "unicyclic", "--nmax", "5", "--format", "json")
    assert code == 0
    reports = [oracle.CountReport.from_json(line) for line in out.splitlines()]
    assert {(r.n, r.family) for r in reports} == {(n, f) for n in range(2, 6) for f in ("unicircuit", "unicycle")}


def test_verify_injected_error():
    code, out = run("verify", "--family", "unicyclic", "--nmax", "4", "--inject", "U:3")
    assert code == 3
    assert "FAIL (unicyclic, U, n=3, expected=31, got=30)" in out


def test_verify_bounds():
    assert run("verify", "--family", "trees", "--nmax", "10")[0] == 1
    assert run("verify", "--family", "unicyclic", "--nmax", "7")[0] == 1


# -- asym -----------------------------------------------------------------------


def test_asym_text():
    code, out = run("asym", "--digits", "30", "--nmax", "10")
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("lambda = 0.351733711249195826")
    for value in ("0.4795", "0.2763", "0.9265", "0.0586"):
        assert value in out


def test_asym_csv_rows():
    code, out = run("asym", "--nmax", "25", "--kind", "unicycle", "--format", "csv")
    assert code == 0
    assert len(out.splitlines()) - 1 == 24


def test_asym_json():
    code, out = run("asym", "--format", "json", "--digits", "20")
    data = json.loads(out)
    assert data["lam"]["value"].startswith("0.351733")


# -- play -----------------------------------------------------------------------


def test_play_golden_transcript():
    script = (DATA / "play_script.txt").read_text()
    code, out = run("play", "--seed", "5", "--size", "6", "--hint", stdin=script)
    assert code == 0
    assert out == (DATA / "play_golden.txt").read_text()


def test_play_human_wins_on_path():
    code, out = run("play", "-e", "3 2;1 2;2 3", "--start", "2", stdin="3\n")
    assert code == 0
    assert out.rstrip().endswith("engine cannot move from 3; you win")


def test_play_eof_aborts():
    code, out = run("play", "-e", "3 2;1 2;2 3", stdin="")
    assert code == 0
    assert out.rstrip().endswith("game aborted")


def test_play_engine_first_on_green_root():
    code, out = run("play", "-e", "3 2;1 2;2 3", "--start", "2", "--engine-first")
    assert "engine moves 2 -> 3" in out
    assert out.rstrip().endswith("you cannot move from 3; engine wins")


def test_engine_first_green_root_always_wins():
    # the human side plays every possible line; the engine answers with optimal_move
    rng = random.Random(1)
    checked = 0
    while checked < 100:
        d, root = oracle.random_directed_tree(rng.randint(2, 9), rng)
        if not first_player_wins(d, root):
            continue
        checked += 1
        losing = losing_positions(d)

        def engine_wins(v):
            w = optimal_move(d, v, losing)
            if w is None:
                return False
            return all(engine_wins(x) for x in d.children(w))

        assert engine_wins(root)


def test_play_is_deterministic():
    a = run("play", "--seed", "9", "--size", "8", stdin="1\n2\n3\n")
    b = run("play", "--seed", "9", "--size", "8", stdin="1\n2\n3\n")
    assert a == b


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("series", order=500).validate()
    RunConfig("verify", family="unicyclic", n_max=7, full=True).validate()
