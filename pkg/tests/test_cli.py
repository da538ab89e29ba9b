import pytest

from sparerepair.cli import build_parser, main
from sparerepair.evaluation import exact_curve_offline, read_curve_csv
from sparerepair.network import parse_network, reference_network, serialize_network


@pytest.fixture
def net_file(tmp_path):
    path = tmp_path / "net.txt"
    assert main(["gen", "--units", "15", "--spares", "10", "--edges", "40", "--seed", "7",
                 "-o", str(path)]) == 0
    return path


def test_gen_writes_valid_network(net_file):
    net = parse_network(net_file.read_text())
    assert (net.n_units, net.n_spares, net.n_edges) == (15, 10, 40)


def test_gen_ring(tmp_path):
    path = tmp_path / "ring.txt"
    assert main(["gen", "--units", "4", "--spares", "2", "--edges", "4", "--ring", "-o", str(path)]) == 0
    assert parse_network(path.read_text()).edges == {(0, 0), (1, 1), (2, 0), (3, 1)}


def test_eval_writes_eleven_rows(net_file, tmp_path):
    out = tmp_path / "out.csv"
    argv = ["eval", "--net", str(net_file), "--policy", "pe+pp", "--fmax", "10",
            "--trials", "10000", "--seed", "1", "--csv", str(out)]
    assert main(argv) == 0
    curve = read_curve_csv(out.read_text())
    assert [p.f for p in curve.points] == list(range(11))
    first = out.read_text()
    assert main(argv) == 0
    assert out.read_text() == first


def test_eval_exact(tmp_path, capsys):
    path = tmp_path / "n0.txt"
    path.write_text(serialize_network(reference_network()))
    assert main(["eval", "--net", str(path), "--policy", "pp", "--tiebreak", "lowest", "--exact"]) == 0
    curve = read_curve_csv(capsys.readouterr().out)
    assert curve.values()[2] == 13 / 16


def test_oracle_matches_library(net_file, tmp_path):
    out = tmp_path / "oracle.csv"
    assert main(["oracle", "--net", str(net_file), "--fmax", "3", "--csv", str(out)]) == 0
    net = parse_network(net_file.read_text())
    assert out.read_text() == exact_curve_offline(net, 3).to_csv()


def test_trace_output(tmp_path, capsys):
    path = tmp_path / "n0.txt"
    path.write_text(serialize_network(reference_network()))
    assert main(["trace", "--net", str(path), "--faults", "3,2,0,0", "--policy", "pe"]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "step 1: fault u3 -> spare s2",
        "step 2: fault u2 -> spare s1",
        "step 3: fault u0 -> spare s0",
        "step 4: fault u0 -> FAIL",
    ]


def test_enhance_cli(tmp_path):
    src = tmp_path / "n0.txt"
    src.write_text(serialize_network(reference_network()))
    dst = tmp_path / "more.txt"
    assert main(["enhance", "--net", str(src), "--k", "2", "--strategy", "full", "-o", str(dst)]) == 0
    assert parse_network(dst.read_text()).edges == reference_network().edges | {(2, 2), (0, 2)}


def test_experiment_cli(tmp_path, capsys):
    out = tmp_path / "exp"
    assert main(["experiment", "--preset", "spectrum", "--networks", "2", "--trials", "100",
                 "--seed", "4", "--out", str(out)]) == 0
    assert (out / "summary.csv").read_text() == capsys.readouterr().out
    assert (out / "curves" / "ring45" / "0001.csv").exists()


def test_unknown_flag_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--bogus"])
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_runtime_error_one_line(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("units 2\nspares 1\nedge 0 9\n")
    assert main(["oracle", "--net", str(bad)]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "line 3" in err[0]


def test_parser_defaults():
    args = build_parser().parse_args(["eval", "--net", "x"])
    assert (args.policy, args.tiebreak, args.trials, args.exclude_faulty) == ("pe+pp", "seeded", 10000, False)
