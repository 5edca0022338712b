import subprocess
import sys
from pathlib import Path

import pytest

from impartial.cli import main, parse_instance, read_config
from impartial.graph import parse_edge_list, tight_example

GOLDEN = Path(__file__).parent / "golden"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_to_file_matches_golden(tmp_path, capsys):
    path = tmp_path / "g.txt"
    code, out, _ = run(["gen", "tight", "--N", "2", "--eps", "0.2", "--out", str(path)], capsys)
    assert code == 0
    assert out == "n=35 m=71 delta=3\n"
    assert path.read_text() == (GOLDEN / "tight_N2_eps0.2.txt").read_text()
    assert parse_edge_list(path.read_text()) == tight_example(2, 0.2)


def test_gen_to_stdout_puts_summary_on_stderr(capsys):
    code, out, err = run(["gen", "single-arc"], capsys)
    assert code == 0 and out == "2 1\n0 1\n" and err == "n=2 m=1 delta=1\n"


def test_gen_other_families(capsys):
    for argv in (["circulant", "--n", "5", "--N", "2"], ["complete", "--n", "3"],
                 ["uniform", "--n", "6", "--p", "0.5", "--seed", "2"], ["star", "--delta", "4"]):
        code, out, _ = run(["gen", *argv], capsys)
        assert code == 0 and parse_edge_list(out).n >= 3


def test_alpha_exact_golden(capsys):
    code, out, _ = run(["alpha", "--instance", "single-arc:n=2", "--instance", "single-arc:n=3",
                        "--instance", "complete:n=3",
                        "--mechanism", "permutation,two-partition,baseline", "--exact"], capsys)
    assert code == 0
    assert out == (GOLDEN / "alpha_exact.csv").read_text()


def test_alpha_monte_carlo_golden(capsys):
    code, out, _ = run(["alpha", "--instance", "tight:N=2,eps=0.2", "--mechanism", "permutation",
                        "--mechanism", "slicing", "--eps", "0.2", "--trials", "500", "--seed", "7"], capsys)
    assert code == 0
    assert out == (GOLDEN / "alpha_mc.csv").read_text()


def test_alpha_from_graph_file(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("2 1\n0 1\n")
    code, out, _ = run(["alpha", "--graph", str(f), "--mechanism", "permutation", "--exact"], capsys)
    assert code == 0
    assert out.splitlines()[1] == "permutation,2,1,1,2,0.5,0.5,0,true,0"


def test_alpha_jobs_byte_identical(tmp_path, capsys):
    base = ["alpha", "--instance", "tight:N=2,eps=0.2", "--mechanism", "permutation,slicing-multi",
            "--eps", "0.3", "--c", "2", "--trials", "400", "--seed", "5"]
    outs = []
    for jobs in ("1", "2", "3"):
        code, out, _ = run(base + ["--jobs", jobs], capsys)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]


def test_alpha_out_file(tmp_path, capsys):
    f = tmp_path / "a.csv"
    code, out, _ = run(["alpha", "--instance", "single-arc", "--mechanism", "baseline",
                        "--exact", "--out", str(f)], capsys)
    assert code == 0 and out == ""
    assert f.read_text().startswith("mechanism,n,m,delta,trials,mean,ratio,ci,exact,seed\n")


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# experiment\n"
        "instance = tight:N=2,eps=0.2\n"
        "mechanism = permutation, slicing\n"
        "eps = 0.2\n"
        "trials = 500\n"
        "seed = 1   # overridden below\n"
    )
    code, out, _ = run(["alpha", "--config", str(cfg), "--seed", "7"], capsys)
    assert code == 0
    assert out == (GOLDEN / "alpha_mc.csv").read_text()


def test_read_config_normalises_keys(tmp_path):
    cfg = tmp_path / "c"
    cfg.write_text("max-trials = 3\n\n  # only a comment\n")
    assert read_config(str(cfg)) == {"max_trials": "3"}
    cfg.write_text("no equals sign\n")
    with pytest.raises(ValueError):
        read_config(str(cfg))


def test_impartiality_golden(capsys):
    code, out, _ = run(["impartiality", "--mechanism", "permutation,two-partition,baseline",
                        "--cases", "5", "--tapes", "50", "--seed", "3"], capsys)
    assert code == 0
    assert out == (GOLDEN / "impartiality.txt").read_text()


def test_impartiality_slicing(capsys):
    code, out, _ = run(["impartiality", "--mechanism", "slicing", "--mechanism", "slicing-multi",
                        "--eps", "0.3", "--c", "2", "--cases", "4", "--tapes", "30"], capsys)
    assert code == 0
    assert "mechanism=slicing(eps=0.3) cases=4 violations=0" in out
    assert "mechanism=slicing-multi(eps=0.3;c=2) trace_violations=0" in out


def test_impartiality_baseline_witness(tmp_path, capsys):
    f = tmp_path / "detail.txt"
    code, out, _ = run(["impartiality", "--mechanism", "baseline", "--witness",
                        "--tapes", "10", "--out", str(f)], capsys)
    # the baseline is not claimed impartial, so violations do not fail the run
    assert code == 0
    assert out == "mechanism=baseline cases=1 violations=10\n"
    assert "baseline case=0 seed=0 vertex=1 original=True modified=False" in f.read_text()


def test_verify(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert [l.split()[0] for l in lines] == [
        "check=balanced_fraction", "check=hypergeometric_tail", "check=chernoff_empirical"]
    assert all(l.endswith("pass=true") for l in lines)


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "circulant", "--n", "3", "--N", "3"],
        ["gen", "tight", "--N", "2"],
        ["gen", "nosuch"],
        ["alpha", "--mechanism", "permutation"],
        ["alpha", "--instance", "single-arc", "--mechanism", "nope"],
        ["alpha", "--instance", "single-arc", "--mechanism", "slicing"],
        ["alpha", "--instance", "single-arc", "--mechanism", "permutation", "--trials", "0"],
        ["alpha", "--instance", "tight:N=8,eps=0.1", "--mechanism", "permutation", "--exact"],
        ["alpha", "--instance", "file:/nonexistent/graph.txt", "--mechanism", "permutation"],
        ["alpha", "--instance", "uniform:n=4", "--mechanism", "permutation"],
        ["alpha", "--instance", "single-arc:n=2,bogus=1", "--mechanism", "permutation"],
        ["impartiality", "--mechanism", "permutation", "--tapes", "0"],
        ["alpha", "--config", "/nonexistent.cfg"],
        [],
    ],
)
def test_invalid_input_exits_1(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert err.startswith("error:")


def test_malformed_graph_file_exits_1(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("2 1\n0 0\n")
    code, _, err = run(["alpha", "--graph", str(f), "--mechanism", "permutation"], capsys)
    assert code == 1 and "self-loop" in err


def test_violation_exit_code(monkeypatch, capsys):
    from impartial import cli
    from impartial.analysis import ImpartialityReport

    def fake(*a, **k):
        return ImpartialityReport(1, [(0, 0, True, False)], [])

    monkeypatch.setattr(cli, "impartiality_coupling_test", fake)
    code, out, _ = run(["impartiality", "--mechanism", "permutation", "--cases", "1", "--tapes", "1"], capsys)
    assert code == 2 and "violations=1" in out


def test_parse_instance_spec():
    spec, g = parse_instance("circulant:n=6,N=2")
    assert spec == "circulant:n=6,N=2" and g.m == 12
    with pytest.raises(ValueError):
        parse_instance("circulant:n6")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "impartial", "gen", "single-arc"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "2 1\n0 1\n"
