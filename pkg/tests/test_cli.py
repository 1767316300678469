import csv
import io

import numpy as np
import pytest

from fsyrk import cli
from fsyrk.matrix import Matrix, adjoint, gemm_naive, read_matrix, write_matrix
from fsyrk.rings import make_ring


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_parse_sizes_and_seeds():
    assert cli.parse_sizes("1..4,64") == [1, 2, 3, 4, 64]
    assert cli.parse_sizes("8") == [8]
    assert cli.parse_seeds("3") == [0, 1, 2]
    assert cli.parse_seeds("5..6") == [5, 6]


@pytest.mark.parametrize("ring,phi,algo", [
    ("fp:13", "t", "fast"), ("fp:7", "t", "fast"), ("fp:2", "t", "fast-acc"),
    ("fp2:7", "h", "fast"), ("fp2:7", "h", "2m"), ("fp2:7", "t", "3m"),
    ("c64", "t", "fast"), ("c64", "h", "2m"), ("quat:fp:7", "h", "6m"),
    ("quat:fp:7", "t", "7m"), ("quat:fp:5", "t", "rec-t"), ("quat:fp:5", "h", "rec-h"),
    ("fp:131041", "t", "classic"), ("fp:131071", "t", "strassen"),
])
def test_verify_passes(capsys, ring, phi, algo):
    rc, out, _ = run(capsys, "verify", "--ring", ring, "--phi", phi, "--algo", algo,
                     "--n", "1..9,16", "--seeds", "2", "--threshold", "2")
    assert rc == 0
    assert out.startswith("pass:") and "20 cases" in out


def test_verify_rejects_missing_skew_unitary(capsys):
    rc, _, err = run(capsys, "verify", "--ring", "c64", "--phi", "h", "--algo", "fast", "--n", "4")
    assert rc == 2 and "NoSkewUnitary" in err


def test_verify_rejects_bad_prime(capsys):
    rc, _, err = run(capsys, "verify", "--ring", "fp:12", "--n", "4")
    assert rc == 2 and "error" in err


def _count_table(out):
    rows = list(csv.DictReader(io.StringIO(out)))
    return {r["quantity"]: r for r in rows}


def test_count_fast(capsys):
    rc, out, _ = run(capsys, "count", "--ring", "fp:13", "--algo", "fast", "--n", "4",
                     "--threshold", "1")
    assert rc == 0
    t = _count_table(out)
    assert t["mults"]["measured"] == t["mults"]["predicted"] == "31"
    assert t["ymults"]["measured"] == t["ymults"]["predicted"] == "14"
    assert t["products"]["measured"] == "1"


def test_count_strassen_and_7m(capsys):
    _, out, _ = run(capsys, "count", "--ring", "fp:13", "--algo", "strassen", "--n", "4",
                    "--threshold", "1")
    assert _count_table(out)["mults"]["measured"] == "49"
    _, out, _ = run(capsys, "count", "--ring", "quat:fp:7", "--phi", "t", "--algo", "7m",
                    "--n", "4")
    assert _count_table(out)["products"]["measured"] == "7"


def test_count_needs_exact_ring(capsys):
    rc, _, err = run(capsys, "count", "--ring", "c64", "--n", "4")
    assert rc == 2 and "exact" in err


def test_sos(capsys):
    rc, out, _ = run(capsys, "sos", "7", "6")
    assert rc == 0 and out.splitlines()[0] == "(3, 2)" and "ok" in out
    rc, out, _ = run(capsys, "sos", "13", "12")
    assert out.splitlines()[0] == "(5, 0)"
    rc, _, err = run(capsys, "sos", "2", "1")
    assert rc == 2


@pytest.mark.parametrize("ring,phi", [("fp:7", "t"), ("fp:13", "t"), ("fp2:7", "h"),
                                      ("quat:fp:7", "h")])
def test_skew(capsys, ring, phi):
    rc, out, _ = run(capsys, "skew", "--ring", ring, "--phi", phi, "--n", "4")
    assert rc == 0 and "ok" in out


def test_skew_odd_dimension(capsys):
    rc, _, err = run(capsys, "skew", "--ring", "fp:7", "--n", "3")
    assert rc == 2 and "OddDimension" in err


def test_bench_csv(capsys, tmp_path):
    path = tmp_path / "b.csv"
    rc, _, _ = run(capsys, "bench", "--ring", "fp:131071", "--algos", "fast,classic,naive",
                   "--n", "16,32", "--seeds", "2", "--reps", "1", "--threshold", "4",
                   "--output", str(path))
    assert rc == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 3 * 2 * 2
    assert {r["algo"] for r in rows} == {"fast", "classic", "naive"}
    for r in rows:
        n, sec = int(r["n"]), float(r["seconds"])
        assert sec > 0
        assert float(r["gflops_eff"]) == pytest.approx(n ** 3 / (1e9 * sec), rel=1e-6)
        assert r["p"] == "131071"


def test_bench_unsupported_combination(capsys):
    rc, _, err = run(capsys, "bench", "--ring", "c64", "--phi", "h", "--algos", "fast",
                     "--n", "8", "--reps", "1")
    assert rc == 2 and "error" in err


def test_syrk_file_round_trip(capsys, tmp_path):
    R = make_ring("fp:131071")
    A = Matrix.random(R, 7, 5, np.random.default_rng(1))
    src, dst = tmp_path / "a.txt", tmp_path / "c.txt"
    src.write_text(write_matrix(A))
    rc, _, _ = run(capsys, "syrk", "--input", str(src), "--output", str(dst), "--threshold", "2")
    assert rc == 0
    C = read_matrix(dst.open())
    assert C == gemm_naive(A, adjoint(A, "t"))


def test_syrk_stdout(capsys):
    rc, out, _ = run(capsys, "syrk", "--ring", "fp2:7", "--phi", "h", "--n", "6", "--cols", "3")
    assert rc == 0
    C = read_matrix(io.StringIO(out))
    assert C.shape == (6, 6) and adjoint(C, "h") == C


@pytest.mark.parametrize("algo", ["6m", "7m", "rec-t", "rec-h", "baseline"])
def test_quat_syrk(capsys, algo):
    rc, out, _ = run(capsys, "quat-syrk", "--algo", algo, "--n", "6", "--threshold", "2")
    assert rc == 0
    assert read_matrix(io.StringIO(out)).shape == (6, 6)


def test_quat_syrk_needs_quaternions(capsys):
    rc, _, err = run(capsys, "quat-syrk", "--ring", "fp:7")
    assert rc == 2
