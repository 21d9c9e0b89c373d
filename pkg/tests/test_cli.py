"""End-to-end tests of the command-line front end."""

import json
from fractions import Fraction

import pytest

from verlinde_lab import cli
from verlinde_lab.abelian import AffineMultisection, MultisectionComponent
from verlinde_lab.abelian import to_json_dict as multisection_json
from verlinde_lab.graph import save_graph, theta_graph


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    return code, json.loads(out), err


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


def test_graphs_writes_files(tmp_path, capsys):
    code, report, _ = run_json(
        capsys, "graphs", "--genus", "2", "--out-dir", str(tmp_path)
    )
    assert code == 0
    assert report["outputs"]["classes"] == 2
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == [
        "genus2_00_theta.trinion.json",
        "genus2_01_dumbbell.trinion.json",
        "genus2_index.json",
    ]
    index = json.loads((tmp_path / "genus2_index.json").read_text())
    assert index["count"] == 2
    assert [g["name"] for g in index["graphs"]] == ["theta", "dumbbell"]


def test_graphs_byte_identical_reruns(tmp_path, capsys):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    run_cli(capsys, "graphs", "--genus", "3", "--out-dir", str(d1))
    run_cli(capsys, "graphs", "--genus", "3", "--out-dir", str(d2))
    names = sorted(p.name for p in d1.iterdir())
    assert names == sorted(p.name for p in d2.iterdir())
    for name in names:
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_graphs_out_of_range(capsys):
    code, _, err = run_cli(capsys, "graphs", "--genus", "7")
    assert code == 1
    assert "error:" in err


# ---------------------------------------------------------------------------
# count
# ---------------------------------------------------------------------------


def test_count_genus_mode(capsys):
    code, report, _ = run_json(capsys, "count", "--genus", "2", "--level", "1")
    assert code == 0
    assert report["outputs"]["count"] == 4
    names = {row["graph"] for row in report["outputs"]["per_graph"]}
    assert names == {"theta", "dumbbell"}
    assert report["checks"][0]["name"] == "graph-independence"
    assert report["checks"][0]["passed"]


def test_count_level_zero(capsys):
    code, report, _ = run_json(capsys, "count", "--genus", "2", "--level", "0")
    assert code == 0
    assert report["outputs"]["count"] == 1


def test_count_methods_agree(capsys):
    _, brute, _ = run_json(
        capsys, "count", "--genus", "2", "--level", "3", "--method", "brute"
    )
    _, contract, _ = run_json(
        capsys, "count", "--genus", "2", "--level", "3", "--method", "contract"
    )
    assert brute["outputs"]["count"] == contract["outputs"]["count"] == 20


def test_count_graph_file(tmp_path, capsys):
    path = tmp_path / "t.trinion.json"
    save_graph(theta_graph(), path)
    code, report, _ = run_json(
        capsys, "count", "--graph", str(path), "--level", "2"
    )
    assert code == 0
    assert report["outputs"]["count"] == 10


def test_count_csv(capsys):
    code, out, _ = run_cli(
        capsys, "count", "--genus", "2", "--level", "1", "--format", "csv"
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "graph,count"
    assert "theta,4" in lines


def test_count_work_bound_error(capsys):
    code, _, err = run_cli(
        capsys,
        "count", "--genus", "2", "--level", "500",
        "--method", "brute", "--max-states", "1000",
    )
    assert code == 1
    assert "count_via_contraction" in err


# ---------------------------------------------------------------------------
# verlinde / check
# ---------------------------------------------------------------------------


def test_verlinde(capsys):
    code, report, _ = run_json(capsys, "verlinde", "--genus", "2", "--level", "1")
    assert code == 0
    assert report["outputs"]["dimension"] == 4
    assert report["checks"][0]["passed"]


def test_verlinde_level_zero(capsys):
    code, report, _ = run_json(capsys, "verlinde", "--genus", "2", "--level", "0")
    assert code == 0
    assert report["outputs"]["dimension"] == 1


def test_verlinde_matches_counts_genus_three(capsys):
    code, report, _ = run_json(capsys, "verlinde", "--genus", "3", "--level", "2")
    _, counts, _ = run_json(capsys, "count", "--genus", "3", "--level", "2")
    assert report["outputs"]["dimension"] == counts["outputs"]["count"] == 36


def test_check_passes(capsys):
    code, report, _ = run_json(capsys, "check", "--genus", "2", "--max-level", "6")
    assert code == 0
    assert report["checks"]
    assert all(c["passed"] for c in report["checks"])
    assert "first_discrepancy" not in report["outputs"]


def test_check_genus_three(capsys):
    code, report, _ = run_json(capsys, "check", "--genus", "3", "--max-level", "4")
    assert code == 0
    assert all(c["passed"] for c in report["checks"])


def test_check_trivial_level_zero(capsys):
    code, report, _ = run_json(capsys, "check", "--genus", "2", "--max-level", "0")
    assert code == 0
    assert all(c["passed"] for c in report["checks"])


def test_check_respects_thread_env(capsys, monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "2")
    assert cli.worker_count() == 2
    code, report, _ = run_json(capsys, "check", "--genus", "2", "--max-level", "2")
    assert code == 0
    assert all(c["passed"] for c in report["checks"])


def test_check_reports_first_discrepancy(capsys, monkeypatch):
    # Sabotage one route to verify the failure contract: nonzero exit and a
    # first-discrepancy line on stderr.
    real = cli.weights.count_via_contraction

    def wrong(G, k, **kwargs):
        value = real(G, k, **kwargs)
        return value + 1 if k == 2 else value

    monkeypatch.setattr(cli.weights, "count_via_contraction", wrong)
    code, out, err = run_cli(capsys, "check", "--genus", "2", "--max-level", "2")
    assert code == 1
    report = json.loads(out)
    assert not all(c["passed"] for c in report["checks"])
    assert "FIRST DISCREPANCY" in err
    assert "k=2" in report["outputs"]["first_discrepancy"]


# ---------------------------------------------------------------------------
# polytope
# ---------------------------------------------------------------------------


def test_polytope_volume_exact(capsys):
    code, report, _ = run_json(
        capsys, "polytope", "--genus", "2", "--mode", "volume-exact"
    )
    assert code == 0
    assert [v["volume"] for v in report["outputs"]["volumes"]] == ["1/3", "1/3"]
    assert report["checks"][0]["name"] == "volume-identical-across-genus"
    assert report["checks"][0]["passed"]


def test_polytope_volume_mc_reproducible(capsys):
    args = (
        "polytope", "--genus", "2", "--mode", "volume-mc",
        "--samples", "20000", "--seed", "9",
    )
    code1, r1, _ = run_json(capsys, *args)
    code2, r2, _ = run_json(capsys, *args)
    assert code1 == code2 == 0
    assert r1["outputs"] == r2["outputs"]
    assert all(c["passed"] for c in r1["checks"])


def test_polytope_asymptotics_json(capsys):
    code, report, _ = run_json(
        capsys, "polytope", "--genus", "2", "--mode", "asymptotics", "--k-max", "50"
    )
    assert code == 0
    for entry in report["outputs"]["tables"]:
        assert entry["volume"] == "1/3"
        assert entry["parity_rank"] == 1
        assert entry["volume_parity_corrected"] == "1/6"
        limit = Fraction(entry["extrapolated_limit"])
        assert abs(limit - Fraction(1, 6)) <= Fraction(1, 600)
    assert all(c["passed"] for c in report["checks"])


def test_polytope_asymptotics_csv(capsys):
    code, out, _ = run_cli(
        capsys,
        "polytope", "--genus", "2", "--mode", "asymptotics",
        "--k-max", "5", "--format", "csv",
    )
    assert code == 0
    blocks = out.strip().split("\n\n")
    assert len(blocks) == 2
    for block in blocks:
        lines = block.split("\n")
        assert lines[0].startswith("# graph=")
        assert lines[1] == "k,count,ratio"
        assert lines[2].startswith("1,4,")


def test_polytope_graph_file(tmp_path, capsys):
    path = tmp_path / "t.trinion.json"
    save_graph(theta_graph(), path)
    code, report, _ = run_json(
        capsys, "polytope", "--graph", str(path), "--mode", "volume-exact"
    )
    assert code == 0
    assert report["outputs"]["volumes"][0]["volume"] == "1/3"


# ---------------------------------------------------------------------------
# abelian
# ---------------------------------------------------------------------------


def test_abelian_torus_count(capsys):
    code, report, _ = run_json(capsys, "abelian", "--g", "2", "--level", "3")
    assert code == 0
    assert report["outputs"]["count"] == 9


def test_abelian_requires_level_with_g(capsys):
    with pytest.raises(SystemExit):
        cli.main(["abelian", "--g", "2"])


def test_abelian_multisection_file(tmp_path, capsys):
    M = AffineMultisection(
        2,
        (
            MultisectionComponent(
                ((2, 0), (0, 3)), (Fraction(0), Fraction(0))
            ),
        ),
    )
    path = tmp_path / "m.json"
    path.write_text(json.dumps(multisection_json(M)))
    code, report, _ = run_json(capsys, "abelian", "--multisection", str(path))
    assert code == 0
    assert report["outputs"]["count"] == 6
    assert len(report["outputs"]["fibres"]) == 6
    assert report["checks"][0]["passed"]


def test_abelian_identity_multisection(tmp_path, capsys):
    M = AffineMultisection(
        2,
        (MultisectionComponent(((1, 0), (0, 1)), (Fraction(1, 2), Fraction(1, 2))),),
    )
    path = tmp_path / "m.json"
    path.write_text(json.dumps(multisection_json(M)))
    code, report, _ = run_json(capsys, "abelian", "--multisection", str(path))
    assert code == 0
    assert report["outputs"]["count"] == 1
    assert report["outputs"]["fibres"] == [
        {"point": ["1/2", "1/2"], "component": 0}
    ]


def test_abelian_singular_multisection_fails(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(
        json.dumps({"g": 2, "components": [{"A": [[1, 1], [1, 1]], "t": ["0", "0"]}]})
    )
    code, _, err = run_cli(capsys, "abelian", "--multisection", str(path))
    assert code == 1
    assert "singular" in err


# ---------------------------------------------------------------------------
# Usage and report shape
# ---------------------------------------------------------------------------


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["count", "--level", "1"])  # neither --genus nor --graph
    assert exc.value.code == 2


def test_report_shape(capsys):
    _, report, _ = run_json(capsys, "verlinde", "--genus", "2", "--level", "2")
    assert list(report.keys()) == [
        "command", "inputs", "outputs", "checks", "timing_seconds",
    ]
