import csv
import io
import math

import numpy as np
import pytest

from svdensity.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_density_grid(capsys):
    code, out, _ = run(capsys, "density", "--g", "1,4", "--grid", "0.5:5:10")
    assert code == 0
    assert "# atom_at_origin=0" in out and "# normalization=" in out
    table = {float(r["s"]): float(r["psi"]) for r in rows(out)}
    assert table[2.0] == pytest.approx(1 / 3, abs=1e-15)
    assert table[0.5] == 0.0 and table[5.0] == 0.0


def test_density_below_support_is_zero(capsys):
    code, out, _ = run(capsys, "density", "--g", "1,4", "--grid", "0.1:0.9:5")
    assert code == 0 and all(float(r["psi"]) == 0.0 for r in rows(out))


def test_density_squares_spectrum(capsys):
    code, out, _ = run(capsys, "density", "--g", "1,4,9,16,25", "--grid", "1:25:7")
    assert code == 0 and len(rows(out)) == 7


def test_seventeen_digits(capsys):
    _, out, _ = run(capsys, "density", "--g", "1,4", "--grid", "2:3:2")
    assert "2,0.33333333333333331" in out


def test_radial(capsys):
    r2 = math.sqrt(2)
    code, out, _ = run(capsys, "radial", "--g", "1,4", "--grid", f"0.5:{r2!r}:2")
    table = [(float(r["r"]), float(r["psi1"])) for r in rows(out)]
    assert table[0][1] == 0.0
    assert table[1][1] == pytest.approx(2 * r2 / 3, rel=1e-12)


def test_radial_trapezoid_mass(capsys, tmp_path):
    out_file = tmp_path / "r.csv"
    code, _, _ = run(capsys, "radial", "--g", "1,4", "--grid", "1:2:20001", "--out", str(out_file))
    data = rows(out_file.read_text())
    r = np.array([float(x["r"]) for x in data])
    p = np.array([float(x["psi1"]) for x in data])
    mass = float(np.sum((p[1:] + p[:-1]) / 2 * np.diff(r)))
    assert mass == pytest.approx(1.0, abs=1e-4)


def test_side_selector(capsys):
    _, lo, _ = run(capsys, "density", "--g", "1,4", "--grid", "1:4:2", "--side", "lo")
    _, hi, _ = run(capsys, "density", "--g", "1,4", "--grid", "1:4:2", "--side", "hi")
    assert [float(r["psi"]) for r in rows(lo)] == [0.0, pytest.approx(5 / 24)]
    assert [float(r["psi"]) for r in rows(hi)] == [pytest.approx(5 / 6), 0.0]


def test_spectrum_file(capsys, tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("# G\n1\n4\n")
    code, out, _ = run(capsys, "density", "--spectrum-file", str(f), "--grid", "2:3:2")
    assert code == 0 and float(rows(out)[0]["psi"]) == pytest.approx(1 / 3)


@pytest.mark.parametrize("argv", [
    ["density", "--grid", "1:2:3"],
    ["density", "--g", "1,4", "--spectrum-file", "x", "--grid", "1:2:3"],
    ["density", "--g", "1,4", "--grid", "1:2:1"],
    ["density", "--g", "1,4", "--grid", "2:1:5"],
    ["density", "--g", "1,x", "--grid", "1:2:3"],
    ["density", "--g", "1,-4", "--grid", "1:2:3"],
    ["density", "--spectrum-file", "/nonexistent/g.txt", "--grid", "1:2:3"],
    ["mc", "--g", "1,4", "--samples", "0"],
    ["special", "truncated", "--m", "3", "--n", "2"],
    ["special", "rank-one", "--g1", "1"],
    ["bogus"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 1


def test_numeric_failure_exit_code(capsys, monkeypatch):
    from svdensity import density
    from svdensity.quadrature import QuadratureError

    def boom(spec):
        raise QuadratureError("no convergence", 1.0)

    monkeypatch.setattr(density, "normalization", boom)
    code, _, err = run(capsys, "density", "--g", "1,4", "--grid", "1:2:3")
    assert code == 2 and "numeric failure" in err


def test_mc_outputs_and_determinism(capsys, tmp_path):
    paths = [tmp_path / f"h{k}.csv" for k in range(2)]
    for p in paths:
        code, _, _ = run(capsys, "mc", "--g", "1,4,9", "--samples", "100", "--seed", "7",
                         "--out", str(p), "--report", str(tmp_path / "rep.csv"),
                         "--density-out", str(tmp_path / "dens.csv"), "--tv-threshold", "1")
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text().splitlines()[0] == "bin_lo,bin_hi,count,expected,zscore"
    rep = (tmp_path / "rep.csv").read_text().splitlines()
    assert rep[0] == "chi_square,dof,tv_distance,max_abs_z,discarded"
    dens = rows((tmp_path / "dens.csv").read_text())
    w = float(dens[0]["bin_hi"]) - float(dens[0]["bin_lo"])
    assert sum(float(r["density"]) for r in dens) * w == pytest.approx(1.0)
    assert sum(float(r["expected_density"]) for r in dens) * w == pytest.approx(1.0)


def test_mc_all_ones_single_bin(capsys):
    code, out, _ = run(capsys, "mc", "--g", "1,1,1", "--samples", "50", "--seed", "7")
    assert code == 0
    occupied = [r for r in rows(out) if int(r["count"]) > 0]
    assert len(occupied) == 1 and float(occupied[0]["bin_lo"]) == pytest.approx(1.0)


def test_mc_threshold_exit_code(capsys):
    code, _, err = run(capsys, "mc", "--g", "1,4", "--samples", "20", "--seed", "1",
                       "--tv-threshold", "0")
    assert code == 3 and "tv_distance" in err


@pytest.mark.parametrize("g", ["1,4", "2,2,5", "1,4,9,16,25"])
def test_check_passes(capsys, g):
    code, out, _ = run(capsys, "check", "--g", g)
    assert code == 0 and "FAIL" not in out


def test_check_rank_deficient(capsys):
    code, out, _ = run(capsys, "check", "--g", "0,1")
    assert code == 0
    assert "# atom_at_origin=0.5" in out and "# continuous_mass=0.5" in out


def test_check_failure_exit_code(capsys, monkeypatch):
    from svdensity import density
    monkeypatch.setattr(density, "normalization", lambda spec: 0.5)
    code, out, _ = run(capsys, "check", "--g", "1,4")
    assert code == 3 and "normalization,FAIL" in out


def _trailer(out):
    return float(out.strip().splitlines()[-1].split("=")[1])


def test_special_rank_one(capsys):
    code, out, _ = run(capsys, "special", "rank-one", "--g1", "1", "--gval", "4", "--n", "2")
    assert code == 0 and _trailer(out) < 1e-10
    code, out, _ = run(capsys, "special", "rank-one", "--g1", "0.5", "--gval", "2", "--n", "5")
    assert code == 0 and _trailer(out) < 1e-9


def test_special_truncated(capsys):
    code, out, _ = run(capsys, "special", "truncated", "--m", "1", "--n", "2", "--grid", "0.1:0.9:9")
    assert code == 0 and all(float(r["closed_form"]) == 1.0 for r in rows(out))
    assert _trailer(out) < 1e-10
    code, out, _ = run(capsys, "special", "truncated", "--m", "1", "--n", "3", "--grid", "0.1:0.9:9")
    for r in rows(out):
        s = float(r["s"])
        assert float(r["closed_form"]) == pytest.approx((1 + 2 * s) / 2)
    assert _trailer(out) < 1e-10


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "svdensity", "density", "--g", "1,4", "--grid", "2:3:2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "s,psi" in res.stdout
