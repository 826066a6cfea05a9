import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from lenslab import analytic
from lenslab.cli import main
from lenslab.geometry import LensSpace
from lenslab.montecarlo import SampleConfig, sample_distances

PI = math.pi


def run(tmp_path, *argv):
    return main(list(argv))


def test_moments_single_value(tmp_path, capsys):
    assert main(["moments", "--n", "4", "--k", "1"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "n,k,method,value,abs_error_bound"
    row = lines[1].split(",")
    assert float(row[3]) == pytest.approx(0.5 + PI / 8, abs=1e-12)


def test_moments_trivial_n2_k0(capsys):
    assert main(["moments", "--n", "2", "--k", "0"]) == 0
    row = capsys.readouterr().out.strip().splitlines()[1].split(",")
    assert float(row[3]) == pytest.approx(1.0, abs=1e-12)


def test_moments_all_methods_range(tmp_path):
    out = tmp_path / "m.csv"
    assert main(
        ["moments", "--n", "3", "--k", "0..7", "--method", "all", "--output", str(out)]
    ) == 0
    lines = out.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header == ["n", "k", "recurrence", "finite_sum", "closed_form",
                      "quadrature", "max_discrepancy"]
    assert len(lines) == 9
    for line in lines[1:]:
        assert float(line.split(",")[-1]) < 1e-9


def test_moments_match_direct_api(tmp_path):
    out = tmp_path / "m.json"
    assert main(["moments", "--n", "5", "--k", "0..4", "--method", "closed_form",
                 "--format", "json", "--output", str(out)]) == 0
    rows = json.loads(out.read_text())
    for row in rows:
        assert row["value"] == analytic.moment_closed_form(5, row["k"]).value


def test_moments_invalid_args_exit_1(capsys):
    assert main(["moments", "--n", "1", "--k", "2"]) == 1
    assert main(["moments", "--n", "4", "--k", "nope"]) == 1
    assert main(["moments", "--n", "4"]) == 1  # missing --k
    assert main(["moments", "--n", "4", "--k", "1", "--method", "sorcery"]) == 1


def test_distribution_pdf_values(capsys):
    assert main(["distribution", "--n", "2", "--which", "pdf",
                 "--grid", f"0:{PI / 2}:3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "x,pdf"
    last = lines[-1].split(",")
    assert float(last[1]) == pytest.approx(4 / PI, abs=1e-12)


def test_distribution_cdf_endpoints(capsys):
    assert main(["distribution", "--n", "6", "--which", "cdf",
                 "--grid", f"0:{PI / 2}:5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()[1:]
    assert float(lines[0].split(",")[1]) == 0.0
    assert float(lines[-1].split(",")[1]) == pytest.approx(1.0, abs=1e-12)


def test_distribution_mgf_at_zero(capsys):
    assert main(["distribution", "--n", "5", "--which", "mgf", "--grid=-1:1:3"]) == 0
    mid = capsys.readouterr().out.strip().splitlines()[2].split(",")
    assert float(mid[0]) == 0.0
    assert float(mid[1]) == pytest.approx(1.0, abs=1e-13)


def test_distribution_svg(tmp_path):
    out = tmp_path / "pdf.svg"
    assert main(["distribution", "--n", "3", "--which", "pdf", "--format", "svg",
                 "--output", str(out)]) == 0
    root = ET.fromstring(out.read_text())
    assert root.tag.endswith("svg")
    assert any(child.tag.endswith("polyline") for child in root)


def test_distribution_svg_with_histogram_overlay(tmp_path):
    hist = tmp_path / "h.json"
    assert main(["simulate", "--n", "3", "--count", "20000", "--seed", "2",
                 "--algorithm", "fast", "--format", "json", "--output", str(hist)]) == 0
    out = tmp_path / "overlay.svg"
    assert main(["distribution", "--n", "3", "--which", "pdf", "--format", "svg",
                 "--histogram", str(hist), "--output", str(out)]) == 0
    root = ET.fromstring(out.read_text())
    rects = [c for c in root if c.tag.endswith("rect")]
    assert len(rects) > 50  # histogram bars plus the frame
    assert any(child.tag.endswith("polyline") for child in root)


def test_distribution_domain_error_exit_1(tmp_path):
    assert main(["distribution", "--n", "5", "--which", "pdf", "--grid", "0:9:5"]) == 1


def test_ballvol_table(tmp_path):
    out = tmp_path / "v.csv"
    assert main(["ballvol", "--n", "5", "--grid", f"0:{PI / 2}:257",
                 "--output", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "r,ball_volume,sphere_area"
    first = lines[1].split(",")
    assert float(first[1]) == 0.0
    last = lines[-1].split(",")
    assert float(last[1]) == pytest.approx(2 * PI**2 / 5, abs=1e-12)
    # dV/dr ~ A_n across the rows (finite difference, away from the pi/5 kink)
    rows = [list(map(float, ln.split(","))) for ln in lines[1:]]
    step = rows[1][0] - rows[0][0]
    for i in range(1, len(rows) - 1):
        if abs(rows[i][0] - PI / 5) < 2 * step:
            continue
        fd = (rows[i + 1][1] - rows[i - 1][1]) / (2 * step)
        assert fd == pytest.approx(rows[i][2], abs=1e-3)


def test_simulate_json_and_determinism(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    argv = ["simulate", "--n", "5", "--m", "2", "--count", "20000", "--seed", "42",
            "--workers", "2", "--bins", "40", "--format", "json"]
    assert main(argv + ["--output", str(out1)]) == 0
    assert main(argv + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    payload = json.loads(out1.read_text())
    assert payload["space"] == {"n": 5, "m": 2}
    assert payload["sample_count"] == 20000
    assert sum(payload["counts"]) == 20000
    assert len(payload["bin_edges"]) == 41
    # thin shell: the mean must equal the library's
    cfg = SampleConfig(LensSpace(5, 2), 20000, 42, workers=2)
    _, est = sample_distances(cfg)
    assert payload["mean"] == est.mean
    assert payload["std_error"] == est.std_error


def test_simulate_csv_header_and_17_digits(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["simulate", "--n", "3", "--count", "5000", "--seed", "7",
                 "--bins", "10", "--output", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "bin_left,bin_right,count,total,seed,mean,std_error"
    assert len(lines) == 11
    # 17 significant digits means round-tripping the float exactly
    cell = lines[1].split(",")[1]
    assert float(cell) == float("%.17g" % float(cell))


def test_simulate_samples_output_and_svg(tmp_path):
    samples_file = tmp_path / "s.txt"
    svg_file = tmp_path / "h.svg"
    assert main(["simulate", "--n", "5", "--count", "8000", "--seed", "3",
                 "--algorithm", "fast", "--samples-output", str(samples_file),
                 "--svg-output", str(svg_file), "--output", str(tmp_path / "o.csv")]) == 0
    values = [float(x) for x in samples_file.read_text().split()]
    assert len(values) == 8000
    cfg = SampleConfig(LensSpace(5, 1), 8000, 3, algorithm="homogeneous_fast")
    direct, _ = sample_distances(cfg)
    assert np.allclose(values, direct, rtol=0, atol=0)
    root = ET.fromstring(svg_file.read_text())
    assert any(child.tag.endswith("rect") for child in root)
    assert any(child.tag.endswith("polyline") for child in root)  # pdf overlay


def test_simulate_fixed_point(tmp_path):
    out = tmp_path / "fp.json"
    assert main(["simulate", "--n", "5", "--m", "2", "--count", "5000", "--seed", "1",
                 "--fixed-point", "0.785398", "--format", "json",
                 "--output", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["fixed_point"] == pytest.approx(0.785398)
    assert sum(payload["counts"]) == 5000


def test_simulate_invalid_space_exit_1(tmp_path):
    assert main(["simulate", "--n", "6", "--m", "3", "--count", "10", "--seed", "1"]) == 1
    assert main(["simulate", "--n", "5", "--m", "2", "--count", "10", "--seed", "1",
                 "--algorithm", "fast"]) == 1


def test_compare_pass_and_fail_exit_codes(tmp_path):
    good = tmp_path / "good.txt"
    assert main(["simulate", "--n", "5", "--count", "50000", "--seed", "13",
                 "--algorithm", "fast", "--samples-output", str(good),
                 "--output", str(tmp_path / "g.csv")]) == 0
    assert main(["compare", "--n", "5", "--samples", str(good),
                 "--output", str(tmp_path / "r.csv")]) == 0

    bad = tmp_path / "bad.txt"
    assert main(["simulate", "--n", "5", "--m", "2", "--count", "50000", "--seed", "13",
                 "--samples-output", str(bad),
                 "--output", str(tmp_path / "b.csv")]) == 0
    assert main(["compare", "--n", "5", "--samples", str(bad),
                 "--output", str(tmp_path / "r2.csv")]) == 2


def test_compare_quantile_generated_samples(tmp_path):
    rng = np.random.default_rng(0)
    f = tmp_path / "q.txt"
    f.write_text("\n".join(
        "%.17g" % analytic.quantile(5, float(p)) for p in rng.random(5000)
    ) + "\n")
    assert main(["compare", "--n", "5", "--samples", str(f),
                 "--output", str(tmp_path / "r.json"), "--format", "json"]) == 0
    payload = json.loads((tmp_path / "r.json").read_text())
    assert payload["passed"] is True
    assert payload["statistic"] <= payload["threshold"]


def test_compare_histogram_input(tmp_path):
    hist = tmp_path / "h.json"
    assert main(["simulate", "--n", "5", "--count", "50000", "--seed", "13",
                 "--algorithm", "fast", "--format", "json",
                 "--output", str(hist)]) == 0
    assert main(["compare", "--n", "5", "--histogram", str(hist),
                 "--output", str(tmp_path / "r.csv")]) == 0


def test_compare_needs_input(tmp_path):
    assert main(["compare", "--n", "5"]) == 1


def test_env_variable_precedence(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LENSLAB_N", "123")
    monkeypatch.setenv("LENSLAB_BINS", "7")
    out = tmp_path / "env.json"
    assert main(["simulate", "--n", "3", "--seed", "1", "--format", "json",
                 "--workers", "1", "--output", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["sample_count"] == 123
    assert len(payload["counts"]) == 7
    # flags beat the environment
    out2 = tmp_path / "env2.json"
    assert main(["simulate", "--n", "3", "--seed", "1", "--count", "55",
                 "--workers", "1", "--format", "json", "--output", str(out2)]) == 0
    assert json.loads(out2.read_text())["sample_count"] == 55


def test_unknown_subcommand_exit_1():
    assert main(["frobnicate"]) == 1
