import contextlib
import io
import json
import math

import numpy as np
import pytest

from gasketlab.cli import main


def run_cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        rc = main(argv)
    return rc, buf.getvalue()


def test_exponents_json(capsys):
    rc, out = run_cli(["exponents", "--kappa", "2.6667"])
    assert rc == 0
    data = json.loads(out)
    assert abs(data["d_dbl"] - 0.75) < 1e-4
    assert abs(data["theta_dbl"] - math.pi) < 1e-3
    assert set(data) == {
        "kappa", "kappa_prime", "lambda", "chi", "theta_dbl", "d_sle", "d_dbl", "alpha4",
    }


def test_exponents_usage_error():
    rc, _ = run_cli(["exponents", "--kappa", "5.0"])
    assert rc == 1  # runtime/domain error


def test_sle_trace_csv(tmp_path):
    out = tmp_path / "trace.csv"
    rc, _ = run_cli(
        ["sle-trace", "--zero", "--t", "0.1", "--dt", "0.001", "--seed", "1",
         "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# command=sle-trace")
    assert lines[1] == "t,re,im"
    last = lines[-1].split(",")
    assert float(last[2]) == pytest.approx(2 * math.sqrt(0.1), abs=0.01)


def test_sample_perc_round_trip(tmp_path):
    cfg = tmp_path / "cfg.json"
    svg = tmp_path / "cfg.svg"
    rc, _ = run_cli(
        ["sample-perc", "--n", "12", "--p", "0.5", "--seed", "9",
         "--out", str(cfg), "--svg", str(svg), "--coloring", "distance"]
    )
    assert rc == 0
    data = json.loads(cfg.read_text())
    assert set(data) == {"n", "p", "seed", "open"}
    assert set(data["open"]) <= {"0", "1"}
    text = svg.read_text()
    assert text.startswith("<?xml") and text.rstrip().endswith("</svg>")
    assert "polygon" in text and "circle" in text  # cells plus the red root


def test_gasket_and_distance_pipeline(tmp_path):
    cfg = tmp_path / "cfg.json"
    run_cli(["sample-perc", "--n", "12", "--p", "0.55", "--seed", "4", "--out", str(cfg)])
    from gasketlab import percolation as perc
    from gasketlab.cli import _load_config

    cs = perc.decompose(_load_config(str(cfg)))
    sizes = [cs.cluster_site_flats(c).size for c in range(1, cs.n_clusters + 1)]
    cid = 1 + int(np.argmax(sizes))
    gj = tmp_path / "g.json"
    rc, _ = run_cli(["gasket", "--config", str(cfg), "--cluster", str(cid), "--out", str(gj)])
    assert rc == 0
    g = json.loads(gj.read_text())
    assert set(g) == {"n", "cluster", "vertices", "edges", "cut_vertices", "thin_flags", "loops"}
    assert len(g["thin_flags"]) == len(g["vertices"])
    assert sum(lp["exterior"] for lp in g["loops"]) == 1

    pairs = tmp_path / "pairs.csv"
    v = g["vertices"]
    pairs.write_text(f"xq,xr,yq,yr\n{v[0][0]},{v[0][1]},{v[-1][0]},{v[-1][1]}\n")
    dcsv = tmp_path / "d.csv"
    rc, _ = run_cli(["chemdist", "--gasket", str(gj), "--pairs", str(pairs), "--out", str(dcsv)])
    assert rc == 0
    rows = dcsv.read_text().splitlines()
    assert rows[1] == "x,y,d"
    rcsv = tmp_path / "r.csv"
    rc, _ = run_cli(["resistance", "--gasket", str(gj), "--pairs", str(pairs), "--out", str(rcsv)])
    assert rc == 0
    d_val = float(rows[2].split(",")[2])
    r_val = float(rcsv.read_text().splitlines()[2].split(",")[2])
    assert r_val <= d_val + 1e-9  # resistance below hop distance


def test_pathfun_cli(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("x,y\n0,0\n1,0\n")
    rc, out = run_cli(["pathfun", "--kind", "area", "--eps", "0.1", "--path", str(path)])
    assert rc == 0
    assert abs(float(out) - (0.2 + 0.01 * math.pi)) < 0.007
    rc, out = run_cli(
        ["pathfun", "--kind", "count", "--eps", "0.1", "--check-good",
         "--r", "0.5", "--trials", "30", "--seed", "2"]
    )
    assert rc == 0
    rep = json.loads(out)
    assert rep["ok"] and rep["witness_min"] >= rep["lower_bound"]


def test_verify_axioms_cli(tmp_path):
    out = tmp_path / "report.json"
    rc, text = run_cli(
        ["verify-axioms", "--scheme", "chemical", "--n", "24", "--trials", "6",
         "--seed", "1", "--out", str(out)]
    )
    assert rc == 0 and "PASS" in text
    rep = json.loads(out.read_text())
    assert rep["passed"] and set(rep["axioms"]) == {
        "symmetry", "triangle", "separability", "compatibility",
        "monotonicity_i", "monotonicity_ii", "series", "parallel",
    }


def test_verify_axioms_deterministic(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"rep{i}.json"
        rc, _ = run_cli(
            ["verify-axioms", "--scheme", "chemical", "--n", "24", "--trials", "5",
             "--seed", "7", "--out", str(out)]
        )
        assert rc == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_mnorm_csv_quantiles_nondecreasing(tmp_path):
    out = tmp_path / "m.csv"
    rc, summary = run_cli(
        ["mnorm", "--scheme", "chemical", "--sizes", "16,24,32", "--trials", "40",
         "--seed", "5", "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# command=mnorm")
    assert lines[1] == "n,q,value,ci_lo,ci_hi"
    per_n = {}
    for line in lines[2:]:
        n, q, v, lo, hi = line.split(",")
        per_n.setdefault(int(n), []).append((float(q), float(v)))
    for n, rows in per_n.items():
        vals = [v for _, v in sorted(rows)]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    info = json.loads(summary)
    assert "slope" in info and "verdict" in info


def test_ghf_cli(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(json.dumps({"n": 1, "dist": [0.0], "marked": [0], "values": [0.25]}))
    b.write_text(json.dumps({"n": 1, "dist": [0.0], "marked": [0], "values": [1.0]}))
    rc, out = run_cli(["ghf", "--a", str(a), "--b", str(b), "--exact"])
    assert rc == 0
    assert json.loads(out)["exact"] == pytest.approx(0.75)
    rc, out = run_cli(["ghf", "--a", str(a), "--b", str(b)])
    got = json.loads(out)
    assert got["lower"] <= 0.75 <= got["upper"]


def test_figure_empty_and_one_site(tmp_path):
    out = tmp_path / "empty.svg"
    rc, _ = run_cli(["figure", "--kind", "perc_coloring", "--out", str(out)])
    assert rc == 0
    assert out.read_text().startswith("<?xml")

    # one-site configuration drawn with distance coloring: one hexagon at
    # distance zero plus the root marker
    from conftest import make_config

    cfg_obj = make_config(4, [(0, 0)])
    bits = "".join("1" if b else "0" for b in cfg_obj.open_mask)
    cfg = tmp_path / "one.json"
    cfg.write_text(json.dumps({"n": 4, "p": 0.0, "seed": 0, "open": bits}))
    svg = tmp_path / "one.svg"
    rc, _ = run_cli(
        ["figure", "--kind", "perc_coloring", "--config", str(cfg), "--distance",
         "--out", str(svg)]
    )
    assert rc == 0
    text = svg.read_text()
    assert text.count("<polygon") == 1


def test_figure_scaling_plot_slope_annotation(tmp_path):
    out = tmp_path / "s.svg"
    rc, _ = run_cli(
        ["figure", "--kind", "scaling_plot", "--sizes", "32,64,128",
         "--values", "0.5,0.25,0.125", "--out", str(out)]
    )
    assert rc == 0
    text = out.read_text()
    assert "slope 1.000" in text


def test_figure_missing_input_fails(tmp_path):
    rc, _ = run_cli(
        ["figure", "--kind", "loops", "--config", str(tmp_path / "nope.json"),
         "--out", str(tmp_path / "x.svg")]
    )
    assert rc == 1


def test_sle_trace_deterministic(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"t{i}.csv"
        rc, _ = run_cli(
            ["sle-trace", "--kappa", "2.6667", "--t", "0.05", "--dt", "0.001",
             "--seed", "11", "--out", str(out)]
        )
        assert rc == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_sle_trace_rho_stops(tmp_path):
    out = tmp_path / "rho.csv"
    rc, text = run_cli(
        ["sle-trace", "--kappa", "3.0", "--rho=-2.5@0+", "--t", "1.0",
         "--dt", "0.001", "--seed", "5", "--out", str(out)]
    )
    assert rc == 0
    assert "continuation threshold" in text
