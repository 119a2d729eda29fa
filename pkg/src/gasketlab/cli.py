"""Command-line interface.

One master seed drives every stochastic subcommand; subsidiary streams
derive from it through the keyed splitmix64 chain in the rng module
(derive_seed(master, label, index)), so re-running any subcommand with
the same arguments reproduces its outputs byte for byte.  Exit codes:
0 success, 1 runtime or acceptance failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__

_PROV = "# command={cmd} version={version} seed={seed}"


def _float12(x) -> float:
    return float(f"{x:.12g}")


def _write_csv(path, cmd, seed, header, rows):
    lines = [_PROV.format(cmd=cmd, version=__version__, seed=seed), ",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _dump_json(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=1)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# -- subcommand implementations -------------------------------------------


def cmd_exponents(args) -> int:
    from .exponents import make_parameters

    p = make_parameters(args.kappa)
    _dump_json({k: _float12(v) for k, v in p.as_dict().items()})
    return 0


def _parse_rho(spec: str):
    w, _, pos = spec.partition("@")
    if not pos:
        raise argparse.ArgumentTypeError("force point must look like weight@position")
    return pos, float(w)


def cmd_sle_trace(args) -> int:
    from . import loewner as lw

    force = [_parse_rho(s) for s in args.rho or []]
    kind = "zero" if args.zero else ("sle_rho" if force else "sle")
    driver = lw.sample_driver(
        kind, args.t, args.dt, kappa=None if args.zero else args.kappa,
        force_points=force, seed=args.seed,
    )
    tr = lw.trace(driver, stride=args.stride)
    rows = [(t, z.real, z.imag) for t, z in zip(tr.times, tr.points)]
    _write_csv(args.out, "sle-trace", args.seed, ("t", "re", "im"), rows)
    if driver.stopped:
        print(f"continuation threshold reached at t={driver.times[-1]:.6g}")
    return 0


def cmd_sample_perc(args) -> int:
    from . import percolation as perc
    from . import svgfig

    cfg = perc.sample(args.n, args.p, args.seed)
    bits = "".join("1" if b else "0" for b in cfg.open_mask)
    _dump_json({"n": args.n, "p": args.p, "seed": args.seed, "open": bits}, args.out)
    if args.svg:
        cs = perc.decompose(cfg)
        text = svgfig.percolation_svg(cs, coloring=args.coloring, with_loops=args.loops)
        with open(args.svg, "w") as fh:
            fh.write(text)
    return 0


def _load_config(path):
    from . import percolation as perc

    with open(path) as fh:
        data = json.load(fh)
    lat = perc.TriDisk(int(data["n"]))
    bits = data["open"]
    if len(bits) != lat.site_count:
        raise ValueError("open bitstring length does not match the lattice")
    grid = np.zeros(lat.in_disk.shape, dtype=bool)
    grid.ravel()[lat.site_flats] = np.frombuffer(bits.encode(), dtype=np.uint8) == ord("1")
    return perc.PercolationConfig(
        lattice=lat, p=float(data.get("p", 0.5)), seed=int(data.get("seed", 0)), open_grid=grid
    )


def cmd_gasket(args) -> int:
    from . import percolation as perc
    from .gasket import build_gasket

    cfg = _load_config(args.config)
    cs = perc.decompose(cfg)
    g = build_gasket(cs, args.cluster)
    edges = sorted(
        (v, w) for v in range(g.n_vertices) for w in g.adj[v] if v < w
    )
    loops = []
    for lid in sorted(int(x) for x in g.loop_ids):
        sel = np.flatnonzero(cs.side_loop == lid)
        sel = sel[np.argsort(cs.side_pos[sel])]
        qr = cs.lattice.flat_to_qr(cs.side_cell[sel])
        loops.append(
            {
                "id": lid,
                "exterior": bool(cs.loop_is_exterior[lid]),
                "sides": [[int(q), int(r), int(k)] for (q, r), k in zip(qr, cs.side_dir[sel])],
            }
        )
    _dump_json(
        {
            "n": cfg.lattice.n,
            "cluster": args.cluster,
            "vertices": [[int(q), int(r)] for q, r in g.qr],
            "edges": [[int(a), int(b)] for a, b in edges],
            "cut_vertices": sorted(int(v) for v in g.cut_vertices),
            "thin_flags": [bool(t) for t in g.thin_flags],
            "loops": loops,
        },
        args.out,
    )
    return 0


class GasketView:
    """Gasket protocol reconstructed from a gasket JSON file."""

    def __init__(self, data):
        from .gasket import Region

        self.n = int(data["n"])
        qr = np.asarray(data["vertices"], dtype=int)
        self.qr = qr
        self.n_vertices = qr.shape[0]
        self.coords = np.stack(
            [qr[:, 0] + qr[:, 1] / 2.0, qr[:, 1] * np.sqrt(3) / 2.0], axis=1
        )
        adj = [[] for _ in range(self.n_vertices)]
        for a, b in data["edges"]:
            adj[a].append(b)
            adj[b].append(a)
        self.adj = [tuple(sorted(x)) for x in adj]
        self._index = {(int(q), int(r)): i for i, (q, r) in enumerate(qr)}
        self._region = Region(frozenset(range(self.n_vertices)), (), ())

    def region_all(self):
        return self._region

    def vertex_id(self, q, r):
        return self._index[(q, r)]

    def vertex_qr(self, v):
        q, r = self.qr[v]
        return int(q), int(r)

    def scaled_hops(self, hops):
        return hops / self.n


def _pair_rows(args, dist_fn):
    with open(args.gasket) as fh:
        g = GasketView(json.load(fh))
    U = g.region_all()
    rows = []
    with open(args.pairs) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("xq"):
                continue
            xq, xr, yq, yr = (int(v) for v in line.split(","))
            x = g.vertex_id(xq, xr)
            y = g.vertex_id(yq, yr)
            d = dist_fn(g, U, x, y)
            rows.append((f"{xq}:{xr}", f"{yq}:{yr}", float(d)))
    return rows


def cmd_chemdist(args) -> int:
    from .metrics import chemical_distance

    rows = _pair_rows(args, chemical_distance)
    _write_csv(args.out, "chemdist", "-", ("x", "y", "d"), rows)
    return 0


def cmd_resistance(args) -> int:
    from .metrics import effective_resistance

    rows = _pair_rows(args, effective_resistance)
    _write_csv(args.out, "resistance", "-", ("x", "y", "d"), rows)
    return 0


def cmd_pathfun(args) -> int:
    from . import pathfun as pf

    kind = "neighborhood_area" if args.kind == "area" else "eps_count"
    f = pf.PathFunctional(kind, args.eps)
    if args.check_good:
        if args.seed is None:
            print("--check-good requires --seed", file=sys.stderr)
            return 2
        rep = pf.good_scheme_check(f, args.r, trials=args.trials, seed=args.seed)
        _dump_json(
            {
                "ok": rep.ok,
                "witness_min": rep.witness_min,
                "lower_bound": rep.lower_bound,
                "paths": rep.n_paths,
            }
        )
        return 0 if rep.ok else 1
    pts = []
    with open(args.path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("x"):
                continue
            xs, ys = line.split(",")
            pts.append((float(xs), float(ys)))
    value = pf.evaluate(f, pf.PlanarPath(pts))
    print(f"{value:.12g}")
    return 0


def cmd_verify_axioms(args) -> int:
    from . import axioms as ax
    from . import pathfun as pf

    scheme = args.scheme
    if scheme in ("area", "count"):
        kind = "neighborhood_area" if scheme == "area" else "eps_count"
        scheme = pf.PathFunctional(kind, args.eps)
    rep = ax.run_harness(
        scheme, n=args.n, trials=args.trials, seed=args.seed, with_ks=args.ks,
        ks_trials=args.ks_trials,
    )
    _dump_json(rep.as_dict(), args.out)
    print("axioms: " + ("PASS" if rep.passed else "FAIL"))
    return 0 if rep.passed else 1


def cmd_mnorm(args) -> int:
    from . import normalization as nz

    sizes = tuple(int(s) for s in args.sizes.split(","))
    fit = nz.scaling_fit(args.scheme, sizes, args.trials, args.seed)
    rows = []
    for est in fit.estimates:
        rows.extend(est.as_rows())
    _write_csv(args.out, "mnorm", args.seed, ("n", "q", "value", "ci_lo", "ci_hi"), rows)
    comp = nz.quantile_comparability(fit.estimates)
    _dump_json(
        {
            "scheme": args.scheme,
            "slope": fit.slope,
            "window": list(fit.window),
            "verdict": bool(fit.verdict),
            "quantile_ratio_verdict": bool(comp.verdict),
            "samples": [e.sample_count for e in fit.estimates],
        }
    )
    return 0


def cmd_ghf(args) -> int:
    from . import ghf

    with open(args.a) as fh:
        A = ghf.MarkedMetricSpace.from_dict(json.load(fh))
    with open(args.b) as fh:
        B = ghf.MarkedMetricSpace.from_dict(json.load(fh))
    if args.exact:
        value = ghf.ghf_distance_exact(A, B)
        _dump_json({"exact": value, "convention": "correspondence"})
    else:
        lo, hi = ghf.ghf_distance_bounds(A, B)
        _dump_json({"lower": lo, "upper": hi, "convention": "correspondence"})
    return 0


def cmd_figure(args) -> int:
    from . import percolation as perc
    from . import svgfig

    if args.kind in ("perc_coloring", "loops"):
        if not args.config:
            text = svgfig.empty_canvas()
        else:
            cfg = _load_config(args.config)
            cs = perc.decompose(cfg)
            coloring = "distance" if args.kind == "perc_coloring" and args.distance else args.coloring
            text = svgfig.percolation_svg(
                cs, coloring=coloring, with_loops=args.kind == "loops"
            )
    else:  # scaling_plot
        sizes = [int(s) for s in args.sizes.split(",")]
        values = [float(v) for v in args.values.split(",")]
        x = np.log(1.0 / np.asarray(sizes, float))
        y = np.log(values)
        slope, intercept = np.polyfit(x, y, 1)
        text = svgfig.scaling_plot_svg(sizes, values, float(slope), float(intercept))
    with open(args.out, "w") as fh:
        fh.write(text)
    return 0


def cmd_accept(args) -> int:
    from . import acceptance

    only = set(int(v) for v in args.only.split(",")) if args.only else None
    results = acceptance.run_all(quick=args.quick, only=only)
    for r in results:
        print(r.line())
        if args.verbose:
            print("   ", json.dumps(r.details, sort_keys=True, default=str))
    ok = all(r.passed for r in results)
    print("acceptance: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


# -- parser wiring ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gasketlab", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", help="closed-form constants for a kappa")
    p.add_argument("--kappa", type=float, required=True)
    p.set_defaults(fn=cmd_exponents)

    p = sub.add_parser("sle-trace", help="sample a driver and compute its trace")
    p.add_argument("--kappa", type=float)
    p.add_argument("--rho", action="append", metavar="W@POS")
    p.add_argument("--zero", action="store_true", help="deterministic zero driver")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sle_trace)

    p = sub.add_parser("sample-perc", help="sample a percolation configuration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--coloring", choices=("cluster", "open", "distance"), default="cluster")
    p.add_argument("--loops", action="store_true")
    p.set_defaults(fn=cmd_sample_perc)

    p = sub.add_parser("gasket", help="build the gasket of one cluster")
    p.add_argument("--config", required=True)
    p.add_argument("--cluster", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gasket)

    for name, fn in (("chemdist", cmd_chemdist), ("resistance", cmd_resistance)):
        p = sub.add_parser(name, help=f"{name} over marked pairs")
        p.add_argument("--gasket", required=True)
        p.add_argument("--region", default="all", choices=("all",))
        p.add_argument("--pairs", required=True)
        p.add_argument("--out", required=True)
        p.set_defaults(fn=fn)

    p = sub.add_parser("pathfun", help="evaluate a path functional")
    p.add_argument("--kind", choices=("area", "count"), required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--path")
    p.add_argument("--check-good", action="store_true")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=cmd_pathfun)

    p = sub.add_parser("verify-axioms", help="run the axiom harness")
    p.add_argument("--scheme", choices=("chemical", "resistance", "area", "count"), required=True)
    p.add_argument("--eps", type=float, default=2.0, help="spacing scale, lattice units")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ks", action="store_true", help="add the statistical window check")
    p.add_argument("--ks-trials", type=int, default=2000)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify_axioms)

    p = sub.add_parser("mnorm", help="normalization medians and scaling fit")
    p.add_argument("--scheme", choices=("chemical", "chemical_scaled", "resistance", "count", "area"), required=True)
    p.add_argument("--sizes", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_mnorm)

    p = sub.add_parser("ghf", help="distance between two marked metric spaces")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(fn=cmd_ghf)

    p = sub.add_parser("figure", help="emit an SVG figure")
    p.add_argument("--kind", choices=("perc_coloring", "loops", "scaling_plot"), required=True)
    p.add_argument("--config")
    p.add_argument("--coloring", choices=("cluster", "open", "distance"), default="cluster")
    p.add_argument("--distance", action="store_true")
    p.add_argument("--sizes")
    p.add_argument("--values")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_figure)

    p = sub.add_parser("accept", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true", help="reduced Monte Carlo budgets")
    p.add_argument("--only", help="comma-separated criterion indices")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=cmd_accept)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
