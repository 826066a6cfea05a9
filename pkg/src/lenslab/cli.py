"""Command-line front end. Every subcommand is a thin shell over the library
modules; the CLI only parses arguments and formats output (CSV, JSON, or a
minimal hand-rolled SVG).

Configuration precedence is flags > environment variables (LENSLAB_N,
LENSLAB_BINS, LENSLAB_ALPHA, LENSLAB_WORKERS, LENSLAB_SEED) > defaults.
Exit codes: 0 ok, 1 usage or domain error, 2 statistical-test failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analytic, montecarlo
from .geometry import LensSpace

_FMT = "%.17g"


def _g(x: float) -> str:
    return _FMT % x


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw is not None else default


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    return float(raw) if raw is not None else default


def _default_workers() -> int:
    return _env_int("LENSLAB_WORKERS", os.cpu_count() or 1)


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message)


def _parse_k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise ValueError(f"empty k range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return [int(text)]


def _parse_grid(text: str, count_default: int = 201) -> np.ndarray:
    """Grid spec 'start:stop[:count]' -> equally spaced points, inclusive."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"grid must be 'start:stop[:count]', got {text!r}")
    start, stop = float(parts[0]), float(parts[1])
    count = int(parts[2]) if len(parts) == 3 else count_default
    if count < 2:
        raise ValueError(f"grid needs at least 2 points, got {count}")
    return np.linspace(start, stop, count)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _csv(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines += [",".join(row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# SVG emission: fixed-viewport polyline/rect documents, no plotting dependency

_SVG_W, _SVG_H = 640, 480
_MARGIN = 50


def _svg_scale(xs, ys):
    x0, x1 = float(min(xs)), float(max(xs))
    y0, y1 = 0.0, float(max(ys)) * 1.05 or 1.0
    if x1 == x0:
        x1 = x0 + 1.0
    sx = (_SVG_W - 2 * _MARGIN) / (x1 - x0)
    sy = (_SVG_H - 2 * _MARGIN) / (y1 - y0)

    def to_px(x, y):
        return (_MARGIN + (x - x0) * sx, _SVG_H - _MARGIN - (y - y0) * sy)

    return to_px, (x0, x1, y0, y1)


def _svg_document(body: list[str], bounds) -> str:
    x0, x1, y0, y1 = bounds
    axes = [
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_SVG_W - 2 * _MARGIN}" '
        f'height="{_SVG_H - 2 * _MARGIN}" fill="none" stroke="black"/>',
        f'<text x="{_MARGIN}" y="{_SVG_H - _MARGIN + 20}" font-size="12">{_g(x0)}</text>',
        f'<text x="{_SVG_W - _MARGIN}" y="{_SVG_H - _MARGIN + 20}" font-size="12" '
        f'text-anchor="end">{_g(x1)}</text>',
        f'<text x="{_MARGIN - 5}" y="{_SVG_H - _MARGIN}" font-size="12" '
        f'text-anchor="end">{_g(y0)}</text>',
        f'<text x="{_MARGIN - 5}" y="{_MARGIN + 5}" font-size="12" '
        f'text-anchor="end">{_g(y1)}</text>',
    ]
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
        f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">\n'
        + "\n".join(axes + body)
        + "\n</svg>\n"
    )


def _svg_curve(xs, ys, extra_bars=None) -> str:
    """Polyline for (xs, ys); optional histogram bars (edges, densities) under it."""
    ymax_candidates = list(ys)
    if extra_bars is not None:
        ymax_candidates += list(extra_bars[1])
    to_px, bounds = _svg_scale(xs, ymax_candidates)
    body = []
    if extra_bars is not None:
        edges, dens = extra_bars
        for i, d in enumerate(dens):
            px0, py = to_px(edges[i], d)
            px1, pbase = to_px(edges[i + 1], 0.0)
            body.append(
                f'<rect x="{px0:.2f}" y="{py:.2f}" width="{px1 - px0:.2f}" '
                f'height="{pbase - py:.2f}" fill="steelblue" fill-opacity="0.6"/>'
            )
    pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in (to_px(x, y) for x, y in zip(xs, ys)))
    body.append(f'<polyline points="{pts}" fill="none" stroke="crimson" stroke-width="1.5"/>')
    return _svg_document(body, bounds)


def _svg_histogram(edges, dens, overlay=None) -> str:
    ys = list(dens) + (list(overlay[1]) if overlay else [])
    to_px, bounds = _svg_scale([edges[0], edges[-1]], ys or [1.0])
    body = []
    for i, d in enumerate(dens):
        px0, py = to_px(edges[i], d)
        px1, pbase = to_px(edges[i + 1], 0.0)
        body.append(
            f'<rect x="{px0:.2f}" y="{py:.2f}" width="{px1 - px0:.2f}" '
            f'height="{pbase - py:.2f}" fill="steelblue" fill-opacity="0.6"/>'
        )
    if overlay is not None:
        xs, ys2 = overlay
        pts = " ".join(
            f"{px:.2f},{py:.2f}" for px, py in (to_px(x, y) for x, y in zip(xs, ys2))
        )
        body.append(
            f'<polyline points="{pts}" fill="none" stroke="crimson" stroke-width="1.5"/>'
        )
    return _svg_document(body, bounds)


# ---------------------------------------------------------------------------
# Subcommands


def _moment_cell(n: int, k: int, method: str) -> analytic.MomentResult | None:
    if method == "finite_sum" and n == 2:
        return None
    if method in ("finite_sum", "recurrence") and k > analytic.K_MAX_ITERATIVE:
        return None
    return analytic.moment(n, k, method)


def cmd_moments(args) -> int:
    ks = _parse_k_range(args.k)
    if args.method == "all":
        header = ["n", "k", *analytic.METHODS, "max_discrepancy"]
        rows = []
        json_rows = []
        for k in ks:
            cells = {m: _moment_cell(args.n, k, m) for m in analytic.METHODS}
            values = [c.value for c in cells.values() if c is not None]
            spread = max(values) - min(values)
            rows.append(
                [str(args.n), str(k)]
                + ["" if cells[m] is None else _g(cells[m].value) for m in analytic.METHODS]
                + [_g(spread)]
            )
            json_rows.append(
                {
                    "n": args.n,
                    "k": k,
                    **{
                        m: (None if cells[m] is None else cells[m].value)
                        for m in analytic.METHODS
                    },
                    "max_discrepancy": spread,
                }
            )
    else:
        header = ["n", "k", "method", "value", "abs_error_bound"]
        rows = []
        json_rows = []
        for k in ks:
            res = analytic.moment(args.n, k, args.method)
            rows.append([str(args.n), str(k), res.method, _g(res.value), _g(res.abs_error_bound)])
            json_rows.append(
                {
                    "n": res.n,
                    "k": res.k,
                    "method": res.method,
                    "value": res.value,
                    "abs_error_bound": res.abs_error_bound,
                }
            )
    if args.format == "json":
        _write_text(args.output, _json_text(json_rows))
    else:
        _write_text(args.output, _csv(header, rows))
    return 0


_GRID_DEFAULTS = {
    "pdf": f"0:{math.pi / 2}",
    "cdf": f"0:{math.pi / 2}",
    "mgf": "-1:1",
    "quantile": "0:1",
}

_CURVE_FUNCS = {
    "pdf": analytic.pdf,
    "cdf": analytic.cdf,
    "mgf": analytic.mgf,
    "quantile": analytic.quantile,
}

_CURVE_XLABEL = {"pdf": "x", "cdf": "x", "mgf": "t", "quantile": "p"}


def cmd_distribution(args) -> int:
    xs = _parse_grid(args.grid or _GRID_DEFAULTS[args.which])
    fn = _CURVE_FUNCS[args.which]
    ys = [fn(args.n, float(x)) for x in xs]
    if args.format == "svg":
        bars = None
        if args.histogram:
            with open(args.histogram) as fh:
                h = json.load(fh)
            bars = (h["bin_edges"], _hist_densities(h))
        _write_text(args.output, _svg_curve(list(xs), ys, extra_bars=bars))
    elif args.format == "json":
        _write_text(
            args.output,
            _json_text(
                {
                    "n": args.n,
                    "which": args.which,
                    _CURVE_XLABEL[args.which]: [float(x) for x in xs],
                    "value": ys,
                }
            ),
        )
    else:
        x_label = _CURVE_XLABEL[args.which]
        rows = [[_g(x), _g(y)] for x, y in zip(xs, ys)]
        _write_text(args.output, _csv([x_label, args.which], rows))
    return 0


def cmd_ballvol(args) -> int:
    xs = _parse_grid(args.grid or f"0:{math.pi / 2}")
    vols = [analytic.ball_volume(args.n, float(r)) for r in xs]
    areas = [analytic.sphere_area(args.n, float(r)) for r in xs]
    if args.format == "json":
        _write_text(
            args.output,
            _json_text(
                {
                    "n": args.n,
                    "r": [float(r) for r in xs],
                    "ball_volume": vols,
                    "sphere_area": areas,
                }
            ),
        )
    else:
        rows = [[_g(r), _g(v), _g(a)] for r, v, a in zip(xs, vols, areas)]
        _write_text(args.output, _csv(["r", "ball_volume", "sphere_area"], rows))
    return 0


def _hist_densities(h: dict) -> list[float]:
    edges = h["bin_edges"]
    total = h["total"]
    return [
        c / (total * (edges[i + 1] - edges[i])) for i, c in enumerate(h["counts"])
    ]


def cmd_simulate(args) -> int:
    space = LensSpace(args.n, args.m)
    algorithm = (
        montecarlo.HOMOGENEOUS_FAST if args.algorithm == "fast" else montecarlo.GENERAL_ORBIT
    )
    if args.fixed_point is not None:
        samples = montecarlo.fixed_point_distances(
            space, args.fixed_point, args.count, args.seed, workers=args.workers
        )
        config = None
        mean = math.fsum(samples.tolist()) / samples.size
        if samples.size >= 2:
            dev = samples - mean
            std_error = math.sqrt(
                math.fsum((dev * dev).tolist()) / (samples.size - 1) / samples.size
            )
        else:
            std_error = math.nan
    else:
        config = montecarlo.SampleConfig(
            space, args.count, args.seed, workers=args.workers, algorithm=algorithm
        )
        samples, est = montecarlo.sample_distances(config)
        mean, std_error = est.mean, est.std_error
    hist = montecarlo.build_histogram(samples, args.bins, config)

    payload = {
        "space": {"n": space.n, "m": space.m},
        "sample_count": int(samples.size),
        "seed": args.seed,
        "workers": args.workers,
        "algorithm": algorithm,
        "fixed_point": args.fixed_point,
        "mean": mean,
        "std_error": std_error,
        "bin_edges": [float(e) for e in hist.bin_edges],
        "counts": [int(c) for c in hist.counts],
    }
    if args.format == "json":
        _write_text(args.output, _json_text(payload))
    else:
        header = ["bin_left", "bin_right", "count", "total", "seed", "mean", "std_error"]
        rows = [
            [
                _g(hist.bin_edges[i]),
                _g(hist.bin_edges[i + 1]),
                str(int(c)),
                str(int(samples.size)),
                str(args.seed),
                _g(mean),
                _g(std_error),
            ]
            for i, c in enumerate(hist.counts)
        ]
        _write_text(args.output, _csv(header, rows))
    if args.samples_output:
        _write_text(args.samples_output, "\n".join(_g(x) for x in samples.tolist()) + "\n")
    if args.svg_output:
        overlay = None
        if space.homogeneous() and space.n >= 2 and args.fixed_point is None:
            xs = np.linspace(0.0, math.pi / 2, 257)
            overlay = (list(xs), [analytic.pdf(space.n, float(x)) for x in xs])
        _write_text(
            args.svg_output,
            _svg_histogram(list(hist.bin_edges), list(hist.densities()), overlay),
        )
    return 0


def cmd_compare(args) -> int:
    space = LensSpace(args.n, 1)
    note = ""
    if args.samples:
        with open(args.samples) as fh:
            samples = np.array([float(line) for line in fh if line.strip()])
        result = montecarlo.ks_statistic(samples, space, alpha=args.alpha)
        d_report = result.statistic
    elif args.histogram:
        # Binned data only brackets the exact statistic: the ECDF is known at
        # the bin edges, and within a bin it can wander by at most the bin
        # mass. Pass/fail is decided on the edge statistic.
        with open(args.histogram) as fh:
            h = json.load(fh)
        edges = np.array(h["bin_edges"], dtype=np.float64)
        counts = np.array(h["counts"], dtype=np.float64)
        total = float(h["total"]) if "total" in h else counts.sum()
        ecdf = np.concatenate([[0.0], np.cumsum(counts) / total])
        f = analytic.cdf_grid(args.n, np.minimum(edges, math.pi / 2))
        d_edges = float(np.max(np.abs(ecdf - f)))
        d_upper = d_edges + float(np.max(counts / total))
        threshold = montecarlo.kolmogorov_critical(args.alpha) / math.sqrt(total)
        result = montecarlo.KsResult(
            d_edges, threshold, args.alpha, int(total), d_edges <= threshold
        )
        d_report = d_edges
        if result.passed and d_upper > threshold:
            note = (
                f"warning: binned statistic bracket [{_g(d_edges)}, {_g(d_upper)}] "
                f"straddles the threshold; rerun with raw samples\n"
            )
    else:
        raise ValueError("compare needs --samples or --histogram")

    payload = {
        "n": args.n,
        "alpha": result.alpha,
        "sample_count": result.sample_count,
        "statistic": d_report,
        "threshold": result.threshold,
        "passed": result.passed,
    }
    if args.format == "json":
        _write_text(args.output, _json_text(payload))
    else:
        rows = [[str(args.n), _g(result.alpha), str(result.sample_count),
                 _g(d_report), _g(result.threshold), str(result.passed).lower()]]
        _write_text(
            args.output,
            _csv(["n", "alpha", "sample_count", "statistic", "threshold", "passed"], rows),
        )
    if note:
        sys.stderr.write(note)
    return 0 if result.passed else 2


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lenslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="moments of distance on L(n;1)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", required=True, help="single k or inclusive range 'a..b'")
    p.add_argument(
        "--method",
        default="closed_form",
        choices=list(analytic.METHODS) + ["all"],
    )
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("distribution", help="pdf / cdf / mgf / quantile curves")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--which", required=True, choices=list(_CURVE_FUNCS))
    p.add_argument("--grid", default=None, help="grid 'start:stop[:count]'")
    p.add_argument("--format", default="csv", choices=["csv", "json", "svg"])
    p.add_argument("--histogram", default=None, help="histogram JSON to overlay (svg)")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("ballvol", help="ball volume and sphere area on L(n;1)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", default=None, help="radius grid 'start:stop[:count]'")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_ballvol)

    p = sub.add_parser("simulate", help="Monte Carlo distance sampling on L(n;m)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--count", "--N", dest="count", type=int,
                   default=_env_int("LENSLAB_N", 100_000))
    p.add_argument("--seed", type=int, default=_env_int("LENSLAB_SEED", 0))
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--algorithm", default="general", choices=["general", "fast"])
    p.add_argument("--bins", type=int, default=_env_int("LENSLAB_BINS", 100))
    p.add_argument("--fixed-point", type=float, default=None, metavar="PHI",
                   help="sample distances to the fixed point at angle PHI instead of pairs")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--output", default=None)
    p.add_argument("--samples-output", default=None, help="write raw samples, one per line")
    p.add_argument("--svg-output", default=None, help="write an SVG histogram (pdf overlay)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="KS test of samples against the analytic cdf")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=_env_float("LENSLAB_ALPHA", 0.01))
    p.add_argument("--samples", default=None, help="raw samples file, one per line")
    p.add_argument("--histogram", default=None, help="histogram JSON from simulate")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            sys.stderr.write(exc.code + "\n")
            return 1
        return exc.code if exc.code is not None else 0
    except (ValueError, OSError, RuntimeError, OverflowError) as exc:
        sys.stderr.write(f"lenslab: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
