"""Command line front end.

Subcommands::

    hypolo gen-toy --seed 7 --out toy.tsv
    hypolo detect --input toy.tsv --method hloop --k 15 --out scores.csv
    hypolo eval --input toy.tsv --sweep-k 3..20 --method hloop,hlof --out auc.csv --svg auc.svg
    hypolo eval --input toy.tsv --scores scores.csv --out auc.csv
    hypolo plot --input toy.tsv --scores scores.csv --out toy.svg
    hypolo replay scores.csv.manifest.json

Every output file ``F`` is accompanied by ``F.manifest.json``. Exit status is 0
on success, 2 for usage or validation errors and 1 for anything else.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import ToySpec, format_embedding, generate_toy, load_embedding
from .detectors import DEFAULT_PHI, detect
from .errors import HypoloError, MismatchedIds
from .evaluation import METHOD_METRIC, auc_roc, sweep_k

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2
SCORE_RADIUS = 0.12
LOOP_COLUMNS = ("id", "score", "sigma_r", "lambda", "pdist")
LOF_COLUMNS = ("id", "score", "lrd")


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("HYPOLO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"HYPOLO_THREADS must be an integer, got {env!r}") from None
    return 1


def _write_text(path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_manifest(out, argv, subcommand, config, inputs, outputs, seed, started):
    manifest = {
        "tool": "hypolo",
        "version": __version__,
        "subcommand": subcommand,
        "argv": list(argv),
        "config": config,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "seed": seed,
        "duration_s": round(time.perf_counter() - started, 6),
    }
    _write_text(f"{out}.manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_input(path):
    if not Path(path).is_file():
        raise UsageError(f"input file not found: {path}")
    return load_embedding(path)


# -- scores CSV ----------------------------------------------------------------

def format_scores(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.sigma_r is not None:
        w.writerow(LOOP_COLUMNS)
        for i in range(len(report)):
            w.writerow([i, _fmt(report.scores[i]), _fmt(report.sigma_r[i]),
                        _fmt(report.lam[i]), _fmt(report.pdist[i])])
    else:
        w.writerow(LOF_COLUMNS)
        for i in range(len(report)):
            w.writerow([i, _fmt(report.scores[i]), _fmt(report.lrd[i])])
    return buf.getvalue()


def read_scores(path, n: int) -> np.ndarray:
    """Scores from a scores CSV, checked against ids ``0..n-1``."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "id" not in rows[0] or "score" not in rows[0]:
        raise MismatchedIds(f"{path}: no score rows")
    try:
        pairs = sorted((int(r["id"]), float(r["score"])) for r in rows)
    except (TypeError, ValueError) as exc:
        raise MismatchedIds(f"{path}: malformed row ({exc})") from None
    ids = [p[0] for p in pairs]
    if ids != list(range(n)):
        raise MismatchedIds(f"{path}: score ids do not match the {n} dataset ids")
    return np.array([p[1] for p in pairs])


# -- SVG -----------------------------------------------------------------------

def _n(x) -> str:
    return format(float(x), ".6f")


def render_disk_svg(data, scores, size: int = 600) -> str:
    """Unit disk, one marker per point and a score circle of radius ``0.12 * score``.

    Zero scores draw no circle; circles are clipped to the viewport.
    """
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="-1.1 -1.1 2.2 2.2">',
        '<defs><clipPath id="view"><rect x="-1.1" y="-1.1" width="2.2" height="2.2"/></clipPath></defs>',
        '<g transform="scale(1,-1)" clip-path="url(#view)">',
        '<circle class="disk" cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.005"/>',
    ]
    outlier = data.outlier_mask if data.labels is not None and "" not in data.labels \
        else np.zeros(len(data), bool)
    for (x, y), out in zip(data.points, outlier):
        colour = "crimson" if out else "steelblue"
        lines.append(f'<circle class="point" cx="{_n(x)}" cy="{_n(y)}" r="0.008" fill="{colour}"/>')
    for (x, y), s in zip(data.points, scores):
        r = SCORE_RADIUS * float(s) if math.isfinite(s) else 4.0
        r = min(r, 4.0)
        if r <= 0:
            continue
        lines.append(f'<circle class="score" cx="{_n(x)}" cy="{_n(y)}" r="{_n(r)}" '
                     'fill="none" stroke="darkorange" stroke-width="0.004"/>')
    lines += ["</g>", "</svg>"]
    return "\n".join(lines) + "\n"


def render_auc_svg(curves: dict, width: int = 640, height: int = 400) -> str:
    """Line chart of AUC against k, one polyline per method."""
    colours = ["crimson", "steelblue", "seagreen", "darkorange"]
    left, right, top, bottom = 60, 20, 20, 50
    ks = sorted({k for pts in curves.values() for k, _ in pts})
    kmin, kmax = ks[0], ks[-1]
    span = max(kmax - kmin, 1)

    def px(k):
        return left + (k - kmin) / span * (width - left - right)

    def py(a):
        return top + (1.0 - a) * (height - top - bottom)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{left}" y1="{py(0)}" x2="{width - right}" y2="{py(0)}" stroke="black"/>',
           f'<line x1="{left}" y1="{py(0)}" x2="{left}" y2="{py(1)}" stroke="black"/>']
    for a in (0.0, 0.25, 0.5, 0.75, 1.0):
        out.append(f'<text x="{left - 8}" y="{py(a) + 4:.1f}" font-size="11" text-anchor="end">{a:.2f}</text>')
    for k in ks:
        out.append(f'<text x="{px(k):.1f}" y="{height - bottom + 16}" font-size="11" text-anchor="middle">{k}</text>')
    out.append(f'<text x="{width / 2:.0f}" y="{height - 10}" font-size="12" text-anchor="middle">k</text>')
    for i, (method, pts) in enumerate(sorted(curves.items())):
        colour = colours[i % len(colours)]
        coords = " ".join(f"{px(k):.2f},{py(a):.2f}" for k, a in pts)
        out.append(f'<polyline class="curve" points="{coords}" fill="none" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{width - right - 4}" y="{top + 14 * (i + 1)}" font-size="12" '
                   f'text-anchor="end" fill="{colour}">{method}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- subcommands ---------------------------------------------------------------

def cmd_gen_toy(args, argv, started):
    spec = ToySpec(seed=args.seed, points_per_cluster=args.points_per_cluster,
                   spread=args.spread)
    data = generate_toy(spec)
    _write_text(args.out, format_embedding(data))
    config = {"seed": spec.seed, "points_per_cluster": spec.points_per_cluster,
              "spread": spec.spread, "centers": [list(c) for c in spec.centers],
              "outliers": [list(o) for o in spec.outliers]}
    _write_manifest(args.out, argv, "gen-toy", config, [], [args.out], spec.seed, started)


def cmd_detect(args, argv, started):
    forced = METHOD_METRIC[args.method]
    if args.metric is not None and args.metric != forced:
        raise UsageError(f"method {args.method} runs in the {forced} metric, not {args.metric}")
    phi = args.phi
    if args.method in ("hlof", "lof"):
        if phi is not None:
            raise UsageError(f"--phi does not apply to {args.method}")
    elif phi is None:
        phi = DEFAULT_PHI
    data = _load_input(args.input)
    report = detect(data, args.method, args.k, phi, strategy=args.strategy, threads=_threads(args))
    _write_text(args.out, format_scores(report))
    config = {"method": args.method, "k": args.k, "phi": phi, "metric": forced,
              "strategy": args.strategy}
    _write_manifest(args.out, argv, "detect", config, [args.input], [args.out], None, started)


def _parse_sweep(text):
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            a, b = int(a), int(b)
        else:
            a = b = int(text)
    except ValueError:
        raise UsageError(f"--sweep-k expects A..B, got {text!r}") from None
    if a < 1 or b < a:
        raise UsageError(f"--sweep-k range {text!r} is empty or starts below 1")
    return list(range(a, b + 1))


def cmd_eval(args, argv, started):
    data = _load_input(args.input)
    labels = data.outlier_mask
    outputs = [args.out]
    if args.scores is not None:
        if args.sweep_k is not None:
            raise UsageError("use either --scores or --sweep-k, not both")
        res = auc_roc(read_scores(args.scores, len(data)), labels)
        _write_text(args.out, f"auc,n_pos,n_neg\n{_fmt(res.auc)},{res.n_pos},{res.n_neg}\n")
        config = {"mode": "scores"}
        inputs = [args.input, args.scores]
    else:
        if args.sweep_k is None:
            raise UsageError("eval needs --scores or --sweep-k")
        ks = _parse_sweep(args.sweep_k)
        methods = [m.strip() for m in args.method.split(",") if m.strip()]
        for m in methods:
            if m not in METHOD_METRIC:
                raise UsageError(f"unknown method {m!r}")
        phi = DEFAULT_PHI if args.phi is None else args.phi
        threads = _threads(args)
        curves = {}
        for m in methods:
            curves[m] = sweep_k(data, m, ks, phi if m in ("hloop", "loop") else None, threads=threads)
        rows = ["method,k,auc"] + [f"{m},{k},{_fmt(a)}" for m in methods for k, a in curves[m]]
        _write_text(args.out, "\n".join(rows) + "\n")
        if args.svg:
            _write_text(args.svg, render_auc_svg(curves))
            outputs.append(args.svg)
        config = {"mode": "sweep", "methods": methods, "k": [ks[0], ks[-1]], "phi": phi}
        inputs = [args.input]
    _write_manifest(args.out, argv, "eval", config, inputs, outputs, None, started)


def cmd_plot(args, argv, started):
    data = _load_input(args.input)
    scores = read_scores(args.scores, len(data))
    _write_text(args.out, render_disk_svg(data, scores))
    _write_manifest(args.out, argv, "plot", {"score_radius": SCORE_RADIUS},
                    [args.input, args.scores], [args.out], None, started)


def cmd_replay(args, argv, started):
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        replay_argv = manifest["argv"]
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
    if replay_argv and replay_argv[0] == "replay":
        raise UsageError("refusing to replay a replay")
    code = main(replay_argv)
    if code:
        raise SystemExit(code)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypolo", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"hypolo {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def threads_flag(sp):
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $HYPOLO_THREADS or 1)")

    g = sub.add_parser("gen-toy", help="write the two-cluster toy dataset")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--points-per-cluster", type=int, default=40)
    g.add_argument("--spread", type=float, default=ToySpec.spread)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_toy)

    d = sub.add_parser("detect", help="score every point of an embedding")
    d.add_argument("--input", required=True)
    d.add_argument("--method", choices=sorted(METHOD_METRIC), default="hloop")
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--phi", type=float, default=None)
    d.add_argument("--metric", choices=("hyperbolic", "euclidean"), default=None)
    d.add_argument("--strategy", choices=("brute", "vptree"), default="brute")
    d.add_argument("--out", required=True)
    threads_flag(d)
    d.set_defaults(func=cmd_detect)

    e = sub.add_parser("eval", help="AUC of a scores file, or an AUC-vs-k sweep")
    e.add_argument("--input", "--labels", dest="input", required=True)
    e.add_argument("--scores", default=None)
    e.add_argument("--sweep-k", default=None, metavar="A..B")
    e.add_argument("--method", default="hloop", help="comma-separated methods for --sweep-k")
    e.add_argument("--phi", type=float, default=None)
    e.add_argument("--out", required=True)
    e.add_argument("--svg", default=None, help="also draw AUC against k")
    threads_flag(e)
    e.set_defaults(func=cmd_eval)

    pl = sub.add_parser("plot", help="draw points and score circles as SVG")
    pl.add_argument("--input", required=True)
    pl.add_argument("--scores", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest")
    r.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("hypolo: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    started = time.perf_counter()
    try:
        args.func(args, argv, started)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, HypoloError, ValueError) as exc:
        print(f"hypolo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hypolo: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"hypolo: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
