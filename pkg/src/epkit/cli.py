"""Command-line interface.

Configuration is resolved in layers: command defaults, then a JSON config
file (--config), then a named preset (--preset), then explicit flags;
later layers win. Every JSON artifact embeds the fully resolved config,
and all outputs are deterministic for a fixed config (repeat runs produce
byte-identical files).

Subcommands: toy-sweep, find-eps, surface, encircle, beta-scan, project,
ingest-classify, oracle. Errors exit nonzero after printing a
machine-readable JSON description to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as io_mod
from .crossing import ClassReport, beta_transition, classify, overlap_peaks, sweep_toy
from .epfind import grid_ep_search, toy_ep_roots
from .sphere import PlanePoint, lift_cut
from .surface import (AnalyticOracle, CircleLoop, PolylineLoop, build_surface,
                      encircle)
from .toymodel import PRESETS, ToyParams, eigenpair_sampler

CAVITY_EP1 = (2.6257, 0.6001)
CAVITY_EP2 = (2.9036, 0.5372)

_PARAM_KEYS = ("g_c", "beta", "gamma1", "gamma2", "lambda_mode")

_DEFAULTS = {
    "toy-sweep": {
        "params": dict(PRESETS["class1"]["params"]),
        "alpha_range": [0.2, 1.0],
        "points": 801,
    },
    "find-eps": {
        "params": dict(PRESETS["double-ep"]["params"]),
        "alpha_bracket": [0.3, 0.8],
        "window": None,  # set to [a0, a1, b0, b1] for the 2-D grid search
        "grid": "48x48",
        "tolerance": 1e-10,
    },
    "surface": {
        "params": dict(PRESETS["double-ep"]["params"]),
        "window": [0.3, 0.8, 0.9, 1.0],
        "grid": "256x64",
        "delta_mode": "delta",
    },
    "encircle": {
        "params": dict(PRESETS["double-ep"]["params"]),
        "loop": {"kind": "rect", "window": [0.40, 0.68, 0.95, 1.05]},
        "steps": 256,
    },
    "beta-scan": {
        "params": dict(PRESETS["transition"]["params"]),
        "beta_window": [0.7, 0.85],
        "alpha_range": [0.2, 1.0],
        "points": 801,
        "tolerance": 1e-3,
    },
    "project": {"points": []},
    "ingest-classify": {"modes": None, "metadata": {}},
    "oracle": {
        "kind": "two-point",
        "z1": list(CAVITY_EP1),
        "z2": list(CAVITY_EP2),
        "z0": [0.0, 0.0],
        "order": 2,
        "mode": "surface",
        "window": [2.5, 3.0, 0.45, 0.7],
        "grid": "256x64",
        "delta_mode": "delta",
        "loop": {"kind": "circle", "center": list(CAVITY_EP1), "radius": 0.05},
        "steps": 256,
    },
}


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--preset", choices=sorted(PRESETS),
                     help="named toy-model parameter set")
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker threads for grid sampling")
    sub.add_argument("--tolerance", type=float, default=None,
                     help="command tolerance (EP residual, beta_c step, ...)")
    sub.add_argument("--grid", default=None, metavar="N1xN2",
                     help="grid resolution, e.g. 256x64")


def _add_params(sub):
    sub.add_argument("--g-c", type=float, default=None, dest="g_c")
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--gamma1", type=float, default=None)
    sub.add_argument("--gamma2", type=float, default=None)
    sub.add_argument("--lambda-mode", default=None, dest="lambda_mode",
                     choices=["full-complex-difference", "real-part-difference"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epkit",
        description="Exceptional-point analysis of 2x2 non-Hermitian Hamiltonians",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sweep = subs.add_parser("toy-sweep", help="1-D scan: trajectory CSV + class report")
    _add_common(sweep)
    _add_params(sweep)
    sweep.add_argument("--alpha-range", type=float, nargs=2, default=None)
    sweep.add_argument("--points", type=int, default=None)

    find = subs.add_parser("find-eps", help="EP roots of the toy splitting")
    _add_common(find)
    _add_params(find)
    find.add_argument("--alpha-bracket", type=float, nargs=2, default=None)
    find.add_argument("--window", type=float, nargs=4, default=None,
                      metavar=("P1LO", "P1HI", "P2LO", "P2HI"),
                      help="run the generic 2-D grid search over (alpha, beta)")

    surf = subs.add_parser("surface", help="sheet grid with branch cuts")
    _add_common(surf)
    _add_params(surf)
    surf.add_argument("--window", type=float, nargs=4, default=None,
                      metavar=("P1LO", "P1HI", "P2LO", "P2HI"))
    surf.add_argument("--delta-mode", default=None, choices=["raw", "delta"],
                      dest="delta_mode")

    enc = subs.add_parser("encircle", help="loop monodromy of the toy model")
    _add_common(enc)
    _add_params(enc)
    enc.add_argument("--circle", type=float, nargs=3, default=None,
                     metavar=("CX", "CY", "R"))
    enc.add_argument("--rect", type=float, nargs=4, default=None,
                     metavar=("P1LO", "P1HI", "P2LO", "P2HI"))
    enc.add_argument("--steps", type=int, default=None)

    bscan = subs.add_parser("beta-scan", help="LZ-to-WB transition coefficient")
    _add_common(bscan)
    _add_params(bscan)
    bscan.add_argument("--beta-window", type=float, nargs=2, default=None)
    bscan.add_argument("--alpha-range", type=float, nargs=2, default=None)
    bscan.add_argument("--points", type=int, default=None)

    proj = subs.add_parser("project", help="lift plane points/curves to the sphere")
    _add_common(proj)
    proj.add_argument("--input", default=None,
                      help="CSV with header n,chi (inf rows allowed)")
    proj.add_argument("--point", type=float, nargs=2, action="append",
                      default=None, metavar=("N", "CHI"))

    ing = subs.add_parser("ingest-classify", help="classify an external dataset")
    _add_common(ing)
    ing.add_argument("--input", required=True)
    ing.add_argument("--modes", nargs=2, default=None)
    ing.add_argument("--meta", action="append", default=None, metavar="KEY=VALUE")

    orc = subs.add_parser("oracle", help="analytic-oracle surface or loop")
    _add_common(orc)
    orc.add_argument("--kind", default=None,
                     choices=["two-point", "single-point"])
    orc.add_argument("--z1", type=float, nargs=2, default=None, metavar=("RE", "IM"))
    orc.add_argument("--z2", type=float, nargs=2, default=None, metavar=("RE", "IM"))
    orc.add_argument("--z0", type=float, nargs=2, default=None, metavar=("RE", "IM"))
    orc.add_argument("--order", type=int, default=None)
    orc.add_argument("--mode", default=None, choices=["surface", "encircle"])
    orc.add_argument("--window", type=float, nargs=4, default=None)
    orc.add_argument("--circle", type=float, nargs=3, default=None)
    orc.add_argument("--rect", type=float, nargs=4, default=None)
    orc.add_argument("--delta-mode", default=None, choices=["raw", "delta"],
                     dest="delta_mode")
    orc.add_argument("--steps", type=int, default=None)

    return parser


def _resolve(args) -> dict:
    cfg = json.loads(json.dumps(_DEFAULTS[args.command]))  # deep copy
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    if getattr(args, "preset", None):
        cfg.setdefault("params", {})
        cfg["params"].update(PRESETS[args.preset]["params"])
        cfg["preset"] = args.preset
    if "params" in cfg:
        for key in _PARAM_KEYS:
            val = getattr(args, key, None)
            if val is not None:
                cfg["params"][key] = val
    for key in ("alpha_range", "points", "alpha_bracket", "window",
                "delta_mode", "steps", "beta_window", "kind", "z1", "z2",
                "z0", "order", "mode", "input", "modes"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.tolerance is not None:
        cfg["tolerance"] = args.tolerance
    if args.grid is not None:
        cfg["grid"] = args.grid
    if getattr(args, "circle", None) is not None:
        cfg["loop"] = {"kind": "circle", "center": list(args.circle[:2]),
                       "radius": args.circle[2]}
    elif getattr(args, "rect", None) is not None:
        cfg["loop"] = {"kind": "rect", "window": list(args.rect)}
    if getattr(args, "point", None):
        cfg["points"] = [list(p) for p in args.point]
    if getattr(args, "meta", None):
        meta = cfg.setdefault("metadata", {})
        for item in args.meta:
            key, _, value = item.partition("=")
            meta[key] = value
    cfg["out"] = args.out
    cfg["threads"] = args.threads
    cfg["command"] = args.command
    return cfg


def _params(cfg) -> ToyParams:
    return ToyParams(**cfg["params"])


def _parse_grid(text) -> tuple[int, int]:
    try:
        n1, n2 = text.lower().split("x")
        return int(n1), int(n2)
    except ValueError:
        raise ValueError(f"grid must look like 256x64, got {text!r}") from None


def _loop_from(cfg_loop):
    if cfg_loop["kind"] == "circle":
        return CircleLoop(tuple(cfg_loop["center"]), cfg_loop["radius"])
    if cfg_loop["kind"] == "rect":
        a0, a1, b0, b1 = cfg_loop["window"]
        return PolylineLoop(((a0, b0), (a1, b0), (a1, b1), (a0, b1)))
    if cfg_loop["kind"] == "polyline":
        return PolylineLoop(tuple(tuple(v) for v in cfg_loop["vertices"]))
    raise ValueError(f"unknown loop kind {cfg_loop['kind']!r}")


def _report_payload(report: ClassReport) -> dict:
    return {
        "label": report.label,
        "re_min_gap": report.re_min_gap,
        "im_min_gap": report.im_min_gap,
        "re_cross_points": report.re_cross_points,
        "im_cross_points": report.im_cross_points,
        "bifurcation_edges": list(report.bifurcation_edges)
        if report.bifurcation_edges else None,
    }


def _ep_payload(eps) -> list[dict]:
    return [{"p1": e.p1, "p2": e.p2, "residual": e.residual, "order": e.order}
            for e in eps]


def _outdir(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_toy_sweep(cfg) -> None:
    p = _params(cfg)
    lo, hi = cfg["alpha_range"]
    alphas = np.linspace(lo, hi, int(cfg["points"]))
    traj = sweep_toy(p, alphas)
    report = classify(traj)
    out = _outdir(cfg)
    io_mod.write_trajectory_csv(out / "toy_sweep.csv", traj)
    io_mod.write_json(out / "toy_sweep_report.json", {
        "report": _report_payload(report),
        "overlap_peaks": overlap_peaks(traj),
        "config": cfg,
    })


def _cmd_find_eps(cfg) -> None:
    p = _params(cfg)
    if cfg.get("window"):
        a0, a1, b0, b1 = cfg["window"]
        coarse_n = _parse_grid(cfg["grid"])[0]
        result = grid_ep_search(eigenpair_sampler(p), ((a0, a1), (b0, b1)),
                                coarse_n, threads=cfg["threads"])
        payload = {
            "eps": _ep_payload(result.locations),
            "method": "grid-search",
            "sampler_failures": result.sampler_failures,
            "config": cfg,
        }
    else:
        roots = toy_ep_roots(p, tuple(cfg["alpha_bracket"]),
                             residual_tol=cfg["tolerance"])
        payload = {"eps": _ep_payload(roots), "method": "scan-roots",
                   "config": cfg}
    io_mod.write_json(_outdir(cfg) / "find_eps.json", payload)


def _surface_payload(grid) -> dict:
    return {
        "axis1": grid.axis1,
        "axis2": grid.axis2,
        "delta_mode": grid.delta_mode,
        "sheet1_re": grid.sheet1.real,
        "sheet1_im": grid.sheet1.imag,
        "sheet2_re": grid.sheet2.real,
        "sheet2_im": grid.sheet2.imag,
        "cut_edges": {
            "matched": [[list(u), list(v)] for u, v in grid.cut_cells.matched],
            "re": [[list(u), list(v)] for u, v in grid.cut_cells.re],
            "im": [[list(u), list(v)] for u, v in grid.cut_cells.im],
        },
        "missing": [list(n) for n in grid.missing],
    }


def _cmd_surface(cfg) -> None:
    p = _params(cfg)
    n1, n2 = _parse_grid(cfg["grid"])
    a0, a1, b0, b1 = cfg["window"]
    grid = build_surface(eigenpair_sampler(p), ((a0, a1), (b0, b1)), n1, n2,
                         cfg["delta_mode"], threads=cfg["threads"])
    out = _outdir(cfg)
    io_mod.write_sheetgrid_csv(out / "surface.csv", grid)
    payload = _surface_payload(grid)
    payload["config"] = cfg
    io_mod.write_json(out / "surface.json", payload)


def _cmd_encircle(cfg) -> None:
    p = _params(cfg)
    loop = _loop_from(cfg["loop"])
    known = []
    if p.gamma1 == p.gamma2 and p.beta == 1.0:
        known = toy_ep_roots(p, (0.01, 4.0))
    result = encircle(eigenpair_sampler(p), loop, int(cfg["steps"]),
                      known_eps=known)
    io_mod.write_json(_outdir(cfg) / "encircle.json", {
        "permutation": result.permutation,
        "n_steps": result.n_steps,
        "max_step_jump": result.max_step_jump,
        "enclosed_eps": _ep_payload(result.enclosed_eps),
        "config": cfg,
    })


def _cmd_beta_scan(cfg) -> None:
    p = _params(cfg)
    lo, hi = cfg["alpha_range"]
    beta_c = beta_transition(
        p, tuple(cfg["beta_window"]),
        alpha_range=(lo, hi), n_alpha=int(cfg["points"]),
        tol=cfg["tolerance"],
    )
    io_mod.write_json(_outdir(cfg) / "beta_scan.json", {
        "beta_c": beta_c,
        "config": cfg,
    })


def _read_plane_csv(path) -> list[PlanePoint]:
    import csv as csv_mod
    points = []
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv_mod.reader(handle)
        header = next(reader)
        if [h.strip() for h in header[:2]] != ["n", "chi"]:
            raise ValueError(f"{path}: expected header n,chi")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            points.append(PlanePoint(float(row[0]), float(row[1])))
    return points


def _cmd_project(cfg) -> None:
    if cfg.get("input"):
        points = _read_plane_csv(cfg["input"])
    else:
        points = [PlanePoint(n, chi) for n, chi in cfg["points"]]
    lifted = lift_cut(points)
    out = _outdir(cfg)
    io_mod.write_sphere_csv(out / "sphere.csv", lifted)
    io_mod.write_json(out / "project.json", {
        "n_points": len(lifted),
        "config": cfg,
    })


def _cmd_ingest_classify(cfg) -> None:
    dataset = io_mod.ingest_csv(cfg["input"], metadata=cfg.get("metadata"))
    modes = cfg.get("modes") or [None, None]
    traj = dataset.to_trajectory(modes[0], modes[1])
    report = classify(traj)
    io_mod.write_json(_outdir(cfg) / "ingest_classify.json", {
        "report": _report_payload(report),
        "scan_name": dataset.scan_name,
        "metadata": dataset.metadata,
        "config": cfg,
    })


def _oracle_from(cfg) -> AnalyticOracle:
    if cfg["kind"] == "two-point":
        return AnalyticOracle.two_point(complex(*cfg["z1"]), complex(*cfg["z2"]))
    return AnalyticOracle.single_point(complex(*cfg["z0"]), int(cfg["order"]))


def _cmd_oracle(cfg) -> None:
    oracle = _oracle_from(cfg)
    out = _outdir(cfg)
    if cfg["mode"] == "surface":
        n1, n2 = _parse_grid(cfg["grid"])
        a0, a1, b0, b1 = cfg["window"]
        grid = build_surface(oracle.sampler(), ((a0, a1), (b0, b1)), n1, n2,
                             cfg["delta_mode"], threads=cfg["threads"])
        io_mod.write_sheetgrid_csv(out / "oracle_surface.csv", grid)
        payload = _surface_payload(grid)
        payload["config"] = cfg
        io_mod.write_json(out / "oracle_surface.json", payload)
    else:
        result = encircle(oracle.sampler(), _loop_from(cfg["loop"]),
                          int(cfg["steps"]))
        io_mod.write_json(out / "oracle_encircle.json", {
            "permutation": result.permutation,
            "n_steps": result.n_steps,
            "max_step_jump": result.max_step_jump,
            "config": cfg,
        })


_RUNNERS = {
    "toy-sweep": _cmd_toy_sweep,
    "find-eps": _cmd_find_eps,
    "surface": _cmd_surface,
    "encircle": _cmd_encircle,
    "beta-scan": _cmd_beta_scan,
    "project": _cmd_project,
    "ingest-classify": _cmd_ingest_classify,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        _RUNNERS[args.command](cfg)
    except Exception as exc:
        print(json.dumps({
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }, sort_keys=True))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
