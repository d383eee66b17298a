"""Command-line interface.

Subcommands:

    predict         exact dichotomy verdict and dimension for one instance
    simulate        draw one path, print spectral summary
    collide-prob    Monte Carlo hit fractions over the eps ladder
    boxdim          box-counting dimension of one path's collision set
    sde             integrate the eigenvalue SDE systems, write CSV
    validate-field  assumption constants of the configured kernel/grid
    report          full predict -> simulate -> estimate run with outputs

Common flags: --config FILE, --seed N, --out DIR, --threads K, --json.
The default thread count can also be set with EIGENCOLLIDE_THREADS.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .estimate import box_dim, collision_prob
from .harness import (
    ConfigError,
    ExperimentConfig,
    dump_field_csv,
    field_report,
    parse_config,
    run,
)
from .sde import dyson_paths, wishart_paths
from .theory import CollisionPattern, HurstVector, SpectralKind, dichotomy

__all__ = ["main", "cli"]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _default_threads() -> int:
    return int(os.environ.get("EIGENCOLLIDE_THREADS", "1"))


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="eigencollide",
        description="collision dichotomies for spectra of matrix Gaussian fields",
    )
    top.add_argument("--version", action="version", version=__version__)
    subs = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML experiment config")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output directory or file")
        p.add_argument("--threads", type=int, default=None, help="worker threads")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = subs.add_parser("predict", help="exact verdict and dimension")
    common(p)
    p.add_argument("--beta", type=int, choices=(1, 2))
    p.add_argument("--d", type=int, help="square dimension (eigenvalue kinds)")
    p.add_argument("--shape", type=_ints, help="d1,d2 (singular-value kinds)")
    p.add_argument("--pattern", type=_ints, help="multiplicities, e.g. 2,3")
    p.add_argument("--hurst", help="comma-separated rationals, e.g. 1/2,1/2")

    p = subs.add_parser("simulate", help="draw one path, print spectral summary")
    common(p)
    p.add_argument("--dump-field", help="write one scalar-field draw as CSV")

    p = subs.add_parser("collide-prob", help="Monte Carlo collision probability")
    common(p)
    p.add_argument("--paths", type=int, help="override path count")
    p.add_argument("--grid", type=_ints, help="override per-axis resolution")
    p.add_argument("--eps-ladder", type=_floats, help="override eps ladder")

    p = subs.add_parser("boxdim", help="box-counting dimension of one path")
    common(p)
    p.add_argument("--grid", type=_ints, help="override per-axis resolution")
    p.add_argument("--delta-ladder", type=_floats, help="override delta ladder")
    p.add_argument("--kappa", type=float, help="threshold prefactor")

    p = subs.add_parser("sde", help="integrate the eigenvalue SDE systems")
    common(p)
    p.add_argument("--model", choices=("dyson", "wishart"), default="dyson")
    p.add_argument("--d", type=int, default=2, help="number of particles")
    p.add_argument("--beta", type=int, choices=(1, 2), default=1)
    p.add_argument("--n", type=int, help="second Wishart dimension")
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--x0", type=_floats, help="start positions (default zeros)")

    p = subs.add_parser("validate-field", help="assumption constants on a grid")
    common(p)
    p.add_argument("--dump-field", help="write one scalar-field draw as CSV")

    p = subs.add_parser("report", help="full run: predict, simulate, estimate")
    common(p)
    p.add_argument("--from", dest="from_dir", help="re-print an existing run directory")

    return top


def _load_config(args, require=True) -> ExperimentConfig | None:
    if args.config is None:
        if require:
            raise ConfigError("this command needs --config")
        return None
    cfg = parse_config(Path(args.config).read_text())
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        overrides["threads"] = args.threads
    if getattr(args, "paths", None) is not None:
        overrides["paths"] = args.paths
    if getattr(args, "grid", None) is not None:
        overrides["resolution"] = args.grid
    if getattr(args, "eps_ladder", None) is not None:
        overrides["eps_ladder"] = args.eps_ladder
    if getattr(args, "delta_ladder", None) is not None:
        overrides["delta_ladder"] = args.delta_ladder
        overrides["boxdim"] = True
    if getattr(args, "kappa", None) is not None:
        overrides["kappa"] = args.kappa
    if overrides:
        cfg = replace(cfg, **overrides)
    if cfg.threads == 1 and args.threads is None:
        cfg = replace(cfg, threads=_default_threads())
    return cfg


def _emit(payload: dict, as_json: bool, human: str) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human)


def _predict(args) -> int:
    if args.config:
        cfg = _load_config(args)
        kind = cfg.spectral_kind
        hurst = cfg.hurst_vector()
        pattern = cfg.collision_pattern()
    else:
        missing = [
            name
            for name, val in (("--beta", args.beta), ("--pattern", args.pattern), ("--hurst", args.hurst))
            if val is None
        ]
        if args.d is None and args.shape is None:
            missing.append("--d or --shape")
        if missing:
            print("predict needs %s (or --config)" % ", ".join(missing), file=sys.stderr)
            return 2
        singular = args.shape is not None
        kind = {
            (1, False): SpectralKind.REAL_EIGEN,
            (2, False): SpectralKind.COMPLEX_EIGEN,
            (1, True): SpectralKind.REAL_SINGULAR,
            (2, True): SpectralKind.COMPLEX_SINGULAR,
        }[(args.beta, singular)]
        ambient = args.shape[0] if singular else args.d
        hurst = HurstVector([Fraction(h) for h in args.hurst.split(",")])
        pattern = CollisionPattern(args.pattern, ambient=ambient)
    verdict = dichotomy(hurst, kind, pattern)
    human = "Q=%s, c=%s, verdict=%s" % (verdict.Q, verdict.codim, verdict.verdict.value)
    if verdict.dim is not None:
        human += ", ell0=%d, dim=%s" % (verdict.ell0, verdict.dim)
    _emit(verdict.to_json_dict(), args.json, human)
    return 0


def _simulate(args) -> int:
    cfg = _load_config(args)
    from .matfield import sample_ensemble
    from .spectra import pattern_gap_values, spectral_path

    mat = sample_ensemble(cfg.ensemble(), cfg.time_grid(), cfg.seed, path_index=0)
    spath = spectral_path(mat, cfg.spectral_kind)
    gaps = pattern_gap_values(spath.values, cfg.collision_pattern())
    payload = {
        "spectrum_min": float(spath.values.min()),
        "spectrum_max": float(spath.values.max()),
        "min_pattern_gap": float(gaps.min()),
        "grid_points": int(np.prod(cfg.resolution)),
    }
    if args.dump_field:
        dump_field_csv(cfg, args.dump_field)
        payload["field_csv"] = args.dump_field
    _emit(
        payload,
        args.json,
        "spectrum in [%.6g, %.6g], min pattern gap %.6g over %d grid points"
        % (
            payload["spectrum_min"],
            payload["spectrum_max"],
            payload["min_pattern_gap"],
            payload["grid_points"],
        ),
    )
    return 0


def _collide_prob(args) -> int:
    cfg = _load_config(args)
    est = collision_prob(
        cfg.ensemble(),
        cfg.collision_pattern(),
        cfg.spectral_kind,
        cfg.time_grid(),
        cfg.eps_ladder,
        cfg.paths,
        cfg.seed,
        threads=cfg.threads,
    )
    lines = [
        "eps=%-10g fraction=%-8.4f hits=%-6d wilson95=[%.4f, %.4f]" % (e, f, h, lo, hi)
        for e, f, h, (lo, hi) in zip(est.eps_ladder, est.fractions, est.hits, est.intervals)
    ]
    if est.n_failed:
        lines.append("failed paths: %d of %d" % (est.n_failed, est.n_paths))
    _emit(est.to_json_dict(), args.json, "\n".join(lines))
    return 0


def _boxdim(args) -> int:
    cfg = _load_config(args)
    if not cfg.delta_ladder:
        print("boxdim needs delta_ladder in the config or --delta-ladder", file=sys.stderr)
        return 2
    est = box_dim(
        cfg.ensemble(),
        cfg.collision_pattern(),
        cfg.spectral_kind,
        cfg.time_grid(),
        cfg.seed,
        cfg.delta_ladder,
        kappa=cfg.kappa,
    )
    if est.slope is None:
        human = "no slope (%s)" % "; ".join(est.notes)
    else:
        human = "slope %.4f +- %.4f over %d levels%s" % (
            est.slope,
            est.stderr if est.stderr is not None else float("nan"),
            len(est.window),
            "" if est.reliable else "  [unreliable: %s]" % "; ".join(est.notes),
        )
    _emit(est.to_json_dict(), args.json, human)
    return 0


def _sde(args) -> int:
    d = args.d
    x0 = np.asarray(args.x0, dtype=float) if args.x0 else np.zeros(d)
    seed = args.seed if args.seed is not None else 0
    if args.model == "dyson":
        term, broken = dyson_paths(x0, args.t1, args.steps, args.beta, seed, args.paths)
    else:
        n = args.n if args.n is not None else max(d, 3)
        term, broken = wishart_paths(x0, args.t1, args.steps, n, seed, args.paths)
    summary = {
        "model": args.model,
        "paths": args.paths,
        "broken": int(broken.sum()),
        "mean": [float(m) for m in term[~broken].mean(axis=0)],
        "var": [float(v) for v in term[~broken].var(axis=0)],
    }
    if args.out:
        header = ",".join("x%d" % (i + 1) for i in range(d)) + ",broken"
        rows = [header]
        for row, b in zip(term, broken):
            rows.append(",".join("%.12g" % v for v in row) + ",%d" % int(b))
        Path(args.out).write_text("\n".join(rows) + "\n")
        summary["csv"] = args.out
        stat_rows = ["statistic," + ",".join("x%d" % (i + 1) for i in range(d))]
        for name in ("mean", "var"):
            stat_rows.append(name + "," + ",".join("%.12g" % v for v in summary[name]))
        stat_rows.append("broken," + ",".join([str(summary["broken"])] * d))
        summary_path = str(Path(args.out).with_suffix(".summary.csv"))
        Path(summary_path).write_text("\n".join(stat_rows) + "\n")
        summary["summary_csv"] = summary_path
    _emit(
        summary,
        args.json,
        "%s: %d paths (%d broken), terminal mean %s"
        % (args.model, args.paths, summary["broken"], np.round(term[~broken].mean(axis=0), 4)),
    )
    return 0


def _validate_field(args) -> int:
    cfg = _load_config(args)
    payload = field_report(cfg)
    if args.dump_field:
        dump_field_csv(cfg, args.dump_field)
        payload["field_csv"] = args.dump_field
    human = "c1=%.6g c3=%s c4=%s over %d points (%s)" % (
        payload["c1"],
        payload["c3"],
        payload["c4"],
        payload["n_points"],
        "pass" if payload["passed"] else "; ".join(payload["violations"]),
    )
    _emit(payload, args.json, human)
    return 0


def _report(args) -> int:
    if args.from_dir:
        record_path = Path(args.from_dir) / "record.json"
        if not record_path.exists():
            print("no record.json under %s" % args.from_dir, file=sys.stderr)
            return 1
        payload = json.loads(record_path.read_text())
        _emit(payload, args.json, record_path.read_text().rstrip())
        return 0
    cfg = _load_config(args)
    record = run(cfg, out_dir=args.out)
    payload = json.loads(record.scientific_json())
    # exit 0 iff every stage produced a record; unreliable-estimate flags
    # are carried in the record, not in the exit code
    stages_ok = all(k in payload["outputs"] for k in ("predict", "simulate", "estimate"))
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        pred = payload["outputs"]["predict"]
        print("predict: Q=%s c=%s verdict=%s dim=%s" % (pred["Q"], pred["c"], pred["verdict"], pred["dim"]))
        est = payload["outputs"].get("estimate")
        if est:
            print("mc: fractions %s -> %s" % (est["mc"]["fractions"], est["mc_behavior"]))
            if est.get("boxdim") and est["boxdim"]["slope"] is not None:
                print("boxdim: slope %.4f" % est["boxdim"]["slope"])
        for w in payload["warnings"]:
            print("warning: %s" % w)
        if args.out:
            print("written to %s" % args.out)
    return 0 if stages_ok else 1


_HANDLERS = {
    "predict": _predict,
    "simulate": _simulate,
    "collide-prob": _collide_prob,
    "boxdim": _boxdim,
    "sde": _sde,
    "validate-field": _validate_field,
    "report": _report,
}


def cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code if err.code is not None else 0
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as err:
        print("config error: %s" % err, file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print("not found: %s" % err, file=sys.stderr)
        return 1
    except Exception as err:  # pragma: no cover - last-resort reporting
        print("error: %s" % err, file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
