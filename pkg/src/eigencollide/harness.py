"""Experiment configuration, orchestration and persistence.

Configs are single YAML documents with a strict key set; parsing collects
every violated invariant into one error.  A config holds only primitives,
so `parse_config(render_config(c)) == c` is plain equality; the numpy
objects (ensemble, grid, pattern) are built on demand.

`run` executes predict -> simulate -> estimate and writes the outputs
under the configured directory:

    record.json   scientific results; byte-identical across reruns and
                  thread counts for a fixed (config, seed)
    meta.json     timings and timestamps, deliberately kept out of
                  record.json so determinism is checkable byte for byte
    hits.csv      per-epsilon hit fractions
    boxes.csv     per-delta box counts (when box counting is requested)

Rationals are rendered as exact "p/q" strings in all JSON output.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .estimate import verdict_experiment
from .gfield import KernelSpec, TimeGrid, sample_sheet, verify_assumptions
from .matfield import EnsembleSpec, sample_ensemble
from .spectra import pattern_gap_values, spectral_path
from .theory import CollisionPattern, HurstVector, SpectralKind, dichotomy

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunRecord",
    "parse_config",
    "render_config",
    "run",
]

_KINDS = {k.value: k for k in SpectralKind}

_DEFAULT_EPS = (0.4, 0.2, 0.11, 0.1)
_DEFAULT_DELTA = tuple(2.0**-k for k in range(1, 8))


class ConfigError(ValueError):
    """Invalid experiment config; message lists every violation found."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Primitive, serialization-stable description of one experiment."""

    kind: str
    shape: tuple[int, ...]
    pattern: tuple[int, ...]
    hurst: tuple[str, ...]
    resolution: tuple[int, ...]
    interval: tuple[tuple[float, float], ...]
    eps_ladder: tuple[float, ...] = _DEFAULT_EPS
    delta_ladder: tuple[float, ...] = ()
    kappa: float = 1.0
    paths: int = 1000
    seed: int = 0
    threads: int = 1
    boxdim: bool = False
    shift: tuple | None = None
    transform: tuple | None = None
    transform_right: tuple | None = None
    out_dir: str | None = None

    # -- derived objects ------------------------------------------------

    @property
    def spectral_kind(self) -> SpectralKind:
        return _KINDS[self.kind]

    def hurst_vector(self) -> HurstVector:
        return HurstVector(self.hurst)

    def collision_pattern(self) -> CollisionPattern:
        return CollisionPattern(self.pattern, ambient=self.shape[0])

    def time_grid(self) -> TimeGrid:
        return TimeGrid(self.interval, self.resolution)

    def ensemble(self) -> EnsembleSpec:
        def to_matrix(rows):
            if rows is None:
                return None
            arr = np.array([[_from_cell(c) for c in row] for row in rows])
            return arr

        return EnsembleSpec(
            beta=self.spectral_kind.beta,
            shape=self.shape,
            kernel=KernelSpec(self.hurst_vector()),
            shift=to_matrix(self.shift),
            transform=to_matrix(self.transform),
            transform_right=to_matrix(self.transform_right),
        )


def _from_cell(c):
    if isinstance(c, str):
        return complex(c)
    return float(c)


def _tupled(value):
    if isinstance(value, (list, tuple)):
        return tuple(_tupled(v) for v in value)
    return value


def _listed(value):
    if isinstance(value, tuple):
        return [_listed(v) for v in value]
    return value


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML config; reject unknown keys (strict mode)
    and report every violated invariant at once."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigError("config is not valid YAML: %s" % err) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of keys to values")

    known = {f.name for f in fields(ExperimentConfig)}
    problems = [
        "unknown key: %r" % k for k in sorted(set(raw) - known)
    ]
    data = {k: _tupled(v) for k, v in raw.items() if k in known}

    if "hurst" in data:
        data["hurst"] = tuple(str(h) for h in data["hurst"])
    required = ("kind", "shape", "pattern", "hurst", "resolution")
    for key in required:
        if key not in data:
            problems.append("missing key: %r" % key)
    if problems and any(p.startswith("missing") for p in problems):
        raise ConfigError("; ".join(problems))

    n_axes = len(data.get("hurst", ()))
    data.setdefault("interval", tuple([(1.0, 2.0)] * n_axes))

    cfg = ExperimentConfig(**data)
    problems.extend(_validate(cfg))
    if problems:
        raise ConfigError("; ".join(problems))
    return cfg


def _validate(cfg: ExperimentConfig) -> list[str]:
    out = []
    if cfg.kind not in _KINDS:
        out.append("kind must be one of %s" % sorted(_KINDS))
        return out
    kind = cfg.spectral_kind
    if kind.singular and len(cfg.shape) != 2:
        out.append("singular kinds need shape (d1, d2)")
    if not kind.singular and len(cfg.shape) != 1:
        out.append("eigen kinds need shape (d,)")
    if len(cfg.shape) == 2 and cfg.shape[0] > cfg.shape[1]:
        out.append("rectangular shape needs d1 <= d2")
    try:
        hv = cfg.hurst_vector()
    except (ValueError, TypeError, ZeroDivisionError) as err:
        out.append("hurst: %s" % err)
        hv = None
    try:
        cfg.collision_pattern()
    except ValueError as err:
        out.append("pattern: %s" % err)
    if hv is not None:
        if len(cfg.resolution) != len(hv):
            out.append("resolution needs one entry per hurst exponent")
        if len(cfg.interval) != len(hv):
            out.append("interval needs one (a, b) pair per hurst exponent")
    try:
        cfg.time_grid()
    except ValueError as err:
        out.append("grid: %s" % err)
    eps = cfg.eps_ladder
    if len(eps) < 2 or any(b >= a for a, b in zip(eps, eps[1:])):
        out.append("eps_ladder must be strictly decreasing with >= 2 levels")
    if cfg.paths < 100:
        out.append("paths must be >= 100")
    if not 0 <= cfg.seed < 2**64:
        out.append("seed must be a 64-bit unsigned integer")
    if cfg.threads < 1:
        out.append("threads must be >= 1")
    if cfg.boxdim and not cfg.delta_ladder:
        out.append("boxdim requested but delta_ladder is empty")
    if out:
        return out
    try:
        cfg.ensemble()
    except ValueError as err:
        out.append("ensemble: %s" % err)
    return out


def render_config(cfg: ExperimentConfig) -> str:
    """Canonical YAML form; parse(render(c)) == c."""
    data = {}
    for f in fields(ExperimentConfig):
        value = getattr(cfg, f.name)
        if value is None and f.name in ("shift", "transform", "transform_right", "out_dir"):
            continue
        data[f.name] = _listed(value)
    return yaml.safe_dump(data, sort_keys=True, default_flow_style=None)


def config_hash(cfg: ExperimentConfig) -> str:
    """Hash of the scientific content: threads and out_dir are execution
    details and must not distinguish otherwise identical experiments."""
    neutral = replace(cfg, threads=1, out_dir=None)
    return hashlib.sha256(render_config(neutral).encode()).hexdigest()


@dataclass(frozen=True)
class RunRecord:
    """Everything a run produced, traceable to (config hash, seed)."""

    config_hash: str
    code_version: str
    outputs: dict
    warnings: tuple[str, ...]
    timings: dict

    def scientific_json(self) -> str:
        payload = {
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "outputs": self.outputs,
            "warnings": list(self.warnings),
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def run(cfg: ExperimentConfig, out_dir: str | None = None) -> RunRecord:
    """Execute predict -> simulate -> estimate, then persist.

    A stage failure is recorded in `warnings` with partial outputs
    preserved; the record is still written.
    """
    problems = _validate(cfg)
    if problems:
        raise ConfigError("; ".join(problems))
    kind = cfg.spectral_kind
    pattern = cfg.collision_pattern()
    grid = cfg.time_grid()
    ensemble = cfg.ensemble()

    outputs: dict = {}
    warnings: list[str] = []
    timings: dict = {}

    t0 = time.perf_counter()
    verdict = dichotomy(ensemble.kernel.hurst, kind, pattern)
    outputs["predict"] = verdict.to_json_dict()
    timings["predict"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        mat = sample_ensemble(ensemble, grid, cfg.seed, path_index=0)
        spath = spectral_path(mat, kind)
        gaps = pattern_gap_values(spath.values, pattern)
        outputs["simulate"] = {
            "path_index": 0,
            "spectrum_min": float(spath.values.min()),
            "spectrum_max": float(spath.values.max()),
            "min_pattern_gap": float(gaps.min()),
        }
    except Exception as err:  # record and continue: partial outputs survive
        warnings.append("simulate failed: %s" % err)
    timings["simulate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        report = verdict_experiment(
            ensemble,
            pattern,
            kind,
            grid,
            n_paths=cfg.paths,
            seed=cfg.seed,
            eps_ladder=cfg.eps_ladder,
            delta_ladder=cfg.delta_ladder if cfg.boxdim else None,
            kappa=cfg.kappa,
            threads=cfg.threads,
        )
        outputs["estimate"] = report.to_json_dict()
        if report.boxdim is not None and not report.boxdim.reliable:
            warnings.append("boxdim unreliable: %s" % "; ".join(report.boxdim.notes))
    except Exception as err:
        warnings.append("estimate failed: %s" % err)
    timings["estimate"] = time.perf_counter() - t0

    record = RunRecord(
        config_hash=config_hash(cfg),
        code_version=__version__,
        outputs=outputs,
        warnings=tuple(warnings),
        timings=timings,
    )
    target = out_dir or cfg.out_dir
    if target is not None:
        _persist(record, cfg, Path(target))
    return record


def _persist(record: RunRecord, cfg: ExperimentConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(render_config(cfg))
    (out / "record.json").write_text(record.scientific_json() + "\n")
    meta = {"timings": record.timings, "written_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    est = record.outputs.get("estimate")
    if est:
        lines = ["eps,hits,fraction,wilson_lo,wilson_hi"]
        mc = est["mc"]
        for e, h, f, (lo, hi) in zip(
            mc["eps_ladder"], mc["hits"], mc["fractions"], mc["wilson_95"]
        ):
            lines.append("%.12g,%d,%.12g,%.12g,%.12g" % (e, h, f, lo, hi))
        (out / "hits.csv").write_text("\n".join(lines) + "\n")
        if est.get("boxdim"):
            bd = est["boxdim"]
            lines = ["delta,threshold,count"]
            for d, t, c in zip(bd["deltas"], bd["thresholds"], bd["counts"]):
                lines.append("%.12g,%.12g,%d" % (d, t, c))
            (out / "boxes.csv").write_text("\n".join(lines) + "\n")


def field_report(cfg: ExperimentConfig) -> dict:
    """Assumption constants for the configured kernel/grid (validate-field)."""
    spec = KernelSpec(cfg.hurst_vector())
    report = verify_assumptions(spec, cfg.time_grid())
    return report.to_json_dict()


def dump_field_csv(cfg: ExperimentConfig, path: str) -> None:
    """One scalar-field draw as CSV: grid coordinates then the value."""
    grid = cfg.time_grid()
    spec = KernelSpec(cfg.hurst_vector())
    sample = sample_sheet(spec, grid, cfg.seed, key=(0,))
    pts = grid.points()
    header = ",".join("t%d" % (j + 1) for j in range(grid.ndim)) + ",value"
    lines = [header]
    for coords, value in zip(pts, sample.values.ravel()):
        lines.append(
            ",".join("%.12g" % c for c in coords) + ",%.12g" % value
        )
    Path(path).write_text("\n".join(lines) + "\n")
