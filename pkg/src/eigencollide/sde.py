"""Direct integrators for the classical eigenvalue particle systems.

Euler-Maruyama for the interacting SDEs solved by eigenvalues of the
square self-adjoint matrix Brownian motion (repulsion 1/(x_i - x_j),
diffusion sqrt(2/beta)) and by the Gram spectrum of the rectangular matrix
Brownian motion (drift n + sum (x_i + x_j)/(x_i - x_j), diffusion
2 sqrt(x_i), reflection at 0).  These cross-validate the matrix-field
pipeline at H = 1/2 on a 1-d time axis.

The repulsion is singular at coincidence, so a step is retried as two half
steps (recursively, at most 20 levels) when it would cross the ordering or
when the drift impulse dt * |drift| exceeds the smallest particle gap; the
second trigger catches the outward explosion Euler produces near
coincidence, where the true repulsion is self-limiting but the frozen
drift is not.  The Brownian increment is split linearly between the
halves, which keeps a step a pure function of (state, dt, noise): a run is
reproducible from (seed, dt schedule) alone.  Refinement helps because it
re-evaluates the singular drift mid-step, not because it adds randomness.

Start states at (or within noise of) coincidence are nudged apart by a
1e-8 spread, and the path runners prepend a geometric warm-up ramp to the
step schedule so the first steps satisfy the impulse bound at the start
state; halving alone cannot bridge from dt to the fully collided scale.

The fractional (H > 1/2) systems are not integrated; only their explicit
drift coefficients are exposed, the Skorohod noise terms being out of
scope.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from .rng import DOMAIN_SDE, substream

__all__ = [
    "CollisionBreakdownError",
    "ParticleState",
    "dyson_step",
    "wishart_eig_step",
    "dyson_paths",
    "wishart_paths",
    "fractional_drift_coeffs",
    "fractional_wishart_drift_coeffs",
    "nudge_apart",
]

_MAX_HALVINGS = 20
_NUDGE = 1e-8
_IMPULSE_THETA = 1.0  # halve when dt * max|drift| > theta * min gap


class CollisionBreakdownError(RuntimeError):
    """Ordering could not be preserved after the maximum halvings."""

    def __init__(self, message: str, state: "ParticleState"):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class ParticleState:
    """Ordered particle positions at one time."""

    time: float
    positions: np.ndarray
    beta: int
    n: int | None = None  # second Wishart dimension, when applicable

    def __post_init__(self):
        object.__setattr__(
            self, "positions", np.asarray(self.positions, dtype=float).copy()
        )
        self.positions.flags.writeable = False
        if self.beta not in (1, 2):
            raise ValueError("beta must be 1 or 2")
        if self.positions.ndim != 1:
            raise ValueError("positions must be a vector")


def _as_exponent(H) -> float:
    return float(Fraction(H)) if isinstance(H, str) else float(H)


def nudge_apart(positions, spread: float = _NUDGE) -> np.ndarray:
    """Separate coinciding start positions; the drift is singular there."""
    x = np.asarray(positions, dtype=float).copy()
    if np.any(np.diff(x) <= 0):
        x = np.sort(x) + spread * np.arange(len(x))
    return x


def _dyson_drift(x: np.ndarray) -> np.ndarray:
    d = x.shape[-1]
    diff = x[..., :, None] - x[..., None, :]
    diff[..., np.arange(d), np.arange(d)] = np.inf
    return (1.0 / diff).sum(axis=-1)


def _wishart_drift(x: np.ndarray, n: int) -> np.ndarray:
    d = x.shape[-1]
    diff = x[..., :, None] - x[..., None, :]
    diff[..., np.arange(d), np.arange(d)] = np.inf
    total = x[..., :, None] + x[..., None, :]
    return n + (total / diff).sum(axis=-1)


def _min_gap(x: np.ndarray) -> np.ndarray:
    if x.shape[-1] < 2:
        return np.full(x.shape[:-1], np.inf)
    return np.diff(x, axis=-1).min(axis=-1)


def _bad_order(y: np.ndarray) -> np.ndarray:
    if y.shape[-1] < 2:
        return np.zeros(y.shape[:-1], dtype=bool)
    # NaN rows must count as bad, so test the negation of "all gaps positive".
    return ~np.all(np.diff(y, axis=-1) > 0, axis=-1)


def _advance(x, dt, dw, depth, drift_fn, diffusion_fn, reflect):
    """Vectorized Euler step with recursive halving on the bad subset.

    Returns (y, bad); rows still bad at depth 0 carry whatever the last
    attempt produced and must be treated as broken by the caller.
    """
    drift = drift_fn(x)
    y = x + diffusion_fn(x) * dw + drift * dt
    if reflect:
        y = np.abs(y)
    crossed = _bad_order(y)
    with np.errstate(invalid="ignore"):
        unstable = dt * np.abs(drift).max(axis=-1) > _IMPULSE_THETA * _min_gap(x)
    bad = crossed | unstable
    if not bad.any() or depth <= 0:
        return y, crossed
    y1, bad1 = _advance(x[bad], dt / 2, dw[bad] / 2, depth - 1, drift_fn, diffusion_fn, reflect)
    # rows that already failed the first half are broken for good; only the
    # survivors take the second half
    y2 = y1
    bad2 = bad1.copy()
    alive = ~bad1
    if alive.any():
        y2 = y1.copy()
        y2[alive], b2 = _advance(
            y1[alive], dt / 2, dw[bad][alive] / 2, depth - 1, drift_fn, diffusion_fn, reflect
        )
        bad2[alive] = b2
    y[bad] = y2
    final = np.zeros_like(crossed)
    final[bad] = bad2
    return y, final


def _dyson_diffusion(beta):
    coeff = math.sqrt(2.0 / beta)
    return lambda x: coeff


def _wishart_diffusion(x):
    return 2.0 * np.sqrt(np.clip(x, 0.0, None))


def _check_step_args(state: ParticleState, dt: float, noise) -> np.ndarray:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if np.any(np.diff(state.positions) <= 0):
        raise ValueError("positions must be strictly increasing")
    dw = np.asarray(noise, dtype=float)
    if dw.shape != state.positions.shape:
        raise ValueError("noise vector must match the number of particles")
    return dw


def dyson_step(state: ParticleState, dt: float, noise) -> ParticleState:
    """One Euler step of the eigenvalue repulsion system.

    `noise` is the Brownian increment over the step (std sqrt(dt) per
    particle).  Raises CollisionBreakdownError, carrying the pre-step
    state, if ordering cannot be preserved within 20 halvings.
    """
    dw = _check_step_args(state, dt, noise)
    y, bad = _advance(
        state.positions[None, :],
        dt,
        dw[None, :],
        _MAX_HALVINGS,
        _dyson_drift,
        _dyson_diffusion(state.beta),
        reflect=False,
    )
    if bad[0]:
        raise CollisionBreakdownError(
            "ordering lost at t=%g after %d halvings" % (state.time, _MAX_HALVINGS),
            state=state,
        )
    return ParticleState(time=state.time + dt, positions=y[0], beta=state.beta, n=state.n)


def wishart_eig_step(state: ParticleState, dt: float, noise) -> ParticleState:
    """One Euler step of the Gram-spectrum system with reflection at 0."""
    if state.n is None:
        raise ValueError("state needs the second dimension n")
    if state.n < len(state.positions):
        raise ValueError("need n >= number of particles")
    if np.any(state.positions < 0):
        raise ValueError("positions must be nonnegative")
    dw = _check_step_args(state, dt, noise)
    y, bad = _advance(
        state.positions[None, :],
        dt,
        dw[None, :],
        _MAX_HALVINGS,
        lambda x: _wishart_drift(x, state.n),
        _wishart_diffusion,
        reflect=True,
    )
    if bad[0]:
        raise CollisionBreakdownError(
            "ordering lost at t=%g after %d halvings" % (state.time, _MAX_HALVINGS),
            state=state,
        )
    return ParticleState(time=state.time + dt, positions=y[0], beta=state.beta, n=state.n)


def _dt_schedule(x0, t1, n_steps, drift_fn) -> np.ndarray:
    """Uniform steps of t1/n_steps, preceded by a geometric warm-up ramp
    when the start state cannot take a full step within the impulse bound."""
    target = t1 / n_steps
    gap = float(_min_gap(x0[None, :])[0])
    peak = float(np.abs(drift_fn(x0[None, :])).max())
    ramp = []
    if peak > 0 and np.isfinite(gap):
        dt = _IMPULSE_THETA * gap / peak
        t = 0.0
        while dt < target and t + dt < 0.5 * t1:
            ramp.append(dt)
            t += dt
            dt *= 2
    covered = sum(ramp)
    n_rest = max(1, math.ceil((t1 - covered) / target))
    rest = np.full(n_rest, (t1 - covered) / n_rest)
    return np.concatenate([np.asarray(ramp), rest])


def _run_paths(x0, t1, n_steps, seed, n_paths, drift_fn, diffusion_fn, reflect, chunk_size=1024):
    d = len(x0)
    dts = _dt_schedule(x0, t1, n_steps, drift_fn)
    sqrt_dts = np.sqrt(dts)
    out = np.empty((n_paths, d))
    broken = np.zeros(n_paths, dtype=bool)
    for lo in range(0, n_paths, chunk_size):
        ids = range(lo, min(lo + chunk_size, n_paths))
        normals = np.stack(
            [substream(seed, DOMAIN_SDE, p).standard_normal((len(dts), d)) for p in ids]
        )
        x = np.tile(x0, (len(normals), 1))
        dead = np.zeros(len(normals), dtype=bool)
        for k, dt in enumerate(dts):
            y, bad = _advance(
                x, dt, normals[:, k] * sqrt_dts[k], _MAX_HALVINGS,
                drift_fn, diffusion_fn, reflect,
            )
            frozen = dead | bad
            y[frozen] = x[frozen]  # broken paths keep their last valid state
            dead |= bad
            x = y
        out[lo : lo + len(normals)] = x
        broken[lo : lo + len(normals)] = dead
    return out, broken


def dyson_paths(
    x0, t1: float, n_steps: int, beta: int, seed: int, n_paths: int
) -> tuple[np.ndarray, np.ndarray]:
    """Terminal positions of `n_paths` independent repulsion paths.

    Returns (positions, broken): positions has shape (n_paths, d); broken
    marks paths whose ordering collapsed (they are frozen at the last
    valid state, counted, never silently dropped).
    """
    x0 = nudge_apart(x0)
    return _run_paths(
        x0, t1, n_steps, seed, n_paths, _dyson_drift, _dyson_diffusion(beta), reflect=False
    )


def wishart_paths(
    x0, t1: float, n_steps: int, n: int, seed: int, n_paths: int, beta: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Terminal Gram spectra of independent squared-Bessel-type paths."""
    x0 = nudge_apart(np.clip(np.asarray(x0, dtype=float), 0.0, None))
    if n < len(x0):
        raise ValueError("need n >= number of particles")
    return _run_paths(
        x0, t1, n_steps, seed, n_paths,
        lambda x: _wishart_drift(x, n), _wishart_diffusion, reflect=True,
    )


def fractional_drift_coeffs(H, t: float, state: ParticleState) -> np.ndarray:
    """Drift vector of the fractional eigenvalue system: the explicit
    singular part 2H t^{2H-1} sum_{j != i} 1/(x_i - x_j).

    At H = 1/2 this is exactly the Dyson drift.  The Skorohod noise terms
    of the fractional system are out of scope.
    """
    h = _as_exponent(H)
    if not 0.5 <= h < 1:
        raise ValueError("drift is defined for H in [1/2, 1)")
    if t <= 0:
        raise ValueError("t must be positive")
    if np.any(np.diff(state.positions) <= 0):
        raise ValueError("positions must be strictly increasing")
    return (2.0 * h * t ** (2.0 * h - 1.0)) * _dyson_drift(state.positions[None, :])[0]


def fractional_wishart_drift_coeffs(H, t: float, state: ParticleState) -> np.ndarray:
    """Drift vector of the fractional Gram-spectrum system:
    2H n + 2H t^{2H-1} sum_{j != i} (x_i + x_j)/(x_i - x_j).

    Reduces to the Wishart drift at H = 1/2.
    """
    h = _as_exponent(H)
    if not 0.5 <= h < 1:
        raise ValueError("drift is defined for H in [1/2, 1)")
    if t <= 0:
        raise ValueError("t must be positive")
    if state.n is None:
        raise ValueError("state needs the second dimension n")
    if np.any(np.diff(state.positions) <= 0):
        raise ValueError("positions must be strictly increasing")
    d = len(state.positions)
    x = state.positions
    diff = x[:, None] - x[None, :]
    diff[np.arange(d), np.arange(d)] = np.inf
    interaction = ((x[:, None] + x[None, :]) / diff).sum(axis=-1)
    return 2.0 * h * state.n + 2.0 * h * t ** (2.0 * h - 1.0) * interaction
