"""Time integration and convergence verdicts.

Two integrators are provided: an adaptive Dormand-Prince 5(4) pair with the
first-same-as-last optimization (the default) and a classic fixed-step RK4
used for order checks and cross-validation.  Both truncate instead of
raising when a trajectory blows up: the first sample at or beyond the
divergence norm is kept (if finite) and the trajectory is marked diverged.

Integration runs on plain float tuples rather than numpy arrays; at
dimensions 2 and 3 the interpreter loop dominates, and the float path is
several times faster for the sweep workloads this package exists to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .plants import ClosedLoopSystem, compiled_rhs

RK4_FIXED = "rk4_fixed"
RK45_ADAPTIVE = "rk45_adaptive"

CONVERGED = "converged"
DIVERGED = "diverged"
UNDECIDED = "undecided"

DEFAULT_DIVERGENCE_NORM = 1e6


@dataclass(frozen=True)
class SolverConfig:
    method: str = RK45_ADAPTIVE
    step: float = 1e-2
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_end: float = 10.0
    divergence_norm: float = DEFAULT_DIVERGENCE_NORM
    record_every: int = 1
    max_rows: int = 10000

    def __post_init__(self):
        if self.method not in (RK4_FIXED, RK45_ADAPTIVE):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.step > 0.0:
            raise ValueError("step must be positive")
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if not self.divergence_norm > 0.0:
            raise ValueError("divergence_norm must be positive")
        for name in ("rel_tol", "abs_tol"):
            tol = getattr(self, name)
            if not 0.0 < tol <= 1e-1:
                raise ValueError(f"{name} must lie in (0, 0.1]")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.max_rows < 2:
            raise ValueError("max_rows must be >= 2")

    def to_obj(self) -> dict:
        return {
            "method": self.method,
            "step": self.step,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "t_end": self.t_end,
            "divergence_norm": self.divergence_norm,
            "record_every": self.record_every,
            "max_rows": self.max_rows,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SolverConfig":
        return cls(**obj)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    output: np.ndarray
    diverged: bool

    def __post_init__(self):
        if not (len(self.times) == len(self.states) == len(self.output)):
            raise ValueError("times, states, and output must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    @property
    def final_state(self) -> tuple:
        return tuple(float(v) for v in self.states[-1])

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])


@dataclass(frozen=True)
class Verdict:
    kind: str
    equilibrium_index: Optional[int]
    final_state: tuple
    settle_time: Optional[float]

    def __post_init__(self):
        if (self.kind == CONVERGED) != (self.equilibrium_index is not None):
            raise ValueError("equilibrium_index is present iff kind is converged")

    def to_obj(self) -> dict:
        return {
            "kind": self.kind,
            "equilibrium_index": self.equilibrium_index,
            "final_state": list(self.final_state),
            "settle_time": self.settle_time,
        }


def _finite(vec) -> bool:
    return all(math.isfinite(v) for v in vec)


def _supnorm(vec) -> float:
    return max(abs(v) for v in vec)


class _Recorder:
    """Collects (t, state) samples honoring record_every, always keeping the
    first and the final accepted sample."""

    def __init__(self, record_every: int):
        self.every = record_every
        self.times = []
        self.states = []
        self._pending = None
        self._count = 0

    def add(self, t: float, x: tuple):
        if self._count % self.every == 0:
            self.times.append(t)
            self.states.append(x)
            self._pending = None
        else:
            self._pending = (t, x)
        self._count += 1

    def finish(self):
        if self._pending is not None:
            t, x = self._pending
            self.times.append(t)
            self.states.append(x)
            self._pending = None


# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


def _initial_step(x0, f0, rel_tol, abs_tol, t_end) -> float:
    d0 = max(
        (abs(x) / (abs_tol + rel_tol * abs(x)) for x in x0), default=0.0
    )
    d1 = max(
        (abs(f) / (abs_tol + rel_tol * abs(x)) for f, x in zip(f0, x0)), default=0.0
    )
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    return min(h, t_end)


def _run_rk45(rhs, x0, cfg: SolverConfig):
    n = len(x0)
    idx = range(n)
    rec = _Recorder(cfg.record_every)
    t, x = 0.0, tuple(x0)
    rec.add(t, x)
    k1 = rhs(x)
    if not _finite(k1):
        return rec, True
    h = _initial_step(x, k1, cfg.rel_tol, cfg.abs_tol, cfg.t_end)
    diverged = False
    while t < cfg.t_end:
        h = min(h, cfg.t_end - t)
        # a stalled step size only happens en route to finite-time blowup;
        # treat it as divergence rather than looping forever
        if h < 1e-13 * max(t, 1.0):
            diverged = True
            break
        y2 = tuple(x[i] + h * _A21 * k1[i] for i in idx)
        k2 = rhs(y2)
        y3 = tuple(x[i] + h * (_A31 * k1[i] + _A32 * k2[i]) for i in idx)
        k3 = rhs(y3)
        y4 = tuple(x[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in idx)
        k4 = rhs(y4)
        y5 = tuple(
            x[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
            for i in idx
        )
        k5 = rhs(y5)
        y6 = tuple(
            x[i]
            + h
            * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i])
            for i in idx
        )
        k6 = rhs(y6)
        xn = tuple(
            x[i]
            + h
            * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
            for i in idx
        )
        if not (_finite(k2) and _finite(k3) and _finite(k4) and _finite(k5) and _finite(k6) and _finite(xn)):
            h *= 0.2
            continue
        k7 = rhs(xn)
        if not _finite(k7):
            h *= 0.2
            continue
        err_sq = 0.0
        for i in idx:
            e = h * (
                _E1 * k1[i]
                + _E3 * k3[i]
                + _E4 * k4[i]
                + _E5 * k5[i]
                + _E6 * k6[i]
                + _E7 * k7[i]
            )
            scale = cfg.abs_tol + cfg.rel_tol * max(abs(x[i]), abs(xn[i]))
            err_sq += (e / scale) ** 2
        err = math.sqrt(err_sq / n)
        if not math.isfinite(err):
            h *= 0.2
            continue
        if err <= 1.0:
            t += h
            x = xn
            k1 = k7
            rec.add(t, x)
            if _supnorm(x) >= cfg.divergence_norm:
                rec.finish()
                return rec, True
        factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= factor
    rec.finish()
    return rec, diverged


def _rk4_step(rhs, x, h, idx):
    k1 = rhs(x)
    k2 = rhs(tuple(x[i] + 0.5 * h * k1[i] for i in idx))
    k3 = rhs(tuple(x[i] + 0.5 * h * k2[i] for i in idx))
    k4 = rhs(tuple(x[i] + h * k3[i] for i in idx))
    return tuple(
        x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in idx
    )


def _run_rk4(rhs, x0, cfg: SolverConfig):
    idx = range(len(x0))
    rec = _Recorder(cfg.record_every)
    x = tuple(x0)
    rec.add(0.0, x)
    # times come from multiplication, not accumulation, so the grid cannot
    # drift into duplicate timestamps on long runs
    full = int(math.floor(cfg.t_end / cfg.step + 1e-12))
    remainder = cfg.t_end - full * cfg.step
    if remainder <= 1e-12 * cfg.t_end:
        remainder = 0.0
    plan = [((s + 1) * cfg.step, cfg.step) for s in range(full)]
    if remainder > 0.0:
        plan.append((cfg.t_end, remainder))
    for t, h in plan:
        xn = _rk4_step(rhs, x, h, idx)
        if not _finite(xn):
            rec.finish()
            return rec, True
        x = xn
        rec.add(t, x)
        if _supnorm(x) >= cfg.divergence_norm:
            rec.finish()
            return rec, True
    rec.finish()
    return rec, False


def _thin(times, states, max_rows):
    count = len(times)
    if count <= max_rows:
        return times, states
    stride = math.ceil((count - 1) / (max_rows - 1))
    keep = list(range(0, count - 1, stride))
    keep.append(count - 1)
    return [times[i] for i in keep], [states[i] for i in keep]


def integrate(system: ClosedLoopSystem, x0, config: SolverConfig) -> Trajectory:
    """Integrate the closed loop from x0 over [0, t_end].

    The result is deterministic for identical inputs: the step-size control
    uses no randomness and the float path is fixed-order arithmetic.
    """
    x0 = tuple(float(v) for v in x0)
    if len(x0) != system.dim:
        raise ValueError(f"x0 needs {system.dim} components, got {len(x0)}")
    if not _finite(x0):
        raise ValueError("x0 must be finite")
    rhs = compiled_rhs(system)
    if config.method == RK45_ADAPTIVE:
        rec, diverged = _run_rk45(rhs, x0, config)
    else:
        rec, diverged = _run_rk4(rhs, x0, config)
    times, states = _thin(rec.times, rec.states, config.max_rows)
    times_arr = np.array(times, dtype=float)
    states_arr = np.array(states, dtype=float)
    output = states_arr[:, system.output_index].copy()
    return Trajectory(
        times=times_arr, states=states_arr, output=output, diverged=diverged
    )


def _candidate_point(candidate) -> tuple:
    point = getattr(candidate, "point", candidate)
    return tuple(float(v) for v in point)


def detect_convergence(
    trajectory: Trajectory, candidates, tol: float, window: float
) -> Verdict:
    """Decide where the trajectory ended up.

    converged: the state stays within tol (max-norm) of one candidate over
    the final window of time; ties go to the lowest candidate index.
    diverged: the trajectory was truncated by the divergence norm.
    undecided: anything else, including an empty candidate list.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if window <= 0.0:
        raise ValueError("window must be positive")
    final_state = trajectory.final_state
    if trajectory.diverged:
        return Verdict(
            kind=DIVERGED, equilibrium_index=None, final_state=final_state,
            settle_time=None,
        )
    points = [_candidate_point(c) for c in candidates]
    if not points:
        return Verdict(
            kind=UNDECIDED, equilibrium_index=None, final_state=final_state,
            settle_time=None,
        )
    times = trajectory.times
    states = trajectory.states
    window = min(window, trajectory.duration)
    cut = times[-1] - window
    tail = states[times >= cut]
    for index, point in enumerate(points):
        dist = np.max(np.abs(tail - np.array(point)), axis=1)
        if float(np.max(dist)) <= tol:
            all_dist = np.max(np.abs(states - np.array(point)), axis=1)
            violations = np.nonzero(all_dist > tol)[0]
            settle = float(times[0]) if len(violations) == 0 else float(
                times[violations[-1] + 1]
            )
            return Verdict(
                kind=CONVERGED,
                equilibrium_index=index,
                final_state=final_state,
                settle_time=settle,
            )
    return Verdict(
        kind=UNDECIDED, equilibrium_index=None, final_state=final_state,
        settle_time=None,
    )
