"""Parameter sweeps: specification, execution, and summaries.

A sweep varies one or more plant parameters over stated ranges, simulates
each resulting closed loop from a fixed initial state, and judges every run
against that run's own equilibrium set.  Ranges are generated index-wise
(start + i*step) with the count truncated toward start when the span is not
an exact multiple of the step, so a range like (-0.0121, 0.0009, 0.00125)
yields eleven points ending at 0.0004 rather than raising.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Optional

from .equilibria import (
    ClosedFormUnavailable,
    closed_form_equilibria,
    find_equilibria_numeric,
)
from .plants import (
    FAMILIES,
    ClosedLoopSystem,
    build_system,
    make_params,
    param_names,
    standard_feedback,
)
from .simulate import (
    CONVERGED,
    DIVERGED,
    UNDECIDED,
    SolverConfig,
    Trajectory,
    Verdict,
    detect_convergence,
    integrate,
)

ZIP = "zip"
PRODUCT = "product"


@dataclass(frozen=True)
class VaryAxis:
    """One swept parameter: values are start + i*step for i in range(count)."""

    param: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.step == 0.0:
            raise ValueError("step must be nonzero")
        if self.count < 1:
            raise ValueError(
                f"range ({self.start}, {self.stop}, {self.step}) is empty"
            )

    @property
    def count(self) -> int:
        return int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1

    def values(self) -> list:
        return [self.start + i * self.step for i in range(self.count)]

    def to_obj(self) -> dict:
        return {
            "param": self.param,
            "from": self.start,
            "to": self.stop,
            "step": self.step,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "VaryAxis":
        return cls(
            param=obj["param"],
            start=float(obj["from"]),
            stop=float(obj["to"]),
            step=float(obj["step"]),
        )


@dataclass(frozen=True)
class SweepSpec:
    name: str
    family: str
    params: dict
    gains: Optional[tuple]
    input_level: float
    vary: tuple
    x0: tuple
    solver: SolverConfig
    combine: str = ZIP
    conv_tol: float = 1e-3
    conv_window: Optional[float] = None  # None: 10% of t_end
    eq_box: Optional[tuple] = None
    eq_grid_n: int = 5
    notes: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.combine not in (ZIP, PRODUCT):
            raise ValueError(f"combine must be {ZIP!r} or {PRODUCT!r}")
        vary = tuple(self.vary)
        if not vary:
            raise ValueError("sweep needs at least one varied parameter")
        names = param_names(self.family)
        for axis in vary:
            if axis.param not in names:
                raise ValueError(
                    f"{axis.param!r} is not a {self.family} parameter"
                )
        if self.combine == ZIP and len({axis.count for axis in vary}) > 1:
            raise ValueError("zip-combined axes must have equal counts")
        gains = None if self.gains is None else tuple(float(g) for g in self.gains)
        object.__setattr__(self, "vary", vary)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if self.eq_box is not None:
            box = tuple((float(lo), float(hi)) for lo, hi in self.eq_box)
            object.__setattr__(self, "eq_box", box)
        if not self.conv_tol > 0.0:
            raise ValueError("conv_tol must be positive")
        # validate the base parameter set and the initial state eagerly so a
        # broken spec fails at construction, not mid-sweep
        base = make_params(self.family, self.params)
        system = build_system(self.family, base, (), self.input_level)
        if len(self.x0) != system.dim:
            raise ValueError(
                f"x0 needs {system.dim} components, got {len(self.x0)}"
            )

    @property
    def window(self) -> float:
        if self.conv_window is not None:
            return self.conv_window
        return 0.1 * self.solver.t_end

    @property
    def cardinality(self) -> int:
        counts = [axis.count for axis in self.vary]
        if self.combine == ZIP:
            return counts[0]
        return math.prod(counts)

    def combos(self) -> list:
        """Swept parameter assignments in deterministic run order."""
        per_axis = [axis.values() for axis in self.vary]
        names = [axis.param for axis in self.vary]
        if self.combine == ZIP:
            rows = zip(*per_axis)
        else:
            rows = itertools.product(*per_axis)
        return [dict(zip(names, row)) for row in rows]

    def system_for(self, values: dict) -> ClosedLoopSystem:
        merged = {**self.params, **values}
        params = make_params(self.family, merged)
        controllers = ()
        if self.gains is not None:
            controllers = standard_feedback(self.family, self.gains, params)
        return build_system(self.family, params, controllers, self.input_level)

    def with_horizon(self, t_end: float) -> "SweepSpec":
        return replace(self, solver=replace(self.solver, t_end=float(t_end)))

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "params": dict(self.params),
            "gains": None if self.gains is None else list(self.gains),
            "input": self.input_level,
            "vary": [axis.to_obj() for axis in self.vary],
            "combine": self.combine,
            "x0": list(self.x0),
            "solver": self.solver.to_obj(),
            "convergence": {"tol": self.conv_tol, "window": self.window},
            "eq_box": None if self.eq_box is None else [list(b) for b in self.eq_box],
            "eq_grid_n": self.eq_grid_n,
            "notes": self.notes,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SweepSpec":
        conv = obj.get("convergence", {})
        eq_box = obj.get("eq_box")
        return cls(
            name=obj["name"],
            family=obj["family"],
            params={k: float(v) for k, v in obj["params"].items()},
            gains=None if obj.get("gains") is None else tuple(obj["gains"]),
            input_level=float(obj.get("input", 0.0)),
            vary=tuple(VaryAxis.from_obj(v) for v in obj["vary"]),
            combine=obj.get("combine", ZIP),
            x0=tuple(obj["x0"]),
            solver=SolverConfig.from_obj(obj["solver"]),
            conv_tol=float(conv.get("tol", 1e-3)),
            conv_window=conv.get("window"),
            eq_box=None if eq_box is None else tuple(tuple(b) for b in eq_box),
            eq_grid_n=int(obj.get("eq_grid_n", 5)),
            notes=obj.get("notes", ""),
        )


@dataclass(frozen=True)
class RunRecord:
    index: int
    values: dict
    candidates: tuple
    verdict: Optional[Verdict]
    trajectory: Optional[Trajectory]
    error: Optional[str] = None

    @property
    def attractor(self) -> Optional[tuple]:
        if self.verdict is None or self.verdict.kind != CONVERGED:
            return None
        return self.candidates[self.verdict.equilibrium_index].point


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    records: tuple

    def __post_init__(self):
        if len(self.records) != self.spec.cardinality:
            raise ValueError("record count does not match sweep cardinality")


def candidate_equilibria(system: ClosedLoopSystem, spec: SweepSpec) -> list:
    """Equilibria a run is judged against: closed form when the system has
    the standard zero-input wiring, else a numeric search over spec.eq_box."""
    try:
        return closed_form_equilibria(system)
    except ClosedFormUnavailable:
        pass
    if spec.eq_box is None:
        return []
    return find_equilibria_numeric(system, spec.eq_box, grid_n=spec.eq_grid_n)


def run_sweep(spec: SweepSpec, keep_trajectories: bool = True) -> SweepResult:
    """Execute every run of a sweep in index order.

    A run that raises is recorded with its error message; the harness keeps
    going.  Results are deterministic: no randomness, fixed iteration order.
    """
    records = []
    for index, values in enumerate(spec.combos()):
        try:
            system = spec.system_for(values)
            candidates = candidate_equilibria(system, spec)
            trajectory = integrate(system, spec.x0, spec.solver)
            verdict = detect_convergence(
                trajectory, candidates, spec.conv_tol, spec.window
            )
        except Exception as err:  # an errored run is data, not a crash
            records.append(
                RunRecord(
                    index=index,
                    values=dict(values),
                    candidates=(),
                    verdict=None,
                    trajectory=None,
                    error=f"{type(err).__name__}: {err}",
                )
            )
            continue
        records.append(
            RunRecord(
                index=index,
                values=dict(values),
                candidates=tuple(candidates),
                verdict=verdict,
                trajectory=trajectory if keep_trajectories else None,
                error=None,
            )
        )
    return SweepResult(spec=spec, records=tuple(records))


def _attractor_key(point: tuple) -> str:
    return "(" + ", ".join(f"{v:.6g}" for v in point) + ")"


def summarize(result: SweepResult) -> dict:
    """JSON-ready summary: one row per run, verdict totals, the distinct
    attractors seen, and the fraction of runs that stayed bounded."""
    rows = []
    totals = {CONVERGED: 0, DIVERGED: 0, UNDECIDED: 0, "errored": 0}
    attractors = {}
    for rec in result.records:
        if rec.error is not None:
            totals["errored"] += 1
            rows.append(
                {
                    "index": rec.index,
                    "values": rec.values,
                    "verdict": "errored",
                    "error": rec.error,
                    "attractor": None,
                    "settle_time": None,
                    "final_state": None,
                }
            )
            continue
        verdict = rec.verdict
        totals[verdict.kind] += 1
        attractor = rec.attractor
        if attractor is not None:
            key = _attractor_key(attractor)
            attractors.setdefault(key, {"point": list(attractor), "runs": 0})
            attractors[key]["runs"] += 1
        rows.append(
            {
                "index": rec.index,
                "values": rec.values,
                "verdict": verdict.kind,
                "error": None,
                "attractor": None if attractor is None else list(attractor),
                "settle_time": verdict.settle_time,
                "final_state": list(verdict.final_state),
            }
        )
    total = len(result.records)
    bounded = totals[CONVERGED] + totals[UNDECIDED]
    return {
        "name": result.spec.name,
        "runs": total,
        "totals": totals,
        "stable_fraction": bounded / total if total else None,
        "attractors": [attractors[k] for k in sorted(attractors)],
        "rows": rows,
    }
