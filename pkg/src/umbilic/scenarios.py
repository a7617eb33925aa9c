"""Built-in sweep scenarios.

Each scenario bundles a plant family, nominal parameters, feedback gains
(None for open loop), the swept ranges, the initial state, and a frozen
solver horizon.  Horizons are precomputed with
:func:`recommended_horizon` and stored as literals so runs are reproducible
without re-deriving them; `test_scenarios` keeps the literals honest.

The five closed-loop submarine scenarios need per-sweep gains: no single
gain triple keeps a stable equilibrium across all five swept ranges (the
a22 sweep forces a strongly negative pitch-rate gain which the a23 sweep
cannot tolerate).  :func:`select_submarine_gains` is the documented search
that produced the frozen values.
"""

from __future__ import annotations

import itertools
import math

from .equilibria import STABLE, classify_equilibrium
from .simulate import CONVERGED, SolverConfig
from .plants import (
    AIRCRAFT,
    CCF,
    EPIDEMIC,
    INTEGRATORS,
    JORDAN,
    NOMINAL_AIRCRAFT,
    NOMINAL_SUBMARINE,
    SUBMARINE,
    build_system,
    make_params,
    standard_feedback,
)
from .sweeps import PRODUCT, ZIP, SweepSpec, VaryAxis, candidate_equilibria

# horizon rule bounds (seconds)
HORIZON_MIN = 10.0
HORIZON_MAX = 1e5


def _solver(t_end: float) -> SolverConfig:
    return SolverConfig(t_end=t_end)


def _aircraft_params(**overrides) -> dict:
    base = {
        "a_y_alpha": NOMINAL_AIRCRAFT.a_y_alpha,
        "a_mz_alpha": NOMINAL_AIRCRAFT.a_mz_alpha,
        "a_mz_omega_z": NOMINAL_AIRCRAFT.a_mz_omega_z,
        "a_mz_delta_a": NOMINAL_AIRCRAFT.a_mz_delta_a,
    }
    base.update(overrides)
    return base


def _submarine_params() -> dict:
    return {
        "a12": NOMINAL_SUBMARINE.a12,
        "a21": NOMINAL_SUBMARINE.a21,
        "a22": NOMINAL_SUBMARINE.a22,
        "a23": NOMINAL_SUBMARINE.a23,
        "a32": NOMINAL_SUBMARINE.a32,
        "a33": NOMINAL_SUBMARINE.a33,
        "b2": NOMINAL_SUBMARINE.b2,
        "b3": NOMINAL_SUBMARINE.b3,
    }


# swept ranges for the five submarine parameters, shared by the open-loop
# and closed-loop scenario of each parameter
_SUBMARINE_RANGES = {
    "a21": (-0.0121, 0.0009, 0.00125),
    "a22": (-0.611, 0.289, 0.125),
    "a23": (-0.88, 1.120, 0.2),
    "a32": (-0.43, 0.57, 0.125),
    "a33": (-1.3, 0.7, 0.25),
}

# gains for the closed-loop submarine scenarios, one triple per sweep,
# frozen from select_submarine_gains(param) with the default lattice
SUBMARINE_GAINS = {
    "a21": (0.01, 0.3, -0.15),
    "a22": (0.05, 0.05, -3.0),
    "a23": (0.01, 0.05, -0.07),
    "a32": (0.01, 0.05, -0.5),
    "a33": (0.35, 0.05, -0.07),
}

# frozen solver horizons (seconds), from recommended_horizon rounded up to
# two significant figures
_HORIZONS = {
    "fig2": 17000.0,
    "fig3": 8200.0,
    "fig4": 91.0,
    "fig5": 10.0,
    "fig6": 10.0,
    "fig7": 170.0,
    "fig9": 880.0,
    "fig10": 15.0,
    "fig12": 4400.0,
    "fig13": 1100.0,
    "fig14": 15000.0,
    "fig15": 5500.0,
    "fig16": 1900.0,
    "fig17": 5200.0,
    "fig18": 3600.0,
    "fig19": 240.0,
    "fig20": 900.0,
    "fig21": 230.0,
}

_SUBMARINE_OPEN_BOX = ((-250.0, 250.0), (-2.0, 2.0), (-3.0, 3.0))
_SUBMARINE_CLOSED_BOX = ((-1500.0, 1500.0), (-2.0, 2.0), (-5.0, 5.0))


def _build_fig2() -> SweepSpec:
    return SweepSpec(
        name="fig2",
        family=INTEGRATORS,
        params={"T1": 100.0, "T2": 1000.0},
        gains=(1.0, -5.0, -2.0),
        input_level=0.0,
        vary=(VaryAxis("T2", -4500.0, 4500.0, 1000.0),),
        x0=(-1.0, 0.0),
        solver=_solver(_HORIZONS["fig2"]),
        notes="series integrators, drive-constant sweep; both signs covered",
    )


def _build_fig3() -> SweepSpec:
    return SweepSpec(
        name="fig3",
        family=INTEGRATORS,
        params={"T1": 100.0, "T2": 1000.0},
        gains=(2.0, -3.0, -1.0),
        input_level=0.0,
        vary=(VaryAxis("T1", -450.0, 450.0, 100.0),),
        x0=(-0.25, 0.0),
        solver=_solver(_HORIZONS["fig3"]),
        notes="series integrators, measurement-constant sweep",
    )


def _build_fig4() -> SweepSpec:
    return SweepSpec(
        name="fig4",
        family=CCF,
        params={"a1": 1.0, "a2": 2.0},
        gains=(4.0, -4.0, -6.0),
        input_level=0.0,
        vary=(VaryAxis("a2", -9.5, 9.5, 1.0),),
        x0=(0.05, 0.0),
        solver=_solver(_HORIZONS["fig4"]),
        notes="companion-form plant; attractor hands over at a2 = -6",
    )


def _build_fig5() -> SweepSpec:
    return SweepSpec(
        name="fig5",
        family=JORDAN,
        params={"rho1": 750.0, "rho2": 750.0},
        gains=(2.0, 5.0, 5.0),
        input_level=0.0,
        vary=(
            VaryAxis("rho1", -1250.0, 1250.0, 500.0),
            VaryAxis("rho2", -1250.0, 1250.0, 500.0),
        ),
        combine=PRODUCT,
        x0=(50.0, 50.0),
        solver=_solver(_HORIZONS["fig5"]),
        notes="full grid over both mode rates; 36 runs, one attractor each",
    )


def _build_fig6() -> SweepSpec:
    return SweepSpec(
        name="fig6",
        family=EPIDEMIC,
        params={"alpha": 1.0, "beta": 4.0, "gamma": 4.0},
        gains=None,
        input_level=0.0,
        vary=(
            VaryAxis("beta", 4.0, 6.0, 2.0),
            VaryAxis("gamma", 4.0, 6.0, 2.0),
        ),
        combine=PRODUCT,
        x0=(1.0, 0.0, 0.0),
        solver=_solver(_HORIZONS["fig6"]),
        eq_box=((-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)),
        notes=(
            "open-loop compartment model; the removed-pool column is zero, so"
            " rest points form a line and runs settle wherever the absorbed"
            " total lands, matching a candidate only by coincidence"
        ),
    )


def _build_fig7() -> SweepSpec:
    return SweepSpec(
        name="fig7",
        family=EPIDEMIC,
        params={"alpha": 1.0, "beta": 4.0, "gamma": 4.0},
        gains=(1.0, 1.0, -1.0),
        input_level=0.0,
        vary=(
            VaryAxis("beta", 4.0, 6.0, 2.0),
            VaryAxis("gamma", 4.0, 6.0, 2.0),
        ),
        combine=PRODUCT,
        x0=(1.0, 0.0, 0.0),
        solver=_solver(_HORIZONS["fig7"]),
        notes=(
            "grid reading of the paired range; at equal contact and recovery"
            " rates the target rest point is nonhyperbolic, yet every run"
            " still settles onto it"
        ),
    )


def _build_fig9() -> SweepSpec:
    return SweepSpec(
        name="fig9",
        family=AIRCRAFT,
        params=_aircraft_params(),
        gains=(0.1, 0.3, 0.7),
        input_level=1.0,
        vary=(VaryAxis("a_y_alpha", -5.6, 1.4, 0.5),),
        x0=(0.0, 0.0, 0.0),
        solver=_solver(_HORIZONS["fig9"]),
        eq_box=((-30.0, 30.0), (-5.0, 5.0), (-30.0, 30.0)),
        notes="lift-slope sweep under constant actuator input",
    )


def _build_fig10() -> SweepSpec:
    return SweepSpec(
        name="fig10",
        family=AIRCRAFT,
        params=_aircraft_params(),
        gains=(1.0, 3.0, 7.0),
        input_level=1.0,
        vary=(
            VaryAxis("a_y_alpha", -4.1, -0.1, 1.0),
            VaryAxis("a_mz_alpha", 9.4, 49.4, 10.0),
            VaryAxis("a_mz_omega_z", 0.18, 4.18, 1.0),
        ),
        combine=ZIP,
        x0=(0.0, 0.0, 0.0),
        solver=_solver(_HORIZONS["fig10"]),
        eq_box=((-12.0, 12.0), (-5.0, 5.0), (-12.0, 12.0)),
        notes=(
            "joint three-parameter deviation sweep; with these gains the"
            " closed-loop trace stays positive, so no run has a stable rest"
            " point and every trajectory escapes in finite time"
        ),
    )


def _submarine_open(name: str, param: str) -> SweepSpec:
    start, stop, step = _SUBMARINE_RANGES[param]
    return SweepSpec(
        name=name,
        family=SUBMARINE,
        params=_submarine_params(),
        gains=None,
        input_level=1.0,
        vary=(VaryAxis(param, start, stop, step),),
        x0=(0.0, 0.0, 0.0),
        solver=_solver(_HORIZONS[name]),
        eq_box=_SUBMARINE_OPEN_BOX,
        notes=f"open-loop stern-plane response, {param} perturbed",
    )


def _submarine_closed(name: str, param: str) -> SweepSpec:
    start, stop, step = _SUBMARINE_RANGES[param]
    return SweepSpec(
        name=name,
        family=SUBMARINE,
        params=_submarine_params(),
        gains=SUBMARINE_GAINS[param],
        input_level=1.0,
        vary=(VaryAxis(param, start, stop, step),),
        x0=(0.0, 0.0, 0.0),
        solver=_solver(_HORIZONS[name]),
        eq_box=_SUBMARINE_CLOSED_BOX,
        notes=(
            f"closed-loop counterpart of the {param} sweep; gains frozen from"
            " select_submarine_gains"
        ),
    )


_BUILDERS = {
    "fig2": _build_fig2,
    "fig3": _build_fig3,
    "fig4": _build_fig4,
    "fig5": _build_fig5,
    "fig6": _build_fig6,
    "fig7": _build_fig7,
    "fig9": _build_fig9,
    "fig10": _build_fig10,
    "fig12": lambda: _submarine_open("fig12", "a21"),
    "fig13": lambda: _submarine_open("fig13", "a22"),
    "fig14": lambda: _submarine_open("fig14", "a23"),
    "fig15": lambda: _submarine_open("fig15", "a32"),
    "fig16": lambda: _submarine_open("fig16", "a33"),
    "fig17": lambda: _submarine_closed("fig17", "a21"),
    "fig18": lambda: _submarine_closed("fig18", "a22"),
    "fig19": lambda: _submarine_closed("fig19", "a23"),
    "fig20": lambda: _submarine_closed("fig20", "a32"),
    "fig21": lambda: _submarine_closed("fig21", "a33"),
}


def scenario_names() -> tuple:
    return tuple(_BUILDERS)


def get_scenario(name: str) -> SweepSpec:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}") from None
    return builder()


def builtin_scenarios() -> list:
    return [get_scenario(name) for name in scenario_names()]


def recommended_horizon(spec: SweepSpec, conv_tol: float = None) -> float:
    """Horizon long enough for every run's verdict to be trustworthy.

    For runs with a stable candidate equilibrium the rule is the time for
    the slowest mode to shrink the worst-case initial distance below a tenth
    of the convergence tolerance; for runs with only unstable equilibria it
    is the time for the fastest growing mode to escape by a factor e^20.
    The result is clamped to [HORIZON_MIN, HORIZON_MAX] and is meant to be
    frozen into the scenario, not recomputed per run.
    """
    tol = spec.conv_tol if conv_tol is None else conv_tol
    worst = 0.0
    for values in spec.combos():
        system = spec.system_for(values)
        candidates = candidate_equilibria(system, spec)
        stable = [eq for eq in candidates if eq.verdict == STABLE]
        if stable:
            need = 0.0
            for eq in stable:
                rate = min(abs(z.real) for z in eq.eigenvalues)
                dist = max(
                    abs(a - b) for a, b in zip(spec.x0, eq.point)
                )
                need = max(
                    need, math.log(10.0 * max(dist, 1.0) / tol) / rate
                )
            worst = max(worst, need)
            continue
        growth = [
            z.real
            for eq in candidates
            for z in eq.eigenvalues
            if z.real > 0.0
        ]
        if growth:
            worst = max(worst, 20.0 / max(growth))
    return min(max(worst, HORIZON_MIN), HORIZON_MAX)


# search lattice for select_submarine_gains, in search order; small
# pitch-rate gains first because they leave the slow mode faster
GAIN_LATTICE = (
    tuple((0.01, 0.05, 0.35, 1.0)),
    tuple((0.05, 0.3)),
    tuple((-0.07, -0.15, -0.5, -1.5, -3.0)),
)


def _submarine_equilibria(params, gains, input_level):
    """Rest points of the closed-loop submarine, solved directly.

    With the standard wiring the third state equation is quadratic in x3
    (x2 = 0 and x1 follows from the second equation), so the roots come from
    the quadratic formula rather than a Newton search.
    """
    k1, k2, k3 = gains
    p = params
    if k1 == 0.0 or p.a21 == 0.0:
        raise ValueError("direct solve needs k1 != 0 and a21 != 0")
    disc = (p.a33 + k2) ** 2 + 4.0 * k1 * p.b3 * input_level
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    points = []
    for branch in (-1.0, 1.0):
        x3 = ((p.a33 + k2) + branch * root) / (2.0 * k1)
        x1 = -(p.b2 * input_level + p.a23 * x3) / p.a21
        points.append((x1, 0.0, x3))
    return points


def _eigen_feasible(param: str, values, gains) -> bool:
    base = _submarine_params()
    for value in values:
        params = make_params(SUBMARINE, {**base, param: value})
        system = build_system(
            SUBMARINE, params, standard_feedback(SUBMARINE, gains, params), 1.0
        )
        stable = False
        for point in _submarine_equilibria(params, gains, 1.0):
            eq = classify_equilibrium(system, point, residual_tol=1e-6)
            if eq.verdict == STABLE:
                stable = True
                break
        if not stable:
            return False
    return True


def select_submarine_gains(
    param: str, lattice=GAIN_LATTICE, validate: bool = True
) -> tuple:
    """First gain triple on the lattice that works for the given sweep.

    A triple works when every swept value leaves an eigenvalue-stable rest
    point and, with validate on, every run launched from the scenario's
    initial state actually converges to one within the recommended horizon.
    The validation pass matters: a stable rest point whose basin misses the
    origin still loses the vehicle.  Raises when the lattice is exhausted.
    """
    from .sweeps import run_sweep

    start, stop, step = _SUBMARINE_RANGES[param]
    values = VaryAxis(param, start, stop, step).values()
    for gains in itertools.product(*lattice):
        if not _eigen_feasible(param, values, gains):
            continue
        if not validate:
            return gains
        spec = SweepSpec(
            name=f"probe_{param}",
            family=SUBMARINE,
            params=_submarine_params(),
            gains=gains,
            input_level=1.0,
            vary=(VaryAxis(param, start, stop, step),),
            x0=(0.0, 0.0, 0.0),
            solver=_solver(HORIZON_MIN),
            eq_box=_SUBMARINE_CLOSED_BOX,
        )
        spec = spec.with_horizon(recommended_horizon(spec))
        result = run_sweep(spec, keep_trajectories=False)
        good = all(
            record.verdict is not None and record.verdict.kind == CONVERGED
            for record in result.records
        )
        if good:
            return gains
    raise ValueError(f"no lattice gains stabilize the {param} sweep")
