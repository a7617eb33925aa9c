"""Plant families and their closed loops.

Six families are supported; every open-loop plant here is linear, so a system
is assembled as

    dx/dt = A(params) x + B(params) * input_level + sum_i c_i(params) * u_i(x)

where each u_i is a :class:`~umbilic.catalog.ControllerSpec` polynomial and
c_i is the (fixed) channel vector through which that law enters.  The channel
is the input column for most families; the submarine family is the exception,
with the scalar input acting through (0, b2, b3) while the feedback law is
added to the third state equation directly.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .catalog import (
    CUSP,
    ELLIPTIC_UMBILIC,
    ControllerSpec,
    axis_quadratic,
    elliptic_feedback,
)

INTEGRATORS = "integrators"
CCF = "ccf"
JORDAN = "jordan"
EPIDEMIC = "epidemic"
AIRCRAFT = "aircraft"
SUBMARINE = "submarine"

FAMILIES = (INTEGRATORS, CCF, JORDAN, EPIDEMIC, AIRCRAFT, SUBMARINE)


@dataclass(frozen=True)
class IntegratorsParams:
    """Two integrators in series with time constants T1, T2."""

    T1: float
    T2: float

    def __post_init__(self):
        if self.T1 == 0.0 or self.T2 == 0.0:
            raise ValueError("integrator time constants must be nonzero")


@dataclass(frozen=True)
class CcfParams:
    """Second-order plant in controllable canonical form."""

    a1: float
    a2: float


@dataclass(frozen=True)
class JordanParams:
    """Two decoupled first-order modes with rates rho1, rho2."""

    rho1: float
    rho2: float


@dataclass(frozen=True)
class EpidemicParams:
    """Closed-population compartment model.

    x1 are susceptibles leaving at rate alpha (contact) plus beta (latent
    infection), x2 are infectious recovering at rate gamma, x3 accumulates
    the removed.
    """

    alpha: float
    beta: float
    gamma: float


@dataclass(frozen=True)
class AircraftParams:
    """Short-period longitudinal dynamics, one actuator on the pitch channel."""

    a_y_alpha: float
    a_mz_alpha: float
    a_mz_omega_z: float
    a_mz_delta_a: float


@dataclass(frozen=True)
class SubmarineParams:
    """Depth/pitch linear model with stern-plane input gains b2, b3."""

    a12: float
    a21: float
    a22: float
    a23: float
    a32: float
    a33: float
    b2: float
    b3: float


_PARAMS_CLS = {
    INTEGRATORS: IntegratorsParams,
    CCF: CcfParams,
    JORDAN: JordanParams,
    EPIDEMIC: EpidemicParams,
    AIRCRAFT: AircraftParams,
    SUBMARINE: SubmarineParams,
}

_DIM = {
    INTEGRATORS: 2,
    CCF: 2,
    JORDAN: 2,
    EPIDEMIC: 3,
    AIRCRAFT: 3,
    SUBMARINE: 3,
}

# index of the measured output y within the state vector
_OUTPUT_INDEX = {
    INTEGRATORS: 0,
    CCF: 0,
    JORDAN: 0,
    EPIDEMIC: 2,
    AIRCRAFT: 2,
    SUBMARINE: 2,
}

# how many feedback laws a closed loop of each family carries
_CONTROLLER_COUNTS = {
    INTEGRATORS: (0, 1),
    CCF: (0, 1),
    JORDAN: (0, 2),
    EPIDEMIC: (0, 1),
    AIRCRAFT: (0, 1),
    SUBMARINE: (0, 1),
}

NOMINAL_AIRCRAFT = AircraftParams(
    a_y_alpha=-2.10, a_mz_alpha=29.4, a_mz_omega_z=2.18, a_mz_delta_a=60.7
)

NOMINAL_SUBMARINE = SubmarineParams(
    a12=1.0, a21=-0.0071, a22=-0.111, a23=0.12, a32=0.07, a33=-0.3,
    b2=-0.095, b3=0.072,
)


def _open_matrix(family: str, p) -> np.ndarray:
    if family == INTEGRATORS:
        return np.array([[0.0, 1.0 / p.T1], [0.0, 0.0]])
    if family == CCF:
        return np.array([[0.0, 1.0], [-p.a2, -p.a1]])
    if family == JORDAN:
        return np.array([[p.rho1, 0.0], [0.0, p.rho2]])
    if family == EPIDEMIC:
        return np.array(
            [
                [-p.alpha, -p.beta, 0.0],
                [p.beta, -p.gamma, 0.0],
                [p.alpha, p.gamma, 0.0],
            ]
        )
    if family == AIRCRAFT:
        return np.array(
            [
                [p.a_y_alpha, 0.0, -p.a_y_alpha],
                [p.a_mz_alpha, -p.a_mz_omega_z, -p.a_mz_alpha],
                [0.0, 1.0, 0.0],
            ]
        )
    # submarine
    return np.array(
        [
            [0.0, p.a12, 0.0],
            [p.a21, p.a22, p.a23],
            [0.0, p.a32, p.a33],
        ]
    )


def _input_vector(family: str, p) -> np.ndarray:
    if family == INTEGRATORS:
        return np.array([0.0, 1.0 / p.T2])
    if family == CCF:
        return np.array([0.0, 1.0])
    if family == JORDAN:
        return np.array([1.0, 1.0])
    if family == EPIDEMIC:
        return np.array([0.0, 1.0, 0.0])
    if family == AIRCRAFT:
        return np.array([0.0, p.a_mz_delta_a, 0.0])
    return np.array([0.0, p.b2, p.b3])


def _control_channels(family: str, p) -> tuple:
    if family == INTEGRATORS:
        return (np.array([0.0, 1.0 / p.T2]),)
    if family == CCF:
        return (np.array([0.0, 1.0]),)
    if family == JORDAN:
        return (np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    if family == EPIDEMIC:
        return (np.array([0.0, 1.0, 0.0]),)
    if family == AIRCRAFT:
        return (np.array([0.0, p.a_mz_delta_a, 0.0]),)
    # submarine: the law is appended to the third state equation as-is
    return (np.array([0.0, 0.0, 1.0]),)


@dataclass(frozen=True)
class ClosedLoopSystem:
    """A plant with zero or more polynomial feedback laws and a constant input."""

    family: str
    params: object
    controllers: tuple = ()
    input_level: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        expected = _PARAMS_CLS[self.family]
        if not isinstance(self.params, expected):
            raise TypeError(
                f"{self.family} takes {expected.__name__}, got {type(self.params).__name__}"
            )
        ctrls = tuple(self.controllers)
        if len(ctrls) not in _CONTROLLER_COUNTS[self.family]:
            allowed = " or ".join(str(n) for n in _CONTROLLER_COUNTS[self.family])
            raise ValueError(f"{self.family} takes {allowed} feedback laws")
        dim = _DIM[self.family]
        for spec in ctrls:
            if not isinstance(spec, ControllerSpec):
                raise TypeError("controllers must be ControllerSpec instances")
            if max(spec.state_map) >= dim:
                raise ValueError(
                    f"state_map {spec.state_map} out of range for dimension {dim}"
                )
        level = float(self.input_level)
        if not np.isfinite(level):
            raise ValueError("input_level must be finite")
        object.__setattr__(self, "controllers", ctrls)
        object.__setattr__(self, "input_level", level)
        object.__setattr__(self, "_a", _open_matrix(self.family, self.params))
        object.__setattr__(self, "_b", _input_vector(self.family, self.params))
        object.__setattr__(self, "_channels", _control_channels(self.family, self.params))

    @property
    def dim(self) -> int:
        return _DIM[self.family]

    @property
    def output_index(self) -> int:
        return _OUTPUT_INDEX[self.family]

    def open_matrix(self) -> np.ndarray:
        return self._a.copy()

    def rhs(self, state, t: float = 0.0) -> np.ndarray:
        """Time derivative of the state.  t is accepted but unused; the
        closed loop is autonomous by construction."""
        x = np.asarray(state, dtype=float)
        dx = self._a @ x + self._b * self.input_level
        for spec, chan in zip(self.controllers, self._channels):
            dx = dx + chan * spec.value(x)
        return dx

    def jacobian(self, state) -> np.ndarray:
        x = np.asarray(state, dtype=float)
        jac = self._a.copy()
        for spec, chan in zip(self.controllers, self._channels):
            jac += np.outer(chan, spec.gradient(x))
        return jac

    def output(self, state) -> float:
        return float(state[self.output_index])

    def to_obj(self) -> dict:
        return {
            "family": self.family,
            "params": {f.name: getattr(self.params, f.name) for f in fields(self.params)},
            "controllers": [spec.to_obj() for spec in self.controllers],
            "input": self.input_level,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "ClosedLoopSystem":
        family = obj["family"]
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        params = _PARAMS_CLS[family](**obj["params"])
        controllers = tuple(ControllerSpec.from_obj(c) for c in obj.get("controllers", ()))
        return cls(
            family=family,
            params=params,
            controllers=controllers,
            input_level=float(obj.get("input", 0.0)),
        )


def make_params(family: str, values: dict):
    """Build the parameter record for a family from a name/value mapping."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    return _PARAMS_CLS[family](**values)


def param_names(family: str) -> tuple:
    return tuple(f.name for f in fields(_PARAMS_CLS[family]))


def build_system(family, params, controllers=(), input_level=0.0) -> ClosedLoopSystem:
    """Assemble a closed loop.  params may be a mapping or a params record."""
    if isinstance(params, dict):
        params = make_params(family, params)
    return ClosedLoopSystem(
        family=family,
        params=params,
        controllers=tuple(controllers),
        input_level=input_level,
    )


def compiled_rhs(system: ClosedLoopSystem):
    """Closure computing the system derivative on plain float tuples.

    The array rhs dominates integration cost at dimensions 2 and 3 via
    per-call numpy overhead; solvers use this float path instead.  Both
    paths evaluate the same formulas.
    """
    a = tuple(tuple(float(v) for v in row) for row in system._a)
    n = len(a)
    forcing = tuple(float(b * system.input_level) for b in system._b)
    laws = tuple(
        (spec.value, tuple((i, float(c)) for i, c in enumerate(chan) if c != 0.0))
        for spec, chan in zip(system.controllers, system._channels)
    )

    def rhs(x):
        dx = []
        for i in range(n):
            row = a[i]
            acc = forcing[i]
            for j in range(n):
                acc += row[j] * x[j]
            dx.append(acc)
        for value, entries in laws:
            u = value(x)
            for i, c in entries:
                dx[i] += c * u
        return tuple(dx)

    return rhs


def standard_feedback(family: str, coeffs, params=None) -> tuple:
    """The family's usual feedback wiring for a coefficient tuple.

    integrators / ccf : one elliptic-umbilic law with germ on states (x1, x2),
        scaled by -1; coeffs = (k1, k2, k3).
    jordan : two single-axis quadratic laws; coeffs = (ka, kb, kc) giving
        u1 = -ka x1^2 + kb x1 and u2 = -ka x2^2 + kc x2.
    epidemic / submarine : one germ-free elliptic-umbilic law on (x2, x3)
        scaled by -1; coeffs = (k1, k2, k3).
    aircraft : as epidemic but scaled by -1/b2 so the law cancels the
        actuator gain it passes through; needs params for b2.
    """
    if family in (INTEGRATORS, CCF):
        k1, k2, k3 = coeffs
        return (elliptic_feedback(k1, k2, k3),)
    if family == JORDAN:
        ka, kb, kc = coeffs
        return (axis_quadratic(ka, kb, 0), axis_quadratic(ka, kc, 1))
    if family in (EPIDEMIC, SUBMARINE):
        k1, k2, k3 = coeffs
        return (
            elliptic_feedback(k1, k2, k3, state_map=(1, 2), include_germ=False),
        )
    if family == AIRCRAFT:
        if params is None:
            raise ValueError("aircraft feedback needs params for the actuator gain")
        b2 = params.a_mz_delta_a
        if b2 == 0.0:
            raise ValueError("a_mz_delta_a must be nonzero")
        k1, k2, k3 = coeffs
        return (
            elliptic_feedback(
                k1, k2, k3, state_map=(1, 2), include_germ=False, sign=-1.0 / b2
            ),
        )
    raise ValueError(f"unknown family {family!r}")


def standard_coefficients(system: ClosedLoopSystem) -> Optional[tuple]:
    """Recover the coefficient tuple if the system's feedback laws have the
    standard wiring of their family (see :func:`standard_feedback`); None
    otherwise."""
    specs = system.controllers
    family = system.family
    if family == JORDAN:
        if len(specs) != 2:
            return None
        for spec, idx in zip(specs, (0, 1)):
            if (
                spec.kind != CUSP
                or spec.include_germ
                or spec.sign != 1.0
                or spec.state_map != (idx,)
            ):
                return None
        ka1, ka2 = -specs[0].k[1], -specs[1].k[1]
        if ka1 != ka2:
            return None
        return (ka1, specs[0].k[0], specs[1].k[0])
    if len(specs) != 1:
        return None
    spec = specs[0]
    if spec.kind != ELLIPTIC_UMBILIC:
        return None
    if family in (INTEGRATORS, CCF):
        if not spec.include_germ or spec.sign != -1.0 or spec.state_map != (0, 1):
            return None
    elif family in (EPIDEMIC, SUBMARINE):
        if spec.include_germ or spec.sign != -1.0 or spec.state_map != (1, 2):
            return None
    elif family == AIRCRAFT:
        b2 = system.params.a_mz_delta_a
        if spec.include_germ or spec.state_map != (1, 2):
            return None
        if abs(spec.sign * b2 + 1.0) > 1e-12:
            return None
    else:
        return None
    return spec.k[:3]
