"""Equilibrium location and linear stability classification.

Closed-loop equilibria come from two routes: closed-form expressions known
for the standard feedback wirings (polynomial systems whose rest points
factor by hand), and a damped-Newton search seeded from a grid for
everything else.  Both routes end in the same record: the point, the
Jacobian eigenvalues there, and a three-way verdict.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .plants import (
    AIRCRAFT,
    CCF,
    EPIDEMIC,
    INTEGRATORS,
    JORDAN,
    ClosedLoopSystem,
    standard_coefficients,
)

# eigenvalue real parts within this band of zero make the verdict "marginal"
EPS_HYPERBOLIC = 1e-9

STABLE = "stable"
UNSTABLE = "unstable"
NONHYPERBOLIC = "nonhyperbolic"

RESIDUAL_TOL = 1e-9


class ClosedFormUnavailable(ValueError):
    """No hand-solved equilibrium table applies to this system."""


@dataclass(frozen=True)
class Equilibrium:
    point: tuple
    eigenvalues: tuple
    verdict: str
    source: str

    def to_obj(self) -> dict:
        return {
            "point": list(self.point),
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "verdict": self.verdict,
            "source": self.source,
        }


def _sort_key(z: complex):
    return (z.real, z.imag)


def eigenvalues_2x2(matrix) -> tuple:
    """Both eigenvalues from the trace and determinant."""
    m = np.asarray(matrix, dtype=float)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    root = cmath.sqrt(tr * tr - 4.0 * det)
    pair = ((tr - root) / 2.0, (tr + root) / 2.0)
    return tuple(sorted(pair, key=_sort_key))


def matrix_eigenvalues(matrix) -> tuple:
    m = np.asarray(matrix, dtype=float)
    if m.shape == (2, 2):
        return eigenvalues_2x2(m)
    vals = np.linalg.eigvals(m)
    return tuple(sorted((complex(z) for z in vals), key=_sort_key))


def classify(eigenvalues, eps: float = EPS_HYPERBOLIC) -> str:
    reals = [z.real for z in eigenvalues]
    if all(r < -eps for r in reals):
        return STABLE
    if any(r > eps for r in reals):
        return UNSTABLE
    return NONHYPERBOLIC


def is_hyperbolic(eigenvalues, eps: float = EPS_HYPERBOLIC) -> bool:
    return all(abs(z.real) > eps for z in eigenvalues)


def classify_equilibrium(
    system: ClosedLoopSystem, point, source: str = "numeric",
    residual_tol: float = 1e-6,
) -> Equilibrium:
    """Classify a candidate rest point.  Rejects points that do not actually
    sit on the vector field's zero set."""
    x = np.asarray(point, dtype=float)
    residual = float(np.max(np.abs(system.rhs(x))))
    if residual > residual_tol:
        raise ValueError(
            f"point {tuple(x)} has residual {residual:.3e}, not an equilibrium"
        )
    eigs = matrix_eigenvalues(system.jacobian(x))
    return Equilibrium(
        point=tuple(float(v) for v in x),
        eigenvalues=eigs,
        verdict=classify(eigs),
        source=source,
    )


def closed_form_points(system: ClosedLoopSystem) -> list:
    """(name, point) pairs from the hand-solved tables.

    Only the standard feedback wiring with zero external input is covered;
    anything else raises :class:`ClosedFormUnavailable`.  Entries whose
    formula divides by a zero gain are omitted.
    """
    coeffs = standard_coefficients(system)
    if coeffs is None:
        raise ClosedFormUnavailable(
            f"no closed-form table for this {system.family} feedback wiring"
        )
    if system.input_level != 0.0:
        raise ClosedFormUnavailable("closed-form tables assume zero external input")
    p = system.params
    family = system.family
    if family in (INTEGRATORS, CCF):
        k1, k2, k3 = coeffs
        out = [("origin", (0.0, 0.0))]
        shift = k3 if family == INTEGRATORS else k3 - p.a2
        if k1 != 0.0:
            out.append(("offset", (shift / k1, 0.0)))
        return out
    if family == JORDAN:
        ka, kb, kc = coeffs
        out = [("origin", (0.0, 0.0))]
        if ka != 0.0:
            x1 = (p.rho1 + kb) / ka
            x2 = (p.rho2 + kc) / ka
            out.extend([("axis2", (0.0, x2)), ("axis1", (x1, 0.0)), ("both", (x1, x2))])
        return out
    if family == EPIDEMIC:
        k1, k2, k3 = coeffs
        out = [("origin", (0.0, 0.0, 0.0))]
        if k1 != 0.0:
            out.append(("offset", (0.0, 0.0, k2 / k1)))
        return out
    if family == AIRCRAFT:
        k1, k2, k3 = coeffs
        out = [("origin", (0.0, 0.0, 0.0))]
        if k1 != 0.0:
            out.append(("offset", (k2 / k1, 0.0, k2 / k1)))
        return out
    raise ClosedFormUnavailable(f"no closed-form table for family {family!r}")


def closed_form_equilibria(system: ClosedLoopSystem) -> list:
    return [
        classify_equilibrium(system, point, source=name)
        for name, point in closed_form_points(system)
    ]


def _newton(system: ClosedLoopSystem, start, max_iter: int, tol: float):
    x = np.asarray(start, dtype=float)
    res = system.rhs(x)
    res_norm = float(np.max(np.abs(res)))
    for _ in range(max_iter):
        try:
            step = np.linalg.solve(system.jacobian(x), -res)
        except np.linalg.LinAlgError:
            return x if res_norm <= tol else None
        scale = 1.0
        while scale > 1e-4:
            trial = x + scale * step
            trial_res = system.rhs(trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm <= res_norm or not np.isfinite(res_norm):
                break
            scale /= 2.0
        moved = float(np.max(np.abs(scale * step)))
        x = x + scale * step
        res = system.rhs(x)
        res_norm = float(np.max(np.abs(res)))
        if moved <= 1e-12:
            break
    return x if res_norm <= tol else None


def find_equilibria_numeric(
    system: ClosedLoopSystem,
    box,
    grid_n: int = 5,
    tol: float = RESIDUAL_TOL,
    max_iter: int = 100,
    dedup_radius: float = 1e-6,
) -> list:
    """Damped-Newton sweep from a grid of starts inside `box`.

    box is one (low, high) pair per state component.  Roots closer than
    dedup_radius (sup-norm) are merged.  Results are classified and sorted
    lexicographically by coordinates.
    """
    box = [(float(lo), float(hi)) for lo, hi in box]
    if len(box) != system.dim:
        raise ValueError(f"box needs {system.dim} intervals, got {len(box)}")
    axes = [np.linspace(lo, hi, grid_n) for lo, hi in box]
    grids = np.meshgrid(*axes, indexing="ij")
    starts = np.stack([g.ravel() for g in grids], axis=-1)
    roots = []
    for start in starts:
        root = _newton(system, start, max_iter, tol)
        if root is None or not np.all(np.isfinite(root)):
            continue
        if any(float(np.max(np.abs(root - kept))) <= dedup_radius for kept in roots):
            continue
        roots.append(root)
    roots.sort(key=lambda r: tuple(r))
    return [
        classify_equilibrium(system, root, source="numeric", residual_tol=10.0 * tol)
        for root in roots
    ]
