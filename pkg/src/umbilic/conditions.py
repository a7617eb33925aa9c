"""Tabulated stability inequalities and their audit against eigenvalues.

Each standard feedback wiring ships a hand-derived set of sign conditions
meant to decide the stability of one closed-form equilibrium from the gains
and plant parameters alone.  The sets are stored as data (clause text plus
evaluator) so reports can show exactly which clause failed, and an audit
compares every set against direct eigenvalue classification over a parameter
grid.  The audit exists because such tables are easy to get wrong: see
KNOWN_DISCREPANCIES for the sets that are systematically inverted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .equilibria import (
    STABLE,
    classify_equilibrium,
    closed_form_points,
    is_hyperbolic,
)
from .plants import (
    AIRCRAFT,
    CCF,
    EPIDEMIC,
    INTEGRATORS,
    JORDAN,
    build_system,
    make_params,
    standard_feedback,
)

# fraction of decisive points at which predicted == not(oracle) that raises
# the systematic-inversion flag
INVERSION_THRESHOLD = 0.95


@dataclass(frozen=True)
class Clause:
    text: str
    claim: str  # ">" or "<": the clause asserts value > 0 or value < 0
    value: Callable

    def evaluate(self, coeffs, params) -> "ClauseResult":
        v = float(self.value(coeffs, params))
        ok = v > 0.0 if self.claim == ">" else v < 0.0
        return ClauseResult(text=self.text, value=v, satisfied=ok)


@dataclass(frozen=True)
class ClauseResult:
    text: str
    value: float
    satisfied: bool

    def to_obj(self) -> dict:
        return {"text": self.text, "value": self.value, "satisfied": self.satisfied}


@dataclass(frozen=True)
class ConditionReport:
    family: str
    equilibrium: str
    clauses: tuple

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.clauses)

    def to_obj(self) -> dict:
        return {
            "family": self.family,
            "equilibrium": self.equilibrium,
            "clauses": [c.to_obj() for c in self.clauses],
            "all_satisfied": self.all_satisfied,
        }


def _sets():
    s = {}
    s[(INTEGRATORS, "origin")] = (
        Clause("-k2/T2 > 0", ">", lambda c, p: -c[1] / p.T2),
        Clause("k3/(T1*T2) < 0", "<", lambda c, p: c[2] / (p.T1 * p.T2)),
    )
    s[(INTEGRATORS, "offset")] = (
        Clause(
            "-(3*k3^2 + k2*k1^2)/(k1^2*T2) > 0",
            ">",
            lambda c, p: -(3.0 * c[2] ** 2 + c[1] * c[0] ** 2) / (c[0] ** 2 * p.T2),
        ),
        Clause("k3/(T1*T2) > 0", ">", lambda c, p: c[2] / (p.T1 * p.T2)),
    )
    s[(CCF, "origin")] = (
        Clause("a1 - k2 > 0", ">", lambda c, p: p.a1 - c[1]),
        Clause("a2 - k3 > 0", ">", lambda c, p: p.a2 - c[2]),
    )
    s[(CCF, "offset")] = (
        Clause(
            "a1 - k2 + 3*(k3 - a2)^2/k1^2 > 0",
            ">",
            lambda c, p: p.a1 - c[1] + 3.0 * (c[2] - p.a2) ** 2 / c[0] ** 2,
        ),
        Clause("k3 - a2 > 0", ">", lambda c, p: c[2] - p.a2),
    )
    jordan_pairs = {
        "origin": (">", ">"),
        "axis2": (">", "<"),
        "axis1": ("<", ">"),
        "both": ("<", "<"),
    }
    for name, (op1, op2) in jordan_pairs.items():
        s[(JORDAN, name)] = (
            Clause(f"rho1 + kb {op1} 0", op1, lambda c, p: p.rho1 + c[1]),
            Clause(f"rho2 + kc {op2} 0", op2, lambda c, p: p.rho2 + c[2]),
        )
    s[(EPIDEMIC, "origin")] = (
        Clause("alpha + gamma - k3 > 0", ">", lambda c, p: p.alpha + p.gamma - c[2]),
        Clause(
            "(alpha + gamma - k3)*(alpha*(gamma - k3) - k2*gamma + beta^2)"
            " - k2*alpha*(beta - gamma) > 0",
            ">",
            lambda c, p: (p.alpha + p.gamma - c[2])
            * (p.alpha * (p.gamma - c[2]) - c[1] * p.gamma + p.beta**2)
            - c[1] * p.alpha * (p.beta - p.gamma),
        ),
        Clause(
            "k2*alpha*(beta - gamma) > 0",
            ">",
            lambda c, p: c[1] * p.alpha * (p.beta - p.gamma),
        ),
    )
    s[(EPIDEMIC, "offset")] = (
        Clause("alpha + gamma - k3 > 0", ">", lambda c, p: p.alpha + p.gamma - c[2]),
        Clause(
            "(alpha + gamma - k3)*(alpha*(gamma - k3) + k2*gamma + beta^2)"
            " + k2*alpha*(beta - gamma) > 0",
            ">",
            lambda c, p: (p.alpha + p.gamma - c[2])
            * (p.alpha * (p.gamma - c[2]) + c[1] * p.gamma + p.beta**2)
            + c[1] * p.alpha * (p.beta - p.gamma),
        ),
        Clause(
            "-k2*alpha*(beta - gamma) > 0",
            ">",
            lambda c, p: -c[1] * p.alpha * (p.beta - p.gamma),
        ),
    )
    s[(AIRCRAFT, "origin")] = (
        Clause(
            "a_mz_omega_z - k3 - a_y_alpha > 0",
            ">",
            lambda c, p: p.a_mz_omega_z - c[2] - p.a_y_alpha,
        ),
        Clause(
            "(a_mz_omega_z - k3 - a_y_alpha)*(a_y_alpha*(k3 - a_mz_omega_z)"
            " - k2 + a_mz_alpha) - k2*a_y_alpha > 0",
            ">",
            lambda c, p: (p.a_mz_omega_z - c[2] - p.a_y_alpha)
            * (p.a_y_alpha * (c[2] - p.a_mz_omega_z) - c[1] + p.a_mz_alpha)
            - c[1] * p.a_y_alpha,
        ),
        Clause("k2*a_y_alpha > 0", ">", lambda c, p: c[1] * p.a_y_alpha),
    )
    s[(AIRCRAFT, "offset")] = (
        Clause(
            "a_mz_omega_z + k3 - a_y_alpha > 0",
            ">",
            lambda c, p: p.a_mz_omega_z + c[2] - p.a_y_alpha,
        ),
        Clause(
            "(a_mz_omega_z + k3 - a_y_alpha)*(a_y_alpha*(k3 - a_mz_omega_z)"
            " + k2 + a_mz_alpha) + k2*a_y_alpha > 0",
            ">",
            lambda c, p: (p.a_mz_omega_z + c[2] - p.a_y_alpha)
            * (p.a_y_alpha * (c[2] - p.a_mz_omega_z) + c[1] + p.a_mz_alpha)
            + c[1] * p.a_y_alpha,
        ),
        Clause("-k2*a_y_alpha > 0", ">", lambda c, p: -c[1] * p.a_y_alpha),
    )
    return s


CONDITION_SETS = _sets()

# The four sign-pair sets for the jordan family assert the clause-wise
# opposite of what linearization gives (the Jacobian at the origin is
# diag(rho1 + kb, rho2 + kc), so origin stability needs both sums negative,
# not positive).  They are kept verbatim so the audit can demonstrate the
# inversion rather than silently repairing it.
KNOWN_DISCREPANCIES = {
    (JORDAN, "origin"): "clause-wise inverted against the eigenvalue oracle",
    (JORDAN, "axis2"): "clause-wise inverted against the eigenvalue oracle",
    (JORDAN, "axis1"): "clause-wise inverted against the eigenvalue oracle",
    (JORDAN, "both"): "clause-wise inverted against the eigenvalue oracle",
}


def condition_labels(family: str) -> tuple:
    return tuple(name for fam, name in CONDITION_SETS if fam == family)


def evaluate_conditions(family: str, equilibrium: str, coeffs, params) -> ConditionReport:
    """Evaluate one tabulated condition set verbatim, recording clause values."""
    key = (family, equilibrium)
    if key not in CONDITION_SETS:
        raise ValueError(f"no condition set for {family}/{equilibrium}")
    coeffs = tuple(float(v) for v in coeffs)
    if len(coeffs) != 3:
        raise ValueError("condition sets take exactly three gain values")
    clauses = tuple(cl.evaluate(coeffs, params) for cl in CONDITION_SETS[key])
    return ConditionReport(family=family, equilibrium=equilibrium, clauses=clauses)


@dataclass(frozen=True)
class AuditRecord:
    params: dict
    equilibrium: str
    point: tuple
    predicted_stable: bool
    oracle: str
    skipped: bool  # oracle point nonhyperbolic; no comparison made

    @property
    def agree(self) -> Optional[bool]:
        if self.skipped:
            return None
        return self.predicted_stable == (self.oracle == STABLE)

    def to_obj(self) -> dict:
        return {
            "params": self.params,
            "equilibrium": self.equilibrium,
            "point": list(self.point),
            "predicted_stable": self.predicted_stable,
            "oracle": self.oracle,
            "agree": self.agree,
        }


@dataclass(frozen=True)
class AuditSetSummary:
    equilibrium: str
    total: int
    skipped: int
    compared: int
    agreements: int
    decisive: int
    inversions: int

    @property
    def agreement_rate(self) -> Optional[float]:
        if self.compared == 0:
            return None
        return self.agreements / self.compared

    @property
    def inversion_rate(self) -> Optional[float]:
        if self.decisive == 0:
            return None
        return self.inversions / self.decisive

    @property
    def inversion_flag(self) -> bool:
        rate = self.inversion_rate
        return rate is not None and rate > INVERSION_THRESHOLD

    def to_obj(self) -> dict:
        return {
            "equilibrium": self.equilibrium,
            "total": self.total,
            "skipped": self.skipped,
            "compared": self.compared,
            "agreements": self.agreements,
            "agreement_rate": self.agreement_rate,
            "decisive": self.decisive,
            "inversions": self.inversions,
            "inversion_rate": self.inversion_rate,
            "inversion_flag": self.inversion_flag,
        }


@dataclass(frozen=True)
class AuditReport:
    family: str
    coeffs: tuple
    records: tuple
    summaries: tuple

    def to_obj(self) -> dict:
        return {
            "family": self.family,
            "coeffs": list(self.coeffs),
            "records": [r.to_obj() for r in self.records],
            "summary": [s.to_obj() for s in self.summaries],
        }


def audit_conditions(family: str, parameter_grid, coeffs) -> AuditReport:
    """Compare every condition set of a family against the eigenvalue oracle.

    parameter_grid is an ordered list of parameter-name/value mappings.  At
    each grid point the closed-form equilibria are classified through the
    Jacobian, and each condition set's verdict is compared where the point
    is hyperbolic.  A set is flagged as systematically inverted when its
    verdict is the negation of the oracle's on more than INVERSION_THRESHOLD
    of the decisive points (points where either side claims stability).
    """
    labels = condition_labels(family)
    if not labels:
        raise ValueError(f"family {family!r} has no condition sets to audit")
    if not parameter_grid:
        raise ValueError("parameter grid is empty")
    coeffs = tuple(float(v) for v in coeffs)
    records = []
    for values in parameter_grid:
        params = make_params(family, dict(values))
        system = build_system(
            family, params, standard_feedback(family, coeffs, params), 0.0
        )
        found = dict(closed_form_points(system))
        for label in labels:
            if label not in found:
                continue
            point = found[label]
            report = evaluate_conditions(family, label, coeffs, params)
            eq = classify_equilibrium(system, point, source=label)
            records.append(
                AuditRecord(
                    params=dict(values),
                    equilibrium=label,
                    point=eq.point,
                    predicted_stable=report.all_satisfied,
                    oracle=eq.verdict,
                    skipped=not is_hyperbolic(eq.eigenvalues),
                )
            )
    summaries = []
    for label in labels:
        rows = [r for r in records if r.equilibrium == label]
        live = [r for r in rows if not r.skipped]
        agreements = sum(1 for r in live if r.agree)
        decisive = [r for r in live if r.predicted_stable or r.oracle == STABLE]
        inversions = sum(1 for r in decisive if not r.agree)
        summaries.append(
            AuditSetSummary(
                equilibrium=label,
                total=len(rows),
                skipped=len(rows) - len(live),
                compared=len(live),
                agreements=agreements,
                decisive=len(decisive),
                inversions=inversions,
            )
        )
    return AuditReport(
        family=family,
        coeffs=coeffs,
        records=tuple(records),
        summaries=tuple(summaries),
    )


def builtin_audit_grid(family: str) -> tuple:
    """The stock audit setup for a family: (parameter grid, gains).

    Grids reuse the sweep scenarios' parameter values so audit findings and
    simulation behavior can be cross-read; they stay clear of nonhyperbolic
    boundaries except where noted (equal beta/gamma points are reported as
    skipped rather than excluded).
    """
    if family == INTEGRATORS:
        grid = [
            {"T1": t1, "T2": t2}
            for t1 in (-1000.0, -100.0, 100.0, 1000.0)
            for t2 in (-1000.0, -100.0, 100.0, 1000.0)
        ]
        return grid, (1.0, -5.0, -2.0)
    if family == CCF:
        grid = [{"a1": 1.0, "a2": -9.5 + i * 1.0} for i in range(20)]
        return grid, (4.0, -4.0, -6.0)
    if family == JORDAN:
        values = np.linspace(-1250.0, 1250.0, 21)
        grid = [
            {"rho1": float(r1), "rho2": float(r2)} for r1 in values for r2 in values
        ]
        return grid, (2.0, 5.0, 5.0)
    if family == EPIDEMIC:
        grid = [
            {"alpha": 1.0, "beta": b, "gamma": g}
            for b in (4.0, 6.0)
            for g in (4.0, 6.0)
        ]
        return grid, (1.0, 1.0, -1.0)
    if family == AIRCRAFT:
        grid = [
            {
                "a_y_alpha": -5.6 + i * 0.5,
                "a_mz_alpha": 29.4,
                "a_mz_omega_z": 2.18,
                "a_mz_delta_a": 60.7,
            }
            for i in range(15)
        ]
        return grid, (0.1, 0.3, 0.7)
    raise ValueError(f"family {family!r} has no condition sets to audit")
