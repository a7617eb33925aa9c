"""Catalog of the seven structurally stable polynomial germs and their unfoldings.

Each entry is a scalar polynomial in one or two canonical variables plus a
linear combination of unfolding terms weighted by coefficients k1..k4.  A
feedback law is one of these polynomials evaluated on selected plant states
and scaled by a constant, which is how every controller in this package is
stored (see :class:`ControllerSpec`).

Canonical variables are ordered (x1,) for the single-variable forms and
(x1, x2) for the umbilics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FOLD = "fold"
CUSP = "cusp"
SWALLOWTAIL = "swallowtail"
BUTTERFLY = "butterfly"
HYPERBOLIC_UMBILIC = "hyperbolic_umbilic"
ELLIPTIC_UMBILIC = "elliptic_umbilic"
PARABOLIC_UMBILIC = "parabolic_umbilic"

# kind -> (number of canonical variables, number of unfolding coefficients)
_SHAPE = {
    FOLD: (1, 1),
    CUSP: (1, 2),
    SWALLOWTAIL: (1, 3),
    BUTTERFLY: (1, 4),
    HYPERBOLIC_UMBILIC: (2, 3),
    ELLIPTIC_UMBILIC: (2, 3),
    PARABOLIC_UMBILIC: (2, 4),
}

KINDS = tuple(_SHAPE)


def variable_count(kind: str) -> int:
    return _SHAPE[kind][0]


def coefficient_count(kind: str) -> int:
    return _SHAPE[kind][1]


def _check_kind(kind: str) -> None:
    if kind not in _SHAPE:
        raise ValueError(f"unknown catalog kind {kind!r}; expected one of {KINDS}")


def _check_point(kind: str, point) -> tuple:
    pt = tuple(float(v) for v in point)
    if len(pt) != variable_count(kind):
        raise ValueError(
            f"{kind} takes {variable_count(kind)} canonical variable(s), got {len(pt)}"
        )
    return pt


def germ_value(kind: str, point) -> float:
    """Value of the k-free part of the polynomial at a canonical point."""
    _check_kind(kind)
    pt = _check_point(kind, point)
    if kind == FOLD:
        (x,) = pt
        return x**3
    if kind == CUSP:
        (x,) = pt
        return x**4
    if kind == SWALLOWTAIL:
        (x,) = pt
        return x**5
    if kind == BUTTERFLY:
        (x,) = pt
        return x**6
    x1, x2 = pt
    if kind == HYPERBOLIC_UMBILIC:
        return x2**3 + x1**3
    if kind == ELLIPTIC_UMBILIC:
        return x2**3 - 3.0 * x2 * x1**2
    # parabolic umbilic
    return x2**2 * x1 + x1**4


def unfolding_value(kind: str, point, k) -> float:
    """Value of the coefficient-weighted terms at a canonical point.

    k is the dense coefficient vector (k1, k2, k3, k4); entries past the
    kind's coefficient count must be zero and are ignored here.
    """
    _check_kind(kind)
    pt = _check_point(kind, point)
    k1, k2, k3, k4 = (float(v) for v in k)
    if kind == FOLD:
        (x,) = pt
        return k1 * x
    if kind == CUSP:
        (x,) = pt
        return k2 * x**2 + k1 * x
    if kind == SWALLOWTAIL:
        (x,) = pt
        return k3 * x**3 + k2 * x**2 + k1 * x
    if kind == BUTTERFLY:
        (x,) = pt
        return k4 * x**4 + k3 * x**3 + k2 * x**2 + k1 * x
    x1, x2 = pt
    if kind == HYPERBOLIC_UMBILIC:
        return k1 * x2 * x1 - k2 * x2 + k3 * x1
    if kind == ELLIPTIC_UMBILIC:
        return k1 * (x1**2 + x2**2) - k2 * x2 - k3 * x1
    # parabolic umbilic
    return k1 * x2**2 + k2 * x1**2 - k3 * x2 - k4 * x1


def polynomial_value(kind: str, point, k) -> float:
    """Full polynomial: germ plus unfolding terms."""
    return germ_value(kind, point) + unfolding_value(kind, point, k)


def germ_gradient(kind: str, point) -> tuple:
    _check_kind(kind)
    pt = _check_point(kind, point)
    if kind == FOLD:
        (x,) = pt
        return (3.0 * x**2,)
    if kind == CUSP:
        (x,) = pt
        return (4.0 * x**3,)
    if kind == SWALLOWTAIL:
        (x,) = pt
        return (5.0 * x**4,)
    if kind == BUTTERFLY:
        (x,) = pt
        return (6.0 * x**5,)
    x1, x2 = pt
    if kind == HYPERBOLIC_UMBILIC:
        return (3.0 * x1**2, 3.0 * x2**2)
    if kind == ELLIPTIC_UMBILIC:
        return (-6.0 * x2 * x1, 3.0 * x2**2 - 3.0 * x1**2)
    return (x2**2 + 4.0 * x1**3, 2.0 * x2 * x1)


def unfolding_gradient(kind: str, point, k) -> tuple:
    _check_kind(kind)
    pt = _check_point(kind, point)
    k1, k2, k3, k4 = (float(v) for v in k)
    if kind == FOLD:
        return (k1,)
    if kind == CUSP:
        (x,) = pt
        return (2.0 * k2 * x + k1,)
    if kind == SWALLOWTAIL:
        (x,) = pt
        return (3.0 * k3 * x**2 + 2.0 * k2 * x + k1,)
    if kind == BUTTERFLY:
        (x,) = pt
        return (4.0 * k4 * x**3 + 3.0 * k3 * x**2 + 2.0 * k2 * x + k1,)
    x1, x2 = pt
    if kind == HYPERBOLIC_UMBILIC:
        return (k1 * x2 + k3, k1 * x1 - k2)
    if kind == ELLIPTIC_UMBILIC:
        return (2.0 * k1 * x1 - k3, 2.0 * k1 * x2 - k2)
    return (2.0 * k2 * x1 - k4, 2.0 * k1 * x2 - k3)


def polynomial_gradient(kind: str, point, k) -> tuple:
    g = germ_gradient(kind, point)
    u = unfolding_gradient(kind, point, k)
    return tuple(a + b for a, b in zip(g, u))


@dataclass(frozen=True)
class ControllerSpec:
    """One feedback law: a catalog polynomial wired onto plant states.

    Attributes
    ----------
    kind : str
        Catalog entry the law is built from.
    k : tuple of 4 floats
        Dense coefficient vector (k1, k2, k3, k4).  Entries past the kind's
        coefficient count must be exactly zero.
    include_germ : bool
        Whether the k-free part of the polynomial contributes.
    sign : float
        Constant scale applied to the whole polynomial.
    state_map : tuple of int
        Plant state indices feeding the canonical variables, in canonical
        order.  Indices must be distinct.
    """

    kind: str
    k: tuple
    include_germ: bool = True
    sign: float = 1.0
    state_map: tuple = (0, 1)

    def __post_init__(self):
        _check_kind(self.kind)
        k = tuple(float(v) for v in self.k)
        if len(k) > 4:
            raise ValueError("coefficient vector holds at most four entries")
        k = k + (0.0,) * (4 - len(k))
        n_coeff = coefficient_count(self.kind)
        for i in range(n_coeff, 4):
            if k[i] != 0.0:
                raise ValueError(
                    f"{self.kind} uses {n_coeff} coefficient(s); k{i + 1} must be zero"
                )
        smap = tuple(int(i) for i in self.state_map)
        if len(smap) != variable_count(self.kind):
            raise ValueError(
                f"{self.kind} needs {variable_count(self.kind)} mapped state(s),"
                f" got {len(smap)}"
            )
        if any(i < 0 for i in smap):
            raise ValueError("state_map indices must be non-negative")
        if len(set(smap)) != len(smap):
            raise ValueError("state_map indices must be distinct")
        sign = float(self.sign)
        if not np.isfinite(sign):
            raise ValueError("sign must be finite")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "state_map", smap)
        object.__setattr__(self, "sign", sign)

    def value(self, state) -> float:
        """Evaluate the law on a full plant state vector."""
        point = tuple(float(state[i]) for i in self.state_map)
        v = unfolding_value(self.kind, point, self.k)
        if self.include_germ:
            v += germ_value(self.kind, point)
        return self.sign * v

    def gradient(self, state) -> np.ndarray:
        """Gradient of the law with respect to the full plant state."""
        point = tuple(float(state[i]) for i in self.state_map)
        g = unfolding_gradient(self.kind, point, self.k)
        if self.include_germ:
            ge = germ_gradient(self.kind, point)
            g = tuple(a + b for a, b in zip(g, ge))
        out = np.zeros(len(state))
        for idx, gi in zip(self.state_map, g):
            out[idx] = self.sign * gi
        return out

    def to_obj(self) -> dict:
        return {
            "kind": self.kind,
            "k": list(self.k),
            "germ": self.include_germ,
            "sign": self.sign,
            "map": list(self.state_map),
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "ControllerSpec":
        return cls(
            kind=obj["kind"],
            k=tuple(obj["k"]),
            include_germ=bool(obj["germ"]),
            sign=float(obj["sign"]),
            state_map=tuple(obj["map"]),
        )


def elliptic_feedback(k1, k2, k3, state_map=(0, 1), sign=-1.0, include_germ=True):
    """Elliptic-umbilic law: sign * (germ? + k1(x1^2+x2^2) - k2 x2 - k3 x1).

    With the default sign -1 and germ on, this is the planar stabilizer
    u = -x2^3 + 3 x2 x1^2 - k1 (x1^2 + x2^2) + k2 x2 + k3 x1.
    """
    return ControllerSpec(
        kind=ELLIPTIC_UMBILIC,
        k=(k1, k2, k3, 0.0),
        include_germ=include_germ,
        sign=sign,
        state_map=state_map,
    )


def axis_quadratic(square_gain, linear_gain, index):
    """Single-axis law u = -square_gain * x^2 + linear_gain * x.

    Stored as a germ-free cusp unfolding on one state: the quadratic term is
    the k2 coefficient with flipped sign and the linear term is k1.
    """
    return ControllerSpec(
        kind=CUSP,
        k=(linear_gain, -square_gain, 0.0, 0.0),
        include_germ=False,
        sign=1.0,
        state_map=(index,),
    )
