"""Equilibrium location and classification."""

import numpy as np
import pytest

from umbilic.equilibria import (
    NONHYPERBOLIC,
    STABLE,
    UNSTABLE,
    ClosedFormUnavailable,
    classify,
    classify_equilibrium,
    closed_form_equilibria,
    closed_form_points,
    eigenvalues_2x2,
    find_equilibria_numeric,
    matrix_eigenvalues,
)
from umbilic.plants import build_system, make_params, standard_feedback


def _system(family, values, gains, input_level=0.0):
    params = make_params(family, values)
    laws = standard_feedback(family, gains, params=params)
    return build_system(family, params, controllers=laws, input_level=input_level)


INTEGRATORS_VALUES = {"T1": 100.0, "T2": 1000.0}
CCF_VALUES = {"a1": 1.0, "a2": 2.0}
JORDAN_VALUES = {"rho1": -1250.0, "rho2": -1250.0}
EPIDEMIC_VALUES = {"alpha": 1.0, "beta": 4.0, "gamma": 4.0}
AIRCRAFT_VALUES = {
    "a_y_alpha": -2.10,
    "a_mz_alpha": 29.4,
    "a_mz_omega_z": 2.18,
    "a_mz_delta_a": 60.7,
}
SUBMARINE_VALUES = {
    "a12": 1.0, "a21": -0.0071, "a22": -0.111, "a23": 0.12,
    "a32": 0.07, "a33": -0.3, "b2": -0.095, "b3": 0.072,
}


class TestClosedForms:
    def test_integrators_points(self):
        system = _system("integrators", INTEGRATORS_VALUES, (1.0, -5.0, -2.0))
        assert closed_form_points(system) == [
            ("origin", (0.0, 0.0)),
            ("offset", (-2.0, 0.0)),
        ]

    def test_integrators_zero_k1_drops_offset(self):
        system = _system("integrators", INTEGRATORS_VALUES, (0.0, -5.0, -2.0))
        assert closed_form_points(system) == [("origin", (0.0, 0.0))]

    def test_ccf_offset_shifts_by_a2(self):
        system = _system("ccf", CCF_VALUES, (4.0, -4.0, -6.0))
        points = dict(closed_form_points(system))
        # (k3 - a2) / k1 = (-6 - 2) / 4
        assert points["offset"] == (-2.0, 0.0)

    def test_jordan_four_points(self):
        system = _system("jordan", {"rho1": 750.0, "rho2": 750.0}, (2.0, 5.0, 5.0))
        points = dict(closed_form_points(system))
        assert set(points) == {"origin", "axis1", "axis2", "both"}
        assert points["axis2"] == (0.0, 377.5)
        assert points["axis1"] == (377.5, 0.0)
        assert points["both"] == (377.5, 377.5)

    def test_jordan_zero_square_gain_keeps_origin_only(self):
        system = _system("jordan", JORDAN_VALUES, (0.0, 5.0, 5.0))
        assert closed_form_points(system) == [("origin", (0.0, 0.0))]

    def test_epidemic_offset_on_output_axis(self):
        system = _system("epidemic", EPIDEMIC_VALUES, (1.0, 1.0, -1.0))
        points = dict(closed_form_points(system))
        assert points["offset"] == (0.0, 0.0, 1.0)

    def test_aircraft_offset(self):
        system = _system("aircraft", AIRCRAFT_VALUES, (0.1, 0.3, 0.7))
        points = dict(closed_form_points(system))
        assert points["offset"] == pytest.approx((3.0, 0.0, 3.0))

    def test_submarine_has_no_table(self):
        system = _system("submarine", SUBMARINE_VALUES, (1.0, 0.05, -1.0))
        with pytest.raises(ClosedFormUnavailable):
            closed_form_points(system)

    def test_nonzero_input_rejected(self):
        system = _system("ccf", CCF_VALUES, (4.0, -4.0, -6.0), input_level=0.7)
        with pytest.raises(ClosedFormUnavailable):
            closed_form_points(system)

    def test_nonstandard_wiring_rejected(self):
        params = make_params("ccf", CCF_VALUES)
        system = build_system("ccf", params)  # open loop, no controllers
        with pytest.raises(ClosedFormUnavailable):
            closed_form_points(system)

    def test_every_table_point_is_a_rest_point(self):
        cases = [
            ("integrators", INTEGRATORS_VALUES, (1.0, -5.0, -2.0)),
            ("ccf", CCF_VALUES, (4.0, -4.0, -6.0)),
            ("jordan", JORDAN_VALUES, (2.0, 5.0, 5.0)),
            ("epidemic", EPIDEMIC_VALUES, (1.0, 1.0, -1.0)),
            ("aircraft", AIRCRAFT_VALUES, (0.1, 0.3, 0.7)),
        ]
        for family, values, gains in cases:
            system = _system(family, values, gains)
            for name, point in closed_form_points(system):
                residual = np.max(np.abs(system.rhs(np.asarray(point))))
                assert residual < 1e-9, (family, name, residual)


class TestClassification:
    def test_stable_pair(self):
        assert classify((-1245.0 + 0j, -1245.0 + 0j)) == STABLE

    def test_single_positive_real_dominates(self):
        assert classify((-3.0 + 0j, 1e-3 + 0j)) == UNSTABLE

    def test_zero_real_part_is_nonhyperbolic(self):
        assert classify((0.0 + 2j, 0.0 - 2j, -1.0 + 0j)) == NONHYPERBOLIC

    def test_eps_band_counts_as_nonhyperbolic(self):
        assert classify((-1e-12 + 0j, -1.0 + 0j)) == NONHYPERBOLIC

    def test_classify_equilibrium_rejects_off_zero_points(self):
        system = _system("ccf", CCF_VALUES, (4.0, -4.0, -6.0))
        with pytest.raises(ValueError, match="not an equilibrium"):
            classify_equilibrium(system, (0.5, 0.5))

    def test_closed_form_equilibria_verdicts(self):
        system = _system("ccf", CCF_VALUES, (4.0, -4.0, -6.0))
        by_name = {eq.source: eq for eq in closed_form_equilibria(system)}
        assert by_name["origin"].verdict == STABLE
        assert by_name["offset"].verdict == UNSTABLE

    def test_to_obj_round_trip_shape(self):
        system = _system("integrators", INTEGRATORS_VALUES, (1.0, -5.0, -2.0))
        obj = closed_form_equilibria(system)[0].to_obj()
        assert sorted(obj) == ["eigenvalues", "point", "source", "verdict"]
        assert all(len(pair) == 2 for pair in obj["eigenvalues"])


class TestEigenvalues:
    def test_2x2_complex_pair(self):
        eigs = eigenvalues_2x2([[-2.5, -1.75], [1.0, -2.5]])
        assert eigs[0] == pytest.approx(-2.5 - 1.3228756555322954j)
        assert eigs[1] == pytest.approx(-2.5 + 1.3228756555322954j)

    def test_2x2_agrees_with_numpy(self):
        rng = np.random.default_rng(20260819)
        for _ in range(200):
            m = rng.uniform(-10.0, 10.0, size=(2, 2))
            ours = eigenvalues_2x2(m)
            ref = sorted(
                (complex(z) for z in np.linalg.eigvals(m)),
                key=lambda z: (z.real, z.imag),
            )
            for a, b in zip(ours, ref):
                assert a == pytest.approx(b, abs=1e-9)

    def test_3x3_matches_characteristic_roots(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            m = rng.uniform(-5.0, 5.0, size=(3, 3))
            ours = matrix_eigenvalues(m)
            ref = sorted(
                (complex(z) for z in np.roots(np.poly(m))),
                key=lambda z: (z.real, z.imag),
            )
            for a, b in zip(ours, ref):
                assert a == pytest.approx(b, abs=1e-7)

    def test_defective_matrix(self):
        # Jordan block: double eigenvalue without a second eigenvector.
        eigs = matrix_eigenvalues([[3.0, 1.0], [0.0, 3.0]])
        assert eigs == (3.0 + 0j, 3.0 + 0j)


class TestNumericFinder:
    def test_recovers_ccf_closed_forms(self):
        system = _system("ccf", CCF_VALUES, (4.0, -4.0, -6.0))
        found = find_equilibria_numeric(system, [(-5.0, 5.0), (-5.0, 5.0)], grid_n=9)
        expected = sorted(point for _, point in closed_form_points(system))
        assert len(found) == len(expected)
        for eq, ref in zip(found, expected):
            assert np.max(np.abs(np.array(eq.point) - np.array(ref))) < 1e-10

    def test_recovers_jordan_grid(self):
        system = _system("jordan", JORDAN_VALUES, (2.0, 5.0, 5.0))
        found = find_equilibria_numeric(
            system, [(-700.0, 100.0), (-700.0, 100.0)], grid_n=7
        )
        expected = sorted(point for _, point in closed_form_points(system))
        assert len(found) == 4
        for eq, ref in zip(found, expected):
            assert np.max(np.abs(np.array(eq.point) - np.array(ref))) < 1e-6

    def test_results_sorted_and_distinct(self):
        system = _system("jordan", JORDAN_VALUES, (2.0, 5.0, 5.0))
        found = find_equilibria_numeric(
            system, [(-700.0, 100.0), (-700.0, 100.0)], grid_n=7
        )
        points = [eq.point for eq in found]
        assert points == sorted(points)
        for i, a in enumerate(points):
            for b in points[i + 1:]:
                assert np.max(np.abs(np.array(a) - np.array(b))) > 1e-6

    def test_every_root_has_tiny_residual(self):
        system = _system("epidemic", EPIDEMIC_VALUES, (1.0, 1.0, -1.0))
        found = find_equilibria_numeric(
            system, [(-2.0, 2.0)] * 3, grid_n=5
        )
        assert found
        for eq in found:
            residual = np.max(np.abs(system.rhs(np.asarray(eq.point))))
            assert residual < 1e-8

    def test_box_dimension_checked(self):
        system = _system("ccf", CCF_VALUES, (4.0, -4.0, -6.0))
        with pytest.raises(ValueError, match="box needs 2 intervals"):
            find_equilibria_numeric(system, [(-1.0, 1.0)])
