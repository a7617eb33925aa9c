"""Sweep specification, execution order, and summaries."""

import pytest

from umbilic.simulate import SolverConfig
from umbilic.sweeps import (
    SweepSpec,
    VaryAxis,
    candidate_equilibria,
    run_sweep,
    summarize,
)
from umbilic.scenarios import get_scenario


def _mini_spec(**overrides):
    base = dict(
        name="mini",
        family="integrators",
        params={"T1": 100.0, "T2": 1000.0},
        gains=(1.0, -5.0, -2.0),
        input_level=0.0,
        vary=(VaryAxis("T2", 1000.0, 2000.0, 1000.0),),
        x0=(-1.0, 0.0),
        solver=SolverConfig(method="rk4_fixed", step=0.5, t_end=10.0),
    )
    base.update(overrides)
    return SweepSpec(**base)


class TestVaryAxis:
    def test_count_truncates_toward_start(self):
        axis = VaryAxis("a21", -0.0121, 0.0009, 0.00125)
        assert axis.count == 11
        assert axis.values()[-1] == pytest.approx(0.0004)

    def test_count_truncates_non_multiple_span(self):
        axis = VaryAxis("a22", -0.611, 0.289, 0.125)
        assert axis.count == 8
        assert axis.values()[-1] == pytest.approx(0.264)

    def test_exact_span_keeps_endpoint(self):
        axis = VaryAxis("T2", -4500.0, 4500.0, 1000.0)
        assert axis.count == 10
        assert axis.values()[0] == -4500.0
        assert axis.values()[-1] == 4500.0

    def test_negative_step_counts_down(self):
        axis = VaryAxis("T1", 5.0, 1.0, -1.0)
        assert axis.values() == [5.0, 4.0, 3.0, 2.0, 1.0]

    def test_zero_step_rejected(self):
        with pytest.raises(ValueError, match="step must be nonzero"):
            VaryAxis("T1", 0.0, 1.0, 0.0)

    def test_empty_range_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            VaryAxis("T1", 1.0, 0.0, 0.5)

    def test_obj_round_trip_uses_from_to_keys(self):
        axis = VaryAxis("a33", -1.3, 0.7, 0.25)
        obj = axis.to_obj()
        assert sorted(obj) == ["from", "param", "step", "to"]
        assert VaryAxis.from_obj(obj) == axis


class TestSweepSpec:
    def test_builtin_cardinalities(self):
        assert get_scenario("fig12").cardinality == 11
        assert get_scenario("fig13").cardinality == 8
        assert get_scenario("fig5").cardinality == 36
        assert get_scenario("fig10").cardinality == 5

    def test_product_combos_vary_last_axis_fastest(self):
        spec = _mini_spec(
            vary=(
                VaryAxis("T1", 100.0, 200.0, 100.0),
                VaryAxis("T2", 1000.0, 2000.0, 1000.0),
            ),
            combine="product",
        )
        assert spec.combos() == [
            {"T1": 100.0, "T2": 1000.0},
            {"T1": 100.0, "T2": 2000.0},
            {"T1": 200.0, "T2": 1000.0},
            {"T1": 200.0, "T2": 2000.0},
        ]

    def test_zip_combos_pair_elementwise(self):
        spec = _mini_spec(
            vary=(
                VaryAxis("T1", 100.0, 200.0, 100.0),
                VaryAxis("T2", 1000.0, 2000.0, 1000.0),
            ),
            combine="zip",
        )
        assert spec.combos() == [
            {"T1": 100.0, "T2": 1000.0},
            {"T1": 200.0, "T2": 2000.0},
        ]

    def test_zip_requires_equal_counts(self):
        with pytest.raises(ValueError, match="equal counts"):
            _mini_spec(
                vary=(
                    VaryAxis("T1", 100.0, 300.0, 100.0),
                    VaryAxis("T2", 1000.0, 2000.0, 1000.0),
                ),
                combine="zip",
            )

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError, match="unknown family"):
            _mini_spec(family="pendulum")

    def test_foreign_parameter_rejected(self):
        with pytest.raises(ValueError, match="not a integrators parameter"):
            _mini_spec(vary=(VaryAxis("a1", 0.0, 1.0, 1.0),))

    def test_x0_dimension_checked(self):
        with pytest.raises(ValueError, match="x0 needs 2 components"):
            _mini_spec(x0=(0.0, 0.0, 0.0))

    def test_system_for_merges_override(self):
        spec = _mini_spec()
        system = spec.system_for({"T2": 2000.0})
        assert system.params.T2 == 2000.0
        assert system.params.T1 == 100.0

    def test_with_horizon_replaces_only_t_end(self):
        spec = _mini_spec()
        longer = spec.with_horizon(250.0)
        assert longer.solver.t_end == 250.0
        assert longer.solver.step == spec.solver.step
        assert spec.solver.t_end == 10.0

    def test_default_window_is_tenth_of_horizon(self):
        spec = _mini_spec()
        assert spec.window == pytest.approx(1.0)
        assert _mini_spec(conv_window=3.0).window == 3.0

    def test_json_round_trip(self):
        spec = get_scenario("fig9")
        again = SweepSpec.from_obj(spec.to_obj())
        assert again.to_obj() == spec.to_obj()
        assert again.cardinality == spec.cardinality

    def test_from_obj_defaults(self):
        obj = _mini_spec().to_obj()
        del obj["convergence"]
        del obj["combine"]
        spec = SweepSpec.from_obj(obj)
        assert spec.combine == "zip"
        assert spec.conv_tol == 1e-3


class TestRunSweep:
    def test_fig4_every_run_converges(self):
        result = run_sweep(get_scenario("fig4"), keep_trajectories=False)
        assert len(result.records) == 20
        assert all(r.verdict.kind == "converged" for r in result.records)
        assert all(r.trajectory is None for r in result.records)

    def test_fig4_attractor_split(self):
        result = run_sweep(get_scenario("fig4"), keep_trajectories=False)
        offsets = [
            r for r in result.records if r.attractor != (0.0, 0.0)
        ]
        assert len(offsets) == 4
        assert all(r.values["a2"] <= -6.5 for r in offsets)
        first = dict(zip([r.values["a2"] for r in offsets],
                         [r.attractor[0] for r in offsets]))
        assert first == pytest.approx(
            {-9.5: 0.875, -8.5: 0.625, -7.5: 0.375, -6.5: 0.125}
        )

    def test_errored_run_is_recorded_not_raised(self):
        spec = _mini_spec(vary=(VaryAxis("T1", -1.0, 1.0, 1.0),))
        result = run_sweep(spec)
        assert len(result.records) == 3
        bad = result.records[1]
        assert bad.values == {"T1": 0.0}
        assert bad.verdict is None
        assert bad.trajectory is None
        assert bad.error == "ValueError: integrator time constants must be nonzero"
        assert result.records[0].error is None
        assert result.records[2].error is None

    def test_trajectories_kept_by_default(self):
        result = run_sweep(_mini_spec())
        assert all(r.trajectory is not None for r in result.records)


class TestCandidates:
    def test_closed_form_preferred(self):
        spec = _mini_spec()
        system = spec.system_for({})
        found = candidate_equilibria(system, spec)
        assert [eq.source for eq in found] == ["origin", "offset"]

    def test_numeric_fallback_uses_eq_box(self):
        spec = get_scenario("fig17")
        system = spec.system_for({})
        found = candidate_equilibria(system, spec)
        assert found
        assert all(eq.source == "numeric" for eq in found)

    def test_no_table_and_no_box_gives_empty(self):
        spec = _mini_spec()
        import dataclasses

        bare = dataclasses.replace(spec, gains=None, eq_box=None)
        system = bare.system_for({})
        assert candidate_equilibria(system, bare) == []


class TestSummarize:
    def test_fig4_summary(self):
        result = run_sweep(get_scenario("fig4"), keep_trajectories=False)
        summary = summarize(result)
        assert summary["name"] == "fig4"
        assert summary["runs"] == 20
        assert summary["totals"] == {
            "converged": 20, "diverged": 0, "undecided": 0, "errored": 0
        }
        assert summary["stable_fraction"] == 1.0
        assert len(summary["attractors"]) == 5
        assert len(summary["rows"]) == 20
        row = summary["rows"][0]
        assert row["index"] == 0
        assert row["verdict"] == "converged"
        assert row["settle_time"] > 0.0

    def test_errored_rows_carry_the_message(self):
        spec = _mini_spec(vary=(VaryAxis("T1", -1.0, 1.0, 1.0),))
        summary = summarize(run_sweep(spec))
        assert summary["totals"]["errored"] == 1
        assert summary["rows"][1]["verdict"] == "errored"
        assert summary["rows"][1]["error"]
        assert summary["stable_fraction"] == pytest.approx(2.0 / 3.0)
