"""Command-line front end.

Verbs: list-scenarios, equilibria, check-conditions, audit, run, sweep,
plot.  Targets are built-in scenario names or paths to sweep config JSON.
Overrides use dotted paths (params.a2=2, solver.t_end=500); a bare name
that matches a plant parameter is shorthand for params.<name>.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .artifacts import (
    emit_report_artifacts,
    emit_sweep_artifacts,
    resolve_output_dir,
)
from .conditions import (
    KNOWN_DISCREPANCIES,
    audit_conditions,
    builtin_audit_grid,
    condition_labels,
    evaluate_conditions,
)
from .equilibria import ClosedFormUnavailable, closed_form_equilibria
from .plants import FAMILIES, build_system, param_names
from .scenarios import get_scenario, scenario_names
from .simulate import integrate, detect_convergence
from .sweeps import SweepSpec, candidate_equilibria, run_sweep, summarize

VERBS = (
    "list-scenarios",
    "equilibria",
    "check-conditions",
    "audit",
    "run",
    "sweep",
    "plot",
)


class CliError(Exception):
    """Error with a process exit code; 2 for usage, 1 for runtime."""

    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Command:
    verb: str
    target: str
    overrides: tuple
    output_dir: str


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message, 2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="umbilic", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", metavar="verb")
    sub.required = True
    for verb in VERBS:
        verb_parser = sub.add_parser(verb)
        if verb != "list-scenarios":
            verb_parser.add_argument(
                "target", help="scenario name, family, or config JSON path"
            )
        verb_parser.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a resolved scenario field (repeatable)",
        )
        verb_parser.add_argument(
            "--out", dest="output_dir", default=None, metavar="DIR"
        )
    return parser


def _suggestions(target: str) -> str:
    pool = list(scenario_names()) + list(FAMILIES)
    close = difflib.get_close_matches(target, pool, n=3, cutoff=0.4)
    if not close:
        return ""
    return " (did you mean: " + ", ".join(close) + "?)"


def parse_command(argv) -> Command:
    space = _build_parser().parse_args(argv)
    target = getattr(space, "target", "")
    for item in space.overrides:
        if "=" not in item or not item.split("=", 1)[0].strip():
            raise CliError(f"override {item!r} is not KEY=VALUE", 2)
    if space.verb != "list-scenarios":
        _validate_target(space.verb, target)
    return Command(
        verb=space.verb,
        target=target,
        overrides=tuple(space.overrides),
        output_dir=space.output_dir,
    )


def _validate_target(verb: str, target: str) -> None:
    if target in scenario_names():
        return
    if verb == "audit" and target in FAMILIES:
        return
    path = Path(target)
    if path.suffix == ".json":
        if path.exists():
            return
        raise CliError(f"config file not found: {target}", 2)
    raise CliError(f"unknown scenario {target!r}{_suggestions(target)}", 2)


def _load_spec(target: str) -> SweepSpec:
    if target in scenario_names():
        return get_scenario(target)
    path = Path(target)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", 1) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}", 1) from exc
    try:
        return SweepSpec.from_obj(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"config {path} is not a sweep spec: {exc}", 1) from exc


def _parse_scalar(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _parse_floats(raw: str) -> tuple:
    try:
        return tuple(float(part) for part in raw.split(","))
    except ValueError as exc:
        raise CliError(f"expected comma-separated numbers, got {raw!r}", 2) from exc


def apply_overrides(spec: SweepSpec, overrides) -> SweepSpec:
    """Apply --set pairs to a resolved spec and revalidate it."""
    plant_fields = set(param_names(spec.family))
    for item in overrides:
        key, _, raw = item.partition("=")
        key = key.strip()
        raw = raw.strip()
        try:
            spec = _apply_one(spec, key, raw, plant_fields)
        except (TypeError, ValueError) as exc:
            raise CliError(f"override {item!r}: {exc}", 2) from exc
    return spec


def _apply_one(spec, key, raw, plant_fields) -> SweepSpec:
    if key in plant_fields:
        key = f"params.{key}"
    root, _, field = key.partition(".")
    if root == "params" and field:
        if field not in plant_fields:
            raise CliError(
                f"{spec.family} has no parameter {field!r}", 2
            )
        return replace(spec, params={**spec.params, field: float(raw)})
    if root == "solver" and field:
        if field not in {
            "method", "step", "rel_tol", "abs_tol", "t_end",
            "divergence_norm", "record_every", "max_rows",
        }:
            raise CliError(f"solver has no field {field!r}", 2)
        value = raw if field == "method" else _parse_scalar(raw)
        return replace(spec, solver=replace(spec.solver, **{field: value}))
    if key == "gains":
        gains = None if raw.lower() == "none" else _parse_floats(raw)
        return replace(spec, gains=gains)
    if key == "x0":
        return replace(spec, x0=_parse_floats(raw))
    if key in ("input", "input_level"):
        return replace(spec, input_level=float(raw))
    if key == "conv.tol":
        return replace(spec, conv_tol=float(raw))
    if key == "conv.window":
        return replace(spec, conv_window=float(raw))
    raise CliError(f"unknown override key {key!r}", 2)


def render_table(headers, rows) -> str:
    """Fixed-width ASCII table; deterministic for golden tests."""
    cells = [list(headers)] + [[str(c) for c in row] for row in rows]
    widths = [
        max(len(row[i]) for row in cells) for i in range(len(headers))
    ]
    def fmt(row):
        return "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
    lines = [fmt(cells[0])]
    lines.append("  ".join("-" * width for width in widths))
    lines.extend(fmt(row) for row in cells[1:])
    return "\n".join(lines)


def _fmt_point(point) -> str:
    return "(" + ", ".join(f"{v:.6g}" for v in point) + ")"


def _fmt_eigs(eigenvalues) -> str:
    parts = []
    for z in eigenvalues:
        if abs(z.imag) < 1e-12:
            parts.append(f"{z.real:.6g}")
        else:
            parts.append(f"{z.real:.6g}{z.imag:+.6g}j")
    return "; ".join(parts)


def _zero_input_system(spec: SweepSpec):
    base = replace(spec, input_level=0.0)
    return base.system_for({})


def _do_list(command: Command) -> None:
    rows = []
    for name in scenario_names():
        spec = get_scenario(name)
        varied = ",".join(axis.param for axis in spec.vary)
        gains = "open loop" if spec.gains is None else _fmt_point(spec.gains)
        rows.append(
            [
                name,
                spec.family,
                str(spec.cardinality),
                varied,
                f"{spec.solver.t_end:g}",
                gains,
            ]
        )
    print(render_table(
        ["scenario", "family", "runs", "varies", "t_end", "gains"], rows
    ))


def _do_equilibria(command: Command) -> None:
    spec = apply_overrides(_load_spec(command.target), command.overrides)
    system = spec.system_for({})
    try:
        found = closed_form_equilibria(system)
    except ClosedFormUnavailable:
        found = candidate_equilibria(system, spec)
    rows = [
        [eq.source, _fmt_point(eq.point), _fmt_eigs(eq.eigenvalues), eq.verdict]
        for eq in found
    ]
    print(render_table(["equilibrium", "point", "eigenvalues", "verdict"], rows))
    report = {
        "scenario": spec.name,
        "equilibria": [eq.to_obj() for eq in found],
    }
    out = resolve_output_dir(command.output_dir, spec.name)
    emit_report_artifacts(spec.name, report, out, dict_overrides(command))
    print(f"wrote {out}/summary.json")


def dict_overrides(command: Command) -> dict:
    pairs = {}
    for item in command.overrides:
        key, _, raw = item.partition("=")
        pairs[key.strip()] = raw.strip()
    return pairs


def _do_check_conditions(command: Command) -> None:
    spec = apply_overrides(_load_spec(command.target), command.overrides)
    if spec.gains is None:
        raise CliError(
            f"{spec.name} is open loop; condition tables need feedback gains", 1
        )
    labels = condition_labels(spec.family)
    if not labels:
        raise CliError(
            f"no closed-form condition tables for family {spec.family}", 1
        )
    params = spec.system_for({}).params
    oracle = {}
    try:
        for eq in closed_form_equilibria(_zero_input_system(spec)):
            oracle[eq.source] = eq.verdict
    except ClosedFormUnavailable:
        pass
    rows = []
    reports = []
    for label in labels:
        report = evaluate_conditions(spec.family, label, spec.gains, params)
        reports.append(report)
        predicted = "stable" if report.all_satisfied else "not stable"
        seen = oracle.get(label, "-")
        for clause in report.clauses:
            rows.append(
                [
                    label,
                    clause.text,
                    f"{clause.value:.6g}",
                    "yes" if clause.satisfied else "no",
                    predicted,
                    seen,
                ]
            )
    print(render_table(
        ["equilibrium", "clause", "value", "holds", "predicted", "oracle"],
        rows,
    ))
    for label in labels:
        note = KNOWN_DISCREPANCIES.get((spec.family, label))
        if note:
            print(f"note: {label}: {note}")
    report_obj = {
        "scenario": spec.name,
        "family": spec.family,
        "gains": list(spec.gains),
        "conditions": [r.to_obj() for r in reports],
        "oracle": oracle,
    }
    out = resolve_output_dir(command.output_dir, spec.name)
    emit_report_artifacts(spec.name, report_obj, out, dict_overrides(command))
    print(f"wrote {out}/summary.json")


def _do_audit(command: Command) -> None:
    if command.target in FAMILIES:
        family = command.target
        name = f"audit-{family}"
    else:
        spec = _load_spec(command.target)
        family = spec.family
        name = f"audit-{family}"
    try:
        grid, coeffs = builtin_audit_grid(family)
    except KeyError:
        raise CliError(f"no builtin audit grid for family {family}", 1) from None
    report = audit_conditions(family, grid, coeffs)
    rows = []
    for summary in report.summaries:
        rows.append(
            [
                summary.equilibrium,
                str(summary.total),
                str(summary.skipped),
                str(summary.compared),
                f"{summary.agreement_rate:.3f}"
                if summary.agreement_rate is not None
                else "-",
                f"{summary.inversion_rate:.3f}"
                if summary.inversion_rate is not None
                else "-",
                "INVERTED" if summary.inversion_flag else "",
            ]
        )
    print(render_table(
        [
            "equilibrium", "points", "skipped", "compared",
            "agreement", "inversion", "flag",
        ],
        rows,
    ))
    flagged = [s.equilibrium for s in report.summaries if s.inversion_flag]
    if flagged:
        print(
            "systematic inversion detected for: " + ", ".join(flagged)
        )
    out = resolve_output_dir(command.output_dir, name)
    emit_report_artifacts(name, report.to_obj(), out, dict_overrides(command))
    print(f"wrote {out}/summary.json")


def _do_run(command: Command) -> None:
    spec = apply_overrides(_load_spec(command.target), command.overrides)
    system = spec.system_for({})
    candidates = candidate_equilibria(system, spec)
    trajectory = integrate(system, spec.x0, spec.solver)
    verdict = detect_convergence(
        trajectory, candidates, spec.conv_tol, spec.window
    )
    report = {
        "scenario": spec.name,
        "verdict": verdict.to_obj(),
        "candidates": [eq.to_obj() for eq in candidates],
        "samples": int(trajectory.times.shape[0]),
    }
    out = resolve_output_dir(command.output_dir, spec.name)
    from .artifacts import ArtifactWriter

    writer = ArtifactWriter(out)
    try:
        writer.write_run_csv("runs/run_0.csv", trajectory)
        writer.write_json("summary.json", report)
        writer.finalize(
            scenario=spec.name,
            spec_obj=spec.to_obj(),
            overrides=dict_overrides(command),
            summary=report,
        )
    except BaseException:
        writer.abort()
        raise
    final = _fmt_point(trajectory.final_state)
    print(f"{spec.name}: {verdict.kind} final={final}")
    print(f"wrote {out}/runs/run_0.csv")


def _do_sweep(command: Command, plot: bool) -> None:
    spec = apply_overrides(_load_spec(command.target), command.overrides)
    result = run_sweep(spec, keep_trajectories=True)
    out = resolve_output_dir(command.output_dir, spec.name)
    emit_sweep_artifacts(result, out, dict_overrides(command), plot=plot)
    summary = summarize(result)
    rows = []
    for row in summary["rows"]:
        values = ", ".join(f"{k}={v:g}" for k, v in row["values"].items())
        attractor = (
            _fmt_point(row["attractor"]) if row["attractor"] else "-"
        )
        settle = (
            f"{row['settle_time']:.6g}"
            if row["settle_time"] is not None
            else "-"
        )
        rows.append(
            [str(row["index"]), values, row["verdict"], attractor, settle]
        )
    print(render_table(
        ["run", "values", "verdict", "attractor", "settle"], rows
    ))
    totals = summary["totals"]
    print(
        f"runs={summary['runs']} converged={totals['converged']}"
        f" diverged={totals['diverged']} undecided={totals['undecided']}"
        f" errored={totals['errored']}"
        f" stable_fraction={summary['stable_fraction']:.3f}"
    )
    print(f"wrote {out}/summary.json")


def execute(command: Command) -> None:
    if command.verb == "list-scenarios":
        _do_list(command)
    elif command.verb == "equilibria":
        _do_equilibria(command)
    elif command.verb == "check-conditions":
        _do_check_conditions(command)
    elif command.verb == "audit":
        _do_audit(command)
    elif command.verb == "run":
        _do_run(command)
    elif command.verb == "sweep":
        _do_sweep(command, plot=False)
    elif command.verb == "plot":
        _do_sweep(command, plot=True)
    else:  # unreachable: the parser restricts verbs
        raise CliError(f"unknown verb {command.verb!r}", 2)


def main(argv=None) -> int:
    try:
        command = parse_command(
            sys.argv[1:] if argv is None else list(argv)
        )
        execute(command)
        return 0
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
