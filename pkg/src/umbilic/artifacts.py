"""File artifacts for runs, sweeps, and reports.

Trajectories go to CSV with 17 significant digits so a parse of the file
reproduces the floats bit for bit.  Structured results go to JSON with
sorted keys; rerunning a scenario must produce byte-identical CSV and
summary files, so nothing time-dependent is allowed in them.  The manifest
is the one file that carries a timestamp.
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path

from .simulate import Trajectory

OUT_ENV = "UMBILIC_OUT"
DEFAULT_OUT = "out"


def resolve_output_dir(explicit=None, scenario: str = None) -> Path:
    """Output directory precedence: --out flag, then the environment
    variable, then ./out/<scenario>."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(OUT_ENV, "").strip()
    if env:
        return Path(env)
    if scenario:
        return Path(DEFAULT_OUT) / scenario
    return Path(DEFAULT_OUT)


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def trajectory_csv_lines(trajectory: Trajectory) -> list:
    dim = trajectory.states.shape[1]
    header = ",".join(["t"] + [f"x{i + 1}" for i in range(dim)] + ["y"])
    lines = [header]
    for k in range(trajectory.times.shape[0]):
        cells = [format_float(trajectory.times[k])]
        cells.extend(format_float(v) for v in trajectory.states[k])
        cells.append(format_float(trajectory.output[k]))
        lines.append(",".join(cells))
    return lines


def parse_run_csv(path) -> dict:
    """Read back an emitted run CSV; inverse of trajectory_csv_lines."""
    with open(path, "r", encoding="ascii") as handle:
        header = handle.readline().strip().split(",")
        rows = [
            [float(cell) for cell in line.strip().split(",")]
            for line in handle
            if line.strip()
        ]
    if not header or header[0] != "t" or header[-1] != "y":
        raise ValueError(f"{path}: not a run CSV")
    return {
        "columns": header,
        "times": [row[0] for row in rows],
        "states": [tuple(row[1:-1]) for row in rows],
        "output": [row[-1] for row in rows],
    }


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class ArtifactWriter:
    """Collects files under one output directory and removes everything it
    wrote if the caller aborts, so failures never leave partial output."""

    def __init__(self, out_dir):
        self.root = Path(out_dir)
        self.files = []
        self._made_dirs = []

    def _ensure_dir(self, directory: Path) -> None:
        missing = []
        probe = directory
        while not probe.exists():
            missing.append(probe)
            probe = probe.parent
        directory.mkdir(parents=True, exist_ok=True)
        self._made_dirs.extend(reversed(missing))

    def _open(self, rel: str):
        path = self.root / rel
        self._ensure_dir(path.parent)
        return path

    def write_text(self, rel: str, text: str) -> Path:
        path = self._open(rel)
        try:
            with open(path, "w", encoding="ascii", newline="\n") as handle:
                handle.write(text)
        except OSError as exc:
            raise OSError(f"cannot write artifact {path}: {exc}") from exc
        self.files.append(rel)
        return path

    def write_json(self, rel: str, obj) -> Path:
        return self.write_text(rel, json_text(obj))

    def write_run_csv(self, rel: str, trajectory: Trajectory) -> Path:
        lines = trajectory_csv_lines(trajectory)
        return self.write_text(rel, "\n".join(lines) + "\n")

    def register(self, rel: str) -> None:
        """Track a file produced outside the writer (plot renderers)."""
        if rel not in self.files:
            self.files.append(rel)

    def path_for(self, rel: str) -> Path:
        return self._open(rel)

    def finalize(self, scenario: str, spec_obj, overrides, summary) -> dict:
        from . import __version__

        manifest = {
            "scenario": scenario,
            "spec": spec_obj,
            "overrides": dict(overrides or {}),
            "files": sorted(self.files),
            "summary": summary,
            "version": __version__,
            "created": datetime.now(timezone.utc).isoformat(),
        }
        self.write_text("manifest.json", json_text(manifest))
        return manifest

    def abort(self) -> None:
        for rel in self.files:
            path = self.root / rel
            if path.exists():
                path.unlink()
        manifest = self.root / "manifest.json"
        if "manifest.json" in self.files and manifest.exists():
            manifest.unlink()
        for directory in reversed(self._made_dirs):
            try:
                directory.rmdir()
            except OSError:
                pass
        self.files = []
        self._made_dirs = []


def emit_sweep_artifacts(
    result, out_dir, overrides=None, plot: bool = False
) -> dict:
    """Write runs/run_<i>.csv, summary.json, optional plot.svg, and the
    manifest for a finished sweep; returns the manifest object."""
    from .sweeps import summarize

    writer = ArtifactWriter(out_dir)
    try:
        for record in result.records:
            if record.trajectory is not None:
                writer.write_run_csv(
                    f"runs/run_{record.index}.csv", record.trajectory
                )
        summary = summarize(result)
        writer.write_json("summary.json", summary)
        if plot:
            from .figures import render_sweep_plot

            target = writer.path_for("plot.svg")
            writer.register("plot.svg")
            render_sweep_plot(result, target)
        return writer.finalize(
            scenario=result.spec.name,
            spec_obj=result.spec.to_obj(),
            overrides=overrides,
            summary=summary,
        )
    except BaseException:
        writer.abort()
        raise


def emit_report_artifacts(name: str, report_obj, out_dir, overrides=None) -> dict:
    """Write summary.json plus manifest for table-style results (equilibria,
    condition checks, audits)."""
    writer = ArtifactWriter(out_dir)
    try:
        writer.write_json("summary.json", report_obj)
        return writer.finalize(
            scenario=name,
            spec_obj=None,
            overrides=overrides,
            summary=report_obj,
        )
    except BaseException:
        writer.abort()
        raise
