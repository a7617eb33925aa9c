"""Sweep plots rendered to SVG.

Two-state families get a phase portrait with the candidate rest points
marked; three-state families get the measured output against time.  The
SVG output is deterministic: fixed hash salt, no embedded creation date.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be set first

from .simulate import DIVERGED

_SALT = "umbilic"


def _collect_candidates(result) -> list:
    points = []
    for record in result.records:
        for eq in record.candidates:
            rounded = tuple(round(c, 9) for c in eq.point)
            if rounded not in points:
                points.append(rounded)
    return points


def _render_phase(ax, result) -> None:
    for record in result.records:
        traj = record.trajectory
        if traj is None:
            continue
        style = "--" if record.verdict.kind == DIVERGED else "-"
        ax.plot(
            traj.states[:, 0],
            traj.states[:, 1],
            style,
            linewidth=1.0,
            label=_run_label(record),
        )
    for point in _collect_candidates(result):
        ax.plot([point[0]], [point[1]], "ko", markersize=5, fillstyle="none")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")


def _render_output(ax, result) -> None:
    for record in result.records:
        traj = record.trajectory
        if traj is None:
            continue
        style = "--" if record.verdict.kind == DIVERGED else "-"
        ax.plot(
            traj.times, traj.output, style, linewidth=1.0,
            label=_run_label(record),
        )
    ax.set_xlabel("t")
    ax.set_ylabel("y")


def _run_label(record) -> str:
    parts = [f"{name}={value:g}" for name, value in record.values.items()]
    return ", ".join(parts)


def render_sweep_plot(result, path) -> None:
    """Render the sweep to an SVG file; requires kept trajectories."""
    if all(record.trajectory is None for record in result.records):
        raise ValueError(
            "sweep was run without trajectories; nothing to plot"
        )
    plt.rcParams["svg.hashsalt"] = _SALT
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    try:
        kept = next(
            record.trajectory
            for record in result.records
            if record.trajectory is not None
        )
        dim = kept.states.shape[1]
        if dim == 2:
            _render_phase(ax, result)
        else:
            _render_output(ax, result)
        ax.set_title(result.spec.name)
        if len(result.records) <= 12:
            ax.legend(loc="best", fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
