"""Render report figures to files.

Figures are written alongside the textual reports, never shown on screen:
the Agg backend is forced before pyplot is touched so rendering works in
headless environments.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .pipeline import PipelineReport
from .simulate import SimulationResult

plt.rcParams.update(
    {
        "figure.figsize": (6.4, 4.0),
        "axes.grid": True,
        "grid.alpha": 0.3,
        "savefig.dpi": 150,
        "savefig.bbox": "tight",
    }
)


def save_occupancy_figure(
    path,
    probabilities: Sequence[float],
    *,
    title: str = "Occupancy distribution",
    empirical: Optional[Sequence[float]] = None,
) -> Path:
    """Write a bar chart of P(0..K), optionally overlaying empirical values."""
    path = Path(path)
    states = range(len(probabilities))
    fig, ax = plt.subplots()
    ax.bar(states, probabilities, color="#4878d0", label="analytic")
    if empirical is not None:
        ax.plot(states, empirical, "o-", color="#d65f5f", markersize=4, label="simulated")
        ax.legend()
    ax.set_xlabel("customers in system")
    ax.set_ylabel("stationary probability")
    ax.set_title(title)
    ax.set_xticks(list(states))
    fig.savefig(path)
    plt.close(fig)
    return path


def save_pipeline_summary_figure(
    path,
    report: PipelineReport,
    results: Optional[Sequence[SimulationResult]] = None,
) -> Path:
    """Write a two-panel summary: mean occupancy and throughput per level."""
    path = Path(path)
    labels = [level.label for level in report]
    positions = range(len(labels))
    fig, (ax_l, ax_rate) = plt.subplots(1, 2, figsize=(9.6, 4.0))

    width = 0.38 if results is not None else 0.7
    ax_l.bar(
        [p - (width / 2 if results is not None else 0) for p in positions],
        [level.metrics.expected_in_system for level in report],
        width=width,
        color="#4878d0",
        label="analytic",
    )
    if results is not None:
        ax_l.bar(
            [p + width / 2 for p in positions],
            [result.empirical_L for result in results],
            width=width,
            color="#d65f5f",
            label="simulated",
        )
        ax_l.legend()
    ax_l.set_xticks(list(positions))
    ax_l.set_xticklabels(labels)
    ax_l.set_ylabel("mean customers in system")
    ax_l.set_title("Occupancy by level")

    ax_rate.plot(
        list(positions),
        [level.throughput for level in report],
        "o-",
        color="#4878d0",
        label="effective arrival rate",
    )
    ax_rate.plot(
        list(positions),
        [level.metrics.blocking_probability for level in report],
        "s--",
        color="#6acc64",
        label="blocking probability",
    )
    ax_rate.set_xticks(list(positions))
    ax_rate.set_xticklabels(labels)
    ax_rate.set_title("Flow by level")
    ax_rate.legend()

    fig.savefig(path)
    plt.close(fig)
    return path
