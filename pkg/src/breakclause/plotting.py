"""PNG figures for sweep reports, written next to their CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .config import ScenarioConfig  # noqa: E402
from .report import Table  # noqa: E402

LINESTYLES = ("-", "--", ":", "-.")


def _series_label(row: dict, keys: list[str]) -> str:
    return ", ".join(f"{k}={row[k]:g}" for k in keys)


def plot_sweep(cfg: ScenarioConfig, table: Table, directory: Path) -> Path:
    """One panel per side; the break-clause level solid, the no-break level thin grey."""
    var = cfg.run.sweep.variable
    keys = list(dict.fromkeys(k for s in cfg.run.series for k, _ in s))
    records = [dict(zip(table.columns, r)) for r in table.rows]
    y_key = "effect" if cfg.is_swap else "par_with_bc"
    y_label = "par rate change [bp]" if cfg.is_swap else "par strike"

    sides = list(cfg.run.sides)
    fig, axes = plt.subplots(1, len(sides), figsize=(5.5 * len(sides), 4.0), squeeze=False)
    for ax, side in zip(axes[0], sides):
        rows = [r for r in records if r["side"] == side]
        labels = list(dict.fromkeys(_series_label(r, keys) for r in rows))
        for i, label in enumerate(labels):
            pts = [r for r in rows if _series_label(r, keys) == label]
            xs = [r[var] for r in pts]
            ax.plot(xs, [r[y_key] for r in pts], LINESTYLES[i % len(LINESTYLES)], color=f"C{i}",
                    label=label or "with break")
            if not cfg.is_swap:
                ax.plot(xs, [r["par_no_bc"] for r in pts], LINESTYLES[i % len(LINESTYLES)],
                        color="0.6", linewidth=0.8)
        ax.set_title(side)
        ax.set_xlabel(var)
        ax.set_ylabel(y_label)
        ax.grid(alpha=0.3)
        if any(labels):
            ax.legend(fontsize=8)
    fig.tight_layout()
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{table.name}.png"
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
