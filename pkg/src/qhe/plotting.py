"""Optional PNG rendering of scenario output with matplotlib (Agg backend)."""

from __future__ import annotations

from pathlib import Path


def render(path, columns, x, panels, title=""):
    """One stacked panel per list of column names in ``panels``, sharing ``x``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(len(panels), 1, sharex=True, squeeze=False,
                             figsize=(7.0, 2.6 * len(panels) + 0.6))
    for ax, ys in zip(axes[:, 0], panels):
        for y in ys:
            ax.plot(columns[x], columns[y], lw=1.2, label=y)
        ax.legend(loc="best", fontsize="small", frameon=False)
        ax.grid(alpha=0.3)
    axes[-1, 0].set_xlabel(x)
    if title:
        axes[0, 0].set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
