"""Loss-curve rendering from the training CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .train import LossLog


def plot_losses(log: LossLog, out_path):
    """Render generator / discriminator / L1 curves to PNG or SVG."""
    steps = [r.step for r in log.records]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(steps, [r.loss_g_adv for r in log.records], label="generator (adv)", lw=0.8)
    ax.plot(steps, [r.loss_d for r in log.records], label="discriminator", lw=0.8)
    ax.plot(steps, [r.loss_l1 for r in log.records], label="L1", lw=0.8)
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(Path(out_path))
    plt.close(fig)
