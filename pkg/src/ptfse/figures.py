"""Headless matplotlib rendering for reports and spectrogram dumps."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_loss_curve_png(path, losses) -> None:
    """Render the per-step training loss trace to a PNG file."""
    losses = np.asarray(losses, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(np.arange(1, losses.size + 1), losses, linewidth=1.0)
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_spectrogram_png(path, db_values, hop: int, sample_rate: int) -> None:
    """Render a [bins, frames] dB spectrogram to a PNG file."""
    db_values = np.asarray(db_values, dtype=np.float64)
    n_frames = db_values.shape[1]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    extent = (0.0, n_frames * hop / sample_rate, 0.0, sample_rate / 2000.0)
    image = ax.imshow(db_values, origin="lower", aspect="auto",
                      extent=extent, cmap="magma")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("frequency [kHz]")
    fig.colorbar(image, ax=ax, label="dB")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
