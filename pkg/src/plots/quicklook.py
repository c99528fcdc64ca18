"""Quick-look SVG plots of scenario curves. No styling guarantees; CSV/JSON are the contract."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# pinned so repeated runs give identical SVG ids
matplotlib.rcParams["svg.hashsalt"] = "clockinterf"


def save_svg(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_curves(x, curves: dict, title: str, xlabel: str = "φ / π", ylabel: str = "phase (rad)", x_in_pi: bool = True):
    fig, ax = plt.subplots(figsize=(8, 5))
    xs = np.asarray(x) / np.pi if x_in_pi else np.asarray(x)
    for label, y in curves.items():
        ax.plot(xs, y, label=label)
    ax.set_title(title, fontsize=14, weight="bold")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(curves) > 1:
        ax.legend()
    plt.tight_layout()
    return fig


def plot_band(x, center, lo, hi, title: str, ylabel: str = "gain (dB)"):
    fig, ax = plt.subplots(figsize=(8, 5))
    xs = np.asarray(x) / np.pi
    ax.fill_between(xs, lo, hi, color="lightgrey", label="P2 ± dP2")
    ax.plot(xs, center, color="tomato", label="nominal")
    ax.axhline(0.0, color="black", linewidth=0.5)
    ax.set_title(title, fontsize=14, weight="bold")
    ax.set_xlabel("φ / π")
    ax.set_ylabel(ylabel)
    ax.legend()
    plt.tight_layout()
    return fig


def plot_image(counts, centers, model=None, title: str = "interferogram"):
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(centers, counts, width=np.diff(centers).mean() if len(centers) > 1 else 1.0, color="skyblue", label="counts")
    if model is not None:
        ax.plot(centers, model, color="tomato", label="fit")
        ax.legend()
    ax.set_title(title, fontsize=14, weight="bold")
    ax.set_xlabel("z (µm)")
    ax.set_ylabel("atoms / pixel")
    plt.tight_layout()
    return fig


def plot_semilogx(x, y, title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.semilogx(x, y, marker="o")
    ax.set_title(title, fontsize=14, weight="bold")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    plt.tight_layout()
    return fig
