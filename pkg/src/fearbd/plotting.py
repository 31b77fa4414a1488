"""SVG figures for a finished run: (x, t) heatmaps of u and v and final profiles."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from fearbd.solver import SnapshotSeries  # noqa: E402

# fixed salt and no date stamp keep the SVG text reproducible
plt.rcParams["svg.hashsalt"] = "fearbd"
SVG_META = {"Date": None}
COLORMAP = "viridis"


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata=SVG_META)
    plt.close(fig)


def heatmap(series: SnapshotSeries, component: str, path, title: str = "") -> None:
    data = getattr(series, component)
    fig, ax = plt.subplots(figsize=(6, 4))
    extent = (series.x[0], series.x[-1], series.t[0], series.t[-1])
    im = ax.imshow(data, origin="lower", aspect="auto", extent=extent,
                   cmap=COLORMAP, interpolation="nearest")
    fig.colorbar(im, ax=ax, label=component)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title(title or f"{component}(x, t)")
    fig.tight_layout()
    _save(fig, Path(path))


def final_profiles(series: SnapshotSeries, path, title: str = "") -> None:
    fig, (ax_u, ax_v) = plt.subplots(1, 2, figsize=(8, 3.5))
    ax_u.plot(series.x, series.u[-1], color="tab:blue")
    ax_v.plot(series.x, series.v[-1], color="tab:red")
    for ax, name in ((ax_u, "u"), (ax_v, "v")):
        ax.set_xlabel("x")
        ax.set_ylabel(f"{name}(x, {series.t[-1]:g})")
        ax.ticklabel_format(useOffset=False)
    fig.suptitle(title or f"profiles at t = {series.t[-1]:g}")
    fig.tight_layout()
    _save(fig, Path(path))


def render_run(series: SnapshotSeries, out_dir, label: str = "") -> list[Path]:
    out_dir = Path(out_dir)
    paths = [out_dir / "u_heatmap.svg", out_dir / "v_heatmap.svg", out_dir / "final_profiles.svg"]
    prefix = f"{label}: " if label else ""
    heatmap(series, "u", paths[0], f"{prefix}u(x, t)")
    heatmap(series, "v", paths[1], f"{prefix}v(x, t)")
    final_profiles(series, paths[2], f"{prefix}final profiles")
    return paths
