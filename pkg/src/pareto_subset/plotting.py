"""Matplotlib rendering of frontiers to image files.

Uses Figure objects directly (no pyplot state machine) so rendering works
headlessly and never touches global state.  Marker conventions follow the
criterion-space plots common in the bi-objective literature: filled circles
for extreme supported points, triangles for non-extreme supported points,
filled squares for unsupported points, a diamond for the empty model.
"""

from __future__ import annotations

from matplotlib.figure import Figure

from .frontier import Frontier, FrontierPoint, PointClass, ideal_point

_STYLE = {
    PointClass.EXTREME_SUPPORTED: dict(marker="o", color="black",
                                       label="extreme supported"),
    PointClass.NONEXTREME_SUPPORTED: dict(marker="^", color="tab:green",
                                          label="non-extreme supported"),
    PointClass.UNSUPPORTED: dict(marker="s", color="tab:red",
                                 label="unsupported"),
    PointClass.TRIVIAL: dict(marker="D", color="dimgray", label="empty model"),
    None: dict(marker="o", color="tab:blue", label="nondominated"),
}


def _scatter_frontier(ax, frontier: Frontier) -> None:
    pts = sorted(frontier.points, key=lambda pt: pt.z2)
    ax.plot([pt.z1 for pt in pts], [pt.z2 for pt in pts],
            linestyle="--", linewidth=0.6, color="lightgray", zorder=1)
    for cls, style in _STYLE.items():
        members = [pt for pt in pts if pt.classification is cls]
        if members:
            ax.scatter([pt.z1 for pt in members], [pt.z2 for pt in members],
                       s=28, zorder=2, **style)


def render_frontier(frontier: Frontier, path, *, selected: FrontierPoint | None = None,
                    show_ideal: bool = True, title: str | None = None) -> None:
    """Render one frontier (classified or not) to an image file."""
    fig = Figure(figsize=(6.4, 4.2), dpi=150)
    ax = fig.add_subplot()
    _scatter_frontier(ax, frontier)
    if show_ideal and frontier.points:
        i1, i2 = ideal_point(frontier)
        ax.scatter([i1], [i2], marker="*", s=90, color="tab:blue", zorder=3,
                   label="ideal point")
        if selected is not None:
            ax.plot([i1, selected.z1], [i2, selected.z2], linewidth=0.8,
                    color="tab:blue", linestyle=":", zorder=1)
    if selected is not None:
        ax.scatter([selected.z1], [selected.z2], s=160, facecolors="none",
                   edgecolors="tab:blue", zorder=3, label="selected")
        ax.annotate(f"({selected.z1:.4g}, {selected.z2})",
                    (selected.z1, selected.z2), textcoords="offset points",
                    xytext=(8, 6), fontsize=8)
    ax.set_xlabel("total absolute bias $z_1$")
    ax.set_ylabel("number of predictors $z_2$")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8, frameon=False)
    ax.grid(True, linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path)


def render_frontier_overlay(frontiers: list[Frontier], labels: list[str],
                            path, title: str | None = None) -> None:
    """Step-plot several frontiers on shared axes (used by the benchmark)."""
    fig = Figure(figsize=(6.4, 4.2), dpi=150)
    ax = fig.add_subplot()
    for frontier, label in zip(frontiers, labels):
        pts = sorted(frontier.points, key=lambda pt: pt.z2)
        ax.step([pt.z1 for pt in pts], [pt.z2 for pt in pts], where="post",
                marker=".", linewidth=0.9, label=label)
    ax.set_xlabel("total absolute bias $z_1$")
    ax.set_ylabel("number of predictors $z_2$")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8, frameon=False)
    ax.grid(True, linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path)
