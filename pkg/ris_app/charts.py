"""Gráficas SVG estáticas de las corridas (sin pyplot: una ``Figure`` por archivo)."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .harness import FeasGridResult, PercentileRow, TransitionResult

logger = logging.getLogger(__name__)

# Sin fecha en el SVG para que dos corridas iguales den el mismo archivo.
SVG_METADATA = {"Date": None}


def _save(fig: Figure, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight", metadata=SVG_METADATA)
    logger.info("SVG escrito en %s", path)
    return path


def _style(ax) -> None:
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    ax.grid(True, alpha=0.3)


def feasgrid_svg(result: FeasGridResult, path: Path) -> Path:
    """Mapa de calor de factibilidad sobre el plano complejo de y."""

    re_values = sorted({p.re for p in result.points})
    im_values = sorted({p.im for p in result.points})
    col = {v: i for i, v in enumerate(re_values)}
    row = {v: i for i, v in enumerate(im_values)}
    grid = np.zeros((len(im_values), len(re_values)))
    for p in result.points:
        grid[row[p.im], col[p.re]] = 1.0 if p.feasible else 0.0

    fig = Figure(figsize=(4.5, 4.0))
    ax = fig.add_subplot(1, 1, 1)
    ax.imshow(
        grid,
        origin="lower",
        extent=(re_values[0], re_values[-1], im_values[0], im_values[-1]),
        cmap="Greys",
        vmin=0.0,
        vmax=1.0,
        interpolation="nearest",
    )
    ax.set_xlabel("Re{y}")
    ax.set_ylabel("Im{y}")
    ax.set_title(f"Región factible, N={result.n}")
    return _save(fig, path)


def transition_svg(result: TransitionResult, path: Path) -> Path:
    """Probabilidad de éxito vs N, una polilínea por (K, camino directo)."""

    fig = Figure(figsize=(5.0, 3.5))
    ax = fig.add_subplot(1, 1, 1)
    for k in result.ks():
        for direct in result.directs():
            curve = result.curve(k, direct)
            if not curve:
                continue
            ns, probs = zip(*curve)
            label = f"K={k}, {'con' if direct else 'sin'} camino directo"
            ax.plot(ns, probs, marker="o", linestyle="-" if direct else "--", label=label)
    ax.set_xlabel("N (elementos RIS)")
    ax.set_ylabel("Probabilidad de éxito")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right", fontsize="small")
    _style(ax)
    return _save(fig, path)


def percentile_svg(rows: list[PercentileRow], theory: dict, path: Path) -> Path:
    """N interpolado por nivel vs K, junto con las rectas teóricas."""

    fig = Figure(figsize=(5.0, 3.5))
    ax = fig.add_subplot(1, 1, 1)
    for level in sorted({r.level for r in rows}):
        points = sorted((r.k, r.n_interp) for r in rows if r.level == level)
        ks, ns = zip(*points)
        ax.plot(ks, ns, marker="s", label=f"{int(round(level * 100))}%")
    for name, style in (("no_direct", ":"), ("direct", "-.")):
        line = theory.get(name) or []
        if line:
            ks, ns = zip(*line)
            ax.plot(ks, ns, linestyle=style, color="black", label=f"teoría ({name})")
    ax.set_xlabel("K")
    ax.set_ylabel("N")
    ax.legend(loc="upper left", fontsize="small")
    _style(ax)
    return _save(fig, path)
