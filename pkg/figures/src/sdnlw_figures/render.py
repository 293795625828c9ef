"""Deterministic SVG rendering of manifest figures.

Each figure becomes one vector image in the output directory.  Rendering is a
pure function of the manifest and CSV contents: the matplotlib SVG hash salt
is pinned and no timestamps are embedded, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import xml.etree.ElementTree as ET
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .manifest import FigureManifest

_HASH_SALT = "sdnlw-figures"
_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


class RenderError(ValueError):
    """A figure could not be rendered (missing file or column)."""


def _read_columns(fig: FigureManifest) -> dict[str, list[str]]:
    try:
        with open(fig.csv, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except FileNotFoundError:
        raise RenderError(f"figure {fig.id!r}: data file not found: {fig.csv}")
    if rows and None in rows[0]:
        raise RenderError(f"figure {fig.id!r}: ragged rows in {fig.csv.name}")
    header = list(rows[0].keys()) if rows else []
    needed = [fig.x, *fig.y]
    if fig.reference is not None and fig.reference.column is not None:
        needed.append(fig.reference.column)
    missing = [c for c in needed if c not in header]
    if missing:
        raise RenderError(
            f"figure {fig.id!r}: missing column(s) {missing} in {fig.csv.name}"
        )
    return {c: [r[c] for r in rows] for c in header}


def _numeric_axis(raw: list[str]) -> tuple[list[float], list[str] | None]:
    """Parse the x column; categorical values map to positions with tick labels."""
    try:
        return [float(v) for v in raw], None
    except ValueError:
        return [float(i) for i in range(len(raw))], raw


def _parse_series(fig: FigureManifest, column: str, raw: list[str]) -> list[float]:
    try:
        return [float(v) for v in raw]
    except ValueError as exc:
        raise RenderError(f"figure {fig.id!r}: non-numeric value in column {column!r}: {exc}")


def render_figure(fig: FigureManifest, out_dir: Path) -> Path:
    """Render one figure to ``out_dir/<id>.svg``; returns the written path."""
    cols = _read_columns(fig)
    x, tick_labels = _numeric_axis(cols[fig.x])

    plt.rcParams["svg.hashsalt"] = _HASH_SALT
    figure, ax = plt.subplots(figsize=(6.0, 4.0), dpi=100)
    try:
        for i, name in enumerate(fig.y):
            y = _parse_series(fig, name, cols[name])
            color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
            ax.plot(x, y, marker="o", markersize=4, color=color, label=name)
        if fig.reference is not None and fig.reference.column is not None:
            ref = _parse_series(fig, fig.reference.column, cols[fig.reference.column])
            ax.plot(
                x,
                ref,
                linestyle="--",
                color="0.35",
                label=fig.reference.label or fig.reference.column,
            )
        ax.set_xscale(fig.xscale)
        ax.set_yscale(fig.yscale)
        if tick_labels is not None:
            ax.set_xticks(x)
            ax.set_xticklabels(tick_labels)
        ax.set_xlabel(fig.x)
        ax.set_title(fig.id)
        if fig.monotonic != "none":
            ax.annotate(
                f"expected: {fig.monotonic}",
                xy=(0.98, 0.02),
                xycoords="axes fraction",
                ha="right",
                va="bottom",
                fontsize=8,
                color="0.4",
            )
        ax.legend(fontsize=8)
        ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
        figure.tight_layout()
        out_path = out_dir / f"{fig.id}.svg"
        figure.savefig(out_path, format="svg", metadata={"Date": None})
    finally:
        plt.close(figure)
    return out_path


def render_all(figures: list[FigureManifest], out_dir: str | Path) -> tuple[list[Path], list[str]]:
    """Render every figure; returns (written paths, per-figure error messages).

    A failing figure does not stop the others; callers map a non-empty error
    list to a nonzero exit code.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    errors: list[str] = []
    for fig in figures:
        try:
            written.append(render_figure(fig, out))
        except RenderError as exc:
            errors.append(str(exc))
    return written, errors


def structure_hash(svg_path: str | Path) -> str:
    """Content hash of an SVG image, stable across identical renders.

    Hashes the canonicalized XML, so byte-level noise (attribute order,
    whitespace) does not affect the digest while any change to geometry,
    text, or styling does.
    """
    canonical = ET.canonicalize(from_file=str(svg_path))
    return hashlib.sha256(canonical.encode()).hexdigest()
