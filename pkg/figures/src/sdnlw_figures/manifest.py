"""Figure manifest: parsing and validation.

The manifest is a JSON file with a ``figures`` array; each entry names a CSV
file (relative to the manifest), the x column, one or more y columns, axis
scale hints, an optional expected-monotonicity annotation, and an optional
reference-curve overlay request.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

_SCALES = ("linear", "log")
_MONOTONIC = ("increasing", "decreasing", "none")


class ManifestError(ValueError):
    """Invalid or unreadable figure manifest."""


@dataclass(frozen=True)
class ReferenceCurve:
    """Overlay request: a named column drawn as a dashed reference line."""

    kind: str
    column: str | None = None
    label: str | None = None


@dataclass(frozen=True)
class FigureManifest:
    """One figure: data source, columns, scales, and annotations."""

    id: str
    csv: Path
    x: str
    y: tuple[str, ...]
    xscale: str = "linear"
    yscale: str = "linear"
    monotonic: str = "none"
    reference: ReferenceCurve | None = None


def _require(entry: dict, key: str, figure_id: str):
    if key not in entry:
        raise ManifestError(f"figure {figure_id!r}: missing manifest key {key!r}")
    return entry[key]


def _parse_figure(entry: dict, base_dir: Path) -> FigureManifest:
    if not isinstance(entry, dict):
        raise ManifestError("each figure entry must be an object")
    fid = str(entry.get("id", "<unnamed>"))
    csv_name = str(_require(entry, "csv", fid))
    x = str(_require(entry, "x", fid))
    y = _require(entry, "y", fid)
    if not isinstance(y, list) or not y or not all(isinstance(c, str) for c in y):
        raise ManifestError(f"figure {fid!r}: 'y' must be a non-empty list of column names")
    xscale = str(entry.get("xscale", "linear"))
    yscale = str(entry.get("yscale", "linear"))
    if xscale not in _SCALES or yscale not in _SCALES:
        raise ManifestError(f"figure {fid!r}: scales must be one of {_SCALES}")
    monotonic = str(entry.get("monotonic", "none"))
    if monotonic not in _MONOTONIC:
        raise ManifestError(f"figure {fid!r}: monotonic must be one of {_MONOTONIC}")
    reference = None
    if "reference" in entry:
        ref = entry["reference"]
        if not isinstance(ref, dict) or "kind" not in ref:
            raise ManifestError(f"figure {fid!r}: reference must be an object with 'kind'")
        reference = ReferenceCurve(
            kind=str(ref["kind"]),
            column=str(ref["column"]) if "column" in ref else None,
            label=str(ref["label"]) if "label" in ref else None,
        )
    return FigureManifest(
        id=fid,
        csv=base_dir / csv_name,
        x=x,
        y=tuple(y),
        xscale=xscale,
        yscale=yscale,
        monotonic=monotonic,
        reference=reference,
    )


def load_manifest(path: str | Path) -> list[FigureManifest]:
    """Parse and validate a manifest file; returns one entry per figure."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}")
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict) or "figures" not in doc:
        raise ManifestError("manifest must be an object with a 'figures' array")
    figures = doc["figures"]
    if not isinstance(figures, list):
        raise ManifestError("'figures' must be an array")
    parsed = [_parse_figure(entry, path.parent) for entry in figures]
    ids = [f.id for f in parsed]
    if len(set(ids)) != len(ids):
        raise ManifestError("figure ids must be unique")
    return parsed
