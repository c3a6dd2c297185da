"""Deterministic writers for CSV/JSON results, run manifests, and SVG plots.

Data files are byte-reproducible for a fixed configuration: floats are
rendered with repr (shortest round-trip form, always a '.' decimal point),
line endings are LF, and key order is fixed.  Manifests additionally carry
wall time and worker count, which legitimately vary between runs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .spectra import TimeSeries

MANIFEST_SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(series: TimeSeries, intensity: TimeSeries, path) -> None:
    """Time series as CSV: header `gamma_t,s_value,intensity`, LF endings."""
    if len(series.times) != len(intensity.times):
        raise ValueError("series and intensity must be aligned")
    lines = ["gamma_t,s_value,intensity"]
    for t, s, i in zip(series.times, series.values, intensity.values):
        lines.append(f"{_fmt(t)},{_fmt(s)},{_fmt(i)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8",
                          newline="\n")


def write_series_json(series: TimeSeries, intensity: TimeSeries, path) -> None:
    payload = {
        "label": series.label,
        "gamma_t": [float(v) for v in series.times],
        "s_value": [float(v) for v in series.values],
        "intensity": [float(v) for v in intensity.values],
    }
    _write_json(payload, path)


def write_dist_csv(probs: np.ndarray, path) -> None:
    lines = ["n,probability"]
    for n, p in enumerate(probs):
        lines.append(f"{n},{_fmt(p)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8",
                          newline="\n")


def write_dist_json(dist, path) -> None:
    payload = {
        "kind": dist.spec.kind,
        "n_max": dist.n_max,
        "tail_mass": float(dist.tail_mass),
        "mean_closed": float(dist.mean_closed),
        "var_closed": float(dist.var_closed),
        "probs": [float(p) for p in dist.probs],
    }
    _write_json(payload, path)


def write_spectrum_csv(spectrum, path) -> None:
    lines = ["omega,amplitude"]
    for w, a in zip(spectrum.omegas, spectrum.amplitudes):
        lines.append(f"{_fmt(w)},{_fmt(a)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8",
                          newline="\n")


def write_spectrum_json(spectrum, path) -> None:
    payload = {
        "mode": spectrum.mode,
        "n_tlm": spectrum.n_tlm,
        "detuning": float(spectrum.detuning),
        "dist_digest": spectrum.dist_digest,
        "amp_floor": float(spectrum.amp_floor),
        "dropped_mass": float(spectrum.dropped_mass),
        "terms": [[float(w), float(a)]
                  for w, a in zip(spectrum.omegas, spectrum.amplitudes)],
    }
    _write_json(payload, path)


def write_manifest(config: dict, stats: dict, path) -> None:
    """Run manifest: config echo plus run statistics.

    The schema only ever gains keys; existing ones keep their meaning.
    """
    payload = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "engine_version": _engine_version(),
        "config": config,
    }
    payload.update(stats)
    _write_json(payload, path)


def _engine_version() -> str:
    from . import __version__
    return __version__


def _write_json(payload, path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n",
                          encoding="utf-8", newline="\n")


def write_svg(series_list: list[TimeSeries], labels: list[str], path,
              x_label: str = "γt") -> None:
    """Minimal polyline chart; cosmetics are unspecified, only well-formedness
    matters."""
    width, height, margin = 800, 500, 60
    xs = series_list[0].times
    y_min = min(float(s.values.min()) for s in series_list)
    y_max = max(float(s.values.max()) for s in series_list)
    if y_max == y_min:
        y_max = y_min + 1.0
    x_min, x_max = float(xs[0]), float(xs[-1])
    if x_max == x_min:
        x_max = x_min + 1.0

    def px(x):
        return margin + (x - x_min) / (x_max - x_min) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - y_min) / (y_max - y_min) * (height - 2 * margin)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height-margin}" x2="{width-margin}" '
        f'y2="{height-margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height-margin}" stroke="black"/>',
        f'<text x="{width//2}" y="{height-15}" text-anchor="middle" '
        f'font-size="16">{x_label}</text>',
        f'<text x="18" y="{height//2}" text-anchor="middle" font-size="16" '
        f'transform="rotate(-90 18 {height//2})">'
        f'{" / ".join(labels)}</text>',
        f'<text x="{margin}" y="{height-margin+20}" font-size="12" '
        f'text-anchor="middle">{_fmt(x_min)}</text>',
        f'<text x="{width-margin}" y="{height-margin+20}" font-size="12" '
        f'text-anchor="middle">{_fmt(x_max)}</text>',
        f'<text x="{margin-5}" y="{height-margin}" font-size="12" '
        f'text-anchor="end">{_fmt(y_min)}</text>',
        f'<text x="{margin-5}" y="{margin}" font-size="12" '
        f'text-anchor="end">{_fmt(y_max)}</text>',
    ]
    for k, series in enumerate(series_list):
        pts = " ".join(f"{px(t):.2f},{py(v):.2f}"
                       for t, v in zip(series.times, series.values))
        parts.append(f'<polyline fill="none" stroke="{colors[k % len(colors)]}" '
                     f'stroke-width="1" points="{pts}"/>')
        parts.append(f'<text x="{width-margin}" y="{margin + 18*k + 14}" '
                     f'text-anchor="end" font-size="13" '
                     f'fill="{colors[k % len(colors)]}">{labels[k]}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8",
                          newline="\n")
