"""CSV, JSON and SVG writers with an embedded run manifest."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .core import GeometryConfig


@dataclass
class RunManifest:
    config: GeometryConfig
    command: str
    parameters: dict
    seed: int
    tolerances: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "outputs": list(self.outputs),
        }


def fmt_float(v: float) -> str:
    return "%.17g" % (v + 0.0)  # folds -0.0 into 0


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row))
        buf.write("\n")
    return buf.getvalue()


def json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_artifact(out_dir: Path, stem: str, fmt: str, text: str,
                   manifest: RunManifest) -> list[Path]:
    """Write ``stem.fmt`` and, for CSV, a ``stem.manifest.json`` sidecar."""
    out_dir = Path(out_dir)
    main = out_dir / f"{stem}.{fmt}"
    paths = [main]
    if fmt == "csv":
        paths.append(out_dir / f"{stem}.manifest.json")
    manifest.outputs = [p.name for p in paths]
    write_text(main, text)
    if fmt == "csv":
        write_text(paths[1], json_text(manifest.to_dict()))
    return paths


# --- SVG ------------------------------------------------------------------------

WIDTH, HEIGHT, MARGIN, LEGEND_W = 640, 480, 50, 140

STYLES = {
    "facet": 'stroke="#1f4e9c" stroke-width="2" fill="none"',
    "upper": 'stroke="#c0392b" stroke-width="2" fill="none"',
    "minus": 'stroke="#7f8c8d" stroke-width="1.5" stroke-dasharray="6,4" fill="none"',
    "boundary": 'stroke="#000000" stroke-width="1.5" fill="none"',
}

PHASE_FILL = {"plus": "#f6d7a7", "minus": "#a7c7f6", "boundary": "#444444", "singular": "#ffffff"}


def piece_style(piece_id: str) -> str:
    if piece_id.startswith("l"):
        return "facet"
    if piece_id.startswith("upper"):
        return "upper"
    if piece_id.startswith("minus"):
        return "minus"
    return "boundary"


class _Frame:
    """Affine map from a data window to the plotting area (y axis up)."""

    def __init__(self, xlo, xhi, ylo, yhi):
        if not xhi > xlo:
            xlo, xhi = xlo - 1.0, xhi + 1.0
        if not yhi > ylo:
            ylo, yhi = ylo - 1.0, yhi + 1.0
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi
        self.w = WIDTH - 2 * MARGIN - LEGEND_W
        self.h = HEIGHT - 2 * MARGIN

    def __call__(self, x, y):
        px = MARGIN + (x - self.xlo) / (self.xhi - self.xlo) * self.w
        py = MARGIN + (self.yhi - y) / (self.yhi - self.ylo) * self.h
        return px, py


def _num(v: float) -> str:
    return "%.3f" % v


def _axes(frame: _Frame, xlabel: str, ylabel: str) -> list[str]:
    x0, y0 = MARGIN, MARGIN + frame.h
    out = [f'<rect x="{MARGIN}" y="{MARGIN}" width="{frame.w}" height="{frame.h}" '
           'stroke="#000000" fill="none"/>']
    out.append(f'<text x="{x0}" y="{y0 + 18}" font-size="11">{_num(frame.xlo)}</text>')
    out.append(f'<text x="{MARGIN + frame.w}" y="{y0 + 18}" font-size="11" '
               f'text-anchor="end">{_num(frame.xhi)}</text>')
    out.append(f'<text x="{MARGIN - 4}" y="{y0}" font-size="11" '
               f'text-anchor="end">{_num(frame.ylo)}</text>')
    out.append(f'<text x="{MARGIN - 4}" y="{MARGIN + 10}" font-size="11" '
               f'text-anchor="end">{_num(frame.yhi)}</text>')
    out.append(f'<text x="{MARGIN + frame.w / 2}" y="{y0 + 34}" font-size="13" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{MARGIN + frame.h / 2}" font-size="13" '
               f'text-anchor="middle" transform="rotate(-90 14 {MARGIN + frame.h / 2})">'
               f'{escape(ylabel)}</text>')
    return out


def _legend(entries: list[tuple[str, str]]) -> list[str]:
    """entries: (label, svg attribute string for a line sample or 'fill:#rrggbb')."""
    x = WIDTH - LEGEND_W - MARGIN / 2 + 10
    out = ['<g id="legend">']
    for i, (label, style) in enumerate(entries):
        y = MARGIN + 10 + 20 * i
        if style.startswith("fill:"):
            out.append(f'<rect x="{x}" y="{y - 8}" width="24" height="12" '
                       f'fill="{style[5:]}" stroke="#000000" stroke-width="0.5"/>')
        else:
            out.append(f'<line x1="{x}" y1="{y - 2}" x2="{x + 24}" y2="{y - 2}" {style}/>')
        out.append(f'<text x="{x + 30}" y="{y + 2}" font-size="12">{escape(label)}</text>')
    out.append("</g>")
    return out


def _document(body: list[str], title: str, manifest: RunManifest) -> str:
    meta = escape(json.dumps(manifest.to_dict(), sort_keys=True))
    head = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
            f'width="{WIDTH}" height="{HEIGHT}">',
            f"<metadata>{meta}</metadata>",
            f"<title>{escape(title)}</title>",
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>']
    return "\n".join(head + body + ["</svg>"]) + "\n"


def svg_polylines(pieces: list[tuple[str, Sequence[Sequence[float]]]], title: str,
                  manifest: RunManifest, xlabel: str = "mu1", ylabel: str = "mu2") -> str:
    finite = [(x, y) for _, pts in pieces for x, y in pts if math.isfinite(x) and math.isfinite(y)]
    xs = [p[0] for p in finite] or [0.0]
    ys = [p[1] for p in finite] or [0.0]
    frame = _Frame(min(xs), max(xs), min(ys), max(ys))
    body = _axes(frame, xlabel, ylabel)
    seen = []
    for pid, pts in pieces:
        kind = piece_style(pid)
        coords = " ".join("%s,%s" % tuple(map(_num, frame(x, y))) for x, y in pts)
        body.append(f'<polyline id="{escape(pid)}" class="{kind}" points="{coords}" '
                    f'{STYLES[kind]}/>')
        if kind not in seen:
            seen.append(kind)
    labels = {"facet": "facet l_k = 0", "upper": "upper bound (positive phase)",
              "minus": "negative-phase bound", "boundary": "boundary"}
    body += _legend([(labels[k], STYLES[k]) for k in seen])
    return _document(body, title, manifest)


def svg_phase_map(rho: Sequence[float], z: Sequence[float], labels: list[list[str]],
                  curve: list[tuple[float, float]], title: str, manifest: RunManifest) -> str:
    """Raster of phase labels on a (rho, z) grid with the boundary curve rho = sqrt(p_a(z))."""
    frame = _Frame(rho[0], rho[-1], z[0], z[-1])
    dr = (rho[-1] - rho[0]) / max(len(rho) - 1, 1)
    dz = (z[-1] - z[0]) / max(len(z) - 1, 1)
    body = []
    for j, zz in enumerate(z):
        for i, rr in enumerate(rho):
            x0, y1 = frame(max(rr - dr / 2, rho[0]), min(zz + dz / 2, z[-1]))
            x1, y0 = frame(min(rr + dr / 2, rho[-1]), max(zz - dz / 2, z[0]))
            body.append(f'<rect x="{_num(x0)}" y="{_num(y1)}" width="{_num(x1 - x0)}" '
                        f'height="{_num(y0 - y1)}" fill="{PHASE_FILL[labels[j][i]]}"/>')
    body += _axes(frame, "rho", "z")
    if curve:
        coords = " ".join("%s,%s" % tuple(map(_num, frame(r, zz))) for r, zz in curve)
        body.append(f'<polyline id="p_a" class="boundary" points="{coords}" '
                    f'{STYLES["boundary"]}/>')
    body += _legend([("V > 0", "fill:" + PHASE_FILL["plus"]),
                     ("V < 0", "fill:" + PHASE_FILL["minus"]),
                     ("rho^2 = p_a(z)", STYLES["boundary"])])
    return _document(body, title, manifest)
