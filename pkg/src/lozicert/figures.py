"""Deterministic SVG drawings built from report documents.

Reports are the JSON dictionaries produced by the CLI; rationals appear as
"num/den" strings and are converted to floats only here, for drawing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

# gray, darker, darkest; then a few distinguishable hues for boxes and curves
FILLS = ("#d0d0d0", "#909090", "#404040")
STROKES = ("#1f4e9c", "#b0302a", "#2a8c3c", "#8c5a2a", "#6a3d9a", "#c08000", "#008080", "#555555")


class FigureError(ValueError):
    """Nothing drawable was selected."""


@dataclass
class Layer:
    name: str
    polygons: list = field(default_factory=list)  # lists of (x, y) floats
    polylines: list = field(default_factory=list)
    fill: Optional[str] = None
    stroke: str = "#000000"

    def empty(self) -> bool:
        return not self.polygons and not self.polylines


def _num(v) -> float:
    return float(Fraction(v)) if isinstance(v, str) else float(v)


def _pts(seq) -> list:
    return [(_num(x), _num(y)) for x, y in seq]


def layers_from_report(report: dict) -> list:
    """Every drawable layer a report carries, in a fixed order."""
    body = report.get("result", report)
    out: list = []
    if "trapping" in body or "covering" in body:
        for key in ("trapping", "covering"):
            if key in body:
                out.extend(layers_from_report(body[key]))
        return out
    if "region" in body and "layers" in body:
        out.append(Layer("region", [_pts(body["region"])], fill=FILLS[0], stroke="#000000"))
        for k, layer in enumerate(body["layers"], start=1):
            fill = FILLS[min(k, len(FILLS) - 1)]
            out.append(Layer(f"image-{k}", [_pts(p) for p in layer], fill=fill, stroke=fill))
    if "boxes" in body:
        for k, box in enumerate(body["boxes"]):
            name = box.get("name") or f"box{k}"
            out.append(Layer(name, [_pts(box["vertices"])], stroke=STROKES[k % len(STROKES)]))
        for k, row in enumerate(body.get("verdicts", [])):
            image = next((v["image"] for v in row if v.get("image")), None)
            if image is not None:
                name = body["boxes"][k].get("name") or f"box{k}"
                out.append(Layer(f"image-{name}", [_pts(image)], stroke=STROKES[k % len(STROKES)]))
    for k, poly in enumerate(body.get("polylines", [])):
        role = poly.get("role", "curve")
        level = poly.get("info", {}).get("level")
        name = role if level is None else f"{role}-{level}"
        out.append(Layer(name, polylines=[_pts(p) for p in poly["pieces"]],
                         stroke=STROKES[k % len(STROKES)]))
    for k, pt in enumerate(body.get("points", [])):
        xy = pt["point"] if isinstance(pt, dict) else pt
        x, y = _num(xy[0]), _num(xy[1])
        out.append(Layer(f"point-{k}", polylines=[[(x, y), (x, y)]], stroke="#000000"))
    for k, seg in enumerate(body.get("segments", [])):
        out.append(Layer(f"segment-{k}", polylines=[_pts([seg["start"], seg["end"]])], stroke=STROKES[1]))
    return out


def select_layers(layers: Sequence[Layer], names: Optional[Iterable[str]] = None) -> list:
    if names is None:
        chosen = list(layers)
    else:
        wanted = list(names)
        chosen = [l for l in layers if any(l.name == w or l.name.startswith(w + "-") for w in wanted)]
    chosen = [l for l in chosen if not l.empty()]
    if not chosen:
        raise FigureError("empty layer selection")
    return chosen


def _bounds(layers) -> tuple:
    xs, ys = [], []
    for l in layers:
        for shape in l.polygons + l.polylines:
            xs.extend(p[0] for p in shape)
            ys.extend(p[1] for p in shape)
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-9)
    pad = 0.05 * span
    return x0 - pad, x1 + pad, y0 - pad, y1 + pad


def render_svg(layers: Sequence[Layer], width: int = 640) -> str:
    if not layers or all(l.empty() for l in layers):
        raise FigureError("empty layer selection")
    x0, x1, y0, y1 = _bounds(layers)
    scale = width / max(x1 - x0, y1 - y0)
    w, h = (x1 - x0) * scale, (y1 - y0) * scale

    def fmt(p):
        return f"{(p[0] - x0) * scale:.3f},{(y1 - p[1]) * scale:.3f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
        f'viewBox="0 0 {w:.3f} {h:.3f}">',
        f'<rect width="{w:.3f}" height="{h:.3f}" fill="#ffffff"/>',
    ]
    for l in layers:
        lines.append(f'<g id="{escape(l.name)}">')
        for poly in l.polygons:
            fill = l.fill or "none"
            lines.append(f'<polygon points="{" ".join(fmt(p) for p in poly)}" fill="{fill}" '
                         f'stroke="{l.stroke}" stroke-width="1"/>')
        for line in l.polylines:
            if len(line) == 2 and line[0] == line[1]:
                cx, cy = fmt(line[0]).split(",")
                lines.append(f'<circle cx="{cx}" cy="{cy}" r="3" fill="{l.stroke}"/>')
            else:
                lines.append(f'<polyline points="{" ".join(fmt(p) for p in line)}" fill="none" '
                             f'stroke="{l.stroke}" stroke-width="1"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_figure(report: dict, names: Optional[Iterable[str]] = None, width: int = 640) -> str:
    return render_svg(select_layers(layers_from_report(report), names), width)
