"""Minimal SVG emission for spring layouts and sweep plots."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .geometry import UM, BeamPath


def _f(v):
    v = round(float(v), 3)
    return f"{v:.3f}".rstrip("0").rstrip(".") if v else "0"


class SvgDocument:
    def __init__(self, width, height, metadata=None):
        self.width = width
        self.height = height
        self.metadata = dict(metadata or {})
        self._body: list[str] = []

    def polyline(self, pts, cls, stroke="#1f4e79", stroke_width=1.0):
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        self._body.append(
            f'<polyline class="{cls}" points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_f(stroke_width)}" stroke-linejoin="miter"/>'
        )

    def rect(self, x, y, w, h, cls, fill="#d9d9d9"):
        self._body.append(
            f'<rect class="{cls}" x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{fill}" stroke="#555555"/>'
        )

    def circle(self, x, y, r, cls, fill="#c00000"):
        self._body.append(f'<circle class="{cls}" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{fill}"/>')

    def line(self, x1, y1, x2, y2, cls="axis", stroke="#000000"):
        self._body.append(
            f'<line class="{cls}" x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" stroke="{stroke}"/>'
        )

    def text(self, x, y, s, anchor="start", size=11):
        self._body.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}">{escape(str(s))}</text>'
        )

    def render(self) -> str:
        meta = "".join(f'<meta name="{escape(k)}" value="{escape(str(v))}"/>' for k, v in self.metadata.items())
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(self.width)}" height="{_f(self.height)}" '
            f'viewBox="0 0 {_f(self.width)} {_f(self.height)}">'
        )
        return "\n".join([head, f"<metadata>{meta}</metadata>", *self._body, "</svg>"]) + "\n"


def render_layout(paths: list[BeamPath], reflector_half_len, reflector_side=None, px_per_um=2.0, margin_px=20.0):
    """Spring centerlines, anchors and the reflector outline.

    Device coordinates are in metres with +Y up; the SVG flips Y.
    """
    side = 2 * reflector_half_len if reflector_side is None else reflector_side
    xs = [p.x for path in paths for p in path.points] + [-reflector_half_len, reflector_half_len]
    ys = [p.y for path in paths for p in path.points] + [-side / 2, side / 2]
    x0, x1 = min(xs) / UM, max(xs) / UM
    y0, y1 = min(ys) / UM, max(ys) / UM
    width = (x1 - x0) * px_per_um + 2 * margin_px
    height = (y1 - y0) * px_per_um + 2 * margin_px

    def to_px(x, y):
        return (margin_px + (x / UM - x0) * px_per_um, margin_px + (y1 - y / UM) * px_per_um)

    doc = SvgDocument(width, height, {"px_per_um": px_per_um, "origin_um": f"{_f(x0)},{_f(y1)}"})
    rx, ry = to_px(-reflector_half_len, side / 2)
    doc.rect(rx, ry, 2 * reflector_half_len / UM * px_per_um, side / UM * px_per_um, "reflector")
    for path in paths:
        w = float(path.widths().max()) / UM * px_per_um
        doc.polyline([to_px(p.x, p.y) for p in path.points], "spring", stroke_width=max(w, 1.0))
    for path in paths:
        ax, ay = to_px(path.anchor.x, path.anchor.y)
        doc.circle(ax, ay, 4.0, "anchor")
    return doc.render()


def render_line_plot(xs, ys, xlabel, ylabel, title="", width=520.0, height=360.0, reference=None):
    """Single-series line plot with axes, tick labels and an optional horizontal reference line."""
    left, right, top, bottom = 70.0, 20.0, 30.0, 50.0
    pts = [(x, y) for x, y in zip(xs, ys) if y == y]
    doc = SvgDocument(width, height, {"xlabel": xlabel, "ylabel": ylabel})
    if not pts:
        doc.text(width / 2, height / 2, "no data", anchor="middle")
        return doc.render()
    xmin, xmax = min(p[0] for p in pts), max(p[0] for p in pts)
    yvals = [p[1] for p in pts] + ([reference] if reference is not None else [])
    ymin, ymax = min(yvals), max(yvals)
    if xmax == xmin:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    pad = 0.05 * (ymax - ymin) or 0.5
    ymin, ymax = ymin - pad, ymax + pad

    def px(x, y):
        return (left + (x - xmin) / (xmax - xmin) * (width - left - right),
                top + (ymax - y) / (ymax - ymin) * (height - top - bottom))

    x_axis_y = height - bottom
    doc.line(left, x_axis_y, width - right, x_axis_y)
    doc.line(left, top, left, x_axis_y)
    for k in range(5):
        xv = xmin + k * (xmax - xmin) / 4
        yv = ymin + k * (ymax - ymin) / 4
        tx, _ = px(xv, ymin)
        _, ty = px(xmin, yv)
        doc.text(tx, x_axis_y + 15, f"{xv:.4g}", anchor="middle", size=10)
        doc.text(left - 5, ty + 3, f"{yv:.4g}", anchor="end", size=10)
    if reference is not None:
        a = px(xmin, reference)
        b = px(xmax, reference)
        doc.line(a[0], a[1], b[0], b[1], cls="reference", stroke="#999999")
    doc.polyline([px(x, y) for x, y in pts], "series", stroke_width=1.5)
    for x, y in pts:
        cx, cy = px(x, y)
        doc.circle(cx, cy, 2.5, "marker", fill="#1f4e79")
    doc.text(width / 2, height - 12, xlabel, anchor="middle")
    doc.text(14, top - 10, ylabel)
    if title:
        doc.text(width / 2, 18, title, anchor="middle", size=12)
    return doc.render()
