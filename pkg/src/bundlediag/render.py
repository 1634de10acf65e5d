"""Bundle diagrams (SVG, LaTeX picture) and search-tree export (Graphviz DOT).

A bundle diagram is built once as a flat scene of :class:`Element` objects and
then written by a backend, so every output format carries the same elements.
Geometry is an oblique projection of 3D points ``(u, v, h)``: ``(u, v)`` is the
observable's base position, ``v`` the depth axis, ``h`` the height above the base.
"""

from __future__ import annotations

import colorsys
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Optional
from xml.sax.saxutils import escape, quoteattr

from bundlediag.model import SupportModel, outcome_key
from bundlediag.scenario import Scenario, Section, require_valid
from bundlediag.solver import SearchTrace, TraceNode

Point = tuple[float, float]

# violet, teal, orange, blue, pink
BASE_PALETTE = ("#8F00FF", "#008080", "#FF8C00", "#1F4FFF", "#FF69B4")


class RenderError(ValueError):
    pass


def context_color(i: int) -> str:
    if i < len(BASE_PALETTE):
        return BASE_PALETTE[i]
    hue = ((i - len(BASE_PALETTE)) * 47 + 20) % 360 / 360
    r, g, b = colorsys.hls_to_rgb(hue, 0.45, 0.75)
    return "#{:02X}{:02X}{:02X}".format(round(r * 255), round(g * 255), round(b * 255))


def _prefix(obs_id: str) -> str:
    head, sep, _ = obs_id.partition("_")
    return head if sep else obs_id[:1]


def _circle(n: int, radius: float) -> list[Point]:
    # Start at the top (odd n) or half a step left of it (even n), go clockwise,
    # so four points give the square with the first observable top-left.
    start = 90.0 + (180.0 / n if n % 2 == 0 else 0.0)
    pts = []
    for k in range(n):
        a = math.radians(start - 360.0 * k / n)
        pts.append((radius * math.cos(a), radius * math.sin(a)))
    return pts


def auto_layout(s: Scenario) -> dict[str, Point]:
    """Base coordinates: layout hints if every observable has one, else circles."""
    require_valid(s)
    if all(o.layout_hint is not None for o in s.observables):
        layout = {o.id: (float(o.layout_hint[0]), float(o.layout_hint[1])) for o in s.observables}
        if len(set(layout.values())) != len(layout):
            raise RenderError("layout hints place two observables on the same point")
        return layout
    ids = list(s.ids)
    if len(ids) == 1:
        return {ids[0]: (0.0, 0.0)}
    classes = list(dict.fromkeys(_prefix(o) for o in ids))
    if len(ids) <= 6 or len(classes) == 1:
        return dict(zip(ids, _circle(len(ids), 1.0)))
    inner_class = "X" if "X" in classes else classes[0]
    inner = [o for o in ids if _prefix(o) == inner_class]
    outer = [o for o in ids if _prefix(o) != inner_class]
    layout = dict(zip(inner, _circle(len(inner), 1.0)))
    layout.update(zip(outer, _circle(len(outer), 2.0)))
    return layout


@dataclass(frozen=True)
class DiagramSpec:
    base: Mapping[str, Point]
    h1: float = 1.0
    h0: float = 1.6
    depth_angle: float = 30.0
    depth_scale: float = 0.5
    colors: Optional[Sequence[str]] = None
    scale: float = 120.0
    margin: float = 40.0

    @classmethod
    def for_scenario(cls, s: Scenario, **kw) -> "DiagramSpec":
        return cls(auto_layout(s), **kw)

    def height(self, outcome: int, arity: int) -> float:
        # Outcome 0 sits highest, the last outcome at h1.
        return self.h1 + (self.h0 - self.h1) * (arity - 1 - outcome) / (arity - 1)

    def project(self, obs: str, h: float) -> Point:
        u, v = self.base[obs]
        a = math.radians(self.depth_angle)
        return (u + self.depth_scale * math.cos(a) * v, h + self.depth_scale * math.sin(a) * v)

    def color(self, i: int) -> str:
        return self.colors[i % len(self.colors)] if self.colors else context_color(i)


@dataclass(frozen=True)
class Element:
    role: str  # base | fiber | fiber-node | support | highlight | label
    points: tuple[Point, ...]
    color: str = "#000000"
    context: Optional[str] = None
    outcome: Optional[str] = None
    observable: Optional[str] = None
    text: Optional[str] = None


def bundle_scene(sm: SupportModel, highlight: Optional[Section] = None, spec: Optional[DiagramSpec] = None):
    sc = sm.scenario
    spec = spec or DiagramSpec.for_scenario(sc)
    for ctx in sc.contexts:
        if len(ctx) > 4:
            raise RenderError(f"context {ctx.name!r} has {len(ctx)} observables; facets above 4 cannot be drawn")
    if len(set(spec.base[o] for o in sc.ids)) != len(sc.ids):
        raise RenderError("two observables share a base point")

    def fiber_point(obs: str, outcome: int) -> Point:
        return spec.project(obs, spec.height(outcome, sc.arity(obs)))

    hl = highlight.as_dict() if highlight is not None else None
    base, fibers, supports, highlights, labels = [], [], [], [], []
    for i, ctx in enumerate(sc.contexts):
        pts = tuple(spec.project(o, 0.0) for o in ctx.observables)
        base.append(Element("base", pts, "#444444", context=ctx.name))
        color = spec.color(i)
        for t in sorted(sm.support[ctx.name]):
            tpts = tuple(fiber_point(o, v) for o, v in zip(ctx.observables, t))
            supports.append(Element("support", tpts, color, context=ctx.name, outcome=outcome_key(t)))
            if hl is not None and all(hl.get(o) == v for o, v in zip(ctx.observables, t)):
                highlights.append(Element("highlight", tpts, "#D00000", context=ctx.name, outcome=outcome_key(t)))
    for o in sc.observables:
        top = spec.height(0, o.outcome_arity)
        fibers.append(Element("fiber", (spec.project(o.id, 0.0), spec.project(o.id, top)), "#777777", observable=o.id))
        labels.append(Element("label", (spec.project(o.id, 0.0),), text=o.id, observable=o.id))
        for j in range(o.outcome_arity):
            p = fiber_point(o.id, j)
            fibers.append(Element("fiber-node", (p,), "#000000", observable=o.id, outcome=str(j)))
            labels.append(Element("label", (p,), text=str(j), observable=o.id, outcome=str(j)))
    return spec, base + fibers + supports + highlights + labels


class _Frame:
    """Maps projected units to page coordinates (y down for SVG)."""

    def __init__(self, elements: Sequence[Element], scale: float, margin: float):
        xs = [p[0] for e in elements for p in e.points]
        ys = [p[1] for e in elements for p in e.points]
        self.x0, self.x1 = min(xs), max(xs)
        self.y0, self.y1 = min(ys), max(ys)
        self.scale, self.margin = scale, margin
        self.width = (self.x1 - self.x0) * scale + 2 * margin
        self.height = (self.y1 - self.y0) * scale + 2 * margin

    def svg(self, p: Point) -> Point:
        return ((p[0] - self.x0) * self.scale + self.margin, (self.y1 - p[1]) * self.scale + self.margin)

    def up(self, p: Point) -> Point:
        return ((p[0] - self.x0) * self.scale + self.margin, (p[1] - self.y0) * self.scale + self.margin)


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _svg_shape(e: Element, frame: _Frame, style: str) -> str:
    pts = [frame.svg(p) for p in e.points]
    data = f' class="{e.role}"'
    if e.context is not None:
        data += f" data-context={quoteattr(e.context)}"
    if e.observable is not None:
        data += f" data-observable={quoteattr(e.observable)}"
    if e.outcome is not None:
        data += f' data-outcome="{e.outcome}"'
    if len(pts) == 1:
        r = "3.5" if e.role == "fiber-node" else "5.0"
        return f'<circle{data} cx="{_f(pts[0][0])}" cy="{_f(pts[0][1])}" r="{r}" {style}/>'
    if len(pts) == 2:
        (x1, y1), (x2, y2) = pts
        return f'<line{data} x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" {style}/>'
    joined = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
    return f'<polygon{data} points="{joined}" {style}/>'


def _svg_style(e: Element) -> str:
    facet = len(e.points) > 2
    if e.role == "base":
        fill = 'fill="#CCCCCC" fill-opacity="0.25"' if facet else 'fill="none"'
        return f'stroke="{e.color}" stroke-width="2" {fill}'
    if e.role == "fiber":
        return f'stroke="{e.color}" stroke-width="1" stroke-dasharray="4 3" fill="none"'
    if e.role == "fiber-node":
        return f'fill="{e.color}" stroke="none"'
    width = "4" if e.role == "highlight" else "2"
    if facet:
        opacity = "0.45" if e.role == "highlight" else "0.3"
        return f'stroke="{e.color}" stroke-width="{width}" fill="{e.color}" fill-opacity="{opacity}"'
    if len(e.points) == 1:
        return f'fill="{e.color}" fill-opacity="0.5" stroke="{e.color}" stroke-width="{width}"'
    return f'stroke="{e.color}" stroke-width="{width}" fill="none"'


def _svg(elements: Sequence[Element], spec: DiagramSpec) -> str:
    frame = _Frame(elements, spec.scale, spec.margin)
    w, h = _f(frame.width), _f(frame.height)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    groups = ("base", "fibers", "supports", "highlights", "labels")
    role_group = {
        "base": "base",
        "fiber": "fibers",
        "fiber-node": "fibers",
        "support": "supports",
        "highlight": "highlights",
        "label": "labels",
    }
    for g in groups:
        out.append(f'<g id="{g}">')
        for e in elements:
            if role_group[e.role] != g:
                continue
            if e.role == "label":
                x, y = frame.svg(e.points[0])
                dx = -8 if e.outcome is not None else 0
                dy = 18 if e.outcome is None else 4
                anchor = "end" if e.outcome is not None else "middle"
                out.append(
                    f'<text class="label" x="{_f(x + dx)}" y="{_f(y + dy)}" text-anchor="{anchor}" '
                    f'font-family="sans-serif" font-size="12">{escape(e.text)}</text>'
                )
            else:
                out.append(_svg_shape(e, frame, _svg_style(e)))
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _rgb(color: str) -> str:
    r, g, b = (int(color[i : i + 2], 16) / 255 for i in (1, 3, 5))
    return f"{r:.3f},{g:.3f},{b:.3f}"


def _latex(elements: Sequence[Element], spec: DiagramSpec) -> str:
    # Units are points; \qbezier with the midpoint as control draws a straight segment.
    frame = _Frame(elements, spec.scale / 2, spec.margin / 2)
    out = [
        "% bundle diagram; needs \\usepackage{color}",
        "\\setlength{\\unitlength}{1pt}",
        f"\\begin{{picture}}({_f(frame.width)},{_f(frame.height)})",
    ]

    def seg(a: Point, b: Point) -> str:
        m = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        return f"\\qbezier({_f(a[0])},{_f(a[1])})({_f(m[0])},{_f(m[1])})({_f(b[0])},{_f(b[1])})"

    for e in elements:
        pts = [frame.up(p) for p in e.points]
        tag = " ".join(x for x in (e.role, e.context, e.observable, e.outcome) if x is not None)
        out.append(f"% {tag}")
        if e.role == "label":
            x, y = pts[0]
            text = e.text.replace("_", "\\_")
            out.append(f"\\put({_f(x - 4)},{_f(y - 8)}){{\\makebox(0,0)[r]{{\\small {text}}}}}")
            continue
        body = []
        if len(pts) == 1:
            size = 3 if e.role == "fiber-node" else 5
            body.append(f"\\put({_f(pts[0][0])},{_f(pts[0][1])}){{\\circle*{{{size}}}}}")
        elif e.role == "fiber":
            (x1, y1), (x2, y2) = pts
            steps = 8
            for k in range(0, steps, 2):
                a = (x1 + (x2 - x1) * k / steps, y1 + (y2 - y1) * k / steps)
                b = (x1 + (x2 - x1) * (k + 1) / steps, y1 + (y2 - y1) * (k + 1) / steps)
                body.append(seg(a, b))
        elif len(pts) == 2:
            body.append(seg(pts[0], pts[1]))
        else:
            for k in range(len(pts)):
                body.append(seg(pts[k], pts[(k + 1) % len(pts)]))
        thick = "\\linethickness{1.5pt}" if e.role == "highlight" else "\\thinlines"
        out.append(f"{{\\color[rgb]{{{_rgb(e.color)}}}{thick}" + "".join(body) + "}")
    out.append("\\end{picture}")
    return "\n".join(out) + "\n"


def emit_bundle(
    sm: SupportModel,
    highlight: Optional[Section] = None,
    format: str = "svg",
    spec: Optional[DiagramSpec] = None,
) -> str:
    """Render the support model as a bundle diagram (``svg`` or ``latex``)."""
    spec, elements = bundle_scene(sm, highlight, spec)
    if format == "svg":
        return _svg(elements, spec)
    if format in ("latex", "latex-picture", "tex"):
        return _latex(elements, spec)
    raise RenderError(f"unknown bundle format {format!r}")


_FACET_SHAPES = {1: "circle", 2: "diamond", 3: "triangle", 4: "square"}


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_trace(tr: SearchTrace, format: str = "dot") -> str:
    """Graphviz DOT for an extension search tree; node ids follow preorder."""
    if format != "dot":
        raise RenderError(f"unknown trace format {format!r}")
    order = {name: i for i, name in enumerate(tr.contexts)}
    lines = [
        "digraph trace {",
        "  rankdir=TB;",
        '  node [fontname="Helvetica", fontsize=11];',
    ]
    edges = []
    counter = 0

    def visit(node: TraceNode) -> str:
        nonlocal counter
        nid = f"n{counter}"
        counter += 1
        if node.kind == "facet":
            idx = order.setdefault(node.context, len(order))
            shape = _FACET_SHAPES.get(len(node.outcome), "box")
            attrs = f'shape={shape}, style=filled, fillcolor="{context_color(idx)}55", color="{context_color(idx)}"'
        else:
            attrs = "shape=plaintext"
            if node.status == "incompatible":
                attrs += ", fontcolor=red3"
        if node.status == "success":
            attrs += ", peripheries=2, color=darkgreen"
        label = node.label()
        if node.status == "success":
            label += " ✓"
        lines.append(f"  {nid} [label={_dot_quote(label)}, {attrs}];")
        for child in node.children:
            cid = visit(child)
            edges.append(f"  {nid} -> {cid};")
        return nid

    visit(tr.root)
    return "\n".join(lines + edges + ["}"]) + "\n"
