"""Static SVG 1.1 figures built from the JSON payloads of the service.

Both renderers read only plain JSON (lists, dicts, floats) and format
every number with a fixed precision, so identical JSON gives a
byte-identical figure.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

SIZE = 480
PAD = 24

_LINE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Frame:
    """Maps the square [-half, half]^2 around ``center`` onto the canvas."""

    def __init__(self, half: float, center=(0.0, 0.0)):
        self.half = half
        self.cx, self.cy = center
        self.k = (SIZE - 2 * PAD) / (2 * half)

    def __call__(self, re: float, im: float):
        return PAD + (re - self.cx + self.half) * self.k, PAD + (self.half - (im - self.cy)) * self.k

    def inside(self, re, im, slack=1.0):
        return abs(re - self.cx) <= slack * self.half and abs(im - self.cy) <= slack * self.half


def _open(title: str) -> list:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
        f'<clipPath id="plot"><rect x="{PAD}" y="{PAD}" width="{SIZE - 2 * PAD}" '
        f'height="{SIZE - 2 * PAD}"/></clipPath>',
    ]


def _axes(fr: _Frame) -> list:
    out = []
    x0, y0 = fr(fr.cx - fr.half, 0.0)
    x1, _ = fr(fr.cx + fr.half, 0.0)
    out.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y0)}" '
               'stroke="#bbbbbb" stroke-width="0.5"/>')
    xa, ya = fr(0.0, fr.cy - fr.half)
    _, yb = fr(0.0, fr.cy + fr.half)
    out.append(f'<line x1="{_f(xa)}" y1="{_f(ya)}" x2="{_f(xa)}" y2="{_f(yb)}" '
               'stroke="#bbbbbb" stroke-width="0.5"/>')
    return out


def stokes_svg(graph: dict, title: str = "Stokes graph") -> str:
    """Turning points, Stokes lines and sector labels with signatures.

    ``graph`` is the dict produced by ``StokesGraph.to_json``.
    """
    tps = graph["turning_points"]
    reach = max([math.hypot(a, b) for a, b in tps] + [0.5])
    half = 2.5 * reach + 0.5
    fr = _Frame(half)
    out = _open(title) + _axes(fr)
    out.append('<g clip-path="url(#plot)" fill="none" stroke-width="1.4">')
    for j, ln in enumerate(graph["lines"]):
        pts = " ".join(f"{_f(u)},{_f(v)}" for u, v in (fr(a, b) for a, b in ln["polyline"]))
        color = _LINE_COLORS[ln["origin"] % len(_LINE_COLORS)]
        dash = "" if ln["terminus"][0] == "inf" else ' stroke-dasharray="5,3"'
        out.append(f'<polyline id="line{j}" points="{pts}" stroke="{color}"{dash}/>')
    out.append("</g>")
    for i, (a, b) in enumerate(tps):
        u, v = fr(a, b)
        out.append(f'<circle id="tp{i}" cx="{_f(u)}" cy="{_f(v)}" r="3.5" fill="#000000"/>')
    for sec in graph["sectors"]:
        lo, hi = sec["interval"]
        mid = 0.5 * (lo + hi)
        r = 0.8 * half
        u, v = fr(r * math.cos(mid), r * math.sin(mid))
        sign = "+" if sec["signature"] > 0 else "-"
        out.append(f'<text x="{_f(u)}" y="{_f(v)}" font-family="sans-serif" font-size="13" '
                   f'text-anchor="middle">S{sec["index"]} ({sign})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _cross(u, v, r, color):
    return (f'<path d="M {_f(u - r)} {_f(v - r)} L {_f(u + r)} {_f(v + r)} M {_f(u - r)} {_f(v + r)} '
            f'L {_f(u + r)} {_f(v - r)}" stroke="{color}" stroke-width="1.2" fill="none"/>')


def pole_map_svg(borel: dict, title: str = "Borel plane") -> str:
    """Pade poles, the singularity forecast, the radius estimate and the rays.

    ``borel`` holds ``pade`` (as from ``PadeApproximant.to_json``),
    ``forecast`` (moving and fixed points), ``radius_estimate`` and
    ``rays`` (directions arg s of the integration rays, in radians).
    Genuine poles are filled dots, Froissart doublets grey crosses, the
    forecast moving singularity a red ring and fixed ones red squares.
    """
    poles = borel["pade"]["poles"]
    fc = borel["forecast"]
    rho = borel.get("radius_estimate") or 0.0
    moving = fc["moving"]
    scale = max([math.hypot(*moving), rho, 0.5])
    half = 2.0 * scale
    fr = _Frame(half)
    out = _open(title) + _axes(fr)
    out.append('<g clip-path="url(#plot)">')
    if rho and math.isfinite(rho):
        u, v = fr(0.0, 0.0)
        out.append(f'<circle cx="{_f(u)}" cy="{_f(v)}" r="{_f(rho * fr.k)}" fill="none" '
                   'stroke="#888888" stroke-dasharray="4,3"/>')
    for ang in borel.get("rays", []):
        u0, v0 = fr(0.0, 0.0)
        u1, v1 = fr(2 * half * math.cos(ang), 2 * half * math.sin(ang))
        out.append(f'<line x1="{_f(u0)}" y1="{_f(v0)}" x2="{_f(u1)}" y2="{_f(v1)}" '
                   'stroke="#2ca02c" stroke-width="1.2"/>')
    for a, b in fc["fixed"]:
        u, v = fr(a, b)
        out.append(f'<rect x="{_f(u - 4)}" y="{_f(v - 4)}" width="8" height="8" fill="none" '
                   'stroke="#d62728"/>')
    u, v = fr(*moving)
    out.append(f'<circle cx="{_f(u)}" cy="{_f(v)}" r="7" fill="none" stroke="#d62728" stroke-width="1.5"/>')
    for p in poles:
        u, v = fr(*p["pole"])
        if p["froissart"]:
            out.append(_cross(u, v, 3, "#999999"))
        else:
            out.append(f'<circle cx="{_f(u)}" cy="{_f(v)}" r="2.5" fill="#1f77b4"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
