"""Deterministic SVG renderings of experiment tables.

Same result in, same bytes out: elements keep table order, the viewBox is
derived from the window radius, and coordinates are quantized to two
decimals. Three kinds: point scatters, blocked/free arcs as annular
sectors, and realized trees.
"""

from __future__ import annotations

import math

from .errors import MissingTable

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _fmt(v: float) -> str:
    s = "%.2f" % v
    return "0.00" if s == "-0.00" else s


def _svg(view: float, body: list) -> str:
    v = _fmt(view)
    out = [_HEADER,
           '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           'viewBox="-%s -%s %s %s">\n' % (v, v, _fmt(2 * view), _fmt(2 * view))]
    out.extend(body)
    out.append("</svg>\n")
    return "".join(out)


def _annular_sector(start: float, end: float, r0: float, r1: float) -> str:
    if end < start:
        end += 2.0 * math.pi
    large = 1 if (end - start) > math.pi else 0
    x0, y0 = r0 * math.cos(start), r0 * math.sin(start)
    x1, y1 = r1 * math.cos(start), r1 * math.sin(start)
    x2, y2 = r1 * math.cos(end), r1 * math.sin(end)
    x3, y3 = r0 * math.cos(end), r0 * math.sin(end)
    return ('<path d="M %s %s L %s %s A %s %s 0 %d 1 %s %s L %s %s A %s %s 0 %d 0 %s %s Z"/>\n'
            % (_fmt(x0), _fmt(y0), _fmt(x1), _fmt(y1), _fmt(r1), _fmt(r1), large,
               _fmt(x2), _fmt(y2), _fmt(x3), _fmt(y3), _fmt(r0), _fmt(r0), large,
               _fmt(x0), _fmt(y0)))


def render_svg(result, kind: str) -> str:
    """Render one table of an ExperimentResult; MissingTable when absent."""
    tables = result.tables
    if kind == "points":
        if "points" not in tables:
            raise MissingTable("result has no points table")
        _, rows = tables["points"]
        view = float(result.constants.get("window_radius", 1.0)) * 1.05
        body = ['<g fill="black">\n']
        for row in rows:
            body.append('<circle cx="%s" cy="%s" r="%s"/>\n'
                        % (_fmt(float(row[0])), _fmt(float(row[1])), _fmt(view / 400.0)))
        body.append("</g>\n")
        return _svg(view, body)
    if kind == "arcs":
        if "arcs" not in tables:
            raise MissingTable("result has no arcs table")
        _, rows = tables["arcs"]
        view = 1.3
        body = ['<g>\n']
        for row in rows:
            start, end, label = float(row[0]), float(row[1]), str(row[2])
            r0, r1 = (1.0, 1.2) if label == "blocked" else (0.78, 0.98)
            if abs(((end - start) % (2.0 * math.pi))) < 1e-15 and end != start:
                mid = 0.5 * (r0 + r1)
                body.append('<circle cx="0.00" cy="0.00" r="%s" fill="none" '
                            'stroke="black" stroke-width="%s" class="annulus-%s"/>\n'
                            % (_fmt(mid), _fmt(r1 - r0), label))
            else:
                body.append(_annular_sector(start, end, r0, r1))
        body.append("</g>\n")
        return _svg(view, body)
    if kind == "tree":
        if "tree_edges" not in tables:
            raise MissingTable("result has no tree_edges table")
        _, rows = tables["tree_edges"]
        view = float(result.constants.get("window_radius", 1.0)) * 1.05
        body = ['<g stroke="black" fill="black">\n']
        for row in rows:
            x0, y0, x1, y1 = (float(v) for v in row[:4])
            body.append('<line x1="%s" y1="%s" x2="%s" y2="%s"/>\n'
                        % (_fmt(x0), _fmt(y0), _fmt(x1), _fmt(y1)))
            body.append('<circle cx="%s" cy="%s" r="%s"/>\n'
                        % (_fmt(x1), _fmt(y1), _fmt(view / 200.0)))
        body.append("</g>\n")
        return _svg(view, body)
    raise MissingTable("unknown export kind %r" % kind)


def export_svg(result, kind: str, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(result, kind))
