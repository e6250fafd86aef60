"""SVG rendering of assemblies, y axis pointing up."""
from __future__ import annotations

from xml.sax.saxutils import escape

from .tas import TAS, Assembly

CELL = 40


def assembly_svg(asm: Assembly, tas: TAS) -> str:
    if not asm.placements:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="0" height="0"/>\n'
    tiles = tas.by_name
    xs = [p[0] for p in asm.placements]
    ys = [p[1] for p in asm.placements]
    x0, y1 = min(xs), max(ys)
    width = (max(xs) - x0 + 1) * CELL
    height = (y1 - min(ys) + 1) * CELL
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="monospace">']
    for (x, y), name in sorted(asm.placements.items()):
        left = (x - x0) * CELL
        top = (y1 - y) * CELL
        seed = (x, y) == (0, 0)
        stroke = 'stroke="black" stroke-width="3"' if seed else 'stroke="gray" stroke-width="1"'
        out.append(f'<rect x="{left}" y="{top}" width="{CELL}" height="{CELL}" fill="white" {stroke}/>')
        out.append(f'<text x="{left + CELL / 2}" y="{top + CELL / 2 + 4}" font-size="12" '
                   f'text-anchor="middle">{escape(name)}</text>')
        t = tiles[name]
        spots = {"N": (CELL / 2, 8), "S": (CELL / 2, CELL - 3),
                 "E": (CELL - 5, CELL / 2 + 3), "W": (5, CELL / 2 + 3)}
        for d, (dx, dy) in spots.items():
            g = t.glue(d)
            if g:
                out.append(f'<text x="{left + dx}" y="{top + dy}" font-size="7" fill="firebrick" '
                           f'text-anchor="middle">{escape(g)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
