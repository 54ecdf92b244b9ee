"""SVG Gantt charts: one band per machine (M1 on top), release markers on
the time axis.  Output depends only on the inputs."""

from __future__ import annotations

from fractions import Fraction
from xml.sax.saxutils import escape

from .model import Instance, Schedule, render_rational

BAND = 36
LEFT = 48
TOP = 16
AXIS = 44
WIDTH = 720

# Colour-blind friendly cycle (Okabe-Ito).
PALETTE = ("#E69F00", "#56B4E9", "#009E73", "#F0E442",
           "#0072B2", "#D55E00", "#CC79A7", "#999999")


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _ticks(horizon: Fraction):
    ladder = (1, 2, 5)
    i = 0
    step = Fraction(1)
    while horizon / step > 20:
        i += 1
        step = Fraction(ladder[i % 3] * 10 ** (i // 3))
    t = Fraction(0)
    while t <= horizon:
        yield t
        t += step


def render_svg(instance: Instance, schedule: Schedule) -> str:
    m = instance.machines
    releases = sorted({job.release for job in instance.jobs})
    horizon = max([p.end for p in schedule.pieces] + releases + [Fraction(1)])
    scale = (WIDTH - LEFT - 16) / float(horizon)
    height = TOP + m * BAND + AXIS

    def x(t) -> str:
        return _fmt(LEFT + float(t) * scale)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">',
    ]
    for q in range(1, m + 1):
        y = TOP + (q - 1) * BAND
        out.append(f'<rect x="{LEFT}" y="{y}" width="{WIDTH - LEFT - 16}" height="{BAND}" '
                   f'fill="{"#f7f7f7" if q % 2 else "#ffffff"}" stroke="#cccccc"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + BAND // 2 + 4}" text-anchor="end">M{q}</text>')
    for p in schedule.pieces:
        y = TOP + (p.machine - 1) * BAND + 4
        colour = PALETTE[(p.job - 1) % len(PALETTE)]
        w = _fmt(float(p.length) * scale)
        title = escape(f"job {p.job} on M{p.machine}: "
                       f"[{render_rational(p.start)}, {render_rational(p.end)})")
        out.append(f'<rect x="{x(p.start)}" y="{y}" width="{w}" height="{BAND - 8}" '
                   f'fill="{colour}" stroke="#333333"><title>{title}</title></rect>')
        cx = _fmt(LEFT + float(p.start + p.end) / 2 * scale)
        out.append(f'<text x="{cx}" y="{y + (BAND - 8) // 2 + 4}" text-anchor="middle">{p.job}</text>')
    base = TOP + m * BAND
    out.append(f'<line x1="{LEFT}" y1="{base}" x2="{WIDTH - 16}" y2="{base}" stroke="#000000"/>')
    for t in _ticks(horizon):
        out.append(f'<line x1="{x(t)}" y1="{base}" x2="{x(t)}" y2="{base + 4}" stroke="#000000"/>')
        out.append(f'<text x="{x(t)}" y="{base + 16}" text-anchor="middle">{render_rational(t)}</text>')
    for r in releases:
        jobs = ",".join(str(job.id) for job in instance.jobs if job.release == r)
        out.append(f'<path d="M {x(r)} {base + 22} l -4 8 h 8 z" fill="#d62728">'
                   f'<title>release of job(s) {jobs} at {render_rational(r)}</title></path>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
