"""Numerical orbits and Poincare-disc pictures.

Orbits are integrated with an embedded Dormand-Prince 5(4) pair under a mixed
absolute/relative error control.  Each time an orbit crosses the half-line
``y = 0, x > 0`` the crossing is located by bisection on the step size and
its radius is recorded.  An orbit is *closed* once two successive crossings
agree to a relative tolerance.

Polynomial fields of high degree throw orbits very far out before they come
back (a closed orbit of ``y' = -x - x^3 y^2 - x^5`` through ``(10, 0)`` reaches
``|y| ~ e^2500``).  Coordinates are therefore chosen per step: plain ``x``
and ``y`` near the origin, and ``ln|x|`` or ``ln|y|`` for a coordinate whose
size passes ``1e6``.  The field is evaluated term by term in log space and
normalized to unit speed, which changes the time along orbits but not the
orbits themselves.

A classical fixed-step RK4 integrator using the same coordinates is kept as
an independent oracle.

:func:`render_disc` draws orbits in the unit disc through
``(x, y) -> (x, y) / (1 + |(x, y)|)`` and writes a deterministic SVG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .lyapunov import PlanarSystem

CLOSE_TOL = 1e-6
ESCAPE_FACTOR = 1e3
LOG_FAR = math.log(1e6)
LOG_NEAR = math.log(1e5)
LOG_INFINITY = 1e6  # log-radius treated as having reached infinity
H_MAX = 1e4

# Dormand-Prince 5(4) tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


class PortraitError(ValueError):
    pass


# ---------------------------------------------------------------------------
# coordinates


@dataclass(frozen=True)
class Chart:
    """``lx``/``ly`` mark logged coordinates; ``sx``/``sy`` are their signs."""

    lx: bool = False
    ly: bool = False
    sx: int = 1
    sy: int = 1


PLANE = Chart()


def _split(v: float) -> tuple:
    if v == 0:
        return (-math.inf, 0)
    return (math.log(abs(v)), 1 if v > 0 else -1)


def to_logs(chart: Chart, q) -> tuple:
    """``(ln|x|, sign x, ln|y|, sign y)`` of a chart state."""
    lx, sx = (q[0], chart.sx) if chart.lx else _split(q[0])
    ly, sy = (q[1], chart.sy) if chart.ly else _split(q[1])
    return (lx, sx, ly, sy)


def _from_logs(logs, lx: bool, ly: bool) -> tuple:
    a, sa, b, sb = logs
    chart = Chart(lx, ly, sa if lx else 1, sb if ly else 1)
    q0 = a if lx else (sa * math.exp(a) if sa else 0.0)
    q1 = b if ly else (sb * math.exp(b) if sb else 0.0)
    return chart, (q0, q1)


def log_radius(logs) -> float:
    a, sa, b, sb = logs
    if not sa and not sb:
        return -math.inf
    if not sa:
        return b
    if not sb:
        return a
    m = max(a, b)
    return m + 0.5 * math.log(math.exp(2 * (a - m)) + math.exp(2 * (b - m)))


def to_plane(logs) -> tuple:
    a, sa, b, sb = logs
    if max(a, b) > 700:
        return (math.inf, math.inf)
    return (sa * math.exp(a) if sa else 0.0, sb * math.exp(b) if sb else 0.0)


def to_disc_logs(logs, scale: float = 1.0) -> tuple:
    """``s (x, y) / (1 + s |(x, y)|)`` without forming ``x`` or ``y``."""
    a, sa, b, sb = logs
    lr = log_radius(logs)
    if lr == -math.inf:
        return (0.0, 0.0)
    lsr = lr + math.log(scale)
    frac = 1.0 / (1.0 + math.exp(-lsr)) if lsr > -700 else math.exp(lsr)
    u = sa * math.exp(a - lr) * frac if sa else 0.0
    v = sb * math.exp(b - lr) * frac if sb else 0.0
    return (u, v)


def _sgnpow(s: int, k: int) -> int:
    return 1 if k % 2 == 0 else s


class LogField:
    """Unit-speed field of a numeric system in any :class:`Chart`."""

    def __init__(self, sys: PlanarSystem):
        if sys.parameters():
            raise PortraitError(f"parameters {sys.parameters()} must be bound to numbers")
        self.sys = sys

        def terms(p):
            ix, iy = p.table.var_index("x"), p.table.var_index("y")
            return [(e[ix], e[iy], float(c)) for e, c in p.terms()]

        self.P = terms(sys.P)
        self.Q = terms(sys.Q)
        self.Pl = [(i, j, math.log(abs(c)), 1 if c > 0 else -1) for i, j, c in self.P]
        self.Ql = [(i, j, math.log(abs(c)), 1 if c > 0 else -1) for i, j, c in self.Q]

    def plane(self, x: float, y: float) -> tuple:
        p = sum(c * x ** i * y ** j for i, j, c in self.P)
        q = sum(c * x ** i * y ** j for i, j, c in self.Q)
        return p, q

    def __call__(self, chart: Chart, q0: float, q1: float) -> tuple:
        if chart == PLANE:
            p, r = self.plane(q0, q1)
            n = math.hypot(p, r)
            if n == 0 or not math.isfinite(n):
                if math.isfinite(n):
                    return (0.0, 0.0)
                return self._logs(chart, q0, q1)
            return (p / n, r / n)
        return self._logs(chart, q0, q1)

    def _logs(self, chart: Chart, q0: float, q1: float) -> tuple:
        lx, sx, ly, sy = to_logs(chart, (q0, q1))
        comps = []
        for terms, divide_x, divide_y in ((self.Pl, chart.lx, False), (self.Ql, False, chart.ly)):
            out = []
            for i, j, lc, sc in terms:
                i2 = i - 1 if divide_x else i
                j2 = j - 1 if divide_y else j
                if (i2 and not sx) or (j2 and not sy):
                    continue
                lg = lc + (i2 * lx if i2 else 0.0) + (j2 * ly if j2 else 0.0)
                out.append((lg, sc * _sgnpow(sx, i2) * _sgnpow(sy, j2)))
            comps.append(out)
        allv = [lg for c in comps for lg, _ in c]
        if not allv:
            return (0.0, 0.0)
        m = max(allv)
        v = [sum(s * math.exp(lg - m) for lg, s in c) for c in comps]
        n = math.hypot(v[0], v[1])
        if n == 0:
            return (0.0, 0.0)
        return (v[0] / n, v[1] / n)


def _choose(chart: Chart, logs) -> tuple:
    a, sa, b, sb = logs
    lx = (a > LOG_FAR) or (chart.lx and a > LOG_NEAR)
    ly = (b > LOG_FAR) or (chart.ly and b > LOG_NEAR)
    return lx, ly


# ---------------------------------------------------------------------------
# traces


@dataclass
class OrbitTrace:
    points: list
    crossings: list
    verdict: str  # "closed", "escaped" or "budget"
    defect: float | None = None
    radius: float | None = None
    steps: int = 0
    note: str | None = None
    states: list = field(default_factory=list)  # (ln|x|, sign x, ln|y|, sign y)
    log_radius: float | None = None

    def to_json(self) -> dict:
        fin = lambda v: v if v is None or math.isfinite(v) else "inf"  # noqa: E731
        return {"verdict": self.verdict, "defect": self.defect, "radius": fin(self.radius),
                "log10_max_radius": None if self.log_radius is None else self.log_radius / math.log(10),
                "crossings": [fin(c) for c in self.crossings], "steps": self.steps,
                "note": self.note, "n_points": len(self.points)}


@dataclass
class RenderSpec:
    seeds: Sequence[tuple]
    tol: float = 1e-9
    max_steps: int = 20000
    scale: float = 1.0
    out: str | None = None
    both_directions: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise PortraitError("tolerance must be positive")
        if not self.seeds:
            raise PortraitError("at least one seed is required")
        if self.scale <= 0:
            raise PortraitError("scale must be positive")
        self.seeds = [tuple(float(c) for c in s) for s in self.seeds]


class _Recorder:
    def __init__(self, seed, escape_factor, close_tol):
        x0, y0 = seed
        self.norm0 = math.hypot(x0, y0)
        if self.norm0 == 0:
            raise PortraitError("the seed is an equilibrium")
        self.log_limit = math.log(escape_factor * self.norm0)
        self.close_tol = close_tol
        self.points = [(x0, y0)]
        self.states = [to_logs(PLANE, (x0, y0))]
        self.crossings = [x0] if y0 == 0 and x0 > 0 else []
        self.log_max = math.log(self.norm0)

    def add(self, logs, keep_point=True):
        self.states.append(logs)
        self.log_max = max(self.log_max, log_radius(logs))
        if keep_point:
            p = to_plane(logs)
            if math.isfinite(p[0]) and math.isfinite(p[1]):
                self.points.append(p)

    def cross(self, r: float):
        """Record a crossing radius; returns the relative defect when the orbit closes."""
        self.crossings.append(r)
        if len(self.crossings) >= 2 and math.isfinite(r) and math.isfinite(self.crossings[-2]):
            a = self.crossings[-2]
            d = abs(r - a) / a
            if d < self.close_tol:
                return d
        return None

    def trace(self, verdict, steps, **kw):
        return OrbitTrace(self.points, self.crossings, verdict, steps=steps, states=self.states,
                          log_radius=self.log_max, **kw)

    def finish(self, logs, steps, note):
        lr = log_radius(logs)
        if lr > self.log_limit:
            r = math.exp(lr) if lr < 700 else math.inf
            return self.trace("escaped", steps, radius=r,
                              note=f"norm 1e{lr / math.log(10):.1f} at the end: {note}")
        return self.trace("budget", steps, note=note)


def _crossed(chart: Chart, q, new) -> bool:
    if chart.ly:
        return False
    y0, y1 = q[1], new[1]
    if y0 == 0 or not ((y0 > 0 >= y1) or (y0 < 0 <= y1)):
        return False
    return chart.sx > 0 if chart.lx else new[0] > 0 or q[0] > 0


def _xr(chart: Chart, q) -> float:
    if chart.lx:
        return chart.sx * (math.exp(q[0]) if q[0] < 700 else math.inf)
    return q[0]


# ---------------------------------------------------------------------------
# adaptive integrator


def _dp(f, chart, q, h, k1):
    ks = [k1]
    for st in range(1, 7):
        a = _A[st]
        ks.append(f(chart, *(q[c] + h * sum(a[j] * ks[j][c] for j in range(st)) for c in range(2))))
    new = tuple(q[c] + h * sum(_B5[j] * ks[j][c] for j in range(7)) for c in range(2))
    err = tuple(h * sum(_E[j] * ks[j][c] for j in range(7)) for c in range(2))
    return new, err, ks[6]


def _bisect_crossing(f, chart, q, h, k1) -> float:
    lo, hi = 0.0, h
    best = q
    for _ in range(60):
        mid = (lo + hi) / 2
        m, _, _ = _dp(f, chart, q, mid, k1)
        if m[1] != 0 and (m[1] > 0) == (q[1] > 0):
            lo = mid
        else:
            hi = mid
            best = m
    return _xr(chart, best)


def integrate(sys: PlanarSystem, seed, tol: float = 1e-9, max_steps: int = 20000,
              close_tol: float = CLOSE_TOL, escape_factor: float = ESCAPE_FACTOR,
              backward: bool = False, field_fn: LogField | None = None) -> OrbitTrace:
    """Adaptive Dormand-Prince orbit from ``seed``.

    Verdicts: ``closed`` when two successive crossings of ``y = 0, x > 0``
    agree to ``close_tol``; ``escaped`` when the step budget runs out (or the
    log-radius passes ``LOG_INFINITY``) with the norm above ``escape_factor``
    times the seed norm; ``budget`` otherwise.  Leaving that ball and coming
    back to close still counts as closed; ``log_radius`` keeps the largest
    log-norm reached.
    """
    lf = field_fn or LogField(sys)
    f = (lambda ch, a, b: tuple(-v for v in lf(ch, a, b))) if backward else lf
    seed = tuple(float(c) for c in seed)
    rec = _Recorder(seed, escape_factor, close_tol)
    chart, q = PLANE, seed
    k1 = f(chart, *q)
    if k1 == (0.0, 0.0):
        raise PortraitError("the seed is an equilibrium")
    h = 0.01 * max(1.0, rec.norm0) if rec.norm0 < 1e6 else 0.01
    steps = 0
    logs = to_logs(chart, q)
    while steps < max_steps:
        new, err, k7 = _dp(f, chart, q, h, k1)
        sc = [tol * (1 + max(abs(q[c]), abs(new[c]))) for c in range(2)]
        e = math.hypot(err[0] / sc[0], err[1] / sc[1]) / math.sqrt(2)
        if not math.isfinite(e):
            h *= 0.25
            if h < 1e-15:
                return rec.finish(logs, steps, "step-size underflow")
            continue
        if e <= 1.0:
            steps += 1
            if _crossed(chart, q, new):
                r = _bisect_crossing(f, chart, q, h, k1)
                if r > 0:
                    d = rec.cross(r)
                    if d is not None:
                        rec.add(to_logs(chart, new))
                        return rec.trace("closed", steps, defect=d,
                                         note=f"max norm 1e{rec.log_max / math.log(10):.1f}")
            logs = to_logs(chart, new)
            rec.add(logs)
            if log_radius(logs) > LOG_INFINITY:
                return rec.finish(logs, steps, "log-radius beyond the numerical horizon")
            lx, ly = _choose(chart, logs)
            if (lx, ly) != (chart.lx, chart.ly):
                chart, q = _from_logs(logs, lx, ly)
                k1 = f(chart, *q)
            else:
                q, k1 = new, k7
            if k1 == (0.0, 0.0):
                return rec.finish(logs, steps, "reached an equilibrium")
        fac = 0.9 * (1.0 / e) ** 0.2 if e > 0 else 5.0
        h = min(H_MAX, h * min(5.0, max(0.2, fac)))
        if h < 1e-15:
            return rec.finish(logs, steps, "step-size underflow")
    return rec.finish(logs, steps, "step cap reached")


# ---------------------------------------------------------------------------
# fixed-step oracle


def _rk4(f, chart, q, h):
    a = f(chart, *q)
    b = f(chart, *(q[c] + h / 2 * a[c] for c in range(2)))
    c_ = f(chart, *(q[c] + h / 2 * b[c] for c in range(2)))
    d = f(chart, *(q[c] + h * c_[c] for c in range(2)))
    return tuple(q[c] + h / 6 * (a[c] + 2 * b[c] + 2 * c_[c] + d[c]) for c in range(2))


def integrate_fixed(sys: PlanarSystem, seed, h: float, max_steps: int = 10 ** 6,
                    close_tol: float = CLOSE_TOL, escape_factor: float = ESCAPE_FACTOR) -> OrbitTrace:
    """Classical RK4 with a fixed step; crossings by linear interpolation.

    In the plane chart the unit-speed field is multiplied by ``1 + |(x, y)|`` so
    that a fixed step is a fixed relative step.  Kept deliberately simple as an
    oracle for :func:`integrate`.
    """
    lf = LogField(sys)

    def f(chart, a, b):
        v = lf(chart, a, b)
        if chart == PLANE:
            k = 1.0 + math.hypot(a, b)
            return (v[0] * k, v[1] * k)
        return v

    seed = tuple(float(c) for c in seed)
    rec = _Recorder(seed, escape_factor, close_tol)
    chart, q = PLANE, seed
    logs = to_logs(chart, q)
    for step in range(1, max_steps + 1):
        new = _rk4(f, chart, q, h)
        if _crossed(chart, q, new):
            w = q[1] / (q[1] - new[1])
            r = _xr(chart, (q[0] + w * (new[0] - q[0]), 0.0))
            if r > 0:
                d = rec.cross(r)
                if d is not None:
                    return rec.trace("closed", step, defect=d)
        logs = to_logs(chart, new)
        rec.add(logs, keep_point=step % 16 == 0)
        if log_radius(logs) > LOG_INFINITY:
            return rec.finish(logs, step, "log-radius beyond the numerical horizon")
        lx, ly = _choose(chart, logs)
        if (lx, ly) != (chart.lx, chart.ly):
            chart, q = _from_logs(logs, lx, ly)
        else:
            q = new
    return rec.finish(logs, max_steps, "step cap reached")


# ---------------------------------------------------------------------------
# rendering

CANVAS = 1000
_R = 480.0


def to_disc(x: float, y: float, scale: float = 1.0) -> tuple:
    sx, sy = x * scale, y * scale
    r = math.hypot(sx, sy)
    return (sx / (1 + r), sy / (1 + r))


def _svg_xy(u: float, v: float) -> str:
    return f"{CANVAS / 2 + _R * u:.2f},{CANVAS / 2 - _R * v:.2f}"


def _disc_points(sys: PlanarSystem, scale: float) -> list:
    from .compactify import infinite_equilibria
    from .globalcenter import GlobalCenterError, finite_equilibria

    pts = []
    try:
        for p in finite_equilibria(sys):
            pts.append(("finite", to_disc(float(p.x), float(p.y), scale)))
    except GlobalCenterError:
        pass
    try:
        inf = infinite_equilibria(sys)
    except ValueError:
        return pts
    for q in inf:
        if q.chart == "U1":
            u = float(q.x)
            n = math.hypot(1.0, u)
            pts.append(("infinite", (1 / n, u / n)))
            pts.append(("infinite", (-1 / n, -u / n)))
        else:
            pts.append(("infinite", (0.0, 1.0)))
            pts.append(("infinite", (0.0, -1.0)))
    return pts


def render_disc(sys: PlanarSystem, spec: RenderSpec) -> tuple:
    """SVG text and the list of traces (forward, and backward when requested, per seed)."""
    f = LogField(sys)
    traces = []
    paths = []
    for seed in spec.seeds:
        runs = [integrate(sys, seed, spec.tol, spec.max_steps, field_fn=f)]
        if spec.both_directions:
            runs.append(integrate(sys, seed, spec.tol, spec.max_steps, backward=True, field_fn=f))
        traces.append(runs)
        for tr in runs:
            pts = [to_disc_logs(st, spec.scale) for st in tr.states]
            paths.append(" ".join(_svg_xy(u, v) for u, v in pts))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white"/>',
        f'<circle cx="{CANVAS // 2}" cy="{CANVAS // 2}" r="{_R:.0f}" fill="none" stroke="black" '
        f'stroke-width="2"/>',
    ]
    for i, d in enumerate(paths):
        out.append(f'<polyline id="orbit{i}" points="{d}" fill="none" stroke="steelblue" '
                   f'stroke-width="1"/>')
    for kind, (u, v) in _disc_points(sys, spec.scale):
        cx, cy = _svg_xy(u, v).split(",")
        colour = "crimson" if kind == "finite" else "darkorange"
        out.append(f'<circle class="{kind}" cx="{cx}" cy="{cy}" r="5" fill="{colour}"/>')
    out.append("</svg>")
    svg = "\n".join(out) + "\n"
    if spec.out:
        with open(spec.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg, traces
