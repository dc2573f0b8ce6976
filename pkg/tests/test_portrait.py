import math
import re

import pytest
from scipy.integrate import solve_ivp

from centerkit.globalcenter import FamilyParameters
from centerkit.lyapunov import PlanarSystem
from centerkit.portrait import (CLOSE_TOL, LogField, PortraitError, RenderSpec, integrate,
                                integrate_fixed, render_disc, to_disc, to_disc_logs, to_logs,
                                to_plane, PLANE)

LINEAR = PlanarSystem.from_strings("y", "-x")
C3 = FamilyParameters(a3=-1, a5=-1).system()
A1 = FamilyParameters(a1=1, a3=-1, a5=-1).system()
C2 = FamilyParameters(a3=2, a5=1).system()


def test_linear_center_closes():
    tr = integrate(LINEAR, (1, 0))
    assert tr.verdict == "closed" and tr.defect < 1e-9


@pytest.mark.parametrize("seed", [(1, 0), (5, 0), (10, 0)])
def test_case_c3_closes(seed):
    tr = integrate(C3, seed)
    assert tr.verdict == "closed"
    assert tr.defect < 1e-6
    assert abs(tr.crossings[-1] - seed[0]) < 1e-6 * seed[0]


@pytest.mark.parametrize("seed", [(1, 0), (5, 0), (10, 0)])
def test_verdict_stable_under_tolerance_halving(seed):
    a = integrate(C3, seed, tol=1e-9)
    b = integrate(C3, seed, tol=5e-10)
    assert a.verdict == b.verdict == "closed"


@pytest.mark.parametrize("seed", [(1, 0), (5, 0)])
def test_fixed_step_oracle_agrees(seed):
    ours = integrate(C3, seed)
    oracle = integrate_fixed(C3, seed, h=0.01)
    assert oracle.verdict == ours.verdict == "closed"
    assert abs(oracle.crossings[-1] - ours.crossings[-1]) < 1e-4 * seed[0]


def test_scipy_oracle_small_orbit():
    """DOP853 in the plane agrees with the first return of the log-chart integrator."""
    def f(t, z):
        x, y = z
        return [y, -x - x ** 3 * y ** 2 - x ** 5]

    def hit(t, z):
        return z[1]
    hit.direction = -1
    s = solve_ivp(f, (0, 20), [1.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-14, events=hit)
    ret = next(z[0] for t, z in zip(s.t_events[0], s.y_events[0]) if t > 0.5 and z[0] > 0)
    assert abs(ret - 1.0) < 1e-9
    assert integrate(C3, (1, 0)).verdict == "closed"


def test_a1_sample_escapes():
    seed = (3, 0)
    tr = integrate(A1, seed)
    assert tr.verdict == "escaped"
    assert tr.log_radius > math.log(1e3 * 3)
    assert integrate(A1, seed, tol=5e-10).verdict == "escaped"
    oracle = integrate_fixed(A1, seed, h=0.01, max_steps=20000)
    assert oracle.verdict == "escaped"


def test_small_a1_orbit_still_closes():
    assert integrate(A1, (1, 0)).verdict == "closed"


def test_budget_verdict():
    tr = integrate(C3, (5, 0), max_steps=5)
    assert tr.verdict == "budget"


def test_equilibrium_seed():
    with pytest.raises(PortraitError):
        integrate(LINEAR, (0, 0))


def test_parameters_rejected():
    with pytest.raises(PortraitError):
        LogField(PlanarSystem.from_strings("y", "-x + a0*y^5"))


def test_mirror_symmetry():
    """(x, y, t) -> (x, -y, -t) maps forward orbits onto backward ones."""
    fwd = integrate(C3, (2, 0))
    bwd = integrate(C3, (2, 0), backward=True)
    assert len(fwd.states) == len(bwd.states)
    for a, b in zip(fwd.states, bwd.states):
        assert a[0] == pytest.approx(b[0]) and a[1] == b[1]
        assert (a[2] == b[2] == -math.inf) or a[2] == pytest.approx(b[2])
        assert a[3] == -b[3]


def test_log_coordinates_roundtrip():
    for q in ((3.0, -4.0), (1e-3, 2e7), (-5.0, 0.0)):
        back = to_plane(to_logs(PLANE, q))
        assert back[0] == pytest.approx(q[0]) and back[1] == pytest.approx(q[1])


def test_disc_map():
    assert to_disc(1, 0) == (0.5, 0.0)
    assert to_disc(0, 0) == (0.0, 0.0)
    u, v = to_disc_logs((1e6 * math.log(10), 1, -math.inf, 0))
    assert u == pytest.approx(1.0) and v == 0.0


def test_svg_is_deterministic():
    spec = RenderSpec([(1, 0), (2, 0)])
    a, _ = render_disc(C3, spec)
    b, _ = render_disc(C3, spec)
    assert a == b
    assert a.count("<polyline") == 4
    assert a.startswith("<?xml") and a.rstrip().endswith("</svg>")


def test_concentric_linear_orbits():
    spec = RenderSpec([(k, 0) for k in range(1, 6)], both_directions=False)
    svg, traces = render_disc(LINEAR, spec)
    radii = []
    for runs in traces:
        tr = runs[0]
        assert tr.verdict == "closed"
        ds = [math.hypot(*to_disc_logs(s)) for s in tr.states]
        assert max(ds) - min(ds) < 1e-8
        radii.append(ds[0])
    assert radii == sorted(radii) and len(set(radii)) == 5
    assert len(re.findall(r'<polyline id="orbit\d"', svg)) == 5


def test_case_c2_orbits_reach_the_boundary():
    svg, traces = render_disc(C2, RenderSpec([(0, 1)]))
    for tr in traces[0]:
        assert tr.verdict == "escaped"
        assert max(math.hypot(*to_disc_logs(s)) for s in tr.states) > 0.999
    assert svg.count('class="finite"') == 3


def test_render_writes_file(tmp_path):
    out = tmp_path / "c3.svg"
    svg, _ = render_disc(C3, RenderSpec([(1, 0)], out=str(out)))
    assert out.read_text() == svg


@pytest.mark.parametrize("kw", [dict(seeds=[]), dict(seeds=[(1, 0)], tol=0),
                                dict(seeds=[(1, 0)], scale=-1)])
def test_render_spec_validation(kw):
    with pytest.raises(PortraitError):
        RenderSpec(**kw)


def test_trace_json():
    js = integrate(C3, (1, 0)).to_json()
    assert js["verdict"] == "closed" and js["defect"] < CLOSE_TOL and js["n_points"] > 0
