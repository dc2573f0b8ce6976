import math
import random
from fractions import Fraction

import pytest

from centerkit import reference as ref
from centerkit.compactify import CompactifyError, chart_system, infinite_equilibria
from centerkit.globalcenter import FamilyParameters
from centerkit.lyapunov import PlanarSystem, quintic_family


def _num(p, x, y):
    return float(p.evaluate({"x": Fraction(x), "y": Fraction(y)}).constant_value())


@pytest.mark.parametrize("chart", ["U1", "U2"])
def test_chart_is_rescaled_pushforward(chart):
    """Chart field equals v^(n-1) times the pushforward of the planar field."""
    sys = FamilyParameters(a0=1, a1=-2, a3=3, a5=-1).system()
    loc = chart_system(sys, chart)
    rng = random.Random(5)
    for _ in range(20):
        u = Fraction(rng.randint(-9, 9), 7)
        v = Fraction(rng.randint(1, 9), 11)
        if chart == "U1":
            x, y = 1 / v, u / v
            P, Q = _num(sys.P, x, y), _num(sys.Q, x, y)
            du, dv = (Q * float(x) - float(y) * P) / float(x) ** 2, -P / float(x) ** 2
        else:
            x, y = u / v, 1 / v
            P, Q = _num(sys.P, x, y), _num(sys.Q, x, y)
            du, dv = (P * float(y) - float(x) * Q) / float(y) ** 2, -Q / float(y) ** 2
        s = float(v) ** (sys.degree - 1)
        assert math.isclose(_num(loc.P, u, v), s * du, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(_num(loc.Q, u, v), s * dv, rel_tol=1e-9, abs_tol=1e-9)


def test_v_charts_flip_for_odd_degree():
    sys = quintic_family()
    for a, b in (("U1", "V1"), ("U2", "V2")):
        u, v = chart_system(sys, a), chart_system(sys, b)
        assert v.P == -u.P and v.Q == -u.Q
    even = PlanarSystem.from_strings("y", "-x + x^2")
    assert chart_system(even, "V1").P == chart_system(even, "U1").P


def test_displayed_charts():
    for name in ("U1", "U2"):
        assert ref.compare_display(name)["match"]


def test_unknown_chart():
    with pytest.raises(CompactifyError):
        chart_system(quintic_family(), "W")


def test_infinite_equilibria_case_c3():
    inf = infinite_equilibria(FamilyParameters(a3=-1, a5=-1).system())
    assert [p.chart for p in inf] == ["U2"] and not inf.line_of_equilibria


def test_infinite_equilibria_case_c1():
    """a3 = 2, a5 = -1: U1 points at +-1/sqrt(2)."""
    inf = infinite_equilibria(FamilyParameters(a3=2, a5=-1).system())
    xs = sorted(float(p.x) for p in inf if p.chart == "U1")
    assert len(xs) == 2
    assert all(math.isclose(abs(x), 1 / math.sqrt(2), rel_tol=1e-12) for x in xs)


def test_linear_center_has_no_infinite_equilibria():
    inf = infinite_equilibria(PlanarSystem.from_strings("y", "-x"))
    assert not inf.line_of_equilibria and len(inf) == 0


def test_radial_field_has_line_at_infinity():
    inf = infinite_equilibria(PlanarSystem.from_strings("x", "y"))
    assert inf.line_of_equilibria and len(inf) == 0


def test_parameters_must_be_bound():
    with pytest.raises(CompactifyError):
        infinite_equilibria(quintic_family())


def test_chart_json():
    js = chart_system(quintic_family(), "U2").to_json()
    assert js["chart"] == "U2" and js["source_degree"] == 5 and js["log"]
