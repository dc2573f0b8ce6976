import math
import random
from fractions import Fraction

import pytest

from centerkit import reference as ref
from centerkit.compactify import chart_system, infinite_equilibria
from centerkit.desing import (DesingError, InexactRescale, NotAnEquilibrium, characteristic_form,
                              classify, horizontal_blowup, max_rescale_power, replay,
                              resolve_local_portrait, time_rescale, transform, translate, twist,
                              untwist, vertical_blowup)
from centerkit.globalcenter import FamilyParameters
from centerkit.lyapunov import PlanarSystem
from centerkit.polyalg import parse

S = PlanarSystem.from_strings
BASE = S("x^2 + x*y - y^3", "2*x*y + y^2 + x^3")


def _val(p, x, y):
    return p.evaluate({"x": Fraction(x), "y": Fraction(y)}).constant_value()


def test_vertical_blowup_chain_rule():
    """ybar' = (y' - ybar x')/x at (x, x*ybar)."""
    b = vertical_blowup(BASE)
    rng = random.Random(3)
    for _ in range(20):
        x, yb = Fraction(rng.randint(1, 9), 4), Fraction(rng.randint(-9, 9), 5)
        P, Q = _val(BASE.P, x, x * yb), _val(BASE.Q, x, x * yb)
        assert _val(b.P, x, yb) == P
        assert _val(b.Q, x, yb) == (Q - yb * P) / x


def test_horizontal_blowup_chain_rule():
    b = horizontal_blowup(BASE)
    for xb, y in ((Fraction(1, 3), Fraction(2)), (Fraction(-2), Fraction(5, 7))):
        P, Q = _val(BASE.P, xb * y, y), _val(BASE.Q, xb * y, y)
        assert _val(b.Q, xb, y) == Q
        assert _val(b.P, xb, y) == (P - xb * Q) / y


def test_twist_roundtrip_and_translate():
    assert untwist(twist(BASE, 2), 2).P == BASE.P
    assert untwist(twist(BASE, 2), 2).Q == BASE.Q
    moved = translate(S("y - 1", "x - 2"), 2, 1)
    assert moved.P == parse("y") and moved.Q == parse("x")


def test_time_rescale():
    s = S("x^2*y", "x^3 + x^2")
    assert max_rescale_power(s) == 2
    r = time_rescale(s, 2)
    assert r.P == parse("y") and r.Q == parse("x + 1")
    with pytest.raises(InexactRescale):
        time_rescale(s, 3)


def test_blowup_needs_equilibrium():
    with pytest.raises(DesingError):
        vertical_blowup(S("1", "x"))


def test_transform_records_replay():
    s, recs = BASE, []
    for kind, kw in (("twist", {"times": 1}), ("vertical_blowup", {}), ("time_rescale", {})):
        s, rec = transform(s, kind, **kw)
        recs.append(rec)
    again = replay(BASE, recs)
    assert again.P == s.P and again.Q == s.Q
    with pytest.raises(DesingError):
        transform(BASE, "spin")


def test_characteristic_form():
    cf = characteristic_form(S("x^2", "x*y"))
    assert cf.dicritical and cf.k == 2
    cf = characteristic_form(S("y", "-x^3"))
    assert cf.k == 1 and cf.gamma == parse("y^2") and not cf.x_is_characteristic()
    cf = characteristic_form(S("x", "2*y"))
    assert cf.gamma == parse("-x*y") and cf.x_is_characteristic()
    with pytest.raises(NotAnEquilibrium):
        characteristic_form(S("1 + x", "y"))


@pytest.mark.parametrize("P,Q,kind,stability", [
    ("x", "-y", "HyperbolicSaddle", None),
    ("-x", "-2*y", "HyperbolicNode", "stable"),
    ("x + y", "y", "HyperbolicNode", "unstable"),
    ("-x + y", "-x - y", "HyperbolicFocusOrCenter", "stable"),
    # semi-hyperbolic: x' = a x^m + ..., y' = lambda y
    ("x^3", "y", "SemiHyperbolicNode", "unstable"),
    ("-x^3", "y", "SemiHyperbolicSaddle", None),
    ("x^2", "y", "SemiHyperbolicSaddleNode", None),
    ("-x^3", "-y", "SemiHyperbolicNode", "stable"),
    ("x^3", "-y", "SemiHyperbolicSaddle", None),
    ("y", "x^2", "Nilpotent", None),
    ("x^3", "-y^3", "LinearlyZero", None),
])
def test_elementary_kinds(P, Q, kind, stability):
    r = classify(S(P, Q))
    assert (r.kind, r.stability) == (kind, stability)


def test_semi_hyperbolic_with_graph_correction():
    """On the center manifold y ~ x^2 of y' = -y + x^2 the reduced flow is x' = +-x^3."""
    r = classify(S("-x*y", "-y + x^2"))
    assert r.kind == "SemiHyperbolicNode" and r.stability == "stable"
    r = classify(S("x*y", "-y + x^2"))
    assert r.kind == "SemiHyperbolicSaddle"


@pytest.mark.parametrize("P,Q,summary", [
    ("x", "-y", "S(in) H S(out) H S(in) H S(out) H"),
    ("y", "x^2", "S(in) H S(out) H"),                        # cusp
    ("y", "x^3", "S(in) H S(out) H S(in) H S(out) H"),      # nilpotent saddle
    ("y", "-x^3", "monodromic"),                             # nilpotent center
    ("y", "-x^3 - x*y", "monodromic"),                       # b^2 + 8a < 0
    ("-y^3", "x^3", "monodromic"),
    ("x^3", "-y^3", "S(out) H S(in) H S(out) H S(in) H"),
])
def test_resolved_portraits(P, Q, summary):
    r = resolve_local_portrait(S(P, Q), depth=8)
    assert str(r.sectors) == summary


def test_elliptic_saddle():
    """Nilpotent case: x' = y, y' = -x^3 - 3xy has one elliptic and one hyperbolic sector."""
    r = resolve_local_portrait(S("y", "-x^3 - 3*x*y"), depth=8)
    assert r.sectors.count("E") == 1 and r.sectors.count("H") == 1


def test_nodes_after_blowup():
    r = resolve_local_portrait(S("x^3", "y^3"))
    assert r.sectors.count("P") == 4 and r.sectors.count("H") == 0


def test_unresolved_reports_reason():
    r = resolve_local_portrait(S("x*y", "y^2 - x^3"), depth=2)
    assert not r.resolved and r.reason


def test_classify_requires_equilibrium_and_numbers():
    with pytest.raises(NotAnEquilibrium):
        classify(S("y + 1", "x"))
    with pytest.raises(DesingError):
        classify(S("a0*y", "x"))


def test_report_json():
    js = resolve_local_portrait(S("y", "x^2")).to_json()
    assert js["kind"] == "Nilpotent" and js["sectors"]["summary"] == "S(in) H S(out) H"


# chain systems and their displays

def test_chain_displays():
    for name in ("U2_1", "U2_2", "c2_1", "c2_2", "c3_1", "c3_2", "c4_1", "c4_2",
                 "c5_1", "c5_2", "c5_3", "c5_4"):
        assert ref.compare_display(name)["match"], name


def test_literal_chain_typos_are_pinned():
    for name in ("c2", "c5_2", "c5_4"):
        assert not ref.compare_display(name, corrected=False)["match"], name


def test_c6_5_degrees():
    f, g = ref.c6_5_fg()
    assert (f.degree(["x", "y"]), g.degree(["x", "y"])) == (21, 20)


def _num(name, **kw):
    return ref.chain_system(name).evaluate({"a1": 0, "a3": 0, "a5": 0, **kw})


def test_classification_fixtures():
    r = classify(_num("c2_2", a3=2))
    assert (r.kind, r.stability) == ("SemiHyperbolicNode", "stable")
    assert classify(_num("c3_2", a3=-1, a5=-1)).kind == "SemiHyperbolicSaddle"
    assert classify(_num("c4_2", a3=-1)).kind == "HyperbolicSaddle"
    c65 = _num("c6_5", a5=-1)
    assert classify(c65).kind == "HyperbolicSaddle"
    assert classify(c65, (0, 1)).kind == "HyperbolicSaddle"


def test_case_c1_points_at_infinity():
    s = FamilyParameters(a3=2, a5=-1).system()
    pts = [p for p in infinite_equilibria(s) if p.chart == "U1"]
    assert len(pts) == 2
    for pt in pts:
        r = classify(chart_system(s, "U1").system, (pt.x, 0))
        assert r.kind.startswith("SemiHyperbolic")
        assert r.details["lambda_sign"] == int(math.copysign(1, float(pt.x)))


def test_sectors_at_infinity():
    marks = {"infinity": "y"}
    u2 = chart_system(FamilyParameters(a3=-1, a5=-1).system(), "U2").system
    r = resolve_local_portrait(u2, marks=marks)
    assert r.sectors.two_hyperbolic_on("infinity")
    u2 = chart_system(FamilyParameters(a3=2).system(), "U2").system
    r = resolve_local_portrait(u2, marks=marks)
    assert r.sectors.count("E") == 2
