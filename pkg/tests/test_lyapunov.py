import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from centerkit import reference as ref
from centerkit.lyapunov import (LyapunovError, PlanarSystem, bautin_inclusion_check,
                                derivative_residual, formal_integral, lyapunov_constants,
                                quintic_family, reversibility_test, rotation_sign,
                                weak_focus_order)
from centerkit.polyalg import CANONICAL, MultiPoly, parse

# L7 vanishes nowhere near this point but L3 and L5 do; frozen from an exact solve
L7_POINT = (Fraction(4, 7), Fraction(-4), Fraction(8, 7), Fraction(-4), Fraction(-4), Fraction(1))


@pytest.fixture(scope="module")
def seq():
    return ref.computed_constants(9)


def _at(p, a):
    return p.evaluate({f"a{i}": a[i] for i in range(6)}).constant_value()


def test_l1_l3(seq):
    assert seq[1].is_zero()
    assert seq[3] == parse("-(5*a0 + a4 + a2)/16")


def test_l2_l4_vanish_for_family(seq):
    assert seq[2].is_zero() and seq[4].is_zero()


def test_formal_integral_residual():
    sys = quintic_family()
    H, L = formal_integral(sys, 10)
    assert derivative_residual(sys, H, L).is_zero()


def test_rotation_sign():
    assert rotation_sign(quintic_family()) == -1
    assert rotation_sign(PlanarSystem.from_strings("-y", "x")) == 1
    with pytest.raises(LyapunovError):
        rotation_sign(PlanarSystem.from_strings("x", "y"))


def test_origin_must_be_equilibrium():
    with pytest.raises(LyapunovError):
        lyapunov_constants(PlanarSystem.from_strings("y + 1", "-x"), 3)


def test_l5_l9_match_display_mod_earlier(seq):
    shown = ref.displayed_constants()
    for j in (5, 9):
        earlier = [seq[k] for k in range(3, j, 2)]
        res = ref.compare_constant(seq[j], shown[j], earlier)
        assert res["match"] and res["factor"] == "1"


def test_l7_literal_display_has_a_sign_typo(seq):
    lit = ref.displayed_constants()
    fixed = ref.displayed_constants(corrected=True)
    earlier = [seq[3], seq[5]]
    assert ref.compare_constant(seq[7], fixed[7], earlier)["match"]
    assert not ref.compare_constant(seq[7], lit[7], earlier)["match"]
    # the corrected term flips 375/196*a5*a3*a2 inside the -1/2400 prefactor
    assert lit[7] - fixed[7] == parse("-2*375/196*a5*a3*a2/2400")


def _return_displacement(a, r):
    def f(t, z):
        x, y = z
        return [y, -x + sum(float(a[i]) * x ** i * y ** (5 - i) for i in range(6))]

    def hit(t, z):
        return z[1]
    hit.direction = -1
    s = solve_ivp(f, (0, 8), [r, 0.0], method="DOP853", rtol=1e-13, atol=1e-16, events=hit)
    return next(z[0] - r for t, z in zip(s.t_events[0], s.y_events[0]) if t > 1 and z[0] > 0)


def test_l3_sign_by_numeric_return_map(seq):
    a = (1, 0, 0, 0, 0, 0)
    d = _return_displacement(a, 0.1)
    assert math.isclose(-d / (2 * math.pi * 0.1 ** 5), float(_at(seq[3], a)), rel_tol=1e-2)


def test_l7_numeric_oracle(seq):
    """Independent DOP853 return map at a point with L3 = L5 = 0."""
    a = L7_POINT
    assert _at(seq[3], a) == 0 and _at(seq[5], a) == 0
    r = 0.2
    estimate = -_return_displacement(a, r) / (2 * math.pi * r ** 13)
    computed = float(_at(seq[7], a))
    assert math.isclose(estimate, computed, rel_tol=5e-2)
    literal = float(_at(ref.displayed_constants()[7], a))
    assert literal * estimate < 0


def _mono(i, j, c):
    e = [0] * len(CANONICAL)
    e[0], e[1] = i, j
    return MultiPoly.from_terms({tuple(e): c})


def _reversible(rng, degree=5):
    P, Q = parse("y"), parse("-x")
    for d in range(2, degree + 1):
        for i in range(d + 1):
            j = d - i
            if rng.random() < 0.5:
                c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                if j % 2:
                    P = P + _mono(i, j, c)
                else:
                    Q = Q + _mono(i, j, c)
    return PlanarSystem(P, Q)


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32))
def test_reversible_systems_have_zero_constants(seed):
    sys = _reversible(random.Random(seed))
    assert reversibility_test(sys) in ("x-axis", "both")
    seq = lyapunov_constants(sys, 9)
    assert all(seq[j].is_zero() for j in seq.indices())


def test_reversible_subfamily_symbolic():
    sys = ref.center_system()
    assert reversibility_test(sys) == "both"
    seq = lyapunov_constants(sys, 9)
    assert all(seq[j].is_zero() for j in seq.indices())


def test_reversibility_classification():
    assert reversibility_test(PlanarSystem.from_strings("y", "-x + x^2")) == "x-axis"
    assert reversibility_test(PlanarSystem.from_strings("y + x^2", "-x")) == "y-axis"
    assert reversibility_test(PlanarSystem.from_strings("y", "-x")) == "both"
    assert reversibility_test(PlanarSystem.from_strings("y", "-x + y^5")) == "none"


def test_bautin_inclusion_up_to_eight(seq):
    res = bautin_inclusion_check(seq)
    assert res["ok"] and set(res["checked"]) >= {2, 4, 6, 8}


def test_bautin_inclusion_with_quintic_p():
    sys = PlanarSystem.from_strings("y + a1*x^5", "-x + a0*y^5 + a2*x^4*y")
    res = bautin_inclusion_check(lyapunov_constants(sys, 8))
    assert res["ok"] and res["failures"] == []


def test_reduced_sequence_flags(seq):
    red = lyapunov_constants(quintic_family(), 7, reduce=True)
    assert red.indices() == list(range(1, 8))
    assert red.reduced[4] and red.reduced[6] and not red.reduced[2]
    assert red[3] == seq[3]


def test_weak_focus_order():
    from centerkit.globalcenter import FamilyParameters

    assert weak_focus_order(FamilyParameters(a0=1).system()) == (3, Fraction(-5, 16))
    assert weak_focus_order(FamilyParameters(a3=-1).system())[0] == "center-candidate"
    a = {f"a{i}": L7_POINT[i] for i in range(6)}
    j, v = weak_focus_order(quintic_family().evaluate(a))
    assert j == 7 and v < 0
    with pytest.raises(LyapunovError):
        weak_focus_order(quintic_family())
