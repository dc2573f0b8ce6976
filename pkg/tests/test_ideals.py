
import pytest
import sympy

from centerkit import reference as ref
from centerkit.ideals import (Budget, BudgetExhausted, MonomialOrder, RealZeroSetError,
                              buchberger, divide, real_zero_set,
                              evaluate_ideal, ideal_member, intersect, is_in_radical,
                              normal_form)
from centerkit.polyalg import PolyError, parse

from conftest import random_poly
from test_polyalg import to_sympy

ORDER = MonomialOrder("degrevlex", ("x", "y", "a0"))
SYMS = sympy.symbols("x y a0")


def _monic_sympy(gens):
    out = set()
    for g in gens:
        p = sympy.Poly(g, *SYMS)
        out.add(sympy.expand(g / p.LC(order="grevlex")))
    return out


def test_gb_matches_sympy(rng):
    for _ in range(25):
        gens = [random_poly(rng, max_exp=2, terms=3) for _ in range(3)]
        gens = [g for g in gens if g]
        if not gens:
            continue
        ours = buchberger(gens, ORDER)
        theirs = sympy.groebner([to_sympy(g) for g in gens], *SYMS, order="grevlex")
        assert {to_sympy(g) for g in ours.generators} == _monic_sympy(theirs.exprs)


def test_gb_idempotent(rng):
    for _ in range(40):
        gens = [random_poly(rng, max_exp=2, terms=3) for _ in range(3)]
        gb = buchberger(gens, ORDER)
        again = buchberger(gb.generators, ORDER)
        assert again.generators == gb.generators
        for g in gens:
            assert normal_form(g, gb).is_zero()


def test_unit_ideal():
    gb = buchberger([parse("x*y - 1"), parse("x")])
    assert gb.is_unit() and gb.generators == [parse("1")]


def test_empty_and_zero_generators():
    assert buchberger([]).generators == []
    assert buchberger([parse("0")]).generators == []


def test_normal_form_is_canonical():
    gb = buchberger([parse("x^2 - y"), parse("x*y - 1")])
    a = normal_form(parse("x^3"), gb)
    b = normal_form(parse("x^3 + (x^2 - y)*(y + 3)"), gb)
    assert a == b


def test_division_identity(rng):
    for _ in range(50):
        p = random_poly(rng, terms=5)
        divs = [g for g in (random_poly(rng, terms=2) for _ in range(2)) if g]
        if not divs:
            continue
        qs, r = divide(p, divs, ORDER)
        total = r
        for q, g in zip(qs, divs):
            total = total + q * g
        assert total == p


def test_membership_and_radical():
    gens = [parse("x^2"), parse("y^3")]
    assert not ideal_member(parse("x"), gens)
    assert is_in_radical(parse("x"), gens)
    assert is_in_radical(parse("x + y"), gens)
    assert not is_in_radical(parse("x + 1"), gens)
    with pytest.raises(PolyError):
        is_in_radical(parse("w"), gens)


def test_intersection_of_monomial_ideals():
    got = intersect([parse("x")], [parse("y")])
    assert got == [parse("x*y")]
    got = intersect([parse("x^2"), parse("y")], [parse("x"), parse("y^2")])
    assert set(got) == {parse("x^2"), parse("x*y"), parse("y^2")}


def test_intersection_is_contained_in_both(rng):
    for _ in range(10):
        a = [random_poly(rng, vars=("x", "y"), max_exp=2, terms=2) or parse("x")]
        b = [random_poly(rng, vars=("x", "y"), max_exp=2, terms=2) or parse("y")]
        I = intersect(a, b)
        ga, gb = buchberger(a), buchberger(b)
        for p in I:
            assert normal_form(p, ga).is_zero() and normal_form(p, gb).is_zero()
        prod = a[0] * b[0]
        assert normal_form(prod, buchberger(I)).is_zero()


def test_budget_exhaustion():
    gens = ref.bautin_ideal()
    with pytest.raises(BudgetExhausted) as err:
        buchberger(gens, MonomialOrder.parameters_first_a0(), Budget(max_steps=3))
    assert err.value.reason and err.value.steps >= 3


def test_orders():
    p = parse("x^2 + x*y^3 + y")
    lex = MonomialOrder("lex", ("x", "y"))
    drl = MonomialOrder("degrevlex", ("x", "y"))
    key_l, key_d = lex.keyfunc(p.table), drl.keyfunc(p.table)
    lm = lambda key: max((m for m, _ in p.items()), key=key)  # noqa: E731
    assert p.table.unpack(lm(key_l))[:2] == (2, 0)
    assert p.table.unpack(lm(key_d))[:2] == (1, 3)
    with pytest.raises(ValueError):
        MonomialOrder("weird")


def test_t1_basis_and_evaluation():
    T1 = ref.ideal_fixture("T1")
    assert sorted(str(g) for g in buchberger(T1).generators) == ["a0", "a2", "a4"]
    pt = {"a0": 0, "a1": 0, "a2": 0, "a3": -1, "a4": 0, "a5": -1}
    assert evaluate_ideal(T1, pt) == [0] * len(T1)
    with pytest.raises(PolyError):
        evaluate_ideal(T1, {"a0": 1})


def test_t2_reduction_of_a4():
    """a4 is not in T2 over Q; its remainder vanishes on the real zero set."""
    T2 = ref.ideal_fixture("T2")
    nf = normal_form(parse("a4"), buchberger(T2))
    assert nf == parse("-a2")
    assert parse("18*a3^2 + 49*a2^2") in T2


def test_t3_is_flagged_garbled():
    with pytest.raises(ref.GarbledFixture):
        ref.ideal_fixture("T3")
    assert ref.ideal_fixture("T3", allow_garbled=True)


def test_saturation_removes_component():
    gens = [parse("a0*a1"), parse("a0^2")]
    assert ref.saturation(gens, parse("a0")) == [parse("1")]
    gens = [parse("a0*a1")]
    assert ref.saturation(gens, parse("a0")) == [parse("a1")]


def test_bautin_basis_kills_l17():
    seq = ref.computed_constants(17)
    gb = buchberger(ref.bautin_ideal(), MonomialOrder.parameters_first_a0())
    assert normal_form(seq[17], gb).is_zero()
    assert not normal_form(parse("a0"), gb).is_zero()


def test_real_zero_set_of_fixtures():
    assert real_zero_set(ref.ideal_fixture("T1")) == {v: parse("0") for v in ("a0", "a2", "a4")}
    t2 = real_zero_set(ref.ideal_fixture("T2"))
    assert set(t2) == {"a0", "a1", "a2", "a3", "a4", "a5"} and not any(t2.values())
    t3 = real_zero_set(ref.ideal_fixture("T3", allow_garbled=True))
    assert set(t3) == {"a0", "a2", "a3", "a4", "a5"} and not any(t3.values())


def test_real_zero_set_linear_parametrization():
    sub = real_zero_set([parse("a0 - a1 + a2"), parse("(a3 - a4)^2 + 2*a5^2")])
    assert sub["a0"] == parse("a1 - a2") and sub["a5"] == parse("0")
    assert sub["a3"] == parse("a4")


def test_real_zero_set_empty_and_unsupported():
    assert real_zero_set([parse("a0 - 1"), parse("a0 + 1")]) is None
    with pytest.raises(RealZeroSetError):
        real_zero_set([parse("a0*a1")])
    with pytest.raises(RealZeroSetError):
        real_zero_set([parse("a0^2 - a1^2")])


def test_psd_detection_against_sympy(rng):
    """Random Gram matrices L D L^T; PSD iff every principal minor is nonnegative."""
    from itertools import combinations

    syms = sympy.symbols("a0 a1 a2")
    for _ in range(30):
        L = sympy.Matrix(3, 3, lambda i, j: 1 if i == j else (rng.randint(-3, 3) if i > j else 0))
        D = sympy.diag(*[rng.choice([-1, 0, 1, 2]) for _ in range(3)])
        G = L * D * L.T
        q = sympy.expand((sympy.Matrix([syms]) * G * sympy.Matrix(syms))[0])
        if q == 0:
            continue
        p = parse(str(q).replace("**", "^"))
        psd = all(G.extract(list(ix), list(ix)).det() >= 0
                  for k in (1, 2, 3) for ix in combinations(range(3), k))
        try:
            sub = real_zero_set([p])
        except RealZeroSetError:
            assert not psd
            continue
        assert psd
        rank = G.rank()
        assert len(sub) == rank


def test_t1_is_not_inside_sqrt_r():
    """A complex point of V(T2) kills every L_j but not a2, so a2 is not in sqrt(R)."""
    a = sympy.symbols("a0:6")
    r = 3 * sympy.sqrt(2) * sympy.I
    pt = {a[0]: 0, a[1]: 0, a[2]: r, a[3]: 7, a[4]: -r, a[5]: -1}
    for L in ref.bautin_ideal():
        assert sympy.expand(to_sympy(L).subs(pt)) == 0
    assert pt[a[2]] != 0
    assert not is_in_radical(parse("a2"), ref.bautin_ideal())
