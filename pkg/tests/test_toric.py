from fractions import Fraction

import pytest

from logsyn.toric import (
    E1,
    E2,
    Cone2,
    Fan2,
    PerfMonoidElt,
    axes_cones,
    axes_table,
    cone_predicates,
    fan_validate,
    is_dividing_cover,
    perfection_check,
    smooth_chart,
    support_equal,
    verify_axes_proof,
)

V = (-1, 1)
SIGMA = Cone2.of(E1, E2)
TAU = Cone2.of(E1, (1, -1))
TAU_P = Cone2.of(E2, V)


def test_cone_validation():
    assert Cone2.of((2, 0), (0, 3)) == SIGMA
    assert Cone2.of((1, 1), (2, 2), (1, 0)) == Cone2.of(E1, (1, 1))
    with pytest.raises(ValueError):
        Cone2.of((1, 1), (0, 1), (1, 0))
    with pytest.raises(ValueError):
        Cone2.of((1, 0), (-1, 0))
    with pytest.raises(ValueError):
        Cone2.of((0, 0))


def test_cone_predicates():
    assert cone_predicates(SIGMA)["is_smooth"]
    assert not Cone2.of((1, 0), (1, 2)).is_smooth
    assert Cone2.of(E2, (1, -1)).contains(E1)
    assert not SIGMA.contains((-1, 1))
    assert Cone2.of(E1).contains((5, 0)) and not Cone2.of(E1).contains((-1, 0))
    assert Cone2(()).contains((0, 0))
    assert len(SIGMA.faces()) == 4


def test_intersections():
    assert SIGMA.intersect(TAU) == Cone2.of(E1)
    assert SIGMA.intersect(TAU_P) == Cone2.of(E2)
    assert TAU.intersect(TAU_P) == Cone2(())
    assert SIGMA.intersect(Cone2.of(E1, (2, 1))) == Cone2.of(E1, (2, 1))
    assert Cone2.of((1, -1), (1, 1)).intersect(SIGMA) == Cone2.of(E1, (1, 1))


def test_fan_validation():
    assert fan_validate(Fan2.generated(SIGMA, TAU, TAU_P))
    assert not fan_validate(Fan2.generated(SIGMA, Cone2.of(E1, (2, 1))))
    # 2 e1 - e2 lies below the e1 axis, so this pair meets only along e1
    assert fan_validate(Fan2.generated(SIGMA, Cone2.of(E1, (2, -1))))
    assert fan_validate(Fan2.generated(SIGMA))
    assert not fan_validate(Fan2(frozenset({SIGMA}), frozenset({(1, 1)})))


def test_generated_keeps_maximal_cones():
    f = Fan2.generated(SIGMA, Cone2.of(E1), TAU)
    assert f.cones == frozenset({SIGMA, TAU})


def test_dividing_cover_examples():
    assert is_dividing_cover(Fan2.generated(SIGMA, TAU_P), Fan2.generated(Cone2.of(E1, V)))
    assert is_dividing_cover(Fan2.generated(SIGMA, TAU, TAU_P), Fan2.generated(Cone2.of(E1, V), TAU))
    assert not is_dividing_cover(Fan2.generated(SIGMA), Fan2.generated(SIGMA, TAU))
    assert not is_dividing_cover(Fan2.generated(SIGMA, TAU), Fan2.generated(SIGMA))


def test_dividing_cover_reflexive_and_transitive():
    fans = [
        Fan2.generated(SIGMA, TAU, TAU_P),
        Fan2.generated(Cone2.of(E1, V), TAU),
        Fan2.generated(SIGMA, TAU_P),
        Fan2.generated(Cone2.of(E1, V)),
        Fan2.generated(Cone2.of(E2, (1, -1)), TAU_P),
        Fan2.generated(SIGMA, TAU),
    ]
    for f in fans:
        assert is_dividing_cover(f, f)
    for a in fans:
        for b in fans:
            for c in fans:
                if is_dividing_cover(a, b) and is_dividing_cover(b, c):
                    assert is_dividing_cover(a, c)


def test_support_equality_is_symmetric():
    a = Fan2.generated(SIGMA, TAU)
    b = Fan2.generated(Cone2.of(E2, (1, -1)))
    assert support_equal(a, b) and support_equal(b, a)
    c = Fan2.generated(SIGMA)
    assert not support_equal(a, c) and not support_equal(c, a)


def test_support_of_wide_fans():
    # four quadrants cover the plane; three do not
    quads = [Cone2.of(E1, E2), Cone2.of(E2, (-1, 0)), Cone2.of((-1, 0), (0, -1)), Cone2.of((0, -1), E1)]
    whole = Fan2.generated(*quads)
    assert fan_validate(whole)
    assert not support_equal(whole, Fan2.generated(*quads[:3]))
    halves = Fan2.generated(Cone2.of(E1, (-1, 1)), Cone2.of((-1, 1), (0, -1)), Cone2.of((0, -1), E1))
    assert support_equal(whole, halves)


def test_all_axes_cones_smooth():
    for c in axes_cones().values():
        assert c.is_smooth


def test_charts():
    assert smooth_chart(SIGMA, (E1, E2)) == {
        "coordinates": frozenset({"x", "y"}),
        "relation": "xy",
        "log": frozenset({"x", "y"}),
    }
    assert smooth_chart(TAU, (E1,))["coordinates"] == frozenset({"xy", "y^-1"})
    assert smooth_chart(TAU_P, (E2,))["coordinates"] == frozenset({"xy", "x^-1"})
    with pytest.raises(ValueError):
        smooth_chart(Cone2.of((1, 0), (1, 2)), ())


def test_axes_checklist_passes():
    rep = verify_axes_proof()
    assert rep.passed, rep.render()
    assert len(rep.items) >= 8


def test_axes_checklist_negative_control():
    rep = verify_axes_proof((1, 1))
    item7 = [it for it in rep.items if it.label.startswith("7.")][0]
    assert not item7.passed
    item4 = [it for it in rep.items if it.label.startswith("4.")][0]
    assert item4.passed and "|det| = 1" in item4.detail


def test_axes_table_examples():
    p = 3
    t = axes_table(p, 0)
    N = t.precision
    assert t.passed
    assert [m.exponents for m in t.degrees] == [(N,), (N,), (), (), ()]
    t = axes_table(p, 1)
    N = t.precision
    assert [m.exponents for m in t.degrees] == [(), (N,), (N, N), (N,), ()]
    t = axes_table(p, 2)
    N = t.precision
    assert [m.exponents for m in t.degrees] == [(), (1,), (), (N,), (N,)]


def test_perf_monoid_elements():
    a = PerfMonoidElt(2, (2, 4), 3)
    assert a.numerator == (1, 2) and a.k == 2
    assert a.fractions() == (Fraction(1, 4), Fraction(1, 2))
    b = PerfMonoidElt.from_fractions(2, [Fraction(3, 4), Fraction(1, 2)])
    assert (a + b).fractions() == (Fraction(1), Fraction(1))
    assert (a + b).k == 0
    with pytest.raises(ValueError):
        PerfMonoidElt(2, (-1,), 0)
    with pytest.raises(ValueError):
        PerfMonoidElt.from_fractions(2, [Fraction(1, 3)])


@pytest.mark.parametrize("p,K,B", [(2, 3, 10), (3, 2, 10), (5, 1, 12)])
def test_perfection(p, K, B):
    rep = perfection_check(p, K, B)
    assert rep.passed, rep.render()


def test_perfection_only_rank_one():
    with pytest.raises(ValueError):
        perfection_check(2, 2, 5, r=2)
