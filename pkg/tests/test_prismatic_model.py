import math

import pytest

from logsyn.errors import NegativeDividedPower, NoSuchBasisElement
from logsyn.padic import FinPModule
from logsyn.prismatic_model import (
    ModelParams,
    comparison_maps,
    differential_coeff,
    factorial_ratio,
    frobenius_coeff,
    legendre,
    nygaard_exponent,
    orbit_fiber_complex,
    orbit_model,
    orbit_weights,
    syntomic_comparison,
)
from oracles import vp

ALL_MODELS = [(e, log) for e in (None, 1, 2, 3, 4) for log in (True, False)]


def P(p, e, log=True, N=6):
    return ModelParams(p, e, log, N)


def test_params_validation_and_names():
    with pytest.raises(ValueError):
        ModelParams(4, 1, True, 3)
    with pytest.raises(ValueError):
        ModelParams(2, 0, True, 3)
    with pytest.raises(ValueError):
        ModelParams(2, 1, True, 0)
    assert ModelParams.log_point(2, 3).name == "(k,N)"
    assert ModelParams.affine_line(2, 3).name == "k[x]"
    assert ModelParams.truncated(2, 3, 3).name == "(k[x]/x^3,N)"


def test_nygaard_exponent_examples():
    assert nygaard_exponent(P(2, 2), 1, 0, 1) == 1
    assert nygaard_exponent(P(2, 2), 1, 1, 2) == 0
    for e, log in ALL_MODELS:
        for n in range(1, 20):
            for deg in (0, 1):
                assert nygaard_exponent(P(3, e, log), 0, deg, n) == 0


def test_nonlog_weight_zero_has_no_degree_one_generator():
    with pytest.raises(NoSuchBasisElement):
        nygaard_exponent(P(2, 1, log=False), 1, 1, 0)
    with pytest.raises(NoSuchBasisElement):
        differential_coeff(P(2, None, log=False), 0)


def test_nygaard_exponents_match_displayed_formula():
    for e in (1, 2, 3, 4):
        for i in range(6):
            for n in range(60):
                assert nygaard_exponent(P(2, e), i, 0, n) == max(i - n // e, 0)
                assert nygaard_exponent(P(2, e), i, 1, n) == max(i - n // e - 1, 0)
                if n >= 1:
                    assert nygaard_exponent(P(2, e, False), i, 1, n) == max(i - (n - 1) // e - 1, 0)


def test_griffiths_transversality():
    for e, log in ALL_MODELS:
        params = P(2, e, log)
        for i in (0, 1, 3, 7):
            for n in range(1, 10**4, 7):
                diff = nygaard_exponent(params, i, 0, n) - nygaard_exponent(params, i, 1, n)
                assert diff in (0, 1)


def test_differential_examples():
    assert differential_coeff(P(2, 3), 7) == 7
    assert differential_coeff(P(2, 1, False), 5) == 1
    assert differential_coeff(P(2, None, False), 4) == 4


def test_differential_is_exact_factorial_ratio():
    for e in (1, 2, 3, 4, None):
        params = P(3, e, False)
        for n in range(1, 200):
            q = (lambda m: 0 if e is None else m // e)
            want = n * math.factorial(q(n - 1)) // math.factorial(q(n))
            assert n * math.factorial(q(n - 1)) % math.factorial(q(n)) == 0
            assert differential_coeff(params, n) == want


def test_point_model_is_acyclic_in_positive_weight():
    # d(x^n/n!) = x^(n-1)/(n-1)! dx
    for p in (2, 3, 5):
        for n in range(1, 1001):
            assert differential_coeff(P(p, 1, False), n) % p != 0


def test_legendre_and_factorial_ratio():
    for p in (2, 3, 5):
        for m in range(0, 60):
            assert legendre(m, p) == vp(math.factorial(m), p)
        for a in range(0, 40):
            for b in range(0, a + 1):
                v, u = factorial_ratio(a, b, p, 5)
                ratio = math.factorial(a) // math.factorial(b)
                assert v == vp(ratio, p)
                assert u == ratio // p**v % p**5
    with pytest.raises(ValueError):
        factorial_ratio(2, 3, 2, 4)


def test_frobenius_examples():
    target, c = frobenius_coeff(P(2, None), 0, 0, 3)
    assert target == 6 and c.residue == 1
    target, c = frobenius_coeff(P(2, 2), 1, 1, 0)
    assert target == 0 and c.residue == 1
    target, c = frobenius_coeff(P(2, 1), 2, 0, 1)
    assert target == 2 and c.valuation == 0 and c.unit_part == 1


def test_frobenius_never_needs_negative_powers():
    for e, log in ALL_MODELS:
        for p in (2, 3, 5):
            params = P(p, e, log)
            for i in range(6):
                for n in range(0, 40):
                    for deg in (0, 1):
                        if params.has_basis(deg, n):
                            frobenius_coeff(params, i, deg, n)


def test_frobenius_coefficient_against_rational_arithmetic():
    from fractions import Fraction

    p, N = 3, 8
    for e in (1, 2, 4):
        for i in range(5):
            for n in range(1, 30):
                params = P(p, e, True, N)
                for deg in (0, 1):
                    a = nygaard_exponent(params, i, deg, n)
                    exact = Fraction(p**a * p**deg * math.factorial(p * n // e), math.factorial(n // e) * p**i)
                    assert exact.denominator == 1
                    assert frobenius_coeff(params, i, deg, n)[1].residue == int(exact) % p**N


def test_orbit_weights():
    assert orbit_weights(2, 0, 5) == (0,)
    assert orbit_weights(3, 2, 2) == (2, 6, 18)
    with pytest.raises(ValueError):
        orbit_weights(2, 4, 2)


@pytest.mark.parametrize("e,log", ALL_MODELS)
def test_orbit_complexes_are_complexes(e, log):
    for p in (2, 3):
        for i in range(4):
            for j in (0, 1, 2, 5):
                if j % p == 0 and j:
                    continue
                D0, D1 = orbit_fiber_complex(P(p, e, log), i, j, 3)
                assert (D1 @ D0).is_zero()


def test_weight_zero_log_point_at_i0():
    h = orbit_model(P(2, 1, True, 4), 0, 0, 0).syntomic().homology()
    assert h == [FinPModule.free(2, 4, 1), FinPModule.free(2, 4, 1), FinPModule(2, 4)]


def test_weight_zero_point_at_i0_has_free_h1():
    # fib(W --0--> W) contributes W in degree 1 even without dx in weight 0
    h = orbit_model(P(2, 1, False, 4), 0, 0, 0).syntomic().homology()
    assert h[0] == FinPModule.free(2, 4, 1)
    assert h[1] == FinPModule.free(2, 4, 1)


def test_orbit_example_e2_i1():
    h = orbit_model(P(2, 2, True, 4), 1, 1, 4).syntomic().homology()
    assert [m.exponents for m in h] == [(), (1,), ()]


def test_fiber_sequence_affine_line():
    # k[x] -> (k[x], N) is the identity in positive weight
    for i in range(4):
        A = orbit_model(ModelParams.affine_line(2, 5), i, 1, 3)
        C = orbit_model(ModelParams.log_affine_line(2, 5), i, 1, 3)
        h_fil, h_full = comparison_maps(A, C)
        for m in (h_fil, h_full):
            for comp in m.maps:
                assert comp.rows == comp.cols
                assert all(comp.data[r][c] == int(r == c) for r in range(comp.rows) for c in range(comp.cols))
        A0 = orbit_model(ModelParams.affine_line(2, 5), i, 0, 0)
        C0 = orbit_model(ModelParams.log_affine_line(2, 5), i, 0, 0)
        assert A0.basis[1] == () and C0.basis[1] == (0,)


def test_comparison_maps_are_chain_maps():
    p, N = 2, 6
    corners = [ModelParams.affine_line(p, N), ModelParams.point(p, N), ModelParams.log_affine_line(p, N),
               ModelParams.log_point(p, N)]
    pairs = [(0, 1), (0, 2), (1, 3), (2, 3)]
    for i in range(4):
        for j in (0, 1, 3):
            models = [orbit_model(m, i, j, 3) for m in corners]
            for a, b in pairs:
                syntomic_comparison(models[a], models[b]).check()


def test_comparison_refuses_to_divide():
    A = orbit_model(ModelParams.log_point(2, 5), 1, 1, 3)
    C = orbit_model(ModelParams.log_affine_line(2, 5), 1, 1, 3)
    with pytest.raises(NegativeDividedPower):
        comparison_maps(A, C)


def test_truncated_to_point_comparison():
    for e in (2, 3):
        fat = orbit_model(ModelParams.truncated(2, e, 6), 2, 1, 4)
        pt = orbit_model(ModelParams.log_point(2, 6), 2, 1, 4)
        syntomic_comparison(fat, pt).check()
