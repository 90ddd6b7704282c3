import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logsyn.errors import CompositionNotZero, PrecisionMismatch
from logsyn.padic import (
    ChainMap,
    Complex,
    FinPModule,
    PadicScalar,
    PMatrix,
    fiber,
    homology,
    smith_normal_form,
    snf_exponents,
    valuation,
)
from oracles import subgroup, sympy_snf_exponents, vp


def M(p, N, rows, cols=None):
    return PMatrix.from_rows(p, N, rows, cols)


def test_scalar_reduction_and_valuation():
    x = PadicScalar(3, 4, 81 + 18)
    assert x.residue == 18
    assert x.valuation == 2
    assert x.unit_part * 9 % 81 == 18
    assert PadicScalar(3, 4, 0).valuation == 4
    assert PadicScalar(2, 3, -1).residue == 7


def test_scalar_arithmetic():
    a, b = PadicScalar(5, 3, 7), PadicScalar(5, 3, 120)
    assert (a + b).residue == 2
    assert (a * b).residue == 7 * 120 % 125
    assert (a - b).residue == (7 - 120) % 125
    assert (a * a.inverse()).residue == 1
    assert (2 * a).residue == 14
    with pytest.raises(ZeroDivisionError):
        PadicScalar(5, 3, 10).inverse()


def test_mixing_precisions_is_an_error():
    with pytest.raises(PrecisionMismatch):
        PadicScalar(2, 3, 1) + PadicScalar(2, 4, 1)
    with pytest.raises(PrecisionMismatch):
        M(2, 3, [[1]]) @ M(2, 4, [[1]])


def test_valuation_helper():
    assert valuation(48, 2) == 4
    assert valuation(0, 3, cap=5) == 5
    assert valuation(2**10, 2, cap=4) == 4
    with pytest.raises(ValueError):
        valuation(0, 2)


def test_snf_examples():
    assert snf_exponents(M(3, 3, [[3]])) == (1,)
    assert snf_exponents(M(2, 4, [[0, 1], [1, 0]])) == (0, 0)
    p = 5
    assert snf_exponents(M(p, 4, [[p, 1], [0, p * p]])) == (0, 3)


def test_snf_zero_dimensional_and_zero():
    assert snf_exponents(PMatrix.zeros(2, 3, 0, 4)) == ()
    assert snf_exponents(PMatrix.zeros(2, 3, 4, 0)) == ()
    assert snf_exponents(PMatrix.zeros(2, 3, 2, 3)) == (3, 3)


def test_snf_transforms_diagonalize():
    rng = random.Random(1)
    for _ in range(30):
        p, N = rng.choice([2, 3, 5]), rng.randint(1, 4)
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        m = M(p, N, [[rng.randrange(p**N) for _ in range(c)] for _ in range(r)])
        sf = smith_normal_form(m)
        d = sf.left @ m @ sf.right
        for i in range(r):
            for j in range(c):
                want = p ** sf.exponents[i] % p**N if i == j else 0
                assert d.data[i][j] == want
        assert list(sf.exponents) == sorted(sf.exponents)


@st.composite
def matrices(draw, max_dim=4):
    p = draw(st.sampled_from([2, 3, 5]))
    N = draw(st.integers(1, 4))
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    rows = [[draw(st.integers(0, p**N - 1)) for _ in range(c)] for _ in range(r)]
    return M(p, N, rows, c)


def _unimodular(rng, p, N, n):
    # product of elementary matrices with unit scalings
    u = PMatrix.identity(p, N, n)
    for _ in range(3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        e = [[int(a == b) for b in range(n)] for a in range(n)]
        if i != j:
            e[i][j] = rng.randrange(p**N)
        else:
            e[i][i] = rng.choice([x for x in range(1, p**N) if x % p])
        u = u @ M(p, N, e)
    return u


@settings(max_examples=150, deadline=None)
@given(matrices(), st.integers(0, 10**6))
def test_snf_invariant_under_unimodular(m, seed):
    rng = random.Random(seed)
    if m.rows == 0 or m.cols == 0:
        return
    left = _unimodular(rng, m.p, m.N, m.rows)
    right = _unimodular(rng, m.p, m.N, m.cols)
    assert snf_exponents(left @ m @ right) == snf_exponents(m)


@settings(max_examples=80, deadline=None)
@given(matrices(max_dim=4))
def test_snf_matches_integer_smith_form(m):
    assert snf_exponents(m) == sympy_snf_exponents([list(r) for r in m.data], m.p, m.N)


def _det(rows):
    if len(rows) == 1:
        return rows[0][0]
    return sum((-1) ** c * rows[0][c] * _det([r[:c] + r[c + 1 :] for r in rows[1:]]) for c in range(len(rows)))


def test_snf_exponent_sum_matches_determinant():
    rng = random.Random(7)
    for _ in range(100):
        p, N = rng.choice([2, 3, 5]), rng.randint(2, 5)
        rows = [[rng.randrange(p**N) for _ in range(3)] for _ in range(3)]
        d = _det(rows)
        want = N if d == 0 else min(vp(d, p), N)
        assert min(sum(snf_exponents(M(p, N, rows))), N) == want


def test_homology_examples():
    N = 5
    assert homology(M(2, N, [[0]]), PMatrix.zeros(2, N, 0, 1)) == FinPModule(2, N, (N,))
    assert homology(M(3, 3, [[3]]), PMatrix.zeros(3, 3, 0, 1)) == FinPModule(3, 3, (1,))
    # |det| = 8 and the entries have gcd 2, so the cokernel is Z/2 + Z/4
    dA = M(2, 5, [[2, 0], [2, 4]])
    h = homology(dA, PMatrix.zeros(2, 5, 0, 2))
    assert h.exponents == (1, 2)
    image = subgroup([(2, 2), (0, 4)], (32, 32))
    assert h.cardinality() == 32 * 32 // len(image)


def test_homology_rejects_noncomplex():
    with pytest.raises(CompositionNotZero):
        homology(M(2, 3, [[1]]), M(2, 3, [[1]]))


def test_homology_cardinality_matches_enumerated_image():
    rng = random.Random(3)
    for _ in range(40):
        p, N = rng.choice([(2, 3), (2, 4), (3, 2), (5, 1), (2, 5)])
        rows, cols = rng.randint(1, 3), rng.randint(0, 3)
        if p**N > 2**10:
            continue
        data = [[rng.randrange(p**N) for _ in range(cols)] for _ in range(rows)]
        dA = M(p, N, data, cols)
        h = homology(dA, PMatrix.zeros(p, N, 0, rows))
        image = subgroup([tuple(r[c] for r in data) for c in range(cols)], (p**N,) * rows)
        assert h.cardinality() == p ** (rows * N) // len(image)


def test_finpmodule_canonical_form():
    a = FinPModule(2, 4, (4, 1, 2))
    assert a.exponents == (1, 2, 4)
    assert a == FinPModule(2, 4, (2, 4, 1))
    assert a.at_cap_count == 1
    assert a.torsion == (1, 2)
    assert a.cardinality() == 2**7
    assert a.labels() == ["Z/2", "Z/2^2", "W"]
    assert str(FinPModule(2, 4)) == "0"
    assert FinPModule.capped(3, 2, [0, 1, 5]).exponents == (1, 2)
    with pytest.raises(ValueError):
        FinPModule(2, 3, (4,))


def test_finpmodule_enumerated_cardinality():
    # Z/2 + Z/4 has 8 elements
    group = set(product(range(2), range(4)))
    assert FinPModule(2, 3, (1, 2)).cardinality() == len(group)


def test_complex_and_fiber_of_identity_is_acyclic():
    p, N = 3, 3
    X = Complex(p, N, (1, 1), (M(p, N, [[3]]),))
    ident = ChainMap(X, X, (PMatrix.identity(p, N, 1), PMatrix.identity(p, N, 1)))
    ident.check()
    assert X.homology() == [FinPModule(p, N), FinPModule(p, N, (1,))]
    assert all(h.is_zero() for h in fiber(ident).homology())


def test_chain_map_check_catches_noncommuting_square():
    p, N = 2, 3
    X = Complex(p, N, (1, 1), (M(p, N, [[1]]),))
    bad = ChainMap(X, X, (PMatrix.identity(p, N, 1), PMatrix.zeros(p, N, 1, 1)))
    with pytest.raises(CompositionNotZero):
        bad.check()


def test_fiber_of_zero_map_splits():
    p, N = 2, 4
    X = Complex(p, N, (1,), ())
    g = ChainMap(X, X, (PMatrix.zeros(p, N, 1, 1),))
    assert fiber(g).homology() == [FinPModule.free(p, N, 1)] * 2
