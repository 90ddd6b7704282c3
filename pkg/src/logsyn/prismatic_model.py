"""Weight-graded divided-power de Rham models and their Nygaard filtrations.

Each model is a two-term complex of free W(F_p)-modules, one summand per
weight n >= 0.  In degree 0 the weight-n generator is x^n / r0(n)!; in
degree 1 it is x^n / r1(n)! * dlog x, where

    r0(n) = floor(n / e)
    r1(n) = floor(n / e)        (log models)
    r1(n) = floor((n - 1) / e)  (non-log models, n >= 1; x^(n-1) dx = x^n dlog x)

and floor(. / e) is 0 when there are no divided powers.  Writing everything
against x^n and x^n dlog x makes d, the Frobenius x -> x^p, and the maps
between models plain factorial ratios.

Fil^{>=i} is spanned by p^alpha times the generators, with
alpha = max(i - r0, 0) in degree 0 and max(i - r1 - 1, 0) in degree 1.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

from .errors import CompositionNotZero, NegativeDividedPower, NoSuchBasisElement
from .padic import ChainMap, Complex, PadicScalar, PMatrix, fiber, fiber_map

__all__ = [
    "ModelParams",
    "OrbitModel",
    "legendre",
    "factorial_ratio",
    "nygaard_exponent",
    "differential_coeff",
    "frobenius_coeff",
    "orbit_weights",
    "orbit_model",
    "orbit_fiber_complex",
    "comparison_maps",
    "syntomic_comparison",
]


@dataclass(frozen=True)
class ModelParams:
    """One of the explicit models.

    ``e`` is the divided-power period (``None`` for no divided powers) and
    ``log`` selects dlog x over dx in degree 1.  The named models:

    ======================  =======================
    (e, log=True)           (k[x]/x^e, N)
    (1, log=True)           (k, N), the log point
    (None, log=True)        (k[x], N)
    (None, log=False)       k[x]
    (1, log=False)          k
    ======================  =======================
    """

    p: int
    e: int | None
    log: bool
    precision: int

    def __post_init__(self):
        if self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p**0.5) + 1)):
            raise ValueError(f"p={self.p} is not prime")
        if self.e is not None and self.e < 1:
            raise ValueError("e must be a positive integer or None")
        if self.precision < 1:
            raise ValueError("precision must be positive")

    @classmethod
    def truncated(cls, p: int, e: int, precision: int) -> ModelParams:
        return cls(p, e, True, precision)

    @classmethod
    def log_point(cls, p: int, precision: int) -> ModelParams:
        return cls(p, 1, True, precision)

    @classmethod
    def point(cls, p: int, precision: int) -> ModelParams:
        return cls(p, 1, False, precision)

    @classmethod
    def affine_line(cls, p: int, precision: int) -> ModelParams:
        return cls(p, None, False, precision)

    @classmethod
    def log_affine_line(cls, p: int, precision: int) -> ModelParams:
        return cls(p, None, True, precision)

    def with_precision(self, precision: int) -> ModelParams:
        return ModelParams(self.p, self.e, self.log, precision)

    @property
    def name(self) -> str:
        names = {
            (None, False): "k[x]",
            (None, True): "(k[x],N)",
            (1, False): "k",
            (1, True): "(k,N)",
        }
        if (self.e, self.log) in names:
            return names[(self.e, self.log)]
        return f"(k[x]/x^{self.e},N)" if self.log else f"k[x]/x^{self.e}"

    def q(self, n: int) -> int:
        return 0 if self.e is None else n // self.e

    def has_basis(self, degree: int, n: int) -> bool:
        if degree == 0:
            return n >= 0
        if degree == 1:
            return n >= 1 or (n == 0 and self.log)
        return False

    def dp_index(self, degree: int, n: int) -> int:
        """The r with generator x^n / r! (times dlog x in degree 1)."""
        if not self.has_basis(degree, n):
            raise NoSuchBasisElement(f"{self.name} has no degree-{degree} generator in weight {n}")
        if degree == 0 or self.log:
            return self.q(n)
        return self.q(n - 1)


def legendre(m: int, p: int) -> int:
    """v_p(m!)."""
    v, t = 0, p
    while t <= m:
        v += m // t
        t *= p
    return v


class _PFreeFactorials:
    """Running products of the p-free parts of 1..m, mod p^N."""

    def __init__(self, p: int, N: int):
        self.p, self.q = p, p**N
        self.table = [1]
        self.lock = threading.Lock()

    def __call__(self, m: int) -> int:
        if m >= len(self.table):
            with self.lock:
                t, p, q = self.table, self.p, self.q
                for k in range(len(t), m + 1):
                    while k % p == 0:
                        k //= p
                    t.append(t[-1] * k % q)
        return self.table[m]


@lru_cache(maxsize=None)
def _pfree_factorials(p: int, N: int) -> _PFreeFactorials:
    return _PFreeFactorials(p, N)


def factorial_ratio(a: int, b: int, p: int, N: int) -> tuple[int, int]:
    """(v_p, unit part mod p^N) of the integer a! / b! for a >= b."""
    if a < b:
        raise ValueError(f"{a}!/{b}! is not an integer")
    table = _pfree_factorials(p, N)
    q = p**N
    unit = table(a) * pow(table(b), -1, q) % q
    return legendre(a, p) - legendre(b, p), unit


def nygaard_exponent(params: ModelParams, i: int, degree: int, weight: int) -> int:
    r = params.dp_index(degree, weight)
    return max(i - r - degree, 0)


def differential_coeff(params: ModelParams, weight: int) -> int:
    """c with d(b0_n) = c * b1_n, namely n * r1(n)! / r0(n)!."""
    n = weight
    r0, r1 = params.dp_index(0, n), params.dp_index(1, n)
    if r0 == r1:
        return n
    # r0 = r1 + 1 happens only when e divides n, and then n / r0 = e
    assert r0 == r1 + 1 and n % r0 == 0
    return n // r0


def _scaled(p: int, N: int, exponent: int, unit: int) -> PadicScalar:
    return PadicScalar(p, N, p**exponent * unit if exponent < N else 0)


def frobenius_coeff(params: ModelParams, i: int, degree: int, weight: int) -> tuple[int, PadicScalar]:
    """Image of the Fil^{>=i} generator at (degree, weight) under phi / p^i.

    Returns the target weight p * weight and the coefficient against the
    full-complex generator there.
    """
    p, N = params.p, params.precision
    n, target = weight, params.p * weight
    alpha = nygaard_exponent(params, i, degree, n)
    v, unit = factorial_ratio(params.dp_index(degree, target), params.dp_index(degree, n), p, N)
    net = alpha - i + v + degree  # phi(dlog x) = p dlog x
    if net < 0:
        raise NegativeDividedPower(
            f"{params.name}: phi/p^{i} of degree-{degree} weight-{n} generator has p-exponent {net}"
        )
    return target, _scaled(p, N, net, unit)


def orbit_weights(p: int, j: int, cutoff: int) -> tuple[int, ...]:
    """Weights j, jp, ..., jp^cutoff; the weight-0 orbit is just (0,)."""
    if j == 0:
        return (0,)
    if j < 0 or j % p == 0:
        raise ValueError(f"orbit index {j} must be 0 or prime to p={p}")
    return tuple(j * p**m for m in range(cutoff + 1))


@dataclass(frozen=True)
class OrbitModel:
    """The Fil^{>=i} and full complexes on one Frobenius orbit of weights.

    ``fil`` and ``full`` live in degrees 0 and 1; ``frob_minus_can`` is the
    chain map phi/p^i - can between them.  Frobenius images past the last
    weight are dropped, which is a quotient by a subcomplex.
    """

    params: ModelParams
    i: int
    weights: tuple[int, ...]
    basis: tuple[tuple[int, ...], tuple[int, ...]]
    fil: Complex
    full: Complex
    frob_minus_can: ChainMap

    def syntomic(self) -> Complex:
        return fiber(self.frob_minus_can)


def _diagonal_scalars(p: int, N: int, entries: list[tuple[int, int, int]], rows: int, cols: int) -> PMatrix:
    data = [[0] * cols for _ in range(rows)]
    for r, c, x in entries:
        data[r][c] = (data[r][c] + x) % p**N
    return PMatrix(p, N, rows, cols, tuple(tuple(r) for r in data))


def orbit_model(params: ModelParams, i: int, j: int, cutoff: int) -> OrbitModel:
    if i < 0:
        raise ValueError("Nygaard index must be nonnegative")
    p, N = params.p, params.precision
    weights = orbit_weights(p, j, cutoff)
    b0 = weights
    b1 = tuple(n for n in weights if params.has_basis(1, n))
    pos0 = {n: k for k, n in enumerate(b0)}
    pos1 = {n: k for k, n in enumerate(b1)}

    d_full, d_fil = [], []
    for n in b1:
        c = differential_coeff(params, n)
        d_full.append((pos1[n], pos0[n], c))
        shift = nygaard_exponent(params, i, 0, n) - nygaard_exponent(params, i, 1, n)
        d_fil.append((pos1[n], pos0[n], c * p**shift))
    full = Complex(p, N, (len(b0), len(b1)), (_diagonal_scalars(p, N, d_full, len(b1), len(b0)),))
    fil = Complex(p, N, (len(b0), len(b1)), (_diagonal_scalars(p, N, d_fil, len(b1), len(b0)),))

    maps = []
    for degree, basis, pos in ((0, b0, pos0), (1, b1, pos1)):
        entries = []
        for n in basis:
            entries.append((pos[n], pos[n], -(p ** nygaard_exponent(params, i, degree, n))))
            target, scalar = frobenius_coeff(params, i, degree, n)
            if target in pos:
                entries.append((pos[target], pos[n], scalar.residue))
        maps.append(_diagonal_scalars(p, N, entries, len(basis), len(basis)))
    f = ChainMap(fil, full, tuple(maps))
    f.check()
    return OrbitModel(params, i, weights, (b0, b1), fil, full, f)


def orbit_fiber_complex(params: ModelParams, i: int, j: int, cutoff: int = 0) -> tuple[PMatrix, PMatrix]:
    """Differentials (D0, D1) of fib(phi/p^i - can) on one orbit.

    T^0 = Fil_0, T^1 = Fil_1 + Full_0, T^2 = Full_1 with
    D0 a = (d a, f a) and D1 (b, c) = f b - d c.
    """
    syn = orbit_model(params, i, j, cutoff).syntomic()
    D0, D1 = syn.diffs
    if not (D1 @ D0).is_zero():
        raise CompositionNotZero(f"{params.name}, i={i}, orbit {j}: D1 @ D0 is nonzero")
    return D0, D1


def comparison_maps(src: OrbitModel, dst: OrbitModel) -> tuple[ChainMap, ChainMap]:
    """Maps Fil -> Fil and full -> full induced by a ring inclusion of models.

    Both models see x and dlog x identically, so a generator x^n / r! maps to
    (r'! / r!) times the target generator x^n / r'!.  Raises
    NegativeDividedPower if the ratio is not integral or the map would leave
    the Nygaard filtration.
    """
    if src.weights != dst.weights or src.i != dst.i:
        raise ValueError("comparison needs matching orbits and Nygaard index")
    sp, dp = src.params, dst.params
    if (sp.p, sp.precision) != (dp.p, dp.precision):
        raise ValueError("comparison needs matching p and precision")
    p, N, i = sp.p, sp.precision, src.i
    fil_maps, full_maps = [], []
    for degree in (0, 1):
        sb, db = src.basis[degree], dst.basis[degree]
        dpos = {n: k for k, n in enumerate(db)}
        fil_entries, full_entries = [], []
        for col, n in enumerate(sb):
            if n not in dpos:
                raise NoSuchBasisElement(f"{dp.name} has no degree-{degree} generator in weight {n}")
            r_src, r_dst = sp.dp_index(degree, n), dp.dp_index(degree, n)
            if r_dst < r_src:
                raise NegativeDividedPower(f"{sp.name} -> {dp.name}: weight {n} needs division by {r_src}!/{r_dst}!")
            v, unit = factorial_ratio(r_dst, r_src, p, N)
            full_entries.append((dpos[n], col, _scaled(p, N, v, unit).residue))
            shift = nygaard_exponent(sp, i, degree, n) - nygaard_exponent(dp, i, degree, n) + v
            if shift < 0:
                raise NegativeDividedPower(f"{sp.name} -> {dp.name}: Fil^{i} not preserved in weight {n}")
            fil_entries.append((dpos[n], col, _scaled(p, N, shift, unit).residue))
        fil_maps.append(_diagonal_scalars(p, N, fil_entries, len(db), len(sb)))
        full_maps.append(_diagonal_scalars(p, N, full_entries, len(db), len(sb)))
    h_fil = ChainMap(src.fil, dst.fil, tuple(fil_maps))
    h_full = ChainMap(src.full, dst.full, tuple(full_maps))
    h_fil.check()
    h_full.check()
    return h_fil, h_full


def syntomic_comparison(src: OrbitModel, dst: OrbitModel) -> ChainMap:
    """The induced map of syntomic complexes fib(f_src) -> fib(f_dst)."""
    h_fil, h_full = comparison_maps(src, dst)
    g = fiber_map(h_fil, h_full, src.frob_minus_can, dst.frob_minus_can)
    g.check()
    return g
