"""Syntomic cohomology of the explicit models, assembled orbit by orbit."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence, TypeVar

from .errors import InsufficientPrecision, StabilizationFailure, UnexpectedOrbitContribution
from .padic import FinPModule, fiber, fiber_map
from .prismatic_model import ModelParams, orbit_model, syntomic_comparison
from .report import Report
from .witt import expected_torsion_exponent, ptypical_decomposition

__all__ = [
    "Degrees",
    "SyntomicResult",
    "Term",
    "ClosedForm",
    "SyntomicRun",
    "MAX_EXTRA_CUTOFF",
    "auto_precision",
    "default_j_bound",
    "orbit_indices",
    "syntomic_orbit",
    "syntomic_total",
    "closed_form",
    "compare",
    "precision_audit",
    "run_syntomic",
    "nil_invariance_check",
    "descent_square_check",
    "square_total_homology",
]

Degrees = tuple[FinPModule, ...]
MAX_EXTRA_CUTOFF = 8

T = TypeVar("T")
R = TypeVar("R")


def _thread_count() -> int:
    raw = os.environ.get("LOGSYN_THREADS", "")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def _map(fn: Callable[[T], R], items: Sequence[T], threads: int | None) -> list[R]:
    n = threads if threads is not None else _thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _zero(p: int, N: int, top: int = 2) -> Degrees:
    return tuple(FinPModule(p, N) for _ in range(top + 1))


def _sum(p: int, N: int, parts: Iterable[Degrees], top: int = 2) -> Degrees:
    total = list(_zero(p, N, top))
    for part in parts:
        for k, m in enumerate(part):
            total[k] = total[k] + m
    return tuple(total)


def _fmt(degrees: Degrees) -> str:
    return "; ".join(f"H{k}={m}" for k, m in enumerate(degrees))


def auto_precision(p: int, e: int | None, i: int) -> int:
    """Largest expected torsion exponent (orbit j = 1) plus three."""
    return expected_torsion_exponent(p, e or 1, i, 1) + 3


def default_j_bound(p: int, e: int | None, i: int) -> int:
    return (e or 1) * i + p


def orbit_indices(p: int, j_bound: int) -> list[int]:
    return [0] + [j for j in range(1, j_bound + 1) if j % p]


def _start_cutoff(params: ModelParams, i: int, j: int) -> int:
    if j == 0:
        return 0
    return expected_torsion_exponent(params.p, params.e or 1, i, j) + 2


@lru_cache(maxsize=None)
def _orbit_homology(params: ModelParams, i: int, j: int, cutoff: int) -> Degrees:
    h = tuple(orbit_model(params, i, j, cutoff).syntomic().homology())
    assert len(h) == 3, "syntomic complexes of the models live in degrees 0..2"
    return h


def syntomic_orbit(params: ModelParams, i: int, j: int) -> tuple[Degrees, int]:
    """Stable homology of one orbit and the cutoff at which it settled.

    Cutoffs M and M + 1 are compared starting from M0 = s + 2, for
    M + 1 <= M0 + 8.
    """
    if j == 0:
        return _orbit_homology(params, i, 0, 0), 0
    start = _start_cutoff(params, i, j)
    prev = _orbit_homology(params, i, j, start)
    for M in range(start, start + MAX_EXTRA_CUTOFF):
        nxt = _orbit_homology(params, i, j, M + 1)
        if nxt == prev:
            return prev, M
        prev = nxt
    raise StabilizationFailure(
        f"{params.name}, i={i}, orbit {j}: no agreement for cutoffs {start}..{start + MAX_EXTRA_CUTOFF}"
    )


@dataclass(frozen=True)
class SyntomicResult:
    params: ModelParams
    i: int
    j_bound: int
    degrees: Degrees
    orbit_breakdown: dict[int, Degrees]
    stabilized_at: dict[int, int]

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def precision(self) -> int:
        return self.params.precision


def syntomic_total(params: ModelParams, i: int, j_bound: int | None = None, threads: int | None = None) -> SyntomicResult:
    """Sum of the weight-0 orbit and every orbit j <= j_bound.

    For the truncated log models an orbit with s = 0 must be acyclic; this
    is checked for every such orbit in range rather than assumed.
    """
    p = params.p
    if j_bound is None:
        j_bound = default_j_bound(p, params.e, i)
    if params.e is not None and j_bound < params.e * i:
        raise ValueError(f"j_bound={j_bound} misses orbits below e*i={params.e * i}")
    js = orbit_indices(p, j_bound)
    outs = _map(lambda j: syntomic_orbit(params, i, j), js, threads)
    breakdown = {j: h for j, (h, _) in zip(js, outs)}
    cutoffs = {j: M for j, (_, M) in zip(js, outs)}
    if params.e is not None and params.log:
        for j in js:
            if j and expected_torsion_exponent(p, params.e, i, j) == 0 and any(not m.is_zero() for m in breakdown[j]):
                raise UnexpectedOrbitContribution(
                    f"{params.name}, i={i}: orbit {j} should vanish but has {_fmt(breakdown[j])}"
                )
    return SyntomicResult(params, i, j_bound, _sum(p, params.precision, breakdown.values()), breakdown, cutoffs)


@dataclass(frozen=True)
class Term:
    """One summand of a closed form: W(k), or big Witt vectors of length m."""

    shift: int
    big_witt: int | None = None

    @property
    def label(self) -> str:
        return "W" if self.big_witt is None else f"bW_{self.big_witt}"

    def realize(self, p: int, N: int) -> FinPModule:
        if self.big_witt is None:
            return FinPModule.free(p, N, 1)
        return FinPModule(p, N, ptypical_decomposition(p, self.big_witt).capped_exponents(N))


@dataclass(frozen=True)
class ClosedForm:
    e: int
    i: int
    terms: tuple[Term, ...]

    def expand(self, p: int, N: int, top: int = 2) -> Degrees:
        out = list(_zero(p, N, top))
        for t in self.terms:
            out[t.shift] = out[t.shift] + t.realize(p, N)
        return tuple(out)

    def describe(self) -> str:
        return " + ".join(f"{t.label}[-{t.shift}]" for t in self.terms)


def closed_form(e: int, i: int) -> ClosedForm:
    """Z_p^syn(i)(k[x]/x^e, N) in terms of W(k) and big Witt vectors."""
    if e < 1 or i < 0:
        raise ValueError("need e >= 1 and i >= 0")
    if i == 0:
        terms = (Term(0), Term(1))
    elif i == 1:
        terms = (Term(1, e - 1), Term(1), Term(2))
    else:
        terms = (Term(1, e * i - 1),)
    return ClosedForm(e, i, terms)


def compare(result: SyntomicResult, cf: ClosedForm, refined: SyntomicResult | None = None) -> Report:
    """Per-degree comparison with the closed form, at N and optionally N + 1.

    Matching the expansion at both precisions means the W(k) summands are
    exactly the factors that follow the cap.
    """
    rep = Report(f"syntomic p={result.p} e={cf.e} i={cf.i}")
    for res in (result, refined):
        if res is None:
            continue
        N = res.precision
        expected = cf.expand(res.p, N)
        for k, (got, want) in enumerate(zip(res.degrees, expected)):
            rep.add(f"H{k} at N={N}", got == want, "" if got == want else f"expected {want}, got {got}")
    return rep


def precision_audit(result: SyntomicResult, refined: SyntomicResult) -> None:
    """Raise InsufficientPrecision unless N and N + 1 agree up to the cap."""
    for k, (a, b) in enumerate(zip(result.degrees, refined.degrees)):
        if a.torsion != b.torsion or a.at_cap_count != b.at_cap_count:
            raise InsufficientPrecision(
                f"H{k} changes from {a} at N={a.N} to {b} at N={b.N}; raise the precision"
            )


@dataclass(frozen=True)
class SyntomicRun:
    result: SyntomicResult
    refined: SyntomicResult
    closed_form: ClosedForm
    report: Report


def run_syntomic(
    p: int, e: int, i: int, precision: int | None = None, j_bound: int | None = None, threads: int | None = None
) -> SyntomicRun:
    """Compute the (e, log) model at N and N + 1, audit, and compare."""
    N = precision if precision is not None else auto_precision(p, e, i)
    params = ModelParams.truncated(p, e, N)
    result = syntomic_total(params, i, j_bound, threads)
    refined = syntomic_total(params.with_precision(N + 1), i, j_bound, threads)
    precision_audit(result, refined)
    cf = closed_form(e, i)
    return SyntomicRun(result, refined, cf, compare(result, cf, refined))


def nil_invariance_check(e: int, p: int, i: int, precision: int | None = None, j_bound: int | None = None) -> Report:
    """Rational comparison of (k[x]/x^e, N) with the log point (k, N).

    Checks that the weight-0 parts agree, that positive orbits of the
    (e, log) model are torsion with exponent at most s, and that the fiber
    of the induced map on each orbit is torsion.
    """
    N = precision if precision is not None else auto_precision(p, e, i)
    fat, point = ModelParams.truncated(p, e, N), ModelParams.log_point(p, N)
    rep = Report(f"nil-invariance p={p} e={e} i={i}")
    rep.data["precision"] = N
    h_fat, _ = syntomic_orbit(fat, i, 0)
    h_pt, _ = syntomic_orbit(point, i, 0)
    rep.add("weight 0 agrees with e=1", h_fat == h_pt, f"{_fmt(h_fat)} vs {_fmt(h_pt)}")
    bound = j_bound if j_bound is not None else default_j_bound(p, e, i)
    for j in orbit_indices(p, bound):
        h, m_fat = syntomic_orbit(fat, i, j)
        if j:
            s = expected_torsion_exponent(p, e, i, j)
            ok = all(m.is_torsion() and all(a <= s for a in m.exponents) for m in h)
            rep.add(f"orbit {j} torsion, exponents <= {s}", ok, _fmt(h))
        _, m_pt = syntomic_orbit(point, i, j)
        cutoff = max(m_fat, m_pt)
        g = syntomic_comparison(orbit_model(fat, i, j, cutoff), orbit_model(point, i, j, cutoff))
        hf = fiber(g).homology()
        rep.add(f"orbit {j} map to e=1 is a rational equivalence", all(m.is_torsion() for m in hf), _fmt(tuple(hf)))
    return rep


def _corners(p: int, N: int) -> tuple[ModelParams, ModelParams, ModelParams, ModelParams]:
    return (
        ModelParams.affine_line(p, N),
        ModelParams.point(p, N),
        ModelParams.log_affine_line(p, N),
        ModelParams.log_point(p, N),
    )


@lru_cache(maxsize=None)
def square_total_homology(p: int, N: int, i: int, j: int, cutoff: int) -> Degrees:
    """Homology of fib(fib(A -> B) -> fib(C -> D)) on one truncated orbit.

    A = k[x], B = k, C = (k[x], N), D = (k, N).
    """
    A, B, C, D = (orbit_model(m, i, j, cutoff) for m in _corners(p, N))
    outer = fiber_map(
        syntomic_comparison(A, C),
        syntomic_comparison(B, D),
        syntomic_comparison(A, B),
        syntomic_comparison(C, D),
    )
    outer.check()
    return tuple(fiber(outer).homology())


def _square_orbit(p: int, N: int, i: int, j: int) -> tuple[Degrees, int]:
    # the k[x] corners carry a free summand per orbit that never settles on its
    # own, so stabilization is tested on the total complex
    if j == 0:
        return square_total_homology(p, N, i, 0, 0), 0
    start = expected_torsion_exponent(p, 1, i, j) + 2
    prev = square_total_homology(p, N, i, j, start)
    for M in range(start, start + MAX_EXTRA_CUTOFF):
        nxt = square_total_homology(p, N, i, j, M + 1)
        if nxt == prev:
            return prev, M
        prev = nxt
    raise StabilizationFailure(f"descent square p={p}, i={i}, orbit {j} did not settle")


def descent_square_check(p: int, i: int, precision: int | None = None, j_bound: int | None = None) -> Report:
    """Rational cartesianness of the square k[x] -> k, (k[x], N) -> (k, N).

    Besides torsion of the total complex on every orbit, checks the weight-0
    identifications: Z(i)(k) is W + W[-1] for i = 0 and 0 otherwise; the
    cofiber of Z(i)(k[x]) -> Z(i)(k[x], N) is W[-1] + W[-2] for i = 1 and
    0 otherwise; Z(i)(k, N) is the e = 1 closed form; and the square's total
    complex is acyclic in weight 0.
    """
    N = precision if precision is not None else auto_precision(p, 1, i)
    A, B, C, D = _corners(p, N)
    rep = Report(f"descent square p={p} i={i}")
    rep.data["precision"] = N
    zero = _zero(p, N)
    W = FinPModule.free(p, N, 1)

    h_b, _ = syntomic_orbit(B, i, 0)
    want_b = (W, W, FinPModule(p, N)) if i == 0 else zero
    rep.add("weight 0: Z(i)(k) = W + W[-1] if i = 0, else 0", h_b == want_b, _fmt(h_b))

    # fib^k of A -> C is cofib^(k-1), so W[-1] + W[-2] shows up in degrees 2, 3
    g = syntomic_comparison(orbit_model(A, i, 0, 0), orbit_model(C, i, 0, 0))
    h_fib = tuple(fiber(g).homology())
    want_cof = (W, W) if i == 1 else (FinPModule(p, N),) * 2
    got_cof = (h_fib[2], h_fib[3])
    ok = got_cof == want_cof and all(m.is_zero() for m in h_fib[:2])
    rep.add("weight 0: cofib(Z(i)(k[x]) -> Z(i)(k[x], N)) = W[-1] + W[-2] if i = 1, else 0", ok, _fmt(h_fib))

    h_d, _ = syntomic_orbit(D, i, 0)
    cf = closed_form(1, i)
    want_d = cf.expand(p, N) if i <= 1 else zero
    rep.add("weight 0: Z(i)(k, N) matches the e = 1 closed form", h_d == want_d, _fmt(h_d))

    bound = j_bound if j_bound is not None else default_j_bound(p, 1, i)
    for j in orbit_indices(p, bound):
        h, M = _square_orbit(p, N, i, j)
        if j == 0:
            rep.add("weight 0: total complex acyclic", all(m.is_zero() for m in h), _fmt(h))
        else:
            rep.add(f"orbit {j}: total complex torsion (cutoff {M})", all(m.is_torsion() for m in h), _fmt(h))
    return rep
