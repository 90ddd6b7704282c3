"""Rank-2 cones and fans, the fan-level steps of the projective-axes
decomposition, and the perfection of the monoid N.

Everything is exact integer arithmetic; angles are compared through
half-planes and cross products.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations

from .padic import FinPModule
from .prismatic_model import ModelParams
from .report import Report
from .syntomic import auto_precision, closed_form, syntomic_total

__all__ = [
    "Vec",
    "Cone2",
    "Fan2",
    "PerfMonoidElt",
    "E1",
    "E2",
    "cone_predicates",
    "fan_validate",
    "support_equal",
    "is_dividing_cover",
    "smooth_chart",
    "axes_cones",
    "verify_axes_proof",
    "AxesTable",
    "axes_table",
    "perfection_check",
]

Vec = tuple[int, int]
E1: Vec = (1, 0)
E2: Vec = (0, 1)


def _cross(a: Vec, b: Vec) -> int:
    return a[0] * b[1] - a[1] * b[0]


def _dot(a: Vec, b: Vec) -> int:
    return a[0] * b[0] + a[1] * b[1]


def _primitive(v: Vec) -> Vec:
    g = math.gcd(v[0], v[1])
    if g == 0:
        raise ValueError("the zero vector spans no ray")
    return (v[0] // g, v[1] // g)


def _angle_cmp(a: Vec, b: Vec) -> int:
    def half(v: Vec) -> int:
        return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return ha - hb
    c = _cross(a, b)
    return -1 if c > 0 else (1 if c < 0 else 0)


@dataclass(frozen=True)
class Cone2:
    """A strictly convex rational cone in Z^2 spanned by 0, 1 or 2 rays."""

    generators: tuple[Vec, ...]

    def __post_init__(self):
        gens = tuple(sorted({_primitive(tuple(g)) for g in self.generators}))
        if len(gens) > 2:
            raise ValueError("a strictly convex cone in rank 2 has at most two rays")
        if len(gens) == 2 and _cross(*gens) == 0:
            raise ValueError(f"generators {gens} are not linearly independent")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, *gens: Vec) -> Cone2:
        return cls(tuple(gens))

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def is_smooth(self) -> bool:
        return self.dim < 2 or abs(_cross(*self.generators)) == 1

    def contains(self, pt: Vec) -> bool:
        if self.dim == 0:
            return pt == (0, 0)
        if self.dim == 1:
            (r,) = self.generators
            return _cross(r, pt) == 0 and _dot(r, pt) >= 0
        a, b = self.generators
        det = _cross(a, b)
        # pt = lam a + mu b with lam = cross(pt, b) / det, mu = cross(a, pt) / det
        return _cross(pt, b) * det >= 0 and _cross(a, pt) * det >= 0

    def contains_cone(self, other: Cone2) -> bool:
        return all(self.contains(g) for g in other.generators)

    def faces(self) -> frozenset[Cone2]:
        out = {Cone2(()), self}
        out.update(Cone2((g,)) for g in self.generators)
        return frozenset(out)

    def intersect(self, other: Cone2) -> Cone2:
        # in rank 2 every extremal ray of the intersection is a ray of one cone
        cands = {g for g in self.generators if other.contains(g)}
        cands |= {g for g in other.generators if self.contains(g)}
        extremal = [c for c in cands if all(_cross(c, x) >= 0 for x in cands) or all(_cross(c, x) <= 0 for x in cands)]
        return Cone2(tuple(extremal))

    def __str__(self):
        return "Cone(" + ", ".join(str(g) for g in self.generators) + ")" if self.generators else "{0}"


def cone_predicates(c: Cone2) -> dict:
    return {"is_smooth": c.is_smooth, "contains": c.contains, "faces": c.faces()}


@dataclass(frozen=True)
class Fan2:
    """A fan given by its maximal cones, with a set of marked rays."""

    cones: frozenset[Cone2]
    marked: frozenset[Vec] = field(default_factory=frozenset)

    @classmethod
    def generated(cls, *cones: Cone2, marked=()) -> Fan2:
        """The smallest fan containing the given cones (kept maximal)."""
        maximal = {c for c in cones if not any(c != d and c in d.faces() for d in cones)}
        return cls(frozenset(maximal), frozenset(_primitive(r) for r in marked))

    @property
    def all_cones(self) -> frozenset[Cone2]:
        out: set[Cone2] = set()
        for c in self.cones:
            out |= c.faces()
        return frozenset(out)

    @property
    def rays(self) -> frozenset[Vec]:
        return frozenset(g for c in self.cones for g in c.generators)

    def contains(self, pt: Vec) -> bool:
        return any(c.contains(pt) for c in self.cones)

    def restrict_marking(self, marked) -> Fan2:
        return Fan2(self.cones, frozenset(r for r in marked if r in self.rays))

    def __str__(self):
        cones = ", ".join(sorted(str(c) for c in self.cones))
        marks = " + ".join(f"[{r}]" for r in sorted(self.marked))
        return f"<{cones}>" + (f" marked {marks}" if marks else "")


def fan_validate(f: Fan2) -> bool:
    """Pairwise intersections are common faces and marked rays are rays."""
    for a, b in combinations(f.cones, 2):
        c = a.intersect(b)
        if c not in a.faces() or c not in b.faces():
            return False
    return f.marked <= f.rays


def _test_points(rays) -> list[Vec]:
    dirs = sorted(set(rays), key=cmp_to_key(_angle_cmp))
    pts = list(dirs)
    if len(dirs) >= 2:
        for a, b in zip(dirs, dirs[1:] + dirs[:1]):
            # a direction strictly inside the open sector from a to b (counterclockwise)
            pts.append((a[0] + b[0], a[1] + b[1]) if _cross(a, b) > 0 else (-a[1], a[0]))
    return pts


def support_equal(f: Fan2, g: Fan2) -> bool:
    """Equal supports, decided on every ray and one point per open sector.

    Between consecutive rays of both fans no cone boundary occurs, so each
    open sector is either inside or outside each support.
    """
    return all(f.contains(pt) == g.contains(pt) for pt in _test_points(f.rays | g.rays))


def is_dividing_cover(fine: Fan2, coarse: Fan2) -> bool:
    if not (fan_validate(fine) and fan_validate(coarse)):
        return False
    refines = all(any(d.contains_cone(c) for d in coarse.cones) for c in fine.cones)
    return refines and support_equal(fine, coarse)


def _dual_basis(c: Cone2) -> dict[Vec, Vec]:
    """Characters u_r with u_r(r) = 1 and u_r(other ray) = 0, for a smooth cone."""
    a, b = c.generators
    det = _cross(a, b)
    if abs(det) != 1:
        raise ValueError(f"{c} is not smooth")
    # rows of the inverse of the matrix with columns a, b
    return {a: (b[1] * det, -b[0] * det), b: (-a[1] * det, a[0] * det)}


def _monomial(u: Vec) -> str:
    parts = []
    for name, k in zip("xy", u):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "".join(parts) if parts else "1"


def smooth_chart(c: Cone2, marked, boundary: Vec = (1, 1)) -> dict:
    """Monoid-algebra presentation of the toric chart over the log point.

    Coordinates are the dual basis characters, the fiber over the log point
    kills the character ``boundary`` of the summation map, and the log
    structure is generated by the characters dual to the marked rays.
    """
    dual = _dual_basis(c)
    if not all(_dot(u, r) >= 0 for u in [boundary] for r in c.generators):
        raise ValueError("the summation character is not regular on this chart")
    return {
        "coordinates": frozenset(_monomial(u) for u in dual.values()),
        "relation": _monomial(boundary),
        "log": frozenset(_monomial(dual[r]) for r in marked if r in dual),
    }


def axes_cones(v: Vec = (-1, 1)) -> dict[str, Cone2]:
    sigma = Cone2.of(E1, E2)
    tau = Cone2.of(E1, (1, -1))
    tau_p = Cone2.of(E2, v)
    return {
        "sigma": sigma,
        "tau": tau,
        "tau'": tau_p,
        "sigma|tau": Cone2.of(E2, (1, -1)),
        "sigma|tau'": Cone2.of(E1, v),
    }


def _zariski_square(big: Fan2, left: Fan2, right: Fan2, meet: Fan2) -> tuple[bool, str]:
    """Fan-level distinguished square: big = left u right, meet = left n right.

    Markings of the three pieces must be the restrictions of the big fan's.
    """
    if not all(fan_validate(f) for f in (big, left, right, meet)):
        return False, "a fan is invalid"
    if left.all_cones | right.all_cones != big.all_cones:
        return False, "pieces do not cover the fan"
    if left.all_cones & right.all_cones != meet.all_cones:
        return False, "pieces meet in the wrong subfan"
    for f in (left, right, meet):
        if f.marked != frozenset(r for r in big.marked if r in f.rays):
            return False, f"marking of {f} is not restricted from {big}"
    return True, ""


def verify_axes_proof(v: Vec = (-1, 1)) -> Report:
    """Fan-level checklist for the decomposition of the projective axes.

    ``v`` is the extra ray (e2 - e1); moving it breaks the final dividing
    cover, which is the negative control.
    """
    c = axes_cones(v)
    sigma, tau, tau_p = c["sigma"], c["tau"], c["tau'"]
    s_tau, s_taup = c["sigma|tau"], c["sigma|tau'"]
    e12 = (E1, E2)
    rep = Report(f"projective axes fan checklist (v={v})")

    full = Fan2.generated(sigma, tau, tau_p, marked=e12)
    rep.add("1. <sigma, tau, tau'> is a valid smooth fan", fan_validate(full) and all(x.is_smooth for x in full.cones))
    meet = sigma.intersect(tau_p)
    rep.add("2. sigma n tau' = Cone(e2)", meet == Cone2.of(E2), str(meet))

    ok1, why1 = _zariski_square(full, Fan2.generated(sigma, tau, marked=e12), Fan2.generated(tau_p, marked=(E2,)),
                                Fan2.generated(meet, marked=(E2,)))
    coarse1 = Fan2.generated(s_tau, tau_p, marked=(E2,))
    ok2, why2 = _zariski_square(coarse1, Fan2.generated(s_tau, marked=(E2,)), Fan2.generated(tau_p, marked=(E2,)),
                                Fan2.generated(meet, marked=(E2,)))
    rep.add("3. first pair of squares is Zariski distinguished", ok1 and ok2, why1 or why2)

    union_ok = support_equal(Fan2.generated(sigma, tau), Fan2.generated(s_tau))
    rep.add("4. sigma u tau = Cone(e2, e1 - e2) is a smooth cone", union_ok and s_tau.is_smooth,
            f"|det| = {abs(_cross(*s_tau.generators))}")

    ev = (E1, E2, v)
    ok3, why3 = _zariski_square(Fan2.generated(sigma, tau, tau_p, marked=ev), Fan2.generated(sigma, tau, marked=e12),
                                Fan2.generated(tau_p, marked=(E2, v)), Fan2.generated(meet, marked=(E2,)))
    ok4, why4 = _zariski_square(Fan2.generated(s_tau, tau_p, marked=(E2, v)), Fan2.generated(s_tau, marked=(E2,)),
                                Fan2.generated(tau_p, marked=(E2, v)), Fan2.generated(meet, marked=(E2,)))
    rep.add("5. second pair of squares (with ray v) is Zariski distinguished", ok3 and ok4, why3 or why4)

    union2_ok = support_equal(Fan2.generated(sigma, tau_p), Fan2.generated(s_taup))
    rep.add("6. sigma u tau' = Cone(e1, v) is a smooth cone", union2_ok and s_taup.is_smooth,
            f"|det| = {abs(_cross(*s_taup.generators))}")

    fine = Fan2.generated(sigma, tau, tau_p, marked=ev)
    coarse = Fan2.generated(s_taup, tau, marked=(E1, v))
    rep.add("7. <sigma, tau, tau'> -> <sigma u tau', tau> is a dividing cover", is_dividing_cover(fine, coarse))

    chart = smooth_chart(sigma, e12)
    want = {"coordinates": frozenset({"x", "y"}), "relation": "xy", "log": frozenset({"x", "y"})}
    rep.add("8. chart of sigma over the log point is (k[x,y]/(xy), Nx + Ny)", chart == want, str(chart))

    charts_ok = True
    for cone, ray, coords in ((tau, E1, {"xy", "y^-1"}), (tau_p, E2, {"xy", "x^-1"})):
        try:
            ch = smooth_chart(cone, (ray,))
        except ValueError:
            charts_ok = False
            continue
        charts_ok &= ch == {"coordinates": frozenset(coords), "relation": "xy", "log": frozenset({"xy"})}
    rep.add("9. charts of tau and tau' are (k[xy, y^-1]/(xy), N xy) and (k[xy, x^-1]/(xy), N xy)", charts_ok)
    return rep


@dataclass(frozen=True)
class AxesTable:
    p: int
    i: int
    precision: int
    degrees: tuple[FinPModule, ...]
    expected: tuple[FinPModule, ...]
    description: str

    @property
    def passed(self) -> bool:
        return self.degrees == self.expected


def axes_table(p: int, i: int, precision: int | None = None) -> AxesTable:
    """Z_p^syn(i)(k, N) + Z_p^syn(i - 1)(k, N)[-2] in degrees 0..4.

    ``degrees`` comes from the log-point model, ``expected`` from the e = 1
    closed forms.
    """
    if i < 0:
        raise ValueError("i must be nonnegative")
    N = precision if precision is not None else auto_precision(p, 1, i)
    params = ModelParams.log_point(p, N)
    got = [FinPModule(p, N) for _ in range(5)]
    want = [FinPModule(p, N) for _ in range(5)]
    parts = []
    for idx, shift in ((i, 0), (i - 1, 2)):
        if idx < 0:
            continue
        for k, m in enumerate(syntomic_total(params, idx).degrees):
            got[k + shift] = got[k + shift] + m
        cf = closed_form(1, idx)
        for k, m in enumerate(cf.expand(p, N)):
            want[k + shift] = want[k + shift] + m
        parts.append(f"({cf.describe()})" + (f"[-{shift}]" if shift else ""))
    return AxesTable(p, i, N, tuple(got), tuple(want), " + ".join(parts))


@dataclass(frozen=True)
class PerfMonoidElt:
    """An element numerator / p^k of N[1/p]^r, kept in lowest terms."""

    p: int
    numerator: tuple[int, ...]
    k: int = 0

    def __post_init__(self):
        if any(a < 0 for a in self.numerator) or self.k < 0:
            raise ValueError("perfection elements have nonnegative entries")
        num, k = tuple(self.numerator), self.k
        while k > 0 and all(a % self.p == 0 for a in num):
            num, k = tuple(a // self.p for a in num), k - 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_fractions(cls, p: int, values) -> PerfMonoidElt:
        values = [Fraction(x) for x in values]
        k = max((_pval_denominator(x, p) for x in values), default=0)
        if any((x * p**k).denominator != 1 for x in values):
            raise ValueError(f"{values} is not in Z[1/p]")
        return cls(p, tuple(int(x * p**k) for x in values), k)

    def fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.p**self.k) for a in self.numerator)

    def __add__(self, other: PerfMonoidElt) -> PerfMonoidElt:
        return PerfMonoidElt.from_fractions(self.p, [a + b for a, b in zip(self.fractions(), other.fractions())])


def _pval_denominator(x: Fraction, p: int) -> int:
    d, k = x.denominator, 0
    while d % p == 0:
        d //= p
        k += 1
    return k


def _canonical(x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
    """Representative of (x, y) mod (a, -a), a in Z, with 0 <= y < 1."""
    a = math.floor(y)
    return x + a, y - a


def _saturation_witness(x: Fraction, y: Fraction, limit: int) -> int | None:
    """Least n <= limit with n(x, y) equivalent to a point of N[1/p]^2."""
    for n in range(1, limit + 1):
        # need an integer a with n x + a >= 0 and n y - a >= 0
        if math.floor(n * y) >= math.ceil(-n * x):
            return n
    return None


def _psi(x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
    """N[1/p] +_N N[1/p] -> N[1/p] + Z[1/p]/Z, (x, y) -> (x + y, -x mod Z)."""
    return x + y, (-x) % 1


def perfection_check(p: int, K: int = 3, B: int = 10, r: int = 1, pair_samples: int = 20000) -> Report:
    """Saturated pushout of two copies of N_perf against N_perf + (Z[1/p]/Z).

    Source: classes in Z[1/p] +_Z Z[1/p] with coordinates in p^-K Z, total
    height (x + y) p^K in [0, B], saturated with respect to the image of
    N[1/p]^2.  Target: (S / p^K, t) with 0 <= S <= B and t in p^-K Z / Z.
    """
    if r != 1:
        raise ValueError("only M = N (r = 1) is supported")
    q = p**K
    rep = Report(f"perfection p={p} K={K} B={B}")
    source = []
    rejected = 0
    for Y in range(q):
        for S in range(-q, B + 1):
            x, y = Fraction(S - Y, q), Fraction(Y, q)
            n = _saturation_witness(x, y, limit=q + 1)
            if n is None:
                rejected += 1
                continue
            if S < 0:
                rep.add(f"class ({x}, {y}) of negative height is not saturated", False, f"witness n={n}")
                continue
            a = math.ceil(-n * x)
            PerfMonoidElt.from_fractions(p, [n * x + a, n * y - a])  # n * g lies in the image
            source.append((x, y))
    target = {(Fraction(S, q), Fraction(T, q)) for S in range(B + 1) for T in range(q)}
    images = [_psi(x, y) for x, y in source]
    rep.add("negative-height classes are not saturated", rejected == q * q, f"{rejected} rejected")
    rep.add("injective", len(set(images)) == len(images), f"{len(images)} classes")
    rep.add("surjective onto the truncated target", set(images) == target, f"{len(target)} targets")
    pairs = list(combinations(range(len(source)), 2)) if len(source) ** 2 <= 2 * pair_samples else None
    rng = random.Random(0)
    if pairs is None:
        pairs = [(rng.randrange(len(source)), rng.randrange(len(source))) for _ in range(pair_samples)]
    additive, tested = True, 0
    member = set(source)
    for a, b in pairs:
        (x1, y1), (x2, y2) = source[a], source[b]
        g = _canonical(x1 + x2, y1 + y2)
        if g not in member:
            continue
        tested += 1
        s1, t1 = _psi(x1, y1)
        s2, t2 = _psi(x2, y2)
        additive &= _psi(*g) == (s1 + s2, (t1 + t2) % 1)
    rep.add("additive on sums inside the bounds", additive and tested > 0, f"{tested} sums")
    sample = _psi(Fraction(1, p), Fraction(0))
    rep.add(f"(1/{p}, 0) maps to (1/{p}, -1/{p} mod Z)", sample == (Fraction(1, p), Fraction(p - 1, p)))
    return rep
