"""Witt vectors over F_p and truncation-set bookkeeping for big Witt vectors.

Arithmetic runs through ghost components of integer lifts: coordinates are
lifted to Z, ghosts are combined componentwise, and the result is un-ghosted
over Z before reducing mod p.  This is exact because W(Z) -> W(F_p) is a
ring map and W(Z) embeds in its ghost ring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonIntegralUnghost

__all__ = [
    "PTypicalWitt",
    "BigWittShape",
    "ghost",
    "unghost",
    "ghost_roundtrip",
    "ring_ops",
    "fv_ops",
    "frobenius",
    "verschiebung",
    "teichmuller",
    "witt_of_integer",
    "ptypical_decomposition",
    "expected_torsion_exponent",
]


@dataclass(frozen=True)
class PTypicalWitt:
    """An element of W_n(F_p) stored by its Witt coordinates."""

    p: int
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(a) % self.p for a in self.coords))

    @property
    def length(self) -> int:
        return len(self.coords)

    def _same_ring(self, other: PTypicalWitt) -> None:
        if self.p != other.p or self.length != other.length:
            raise ValueError(f"W_{self.length}(F_{self.p}) vs W_{other.length}(F_{other.p})")

    def __add__(self, other: PTypicalWitt) -> PTypicalWitt:
        self._same_ring(other)
        g = [a + b for a, b in zip(ghost(self.coords, self.p), ghost(other.coords, self.p))]
        return PTypicalWitt(self.p, unghost(g, self.p))

    def __mul__(self, other: PTypicalWitt) -> PTypicalWitt:
        self._same_ring(other)
        g = [a * b for a, b in zip(ghost(self.coords, self.p), ghost(other.coords, self.p))]
        return PTypicalWitt(self.p, unghost(g, self.p))

    def __neg__(self) -> PTypicalWitt:
        return PTypicalWitt(self.p, unghost([-g for g in ghost(self.coords, self.p)], self.p))

    def __sub__(self, other: PTypicalWitt) -> PTypicalWitt:
        return self + (-other)

    def restrict(self, n: int) -> PTypicalWitt:
        return PTypicalWitt(self.p, self.coords[:n])

    def to_integer(self) -> int:
        """Image under W_n(F_p) = Z/p^n, i.e. sum of p^u times Teichmuller lifts."""
        n, p = self.length, self.p
        q = p**n
        return sum(p**u * pow(a, p ** max(n - 1, 0), q) for u, a in enumerate(self.coords)) % q

    @classmethod
    def zero(cls, p: int, n: int) -> PTypicalWitt:
        return cls(p, (0,) * n)

    @classmethod
    def one(cls, p: int, n: int) -> PTypicalWitt:
        return teichmuller(p, n, 1)


def ghost(coords, p: int) -> list[int]:
    """w_t = sum_{u <= t} p^u a_u^(p^(t-u)) for integer coordinates."""
    return [sum(p**u * a ** (p ** (t - u)) for u, a in enumerate(coords[: t + 1])) for t in range(len(coords))]


def unghost(ghosts, p: int) -> tuple[int, ...]:
    """Integer Witt coordinates with the given ghost components."""
    coords: list[int] = []
    for t, w in enumerate(ghosts):
        rest = w - sum(p**u * a ** (p ** (t - u)) for u, a in enumerate(coords))
        a, r = divmod(rest, p**t)
        if r:
            raise NonIntegralUnghost(f"ghost component {t} is not integral over the previous coordinates")
        coords.append(a)
    return tuple(coords)


def ghost_roundtrip(w: PTypicalWitt) -> PTypicalWitt:
    return PTypicalWitt(w.p, unghost(ghost(w.coords, w.p), w.p))


def ring_ops(a: PTypicalWitt, b: PTypicalWitt) -> tuple[PTypicalWitt, PTypicalWitt]:
    return a + b, a * b


def frobenius(w: PTypicalWitt) -> PTypicalWitt:
    """F: W_n -> W_(n-1), characterized by w_t(F x) = w_(t+1)(x)."""
    g = ghost(w.coords, w.p)
    return PTypicalWitt(w.p, unghost(g[1:], w.p))


def verschiebung(w: PTypicalWitt) -> PTypicalWitt:
    """V: W_n -> W_(n+1), shifting coordinates up by one."""
    return PTypicalWitt(w.p, (0,) + w.coords)


def fv_ops(w: PTypicalWitt) -> tuple[PTypicalWitt, PTypicalWitt]:
    return frobenius(w), verschiebung(w)


def teichmuller(p: int, n: int, a: int) -> PTypicalWitt:
    return PTypicalWitt(p, (a,) + (0,) * (n - 1))


def witt_of_integer(p: int, n: int, m: int) -> PTypicalWitt:
    """The image of the integer m under Z -> W_n(F_p)."""
    return PTypicalWitt(p, unghost([m] * n, p))


@dataclass(frozen=True)
class BigWittShape:
    """p-typical decomposition of the truncation set {1, ..., m}.

    ``components`` lists (j, s_j) for j prime to p, where s_j counts the
    elements j, jp, jp^2, ... not exceeding m.  As a group the big Witt
    vectors of F_p on this set are the sum of Z/p^(s_j).
    """

    p: int
    m: int
    components: tuple[tuple[int, int], ...]

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(sorted(s for _, s in self.components))

    @property
    def length(self) -> int:
        return sum(s for _, s in self.components)

    def capped_exponents(self, N: int) -> tuple[int, ...]:
        return tuple(sorted(min(s, N) for _, s in self.components))

    def describe(self) -> str:
        parts = [f"Z/{self.p}" if s == 1 else f"Z/{self.p}^{s}" for s in sorted(self.exponents, reverse=True)]
        return " + ".join(parts) if parts else "0"


def ptypical_decomposition(p: int, m: int) -> BigWittShape:
    if m < 0:
        raise ValueError("truncation bound must be nonnegative")
    comps = []
    for j in range(1, m + 1):
        if j % p == 0:
            continue
        s, t = 0, j
        while t <= m:
            s += 1
            t *= p
        comps.append((j, s))
    return BigWittShape(p, m, tuple(comps))


def expected_torsion_exponent(p: int, e: int, i: int, j: int) -> int:
    """Smallest s >= 0 with j * p^s >= e * i."""
    if j < 1 or math.gcd(j, p) != 1:
        raise ValueError(f"j={j} must be positive and prime to p={p}")
    s, t = 0, j
    while t < e * i:
        t *= p
        s += 1
    return s
