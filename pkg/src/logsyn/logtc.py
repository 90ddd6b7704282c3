"""Homotopy of p-completed logTC of (k[x]/x^e, N) from its syntomic graded pieces.

The motivic filtration has gr^i = Z_p^syn(i)[2i], and with k = F_p every
extension splits because the W(k) pieces are free, so

    pi_n = sum over i of H^(2i - n)(Z_p^syn(i)).
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import CrossCheckFailure
from .padic import FinPModule
from .prismatic_model import ModelParams
from .syntomic import Term, auto_precision, syntomic_total

__all__ = ["TableEntry", "HomotopyTable", "logtc_descriptor", "logtc_table", "motivic_bigraded"]

E1_NOTE = "table stated for e=1; e-dependence extrapolated"


@dataclass(frozen=True)
class TableEntry:
    degree: int
    terms: tuple[Term, ...]
    module: FinPModule
    note: str = ""

    def describe(self) -> str:
        return " + ".join(t.label for t in self.terms) if self.terms else "0"


@dataclass(frozen=True)
class HomotopyTable:
    p: int
    e: int
    precision: int
    entries: tuple[TableEntry, ...]

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(t.degree for t in self.entries)

    def __getitem__(self, degree: int) -> TableEntry:
        for t in self.entries:
            if t.degree == degree:
                return t
        raise KeyError(degree)


def logtc_descriptor(e: int, n: int) -> tuple[Term, ...]:
    """Closed-form summands of pi_n logTC(k[x]/x^e, N); shifts are unused."""
    if n == -1:
        return (Term(0),)
    if n == 0:
        return (Term(0), Term(0))
    if n == 1:
        return (Term(0), Term(0, e - 1))
    if n >= 3 and n % 2 == 1:
        m = (n + 1) // 2
        return (Term(0, e * m - 1),)
    return ()


def _realize(terms: tuple[Term, ...], p: int, N: int) -> FinPModule:
    out = FinPModule(p, N)
    for t in terms:
        out = out + t.realize(p, N)
    return out


def _weights_for(n: int) -> range:
    # H^(2i - n) is nonzero only for 0 <= 2i - n <= 2
    lo = max((n + 1) // 2, 0)
    hi = (n + 2) // 2
    return range(lo, hi + 1)


def logtc_table(
    e: int, p: int, degree_range: tuple[int, int], precision: int | None = None, cross_check: bool = True
) -> HomotopyTable:
    """Table of pi_n for lo <= n <= hi, optionally checked against syntomic data.

    Raises CrossCheckFailure when the closed form and the sum of syntomic
    groups disagree in some degree.
    """
    lo, hi = degree_range
    if lo > hi:
        raise ValueError("empty degree range")
    weights = sorted({i for n in range(lo, hi + 1) for i in _weights_for(n)})
    N = precision
    if N is None:
        N = max([auto_precision(p, e, i) for i in weights], default=3)
    syn = {}
    if cross_check:
        params = ModelParams.truncated(p, e, N)
        syn = {i: syntomic_total(params, i).degrees for i in weights}
    entries = []
    for n in range(lo, hi + 1):
        terms = logtc_descriptor(e, n)
        module = _realize(terms, p, N)
        if cross_check:
            assembled = FinPModule(p, N)
            for i in _weights_for(n):
                assembled = assembled + syn[i][2 * i - n]
            if assembled != module:
                raise CrossCheckFailure(f"pi_{n}: closed form {module} but syntomic data give {assembled}")
        entries.append(TableEntry(n, terms, module))
    return HomotopyTable(p, e, N, tuple(entries))


def motivic_bigraded(e: int, p: int, i: int, j: int, precision: int | None = None) -> TableEntry:
    """Bigraded motivic entry (i, j): the logTC entry in degree i - 2j.

    The reindexing is stated for e = 1; other e use the same shift of the
    e-dependent table and carry a note saying so.
    """
    n = i - 2 * j
    table = logtc_table(e, p, (n, n), precision)
    entry = table[n]
    if e != 1:
        entry = TableEntry(entry.degree, entry.terms, entry.module, E1_NOTE)
    return entry
