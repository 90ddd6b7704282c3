"""Fixed-precision p-adic arithmetic and homology over Z/p^N.

Matrices hold residues in ``[0, p^N)``.  Homology is reported for the
underlying complex of free Z_p-modules: the cokernel torsion of the incoming
differential plus one at-cap factor for every free summand.  A cyclic factor
of order p^a with a >= N is indistinguishable from a free one at precision N
and is also reported at the cap; callers separate the two by recomputing at
N + 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CompositionNotZero, PrecisionMismatch

__all__ = [
    "PadicScalar",
    "PMatrix",
    "FinPModule",
    "SmithForm",
    "Complex",
    "ChainMap",
    "smith_normal_form",
    "snf_exponents",
    "homology",
    "fiber",
    "fiber_map",
    "valuation",
]


def valuation(x: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an integer; ``cap`` is returned for zero."""
    if x == 0:
        if cap is None:
            raise ValueError("valuation of 0 needs a cap")
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


def _check_compatible(p1: int, n1: int, p2: int, n2: int) -> None:
    if p1 != p2 or n1 != n2:
        raise PrecisionMismatch(f"cannot mix Z/{p1}^{n1} with Z/{p2}^{n2}")


@dataclass(frozen=True)
class PadicScalar:
    """An element of Z/p^N."""

    p: int
    N: int
    residue: int

    def __post_init__(self):
        if self.p < 2 or self.N < 1:
            raise ValueError(f"bad modulus p={self.p}, N={self.N}")
        object.__setattr__(self, "residue", self.residue % self.p**self.N)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    @property
    def valuation(self) -> int:
        return valuation(self.residue, self.p, cap=self.N)

    @property
    def unit_part(self) -> int:
        """u with u * p^valuation == residue (mod p^N); undefined for zero."""
        v = self.valuation
        if v == self.N:
            raise ValueError("zero has no unit part")
        return self.residue // self.p**v

    def is_zero(self) -> bool:
        return self.residue == 0

    def _other(self, other) -> int:
        if isinstance(other, PadicScalar):
            _check_compatible(self.p, self.N, other.p, other.N)
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.p, self.N, self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.p, self.N, self.residue - o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.p, self.N, o - self.residue)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.p, self.N, self.residue * o)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(self.p, self.N, -self.residue)

    def inverse(self) -> PadicScalar:
        if self.residue % self.p == 0:
            raise ZeroDivisionError(f"{self.residue} is not a unit mod {self.p}^{self.N}")
        return PadicScalar(self.p, self.N, pow(self.residue, -1, self.modulus))

    def __repr__(self):
        return f"PadicScalar({self.residue} mod {self.p}^{self.N})"


@dataclass(frozen=True)
class PMatrix:
    """Dense matrix over Z/p^N.  Zero rows or zero columns are allowed."""

    p: int
    N: int
    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        q = self.p**self.N
        data = tuple(tuple(int(a) % q for a in row) for row in self.data)
        if len(data) != self.rows or any(len(r) != self.cols for r in data):
            raise ValueError(f"data does not have shape {self.rows}x{self.cols}")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_rows(cls, p: int, N: int, rows: Sequence[Sequence[int]], cols: int | None = None) -> PMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(rows[0])
        return cls(p, N, len(rows), cols, tuple(tuple(r) for r in rows))

    @classmethod
    def zeros(cls, p: int, N: int, rows: int, cols: int) -> PMatrix:
        return cls(p, N, rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, p: int, N: int, n: int) -> PMatrix:
        return cls(p, N, n, n, tuple(tuple(int(r == c) for c in range(n)) for r in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def entry(self, r: int, c: int) -> PadicScalar:
        return PadicScalar(self.p, self.N, self.data[r][c])

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.data for a in row)

    def reduce(self, N: int) -> PMatrix:
        """The same integer entries read at a lower precision."""
        if N > self.N:
            raise PrecisionMismatch("cannot raise precision of residues")
        return PMatrix(self.p, N, self.rows, self.cols, self.data)

    def __matmul__(self, other: PMatrix) -> PMatrix:
        _check_compatible(self.p, self.N, other.p, other.N)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        q = self.modulus
        cols_b = list(zip(*other.data)) if other.rows else [() for _ in range(other.cols)]
        out = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) % q for col in cols_b)
            for row in self.data
        )
        return PMatrix(self.p, self.N, self.rows, other.cols, out)

    def _elementwise(self, other: PMatrix, sign: int) -> PMatrix:
        _check_compatible(self.p, self.N, other.p, other.N)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        out = tuple(
            tuple(a + sign * b for a, b in zip(ra, rb)) for ra, rb in zip(self.data, other.data)
        )
        return PMatrix(self.p, self.N, self.rows, self.cols, out)

    def __add__(self, other: PMatrix) -> PMatrix:
        return self._elementwise(other, 1)

    def __sub__(self, other: PMatrix) -> PMatrix:
        return self._elementwise(other, -1)

    def __neg__(self) -> PMatrix:
        return PMatrix(self.p, self.N, self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.data))

    def transpose(self) -> PMatrix:
        data = tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols))
        return PMatrix(self.p, self.N, self.cols, self.rows, data)

    @classmethod
    def block(cls, p: int, N: int, grid: Sequence[Sequence[PMatrix]]) -> PMatrix:
        """Assemble a block matrix; every block row must share a height."""
        rows: list[list[int]] = []
        width = sum(b.cols for b in grid[0]) if grid else 0
        for block_row in grid:
            heights = {b.rows for b in block_row}
            if len(heights) != 1:
                raise ValueError("blocks in one row differ in height")
            if sum(b.cols for b in block_row) != width:
                raise ValueError("block rows differ in width")
            for r in range(heights.pop()):
                line: list[int] = []
                for b in block_row:
                    _check_compatible(p, N, b.p, b.N)
                    line.extend(b.data[r])
                rows.append(line)
        return cls(p, N, len(rows), width, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class FinPModule:
    """Isomorphism type of a finitely generated Z/p^N-module.

    ``exponents`` is the sorted multiset of a in [1, N], one per cyclic
    factor Z/p^a.  Factors with a == N are at the cap.
    """

    p: int
    N: int
    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        exps = tuple(sorted(int(a) for a in self.exponents))
        if any(a < 1 or a > self.N for a in exps):
            raise ValueError(f"exponents {exps} outside [1, {self.N}]")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def free(cls, p: int, N: int, rank: int) -> FinPModule:
        return cls(p, N, (N,) * rank)

    @classmethod
    def capped(cls, p: int, N: int, exponents: Iterable[int]) -> FinPModule:
        """Build from true exponents, dropping zeros and capping at N."""
        return cls(p, N, tuple(min(a, N) for a in exponents if a > 0))

    @property
    def at_cap_count(self) -> int:
        return sum(1 for a in self.exponents if a == self.N)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(a for a in self.exponents if a < self.N)

    @property
    def length(self) -> int:
        """log_p of the cardinality."""
        return sum(self.exponents)

    def cardinality(self) -> int:
        return self.p**self.length

    def is_zero(self) -> bool:
        return not self.exponents

    def is_torsion(self) -> bool:
        return self.at_cap_count == 0

    def __add__(self, other: FinPModule) -> FinPModule:
        _check_compatible(self.p, self.N, other.p, other.N)
        return FinPModule(self.p, self.N, self.exponents + other.exponents)

    def labels(self) -> list[str]:
        """Human-readable factors; at-cap factors print as ``W``."""
        out = []
        for a in self.exponents:
            if a == self.N:
                out.append("W")
            elif a == 1:
                out.append(f"Z/{self.p}")
            else:
                out.append(f"Z/{self.p}^{a}")
        return out

    def __str__(self):
        return " + ".join(self.labels()) if self.exponents else "0"


@dataclass(frozen=True)
class SmithForm:
    """``left @ m @ right`` is diagonal with entries p^exponents[k]."""

    exponents: tuple[int, ...]
    left: PMatrix
    right: PMatrix

    @property
    def rank(self) -> int:
        n = self.left.N
        return sum(1 for d in self.exponents if d < n)


def _snf(m: PMatrix, track: bool):
    p, N = m.p, m.N
    q = p**N
    rows, cols = m.rows, m.cols
    a = [list(r) for r in m.data]
    u = [[int(r == c) for c in range(rows)] for r in range(rows)] if track else None
    v = [[int(r == c) for c in range(cols)] for r in range(cols)] if track else None
    pw = [p**k for k in range(N + 1)]
    exps: list[int] = []
    for k in range(min(rows, cols)):
        best = None
        for r in range(k, rows):
            row = a[r]
            for c in range(k, cols):
                x = row[c]
                if x:
                    val = 0
                    while x % p == 0:
                        x //= p
                        val += 1
                    if best is None or val < best[0]:
                        best = (val, r, c)
                        if val == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            exps.extend([N] * (min(rows, cols) - k))
            break
        val, r, c = best
        if r != k:
            a[k], a[r] = a[r], a[k]
            if track:
                u[k], u[r] = u[r], u[k]
        if c != k:
            for row in a:
                row[k], row[c] = row[c], row[k]
            if track:
                for row in v:
                    row[k], row[c] = row[c], row[k]
        unit_inv = pow(a[k][k] // pw[val], -1, q)
        if unit_inv != 1:
            a[k] = [x * unit_inv % q for x in a[k]]
            if track:
                u[k] = [x * unit_inv % q for x in u[k]]
        piv_row = a[k]
        for r in range(k + 1, rows):
            x = a[r][k]
            if x:
                t = x // pw[val]
                a[r] = [(y - t * z) % q for y, z in zip(a[r], piv_row)]
                if track:
                    u[r] = [(y - t * z) % q for y, z in zip(u[r], u[k])]
        for c in range(k + 1, cols):
            x = piv_row[c]
            if x:
                t = x // pw[val]
                piv_row[c] = 0
                if track:
                    for row in v:
                        row[c] = (row[c] - t * row[k]) % q
        exps.append(val)
    if not track:
        return tuple(exps), None, None
    return (
        tuple(exps),
        PMatrix(p, N, rows, rows, tuple(tuple(r) for r in u)),
        PMatrix(p, N, cols, cols, tuple(tuple(r) for r in v)),
    )


def smith_normal_form(m: PMatrix) -> SmithForm:
    """Smith form over the local ring Z/p^N with transformation matrices.

    Pivots are the entries of minimal valuation, ties broken in row-major
    order, so the output is deterministic.  Exponents are non-decreasing,
    one per diagonal slot (``min(rows, cols)`` of them), with N standing
    for a zero diagonal entry.
    """
    exps, left, right = _snf(m, track=True)
    return SmithForm(exps, left, right)


def snf_exponents(m: PMatrix) -> tuple[int, ...]:
    """Smith exponents only; skips the transformation bookkeeping."""
    return _snf(m, track=False)[0]


def homology(dA: PMatrix, dB: PMatrix) -> FinPModule:
    """ker(dB) / im(dA) for free modules A -> B -> C, capped at N.

    ``dA`` has shape (rank B, rank A) and ``dB`` has shape (rank C, rank B).
    """
    _check_compatible(dA.p, dA.N, dB.p, dB.N)
    if dA.rows != dB.cols:
        raise ValueError(f"dA lands in rank {dA.rows} but dB starts at rank {dB.cols}")
    if dA.cols and dB.rows and not (dB @ dA).is_zero():
        raise CompositionNotZero("dB @ dA is nonzero")
    N = dA.N
    exps_a = snf_exponents(dA)
    exps_b = snf_exponents(dB)
    rank_a = sum(1 for d in exps_a if d < N)
    rank_b = sum(1 for d in exps_b if d < N)
    free = dA.rows - rank_a - rank_b
    torsion = [d for d in exps_a if 0 < d < N]
    return FinPModule(dA.p, N, tuple(torsion) + (N,) * free)


@dataclass(frozen=True)
class Complex:
    """A cochain complex of free Z/p^N-modules in degrees 0..len(dims)-1.

    ``diffs[k]`` maps degree k to degree k + 1 and has shape
    ``(dims[k + 1], dims[k])``.
    """

    p: int
    N: int
    dims: tuple[int, ...]
    diffs: tuple[PMatrix, ...]

    def __post_init__(self):
        if len(self.diffs) != max(len(self.dims) - 1, 0):
            raise ValueError("need exactly one differential between consecutive degrees")
        for k, d in enumerate(self.diffs):
            _check_compatible(self.p, self.N, d.p, d.N)
            if d.shape != (self.dims[k + 1], self.dims[k]):
                raise ValueError(f"differential {k} has shape {d.shape}, expected {(self.dims[k + 1], self.dims[k])}")

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def diff(self, k: int) -> PMatrix:
        """Differential out of degree k (a zero map outside the range)."""
        if 0 <= k < len(self.diffs):
            return self.diffs[k]
        return PMatrix.zeros(self.p, self.N, self.dim(k + 1), self.dim(k))

    def check(self) -> None:
        for k in range(len(self.diffs) - 1):
            if not (self.diffs[k + 1] @ self.diffs[k]).is_zero():
                raise CompositionNotZero(f"d{k + 1} @ d{k} is nonzero")

    def homology(self) -> list[FinPModule]:
        return [homology(self.diff(k - 1), self.diff(k)) for k in range(len(self.dims))]


@dataclass(frozen=True)
class ChainMap:
    source: Complex
    target: Complex
    maps: tuple[PMatrix, ...]

    def component(self, k: int) -> PMatrix:
        if 0 <= k < len(self.maps):
            return self.maps[k]
        return PMatrix.zeros(self.source.p, self.source.N, self.target.dim(k), self.source.dim(k))

    def check(self) -> None:
        """Raise CompositionNotZero unless the map commutes with d."""
        top = max(self.source.top, self.target.top)
        for k in range(top):
            lhs = self.target.diff(k) @ self.component(k)
            rhs = self.component(k + 1) @ self.source.diff(k)
            if not (lhs - rhs).is_zero():
                raise CompositionNotZero(f"chain map does not commute with d in degree {k}")


def fiber(g: ChainMap) -> Complex:
    """Mapping fiber: fib^k = X^k + Y^(k-1), d(x, y) = (d x, g x - d y)."""
    X, Y = g.source, g.target
    p, N = X.p, X.N
    top = max(X.top, Y.top + 1)
    dims = tuple(X.dim(k) + Y.dim(k - 1) for k in range(top + 1))
    diffs = []
    for k in range(top):
        dx = X.diff(k)
        dy = Y.diff(k - 1)
        zero = PMatrix.zeros(p, N, X.dim(k + 1), Y.dim(k - 1))
        diffs.append(PMatrix.block(p, N, [[dx, zero], [g.component(k), -dy]]))
    return Complex(p, N, dims, tuple(diffs))


def fiber_map(h_source: ChainMap, h_target: ChainMap, g: ChainMap, g2: ChainMap) -> ChainMap:
    """Map fib(g) -> fib(g2) induced by a commutative square.

    ``h_source``: g.source -> g2.source, ``h_target``: g.target -> g2.target.
    """
    src, dst = fiber(g), fiber(g2)
    p, N = src.p, src.N
    maps = []
    # beyond the shorter complex one side is zero, and component() fills in zeros
    for k in range(min(src.top, dst.top) + 1):
        a = h_source.component(k)
        b = h_target.component(k - 1)
        top_right = PMatrix.zeros(p, N, a.rows, b.cols)
        bottom_left = PMatrix.zeros(p, N, b.rows, a.cols)
        maps.append(PMatrix.block(p, N, [[a, top_right], [bottom_left, b]]))
    return ChainMap(src, dst, tuple(maps))
