"""Lattices, lattice maps, and finitely generated torsion invariants.

A ``Lattice`` is just a free abelian group of known rank; a ``LatticeMap`` is
an exact integer matrix between two of them.  ``FinAb`` stores a finite
abelian group by its invariant-factor chain d_1 | d_2 | ..., plus a divisible
rank so that kernels of maps tensored with Q/Z (finite torsion plus copies of
Q/Z) have a home.  Q/Z-modules are never represented elementwise.

All values are immutable; every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from . import intmat
from .errors import FalsificationError, InputError

Rows = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Lattice:
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise InputError(f"lattice rank must be non-negative, got {self.rank}")

    def __repr__(self) -> str:
        return f"Z^{self.rank}"


def _freeze(rows: list[list[int]]) -> Rows:
    return tuple(tuple(int(v) for v in row) for row in rows)


@dataclass(frozen=True)
class LatticeMap:
    """Homomorphism source -> target as a (target.rank × source.rank) matrix."""

    source: Lattice
    target: Lattice
    entries: Rows

    def __post_init__(self) -> None:
        if len(self.entries) != self.target.rank:
            raise InputError(
                f"matrix has {len(self.entries)} rows, target rank is {self.target.rank}")
        for i, row in enumerate(self.entries):
            if len(row) != self.source.rank:
                raise InputError(
                    f"matrix row {i} has {len(row)} entries, source rank is {self.source.rank}")

    @classmethod
    def from_rows(cls, rows: list[list[int]], source_rank: int | None = None,
                  target_rank: int | None = None) -> "LatticeMap":
        tr = len(rows) if target_rank is None else target_rank
        if source_rank is None:
            if not rows:
                raise InputError("source rank of an empty matrix must be given explicitly")
            source_rank = len(rows[0])
        return cls(Lattice(source_rank), Lattice(tr), _freeze(rows))

    @classmethod
    def identity(cls, rank: int) -> "LatticeMap":
        return cls(Lattice(rank), Lattice(rank), _freeze(intmat.identity(rank)))

    @classmethod
    def zero(cls, source: Lattice, target: Lattice) -> "LatticeMap":
        return cls(source, target, _freeze(intmat.zeros(target.rank, source.rank)))

    @classmethod
    def stack(cls, maps: list["LatticeMap"]) -> "LatticeMap":
        """Vertical stack of maps with a common source."""
        if not maps:
            raise InputError("cannot stack zero maps without a source")
        src = maps[0].source
        for m in maps:
            if m.source != src:
                raise InputError("stacked maps must share their source")
        rows = [list(r) for m in maps for r in m.entries]
        return cls(src, Lattice(sum(m.target.rank for m in maps)), _freeze(rows))

    @classmethod
    def block_diagonal(cls, maps: list["LatticeMap"]) -> "LatticeMap":
        sr = sum(m.source.rank for m in maps)
        tr = sum(m.target.rank for m in maps)
        out = intmat.zeros(tr, sr)
        i0 = j0 = 0
        for m in maps:
            for i, row in enumerate(m.entries):
                for j, v in enumerate(row):
                    out[i0 + i][j0 + j] = v
            i0 += m.target.rank
            j0 += m.source.rank
        return cls(Lattice(sr), Lattice(tr), _freeze(out))

    # -- plumbing -----------------------------------------------------------

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    @property
    def nrows(self) -> int:
        return self.target.rank

    @property
    def ncols(self) -> int:
        return self.source.rank

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """self ∘ other (apply other first)."""
        if other.target != self.source:
            raise InputError("composition rank mismatch")
        m = intmat.matmul(self.rows(), self.nrows, self.ncols,
                          other.rows(), other.nrows, other.ncols)
        return LatticeMap(other.source, self.target, _freeze(m))

    def __mul__(self, other: "LatticeMap") -> "LatticeMap":
        return self.compose(other)

    def transpose(self) -> "LatticeMap":
        return LatticeMap(Lattice(self.target.rank), Lattice(self.source.rank),
                          _freeze(intmat.transpose(self.rows(), self.nrows, self.ncols)))

    def scaled(self, c: int) -> "LatticeMap":
        return LatticeMap(self.source, self.target,
                          _freeze([[c * v for v in row] for row in self.entries]))

    def add(self, other: "LatticeMap") -> "LatticeMap":
        if self.source != other.source or self.target != other.target:
            raise InputError("sum of maps needs equal source and target")
        rows = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        return LatticeMap(self.source, self.target, _freeze(rows))

    def apply(self, vec: list[int]) -> list[int]:
        return intmat.matvec(self.rows(), self.nrows, self.ncols, list(vec))

    def rank_of_image(self) -> int:
        return intmat.rank(self.rows(), self.nrows, self.ncols)

    def is_injective(self) -> bool:
        return self.rank_of_image() == self.ncols

    def is_surjective(self) -> bool:
        # surjective over Z: the column lattice is everything
        return intmat.column_lattice_index(self.rows(), self.nrows, self.ncols) == 1

    def is_zero(self) -> bool:
        return intmat.is_zero(self.rows())

    def determinant(self) -> int:
        if self.nrows != self.ncols:
            raise InputError("determinant of a non-square map")
        return intmat.bareiss_det(self.rows(), self.nrows)

    def image_hnf(self) -> Rows:
        """Canonical basis of the image lattice: equal images iff equal HNFs."""
        return _freeze(intmat.hnf_columns(self.rows(), self.nrows, self.ncols))


@dataclass(frozen=True)
class FinAb:
    """Finite abelian group (plus optional divisible Q/Z-rank).

    ``invariant_factors`` is the chain d_1 | d_2 | ... with every d_i >= 2.
    ``divisible_rank`` counts Q/Z summands, used for kernels of maps tensored
    with Q/Z; it is 0 for honestly finite groups.
    """

    invariant_factors: tuple[int, ...] = ()
    divisible_rank: int = 0

    def __post_init__(self) -> None:
        facs = self.invariant_factors
        if any(d < 2 for d in facs):
            raise InputError(f"invariant factors must be >= 2: {facs}")
        if any(facs[i + 1] % facs[i] for i in range(len(facs) - 1)):
            raise InputError(f"invariant factors must form a divisibility chain: {facs}")
        if self.divisible_rank < 0:
            raise InputError("divisible rank must be non-negative")

    @classmethod
    def trivial(cls) -> "FinAb":
        return cls()

    @classmethod
    def from_cyclic_orders(cls, orders: list[int], divisible_rank: int = 0) -> "FinAb":
        """Canonicalize a direct sum of cyclic groups Z/orders[i]."""
        by_prime: dict[int, list[int]] = {}
        for n in orders:
            if n <= 0:
                raise InputError(f"cyclic order must be positive, got {n}")
            for p, e in _factorint(n).items():
                by_prime.setdefault(p, []).append(e)
        width = max((len(es) for es in by_prime.values()), default=0)
        factors = []
        for k in range(width):
            d = 1
            for p, es in by_prime.items():
                es_sorted = sorted(es, reverse=True)
                if k < len(es_sorted):
                    d *= p ** es_sorted[k]
            factors.append(d)
        factors = [d for d in factors if d > 1]
        return cls(tuple(sorted(factors)), divisible_rank)

    @classmethod
    def direct_sum(cls, groups: list["FinAb"]) -> "FinAb":
        orders = [d for g in groups for d in g.invariant_factors]
        dr = sum(g.divisible_rank for g in groups)
        return cls.from_cyclic_orders(orders, dr)

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors and self.divisible_rank == 0

    @property
    def order(self) -> int:
        if self.divisible_rank:
            raise InputError("order of a group with divisible part")
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        if self.divisible_rank:
            raise InputError("exponent of a group with divisible part")
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def torsion(self) -> "FinAb":
        return FinAb(self.invariant_factors, 0)

    def primes(self) -> tuple[int, ...]:
        ps: set[int] = set()
        for d in self.invariant_factors:
            ps.update(_factorint(d))
        return tuple(sorted(ps))

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.divisible_rank:
            parts.append(f"(Q/Z)^{self.divisible_rank}")
        return " + ".join(parts) if parts else "0"


def _factorint(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return _factorint(n) == {n: 1}


@dataclass(frozen=True)
class SNFDecomposition:
    """U·M·V = D with U, V unimodular and D diagonal (divisibility chain)."""

    U: LatticeMap
    D: LatticeMap
    V: LatticeMap

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(intmat.diagonal_of(self.D.rows(), self.D.nrows, self.D.ncols))

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def smith_normal_form(m: LatticeMap) -> SNFDecomposition:
    u, d, v = intmat.smith(m.rows(), m.nrows, m.ncols)
    return SNFDecomposition(
        U=LatticeMap(Lattice(m.nrows), Lattice(m.nrows), _freeze(u)),
        D=LatticeMap(m.source, m.target, _freeze(d)),
        V=LatticeMap(m.source, m.source, _freeze(v)),
    )


def cokernel(m: LatticeMap) -> tuple[FinAb, int]:
    """(torsion of coker m, free rank of coker m)."""
    facs = intmat.invariant_factors(m.rows(), m.nrows, m.ncols)
    torsion = [d for d in facs if d > 1]
    return FinAb(tuple(torsion)), m.nrows - len(facs)


def torsion_kernel_qz(m: LatticeMap) -> FinAb:
    """ker(m ⊗ Q/Z): torsion invariants plus a divisible rank = nullity(m)."""
    facs = intmat.invariant_factors(m.rows(), m.nrows, m.ncols)
    torsion = [d for d in facs if d > 1]
    return FinAb(tuple(torsion), m.ncols - len(facs))


def kernel_saturated(m: LatticeMap) -> LatticeMap:
    """Injective map with image {x : m·x = 0}; the quotient is torsion-free."""
    k = intmat.kernel_basis(m.rows(), m.nrows, m.ncols)
    kcols = len(k[0]) if k else 0
    return LatticeMap(Lattice(kcols), m.source, _freeze(k))


def lattice_sum(maps: list[LatticeMap]) -> tuple[LatticeMap, int | None]:
    """Saturated basis of the sum of images, and the index of the raw sum.

    The index is the index of im(maps[0]) + ... inside the common target, or
    None when the sum has strictly smaller rank (infinite index).
    """
    if not maps:
        raise InputError("lattice_sum needs at least one map")
    target = maps[0].target
    for m in maps:
        if m.target != target:
            raise InputError("lattice_sum maps must share their target")
    cols = intmat.zeros(target.rank, 0)
    all_rows = [[v for m in maps for v in m.entries[i]] for i in range(target.rank)]
    ncols = sum(m.ncols for m in maps)
    index = intmat.column_lattice_index(all_rows, target.rank, ncols)
    sat = intmat.saturation_basis(all_rows, target.rank, ncols)
    satcols = len(sat[0]) if sat else 0
    return LatticeMap(Lattice(satcols), target, _freeze(sat)), index


def l_part(g: FinAb, l: int) -> FinAb:
    """l-primary component of a finite group."""
    if g.divisible_rank:
        raise InputError("l_part of a group with divisible part")
    if not is_prime(l):
        raise InputError(f"l_part needs a prime, got {l}")
    factors = []
    for d in g.invariant_factors:
        q = 1
        while d % l == 0:
            d //= l
            q *= l
        if q > 1:
            factors.append(q)
    return FinAb(tuple(factors))


def image_lattices_equal(a: LatticeMap, b: LatticeMap) -> bool:
    if a.target != b.target:
        return False
    return a.image_hnf() == b.image_hnf()


def sublattice_quotient(amb_basis: LatticeMap, sub_basis: LatticeMap) -> FinAb:
    """Invariants of (lattice spanned by amb_basis)/(lattice spanned by sub_basis).

    Both maps give full-column-rank bases into the same ambient lattice and the
    second lattice must be contained in the first with finite index.
    """
    c = intmat.integral_solve(amb_basis.rows(), amb_basis.nrows, amb_basis.ncols,
                              sub_basis.rows(), sub_basis.ncols)
    if c is None:
        raise FalsificationError("claimed sublattice is not contained in the ambient one")
    facs = intmat.invariant_factors(c, amb_basis.ncols, sub_basis.ncols)
    if len(facs) < amb_basis.ncols:
        raise FalsificationError("sublattice has infinite index in quotient computation")
    return FinAb(tuple(d for d in facs if d > 1))
