"""Synthesized monodromy action on an integer model of the Tate module.

The representation lives on T = X^dual ⊕ C ⊕ X' with C of rank twice the
abelian rank.  Each boundary branch contributes a nilpotent N_i sending the
X' block into the X^dual block through sp_i^dual ∘ phi_i ∘ sp'_i and killing
everything else, so the generators sigma_i = 1 + N_i commute and are
unipotent of level 2.  Everything is built over Z: fixed parts are exact
integer kernels and l-adic statements become "index coprime to l" statements.
Finite-level arithmetic mod l^r appears only in the component-group torsion
formula, where the statement itself is finite level.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from . import intmat
from .degeneration import DegenDatum, require_valid
from .errors import FalsificationError, InputError
from .lattice import (
    FinAb,
    Lattice,
    LatticeMap,
    is_prime,
    kernel_saturated,
    lattice_sum,
)
from .monodromy import TraitProfile, psi_maps


@dataclass(frozen=True)
class GaloisRep:
    l: int
    toric_rank: int              # mu
    abelian_rank: int            # alpha
    lattice: Lattice             # T of rank 2d, d = mu + alpha
    nilpotents: tuple[LatticeMap, ...]

    @property
    def d(self) -> int:
        return self.toric_rank + self.abelian_rank

    @property
    def n(self) -> int:
        return len(self.nilpotents)

    def sigma(self, i: int) -> LatticeMap:
        return LatticeMap.identity(self.lattice.rank).add(self.nilpotents[i])

    def toric_part(self) -> LatticeMap:
        """Inclusion of T^t = the X^dual block, rank mu."""
        return _block_inclusion(self.lattice.rank, 0, self.toric_rank)

    def fixed_part(self) -> LatticeMap:
        """Inclusion of T^f = X^dual ⊕ C, rank 2d - mu."""
        return _block_inclusion(self.lattice.rank, 0, self.lattice.rank - self.toric_rank)

    def char_block_projection(self) -> LatticeMap:
        """Projection T -> T/T^f identified with the X' block."""
        start = self.lattice.rank - self.toric_rank
        rows = []
        for k in range(self.toric_rank):
            row = [0] * self.lattice.rank
            row[start + k] = 1
            rows.append(row)
        return LatticeMap.from_rows(rows, source_rank=self.lattice.rank,
                                    target_rank=self.toric_rank)


def _block_inclusion(total: int, start: int, size: int) -> LatticeMap:
    rows = []
    for i in range(total):
        row = [0] * size
        if start <= i < start + size:
            row[i - start] = 1
        rows.append(row)
    return LatticeMap.from_rows(rows, source_rank=size, target_rank=total)


def build_rep(datum: DegenDatum, l: int) -> GaloisRep:
    """Integer model of the l-adic representation attached to the datum."""
    if not is_prime(l):
        raise InputError(f"l must be prime, got {l}")
    if l == datum.residue_char:
        raise InputError("prime equals residue characteristic")
    require_valid(datum)
    mu = datum.mu
    alpha = datum.abelian_rank
    total = 2 * (mu + alpha)
    char_start = total - mu
    nilpotents = []
    for psi in psi_maps(datum):
        rows = intmat.zeros(total, total)
        for i in range(mu):
            for j in range(mu):
                rows[i][char_start + j] = psi.entries[i][j]
        nilpotents.append(LatticeMap.from_rows(rows, source_rank=total, target_rank=total))
    rep = GaloisRep(l, mu, alpha, Lattice(total), tuple(nilpotents))
    _verify_rep(rep)
    return rep


def _verify_rep(rep: GaloisRep) -> None:
    for i, ni in enumerate(rep.nilpotents):
        for j, nj in enumerate(rep.nilpotents):
            if not ni.compose(nj).is_zero():
                raise FalsificationError(f"N_{i + 1}·N_{j + 1} != 0 in the synthesized action")
    fixed = fixed_lattice(rep, tuple(range(rep.n)))
    expected = rep.lattice.rank - rep.toric_rank
    if fixed.ncols != expected:
        raise FalsificationError(
            f"rank T^G = {fixed.ncols}, expected 2d - mu = {expected}")
    if fixed.image_hnf() != rep.fixed_part().image_hnf():
        raise FalsificationError("T^G differs from T^f as a saturated sublattice")


def fixed_lattice(rep: GaloisRep, generators: tuple[int, ...]) -> LatticeMap:
    """Saturated lattice of vectors fixed by the listed sigma generators."""
    maps = [rep.nilpotents[i] for i in generators]
    if not maps:
        return LatticeMap.identity(rep.lattice.rank)
    return kernel_saturated(LatticeMap.stack(maps))


def star_condition(rep: GaloisRep) -> bool:
    """T is the sum over i of the parts fixed by all generators except sigma_i,
    up to index coprime to l."""
    if rep.n == 0:
        return True
    parts = []
    for i in range(rep.n):
        others = tuple(j for j in range(rep.n) if j != i)
        parts.append(fixed_lattice(rep, others))
    _, index = lattice_sum(parts)
    return index is not None and index % rep.l != 0


def decomposition_check(rep: GaloisRep) -> bool:
    """Attempt the block decomposition of T/T^G into generator-exclusive parts.

    V_i is the image in T/T^G of the sublattice fixed by every sigma_j with
    j != i.  Success means: each such sublattice really is fixed by the other
    generators and invariant under its own, the V_i are independent, and their
    sum has finite index coprime to l.
    """
    if rep.n == 0:
        return True
    proj = rep.char_block_projection()
    parts: list[LatticeMap] = []
    for i in range(rep.n):
        others = tuple(j for j in range(rep.n) if j != i)
        w = fixed_lattice(rep, others)
        for j in others:
            if not rep.nilpotents[j].compose(w).is_zero():
                return False
        sigma_w = rep.sigma(i).compose(w)
        if intmat.integral_solve(w.rows(), w.nrows, w.ncols,
                                 sigma_w.rows(), sigma_w.ncols) is None:
            return False
        projected = proj.compose(w)
        basis = intmat.hnf_columns(projected.rows(), projected.nrows, projected.ncols)
        bcols = len(basis[0]) if basis else 0
        parts.append(LatticeMap(Lattice(bcols), Lattice(rep.toric_rank),
                                tuple(tuple(r) for r in basis)))
    # the decomposition must be direct: the combined columns stay independent
    concat_cols = sum(p.ncols for p in parts)
    concat = [[v for p in parts for v in p.entries[i]] for i in range(rep.toric_rank)]
    if intmat.rank(concat, rep.toric_rank, concat_cols) != concat_cols:
        return False
    _, index = lattice_sum(parts)
    return index is not None and index % rep.l != 0


def _mod_lr_quotient(action: LatticeMap, fixed: LatticeMap, modulus: int) -> FinAb:
    """Invariants of ker(action mod m) modulo the image of the fixed lattice.

    Both subgroups of (Z/m)^N are lifted to full-rank sublattices of Z^N
    containing m·Z^N; the quotient is read off one integral change of basis.
    """
    total = action.ncols
    u, d, v = intmat.smith(action.rows(), action.nrows, action.ncols)
    diag = intmat.diagonal_of(d, action.nrows, action.ncols)
    r = len(diag)
    cols: list[list[int]] = []
    for k in range(total):
        scale = modulus // gcd(diag[k], modulus) if k < r else 1
        cols.append([v[i][k] * scale for i in range(total)])
    for k in range(total):
        e = [0] * total
        e[k] = modulus
        cols.append(e)
    kernel_rows = [[c[i] for c in cols] for i in range(total)]
    kernel_basis = intmat.hnf_columns(kernel_rows, total, len(cols))
    fixed_cols = [list(row) for row in fixed.entries]
    for k in range(total):
        for i in range(total):
            fixed_cols[i].append(modulus if i == k else 0)
    fixed_basis = intmat.hnf_columns(fixed_cols, total, fixed.ncols + total)
    change = intmat.integral_solve(kernel_basis, total, total, fixed_basis, total)
    if change is None:
        raise FalsificationError("fixed vectors escaped the finite-level kernel")
    facs = intmat.invariant_factors(change, total, total)
    return FinAb(tuple(f for f in facs if f > 1))


def torsion_phi_group(rep: GaloisRep, profile: TraitProfile, r: int) -> FinAb:
    """Finite-level component-group torsion of the trait pulled back along the profile.

    The trait generator acts by sigma = 1 + sum a_i·N_i; the group is
    ker(sigma - 1 on T ⊗ Z/l^r) modulo the image of the sigma-fixed lattice,
    stable in r once l^r exceeds the group exponent.
    """
    if r < 1:
        raise InputError("level r must be >= 1")
    if len(profile.multiplicities) != rep.n:
        raise InputError(f"profile has {len(profile.multiplicities)} entries, rep has {rep.n}")
    total = rep.lattice.rank
    action = LatticeMap.zero(rep.lattice, rep.lattice)
    for a, nil in zip(profile.multiplicities, rep.nilpotents):
        if a:
            action = action.add(nil.scaled(a))
    fixed = kernel_saturated(action)
    return _mod_lr_quotient(action, fixed, rep.l ** r)


def closed_point_torsion(rep: GaloisRep, r: int) -> FinAb:
    """Exact l^r-torsion of the closed-point component group from the full action."""
    if r < 1:
        raise InputError("level r must be >= 1")
    if rep.n == 0:
        return FinAb.trivial()
    stacked = LatticeMap.stack(list(rep.nilpotents))
    fixed = fixed_lattice(rep, tuple(range(rep.n)))
    return _mod_lr_quotient(stacked, fixed, rep.l ** r)
