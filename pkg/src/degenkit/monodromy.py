"""Monodromy pairings: composition along traits and component groups.

A trait hitting the boundary with multiplicities (a_1..a_n) picks out the
active branch set J and a stratum whose character lattice Y is the image of
the J-restricted purity map.  The composed pairing is

    phi_f = B^t · diag(a_j · phi_j) · B'

where B and B' are bases of the primal and dual stratum images.  When the
restricted purity map is injective we keep the closed-point coordinates
(B = restricted purity itself), which reproduces the closed-point pairing
matrices exactly; otherwise a canonical Hermite basis of the image is used.
The component group of a nondegenerate pairing is its cokernel, cross-checked
against the kernel of the same map tensored with Q/Z on every call.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import intmat
from .degeneration import (
    Branch,
    DegenDatum,
    pairing_violation,
    purity_matrix,
    require_valid,
)
from .errors import FalsificationError, InputError
from .lattice import (
    FinAb,
    Lattice,
    LatticeMap,
    cokernel,
    is_prime,
    l_part,
    torsion_kernel_qz,
)

HEURISTIC_STRATUM = "derived stratum - heuristic"
TRAIT_MISSES_DIVISOR = "trait misses the divisor"


@dataclass(frozen=True)
class TraitProfile:
    """Branch multiplicities (a_1..a_n) of a trait through the boundary."""

    multiplicities: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(a < 0 for a in self.multiplicities):
            raise InputError("trait multiplicities must be non-negative")

    @property
    def is_transversal(self) -> bool:
        return all(a in (0, 1) for a in self.multiplicities)

    @property
    def active(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.multiplicities) if a > 0)


@dataclass(frozen=True)
class StratumData:
    """Stratum lattice Y for a branch subset J, with its two structure maps."""

    lattice: Lattice
    inclusion: LatticeMap    # Y -> ⊕_{j in J} X_j, columns span the stratum image
    projection: LatticeMap   # X -> Y; inclusion ∘ projection = restricted purity
    active: tuple[int, ...]
    heuristic: bool = False
    overridden: bool = False


@dataclass(frozen=True)
class ComposedPairing:
    profile: TraitProfile
    stratum: StratumData
    dual_stratum: StratumData
    matrix: LatticeMap       # phi_f : Y' -> Y^dual
    warnings: tuple[str, ...] = ()

    @property
    def active(self) -> tuple[int, ...]:
        return self.stratum.active


def _is_toric_additive(datum: DegenDatum) -> bool:
    pur = purity_matrix(datum)
    return pur.nrows == pur.ncols and abs(pur.determinant()) == 1


def _restricted_purity(datum: DegenDatum, active: tuple[int, ...], dual: bool) -> LatticeMap:
    if dual:
        maps = [datum.dual_sp(j) for j in active]
        source = datum.dual_closed
    else:
        maps = [datum.branches[j].specialization for j in active]
        source = datum.closed_point
    if not maps:
        return LatticeMap.zero(source, Lattice(0))
    return LatticeMap.stack(maps)


def stratum_lattice(datum: DegenDatum, active: tuple[int, ...] | list[int],
                    dual: bool = False) -> StratumData:
    """Stratum lattice over the branch subset J (the image of restricted purity).

    For a toric-additive datum this is exactly ⊕_{j in J} X_j; for J equal to
    the whole branch set it is the closed-point lattice X carried by the
    purity map.  Intermediate strata of a non-toric-additive datum are derived
    and flagged heuristic; explicit overrides from the input file win.
    """
    active = tuple(sorted(set(active)))
    if any(j < 0 or j >= datum.n for j in active):
        raise InputError("stratum subset names a missing branch")
    restricted = _restricted_purity(datum, active, dual)
    override = datum.stratum_override(active)
    if override is not None:
        inc = override.dual_inclusion if dual else override.inclusion
        if inc is None and datum.is_principal:
            inc = override.inclusion
        if inc is None:
            raise InputError("stratum override lacks a dual inclusion")
        proj_rows = intmat.integral_solve(inc.rows(), inc.nrows, inc.ncols,
                                          restricted.rows(), restricted.ncols)
        if proj_rows is None:
            raise InputError("stratum override does not contain the restricted purity image")
        proj = LatticeMap.from_rows(proj_rows, source_rank=restricted.ncols,
                                    target_rank=inc.ncols)
        return StratumData(Lattice(inc.ncols), inc, proj, active, overridden=True)
    heuristic = (len(active) < datum.n) and not _is_toric_additive(datum)
    if restricted.is_injective():
        # Y is the source lattice itself, in its own basis
        return StratumData(restricted.source, restricted,
                           LatticeMap.identity(restricted.ncols), active, heuristic)
    basis = intmat.hnf_columns(restricted.rows(), restricted.nrows, restricted.ncols)
    rank = len(basis[0]) if basis else 0
    inc = LatticeMap(Lattice(rank), restricted.target,
                     tuple(tuple(r) for r in basis))
    proj_rows = intmat.integral_solve(basis, restricted.nrows, rank,
                                      restricted.rows(), restricted.ncols)
    if proj_rows is None:
        raise FalsificationError("restricted purity does not factor through its own image")
    proj = LatticeMap.from_rows(proj_rows, source_rank=restricted.ncols, target_rank=rank)
    return StratumData(Lattice(rank), inc, proj, active, heuristic)


def compose_trait(datum: DegenDatum, profile: TraitProfile) -> ComposedPairing:
    """Monodromy pairing of the trait with the given multiplicity tuple."""
    require_valid(datum)
    if len(profile.multiplicities) != datum.n:
        raise InputError(
            f"profile has {len(profile.multiplicities)} entries, datum has {datum.n} branches")
    warnings: list[str] = []
    active = profile.active
    if datum.n > 0 and not active:
        warnings.append(TRAIT_MISSES_DIVISOR)
    stratum = stratum_lattice(datum, active, dual=False)
    dual_stratum = stratum_lattice(datum, active, dual=True)
    if stratum.heuristic or dual_stratum.heuristic:
        warnings.append(HEURISTIC_STRATUM)
    blocks = [datum.branches[j].pairing.scaled(profile.multiplicities[j]) for j in active]
    middle = LatticeMap.block_diagonal(blocks) if blocks \
        else LatticeMap.zero(Lattice(0), Lattice(0))
    phi_f = stratum.inclusion.transpose().compose(middle).compose(dual_stratum.inclusion)
    return ComposedPairing(profile, stratum, dual_stratum, phi_f, tuple(warnings))


def component_group(phi: LatticeMap) -> FinAb:
    """Component group of a nondegenerate pairing: coker(phi) = ker(phi ⊗ Q/Z)."""
    if phi.nrows != phi.ncols or not phi.is_injective():
        raise InputError("degenerate pairing")
    coker, free_rank = cokernel(phi)
    via_qz = torsion_kernel_qz(phi)
    if free_rank != 0 or via_qz.divisible_rank != 0 or coker != via_qz.torsion():
        raise FalsificationError(
            f"cokernel {coker} disagrees with Q/Z-kernel {via_qz} for an injective pairing")
    return coker


def psi_maps(datum: DegenDatum) -> list[LatticeMap]:
    """The closed-point comparison maps psi_i = sp_i^dual ∘ phi_i ∘ sp'_i : X' -> X^dual."""
    return [
        b.specialization.transpose().compose(b.pairing).compose(datum.dual_sp(i))
        for i, b in enumerate(datum.branches)
    ]


def closed_point_bound(datum: DegenDatum, l: int) -> FinAb:
    """Upper bound for the l-part of the closed-point component group.

    This is the l-part of the torsion of ker(stack(psi_1..psi_n) ⊗ Q/Z); it
    contains the true l-part, with equality when n <= 1.  The divisible rank
    of the kernel is reported alongside the torsion.
    """
    if not is_prime(l):
        raise InputError(f"l must be prime, got {l}")
    if l == datum.residue_char:
        raise InputError("prime equals residue characteristic")
    require_valid(datum)
    if datum.n == 0:
        return FinAb.trivial()
    stacked = LatticeMap.stack(psi_maps(datum))
    kernel = torsion_kernel_qz(stacked)
    bound = FinAb(l_part(kernel.torsion(), l).invariant_factors, kernel.divisible_rank)
    if datum.n == 1:
        exact = l_part(component_group(datum.branches[0].pairing), l)
        if bound.torsion() != exact or bound.divisible_rank != 0:
            raise FalsificationError(
                f"n=1 closed-point bound {bound} differs from component group l-part {exact}")
    return bound


def validate_pairing(phi: LatticeMap, lam: LatticeMap) -> str | None:
    """Check that phi∘lam is symmetric positive definite; None when it holds."""
    if not lam.is_injective():
        raise InputError("polarization must be injective")
    return pairing_violation(phi, lam)


def sub_datum(datum: DegenDatum, active: tuple[int, ...] | list[int]) -> DegenDatum:
    """Restriction of the datum to a branch subset, over the derived stratum."""
    require_valid(datum)
    active = tuple(sorted(set(active)))
    stratum = stratum_lattice(datum, active, dual=False)
    offsets = []
    pos = 0
    for j in active:
        offsets.append(pos)
        pos += datum.branches[j].lattice.rank
    def block(inc: LatticeMap, start: int, size: int) -> LatticeMap:
        rows = [list(inc.entries[start + k]) for k in range(size)]
        return LatticeMap.from_rows(rows, source_rank=inc.ncols, target_rank=size)

    branches = []
    for off, j in zip(offsets, active):
        b = datum.branches[j]
        branches.append(Branch(b.name, b.lattice, b.pairing,
                               block(stratum.inclusion, off, b.lattice.rank)))
    if datum.is_principal:
        return DegenDatum(
            name=f"{datum.name}|{','.join(datum.branches[j].name for j in active)}",
            abelian_rank=datum.abelian_rank,
            residue_char=datum.residue_char,
            closed_point=stratum.lattice,
            branches=tuple(branches),
        )
    dual_stratum = stratum_lattice(datum, active, dual=True)
    d_offsets = []
    pos = 0
    for j in active:
        d_offsets.append(pos)
        pos += datum.branches[j].dual_rank
    dual_sps = tuple(
        block(dual_stratum.inclusion, off, datum.branches[j].dual_rank)
        for off, j in zip(d_offsets, active))
    branch_pols = None
    if datum.branch_polarizations is not None:
        branch_pols = tuple(datum.branch_polarizations[j] for j in active)
    return DegenDatum(
        name=f"{datum.name}|{','.join(datum.branches[j].name for j in active)}",
        abelian_rank=datum.abelian_rank,
        residue_char=datum.residue_char,
        closed_point=stratum.lattice,
        branches=tuple(branches),
        dual_closed_point=dual_stratum.lattice,
        dual_specializations=dual_sps,
        branch_polarizations=branch_pols,
    )
