"""Degeneration data and the three toric-additivity verdicts.

A ``DegenDatum`` is the strictly local picture of a semiabelian degeneration:
the character lattice X of the maximal torus at the closed point, one branch
record per boundary divisor (branch lattice X_i, monodromy pairing
phi_i : X'_i -> X_i^dual, specialization sp_i : X -> X_i), and optionally an
explicit dual side (X', sp'_i) plus polarization maps.  When the dual side is
omitted the datum is taken principally polarized: X' = X, sp' = sp, and every
pairing must be symmetric positive definite.

The stacked specializations form the purity matrix X -> ⊕X_i.  Toric
additivity asks that it be an isomorphism; the l-adic variant asks that no
invariant factor be divisible by l; the weak variant only compares ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import intmat
from .errors import InputError
from .lattice import (
    FinAb,
    Lattice,
    LatticeMap,
    is_prime,
    smith_normal_form,
)


@dataclass(frozen=True)
class Branch:
    """One boundary-divisor branch: lattice X_i, pairing, specialization."""

    name: str
    lattice: Lattice                # X_i
    pairing: LatticeMap             # phi_i : X'_i -> X_i^dual
    specialization: LatticeMap      # sp_i : X -> X_i

    def __post_init__(self) -> None:
        if self.pairing.target.rank != self.lattice.rank:
            raise InputError(
                f"branch '{self.name}': pairing has {self.pairing.target.rank} rows, "
                f"branch rank is {self.lattice.rank}")
        if self.specialization.target.rank != self.lattice.rank:
            raise InputError(
                f"branch '{self.name}': specialization targets rank "
                f"{self.specialization.target.rank}, branch rank is {self.lattice.rank}")

    @property
    def dual_rank(self) -> int:
        return self.pairing.source.rank


@dataclass(frozen=True)
class StratumOverride:
    """User-supplied stratum lattice for a branch subset, as an inclusion basis."""

    branches: tuple[int, ...]             # 0-based, strictly increasing
    inclusion: LatticeMap                 # Y -> ⊕_{j in J} X_j
    dual_inclusion: LatticeMap | None = None


@dataclass(frozen=True)
class DegenDatum:
    name: str
    abelian_rank: int
    residue_char: int
    closed_point: Lattice                                   # X
    branches: tuple[Branch, ...]
    dual_closed_point: Lattice | None = None                # X'
    dual_specializations: tuple[LatticeMap, ...] | None = None  # sp'_i : X' -> X'_i
    polarization: LatticeMap | None = None                  # lambda : X -> X'
    branch_polarizations: tuple[LatticeMap, ...] | None = None  # lambda_i : X_i -> X'_i
    strata: tuple[StratumOverride, ...] = ()

    def __post_init__(self) -> None:
        if self.abelian_rank < 0:
            raise InputError("abelian rank must be non-negative")
        if self.residue_char < 0:
            raise InputError("residue characteristic must be 0 or a prime")
        for b in self.branches:
            if b.specialization.source.rank != self.closed_point.rank:
                raise InputError(
                    f"branch '{b.name}': specialization source rank "
                    f"{b.specialization.source.rank} != closed-point rank {self.closed_point.rank}")
        if (self.dual_closed_point is None) != (self.dual_specializations is None):
            raise InputError("dual side needs both its lattice and its specializations")
        if self.dual_specializations is not None:
            if len(self.dual_specializations) != self.n:
                raise InputError("one dual specialization per branch required")
            for b, sp in zip(self.branches, self.dual_specializations):
                if sp.source.rank != self.dual_closed_point.rank:
                    raise InputError(
                        f"branch '{b.name}': dual specialization source rank mismatch")
                if sp.target.rank != b.dual_rank:
                    raise InputError(
                        f"branch '{b.name}': dual specialization targets rank "
                        f"{sp.target.rank}, pairing source rank is {b.dual_rank}")
        else:
            for b in self.branches:
                if b.dual_rank != b.lattice.rank:
                    raise InputError(
                        f"branch '{b.name}': non-square pairing needs an explicit dual side")
        if self.polarization is not None:
            if self.polarization.source.rank != self.closed_point.rank or \
                    self.polarization.target.rank != self.dual_closed.rank:
                raise InputError("polarization must map X to X'")
        if self.branch_polarizations is not None:
            if len(self.branch_polarizations) != self.n:
                raise InputError("one branch polarization per branch required")
            for b, lam in zip(self.branches, self.branch_polarizations):
                if lam.source.rank != b.lattice.rank or lam.target.rank != b.dual_rank:
                    raise InputError(f"branch '{b.name}': polarization must map X_i to X'_i")
        seen: set[tuple[int, ...]] = set()
        for ov in self.strata:
            if ov.branches != tuple(sorted(set(ov.branches))):
                raise InputError("stratum override branches must be strictly increasing")
            if any(j < 0 or j >= self.n for j in ov.branches):
                raise InputError("stratum override names a missing branch")
            if ov.branches in seen:
                raise InputError("duplicate stratum override")
            seen.add(ov.branches)

    # -- conveniences ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.branches)

    @property
    def mu(self) -> int:
        return self.closed_point.rank

    @property
    def branch_mus(self) -> tuple[int, ...]:
        return tuple(b.lattice.rank for b in self.branches)

    @property
    def is_principal(self) -> bool:
        return self.dual_closed_point is None

    @property
    def dual_closed(self) -> Lattice:
        return self.dual_closed_point if self.dual_closed_point is not None else self.closed_point

    def dual_sp(self, i: int) -> LatticeMap:
        if self.dual_specializations is not None:
            return self.dual_specializations[i]
        return self.branches[i].specialization

    def closed_polarization(self) -> LatticeMap | None:
        if self.polarization is not None:
            return self.polarization
        if self.is_principal:
            return LatticeMap.identity(self.mu)
        return None

    def branch_polarization(self, i: int) -> LatticeMap | None:
        if self.branch_polarizations is not None:
            return self.branch_polarizations[i]
        if self.is_principal:
            return LatticeMap.identity(self.branches[i].lattice.rank)
        return None

    def stratum_override(self, active: tuple[int, ...]) -> StratumOverride | None:
        for ov in self.strata:
            if ov.branches == active:
                return ov
        return None


@dataclass(frozen=True)
class Violation:
    invariant: str
    branch: int | None = None   # 0-based branch index, None for datum-level
    detail: str = ""

    def __str__(self) -> str:
        where = f" [branch {self.branch + 1}]" if self.branch is not None else ""
        tail = f": {self.detail}" if self.detail else ""
        return f"{self.invariant}{where}{tail}"


@dataclass(frozen=True)
class Verdict:
    toric_additive: bool
    weakly_toric_additive: bool
    failing_primes: tuple[int, ...]       # primes l != p dividing a purity invariant factor
    purity_torsion: FinAb
    purity_free_rank: int


def pairing_violation(phi: LatticeMap, lam: LatticeMap) -> str | None:
    """Check that phi∘lam is symmetric positive definite; None when it is.

    Positivity is decided by exact leading principal minors, no floats.
    """
    if phi.source.rank != lam.target.rank:
        return "polarization target does not match pairing source"
    m = phi.compose(lam)
    if m.nrows != m.ncols:
        return "composed pairing is not square"
    rows = m.rows()
    n = m.nrows
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                return "not symmetric"
    minors = intmat.leading_principal_minors(rows, n)
    if any(d <= 0 for d in minors):
        return "not positive definite"
    return None


def purity_matrix(datum: DegenDatum) -> LatticeMap:
    """Stack of sp_1 ... sp_n: the purity map X -> ⊕X_i."""
    maps = [b.specialization for b in datum.branches]
    if not maps:
        return LatticeMap.zero(datum.closed_point, Lattice(0))
    return LatticeMap.stack(maps)


def dual_purity_matrix(datum: DegenDatum) -> LatticeMap:
    maps = [datum.dual_sp(i) for i in range(datum.n)]
    if not maps:
        return LatticeMap.zero(datum.dual_closed, Lattice(0))
    return LatticeMap.stack(maps)


def validate(datum: DegenDatum) -> list[Violation]:
    """Check every semantic invariant; returns violations instead of raising."""
    out: list[Violation] = []
    p = datum.residue_char
    if p != 0 and not is_prime(p):
        out.append(Violation("residue characteristic not 0 or prime", detail=str(p)))
    for i, b in enumerate(datum.branches):
        if not b.specialization.is_surjective():
            out.append(Violation("specialization not surjective", i))
        if datum.dual_specializations is not None and not datum.dual_sp(i).is_surjective():
            out.append(Violation("dual specialization not surjective", i))
        if b.dual_rank != b.lattice.rank:
            out.append(Violation("branch dual rank mismatch", i,
                                 f"rank X'_i = {b.dual_rank}, rank X_i = {b.lattice.rank}"))
        if not b.pairing.is_injective():
            out.append(Violation("pairing not injective", i))
        lam = datum.branch_polarization(i)
        if lam is not None:
            if not lam.is_injective():
                out.append(Violation("polarization not injective", i))
            else:
                reason = pairing_violation(b.pairing, lam)
                if reason is not None:
                    out.append(Violation(f"pairing {reason}", i))
    if datum.dual_closed.rank != datum.mu:
        out.append(Violation("dual rank mismatch",
                             detail=f"rank X' = {datum.dual_closed.rank}, rank X = {datum.mu}"))
    if not purity_matrix(datum).is_injective():
        out.append(Violation("purity map not injective"))
    if datum.dual_specializations is not None and not dual_purity_matrix(datum).is_injective():
        out.append(Violation("dual purity map not injective"))
    if datum.mu > sum(datum.branch_mus):
        out.append(Violation("toric rank inequality violated",
                             detail=f"mu = {datum.mu} > sum mu_i = {sum(datum.branch_mus)}"))
    lam0 = datum.closed_polarization()
    if lam0 is not None and datum.polarization is not None:
        if not lam0.is_injective():
            out.append(Violation("polarization not injective"))
    if lam0 is not None:
        for i in range(datum.n):
            lam_i = datum.branch_polarization(i)
            if lam_i is None:
                continue
            # sp'_i ∘ lambda must agree with lambda_i ∘ sp_i for the dual
            # verdicts to transport (the purity squares must commute)
            left = datum.dual_sp(i).compose(lam0)
            right = lam_i.compose(datum.branches[i].specialization)
            if left.entries != right.entries:
                out.append(Violation("polarization incompatible with specializations", i))
    for ov in datum.strata:
        out.extend(_override_violations(datum, ov))
    return out


def _override_violations(datum: DegenDatum, ov: StratumOverride) -> list[Violation]:
    out: list[Violation] = []
    amb = sum(datum.branches[j].lattice.rank for j in ov.branches)
    if ov.inclusion.target.rank != amb:
        out.append(Violation("stratum override invalid",
                             detail=f"inclusion targets rank {ov.inclusion.target.rank}, "
                                    f"ambient rank is {amb}"))
        return out
    if not ov.inclusion.is_injective():
        out.append(Violation("stratum override invalid", detail="inclusion not injective"))
        return out
    rows = [list(datum.branches[j].specialization.entries[k])
            for j in ov.branches for k in range(datum.branches[j].lattice.rank)]
    restricted = LatticeMap.from_rows(rows, source_rank=datum.mu, target_rank=amb)
    sol = intmat.integral_solve(ov.inclusion.rows(), amb, ov.inclusion.ncols,
                                restricted.rows(), datum.mu)
    if sol is None:
        out.append(Violation("stratum override invalid",
                             detail="restricted purity does not factor through the override"))
    elif ov.inclusion.ncols != restricted.rank_of_image():
        out.append(Violation("stratum override invalid",
                             detail="override rank differs from restricted purity rank"))
    if ov.dual_inclusion is not None:
        damb = sum(datum.branches[j].dual_rank for j in ov.branches)
        if ov.dual_inclusion.target.rank != damb or not ov.dual_inclusion.is_injective():
            out.append(Violation("stratum override invalid", detail="bad dual inclusion"))
    return out


def require_valid(datum: DegenDatum) -> None:
    violations = validate(datum)
    if violations:
        raise InputError("invalid degeneration datum: "
                         + "; ".join(str(v) for v in violations))


def analyze(datum: DegenDatum) -> Verdict:
    """All three toric-additivity verdicts from one purity SNF."""
    require_valid(datum)
    pur = purity_matrix(datum)
    facs = smith_normal_form(pur).invariant_factors
    torsion = FinAb(tuple(d for d in facs if d > 1))
    free_rank = pur.nrows - len(facs)
    weakly = free_rank == 0
    ta = weakly and torsion.is_trivial
    failing = tuple(q for q in torsion.primes() if q != datum.residue_char)
    return Verdict(ta, weakly, failing, torsion, free_rank)


def is_l_toric_additive(datum: DegenDatum, l: int) -> bool:
    """Verdict for one prime l != p: purity square and l-torsion-free."""
    if not is_prime(l):
        raise InputError(f"l must be prime, got {l}")
    if l == datum.residue_char:
        raise InputError("prime equals residue characteristic")
    require_valid(datum)
    pur = purity_matrix(datum)
    if pur.nrows != pur.ncols:
        return False
    facs = smith_normal_form(pur).invariant_factors
    if len(facs) < pur.ncols:
        return False
    return all(d % l for d in facs)


def toric_rank_profile(datum: DegenDatum) -> tuple[int, tuple[int, ...], int]:
    """(mu, (mu_1..mu_n), deficit); deficit = 0 iff weakly toric additive."""
    require_valid(datum)
    mus = datum.branch_mus
    return datum.mu, mus, sum(mus) - datum.mu


def dual_datum(datum: DegenDatum) -> DegenDatum:
    """Swap the primal and dual sides; pairings are transposed.

    The principal default always supplies an identity polarization, so the
    precondition (dual data or polarization present) holds for every datum
    this package can represent.  For a non-unimodular polarization the dual
    polarization is e·lambda^{-1} with one common multiplier e, keeping the
    swapped datum's polarization squares commutative.
    """
    require_valid(datum)
    if datum.is_principal and datum.polarization is None and datum.branch_polarizations is None:
        # X' = X, sp' = sp, phi symmetric: the swap only transposes pairings
        branches = tuple(
            Branch(b.name, b.lattice, b.pairing.transpose(), b.specialization)
            for b in datum.branches)
        return DegenDatum(datum.name, datum.abelian_rank, datum.residue_char,
                          datum.closed_point, branches, strata=_swapped_strata(datum))
    branches = tuple(
        Branch(b.name, Lattice(b.dual_rank), b.pairing.transpose(), datum.dual_sp(i))
        for i, b in enumerate(datum.branches))
    new_dual_sps = tuple(b.specialization for b in datum.branches)
    lam0 = datum.closed_polarization()
    new_pol = None
    new_branch_pols = None
    if lam0 is not None:
        lams = [lam0] + [datum.branch_polarization(i) for i in range(datum.n)]
        if any(l is None for l in lams):
            raise InputError("dual datum needs polarizations on every branch or none")
        inverses = [_rational_inverse(l) for l in lams]
        e = lcm(*[d for inv in inverses for row in inv for d in [row_den(row)]]) \
            if inverses else 1
        scaled = [_scale_to_integer(inv, e) for inv in inverses]
        new_pol = LatticeMap.from_rows(scaled[0], source_rank=datum.dual_closed.rank)
        new_branch_pols = tuple(
            LatticeMap.from_rows(scaled[i + 1], source_rank=datum.branches[i].dual_rank)
            for i in range(datum.n))
    return DegenDatum(
        name=datum.name,
        abelian_rank=datum.abelian_rank,
        residue_char=datum.residue_char,
        closed_point=datum.dual_closed,
        branches=branches,
        dual_closed_point=datum.closed_point,
        dual_specializations=new_dual_sps,
        polarization=new_pol,
        branch_polarizations=new_branch_pols,
        strata=_swapped_strata(datum),
    )


def _swapped_strata(datum: DegenDatum) -> tuple[StratumOverride, ...]:
    out = []
    for ov in datum.strata:
        if datum.is_principal and ov.dual_inclusion is None:
            out.append(ov)
        elif ov.dual_inclusion is not None:
            out.append(StratumOverride(ov.branches, ov.dual_inclusion, ov.inclusion))
        else:
            raise InputError("stratum override lacks a dual inclusion; cannot dualize")
    return tuple(out)


def row_den(row: list[Fraction]) -> int:
    return lcm(*[f.denominator for f in row]) if row else 1


def _rational_inverse(m: LatticeMap) -> list[list[Fraction]]:
    if m.nrows != m.ncols:
        raise InputError("polarization must be square to invert")
    n = m.nrows
    return intmat.solve_rational(m.rows(), n, intmat.identity(n), n)


def _scale_to_integer(frac_rows: list[list[Fraction]], e: int) -> list[list[int]]:
    out = []
    for row in frac_rows:
        new_row = []
        for f in row:
            v = f * e
            if v.denominator != 1:
                raise InputError("polarization inverse did not clear at the common multiplier")
            new_row.append(int(v))
        out.append(new_row)
    return out
