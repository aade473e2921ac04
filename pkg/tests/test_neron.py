"""Psi group, Kummer rescaling, Step-5 surjectivity, converse certificate."""

from __future__ import annotations

import random

import pytest

from degenkit.degeneration import Branch, DegenDatum
from degenkit.errors import InputError
from degenkit.generators import random_datum, random_profile, random_ta_datum
from degenkit.lattice import FinAb, Lattice, LatticeMap
from degenkit.monodromy import TraitProfile
from degenkit.neron import (
    converse_check,
    converse_inputs_from_datum,
    kummer_rescale,
    psi_fixed_points,
    psi_group,
    trait_surjectivity_check,
)

from oracles import enumerate_qz_kernel


def lm(rows, source=None, target=None):
    return LatticeMap.from_rows(rows, source_rank=source, target_rank=target)


def two_branch_ta(phi1, phi2):
    """TA datum on Z^2 with identity purity and the given 1x1 pairings."""
    return DegenDatum("split", 0, 0, Lattice(2), (
        Branch("D1", Lattice(1), lm([[phi1]]), lm([[1, 0]])),
        Branch("D2", Lattice(1), lm([[phi2]]), lm([[0, 1]])),
    ))


class TestPsiGroup:
    def test_direct_sum(self):
        result = psi_group(two_branch_ta(2, 3))
        assert result.branch_components == (FinAb((2,)), FinAb((3,)))
        assert result.group == FinAb((6,))
        assert result.order == 6

    def test_example_3_4_trivial(self, example_3_4):
        result = psi_group(example_3_4)
        assert result.group.is_trivial and result.order == 1

    def test_no_branches(self):
        result = psi_group(DegenDatum("empty", 0, 0, Lattice(0), ()))
        assert result.group.is_trivial and result.order == 1


class TestKummerRescale:
    def test_identity_multipliers(self, example_3_4):
        rescaled = kummer_rescale(example_3_4, (1, 1))
        assert rescaled.branches[0].pairing.entries == ((1,),)
        assert psi_group(rescaled).group == psi_group(example_3_4).group

    def test_scalar_case(self):
        datum = DegenDatum("one", 0, 0, Lattice(1),
                           (Branch("D1", Lattice(1), lm([[1]]), lm([[1]])),))
        rescaled = kummer_rescale(datum, (4,))
        assert rescaled.branches[0].pairing.entries == ((4,),)
        assert psi_group(rescaled).branch_components == (FinAb((4,)),)

    def test_example_3_4_rescaled_2_3(self, example_3_4):
        rescaled = kummer_rescale(example_3_4, (2, 3))
        assert psi_group(rescaled).group == FinAb((6,))

    def test_rejects_wild_multiplier(self, example_3_4):
        datum = DegenDatum("p3", 0, 3, example_3_4.closed_point, example_3_4.branches)
        with pytest.raises(InputError, match="coprime"):
            kummer_rescale(datum, (3, 1))

    def test_rejects_nonpositive(self, example_3_4):
        with pytest.raises(InputError, match="positive"):
            kummer_rescale(example_3_4, (0, 1))


class TestPsiFixedPoints:
    def test_trivial_multipliers(self):
        datum = two_branch_ta(2, 3)
        result = psi_fixed_points(datum, (1, 1))
        assert result.rescaled == result.fixed == result.psi
        assert result.equals_psi

    def test_kernel_of_two_inside_six(self):
        # phi = (2), m = 3: the 6-torsion kernel of Q/Z against the 2-torsion
        assert enumerate_qz_kernel([[6]], 6) == [6]
        assert enumerate_qz_kernel([[2]], 6) == [2]
        datum = DegenDatum("one", 0, 0, Lattice(1),
                           (Branch("D1", Lattice(1), lm([[2]]), lm([[1]])),))
        result = psi_fixed_points(datum, (3,))
        assert result.rescaled == FinAb((6,))
        assert result.fixed == FinAb((2,)) == result.psi
        assert result.equals_psi

    def test_unit_pairing_rescaled_by_five(self):
        datum = DegenDatum("one", 0, 0, Lattice(1),
                           (Branch("D1", Lattice(1), lm([[1]]), lm([[1]])),))
        result = psi_fixed_points(datum, (5,))
        assert result.rescaled == FinAb((5,))
        assert result.fixed.is_trivial and result.equals_psi

    def test_randomized_lemma(self):
        rng = random.Random(61)
        for _ in range(60):
            p = rng.choice([0, 0, 0, 5, 7])
            datum = random_datum(rng, max_mu=3, max_n=3, min_n=1, residue_char=p)
            ms = []
            for _ in range(datum.n):
                m = rng.randint(1, 8)
                while p and m % p == 0:
                    m = rng.randint(1, 8)
                ms.append(m)
            assert psi_fixed_points(datum, ms).equals_psi


class TestTraitSurjectivity:
    def test_split_datum_full_profile(self):
        result = trait_surjectivity_check(two_branch_ta(2, 3), TraitProfile((1, 1)))
        assert result.upsilon == FinAb((6,))
        assert result.psi_active == FinAb((6,))
        assert result.surjective

    def test_split_datum_drops_factor(self):
        result = trait_surjectivity_check(two_branch_ta(2, 3), TraitProfile((1, 0)))
        assert result.upsilon == FinAb((2,))
        assert result.psi_active == FinAb((2,))
        assert result.surjective

    def test_single_branch_identity(self):
        datum = DegenDatum("one", 0, 0, Lattice(2), (
            Branch("D1", Lattice(2), lm([[2, 0], [0, 2]]), LatticeMap.identity(2)),))
        result = trait_surjectivity_check(datum, TraitProfile((1,)))
        assert result.upsilon == result.psi_active == FinAb((2, 2))
        assert result.surjective

    def test_rejects_non_ta(self, example_3_4):
        with pytest.raises(InputError, match="toric additivity"):
            trait_surjectivity_check(example_3_4, TraitProfile((1, 1)))

    def test_rejects_non_transversal(self):
        with pytest.raises(InputError, match="transversal"):
            trait_surjectivity_check(two_branch_ta(2, 3), TraitProfile((2, 1)))

    def test_randomized_surjectivity_and_divisibility(self):
        rng = random.Random(71)
        for _ in range(50):
            datum = random_ta_datum(rng, max_mu=4, max_n=3, min_n=1)
            profile = TraitProfile(tuple(
                random_profile(rng, datum.n, transversal=True, allow_zero=True)))
            result = trait_surjectivity_check(datum, profile)
            assert result.surjective
            if result.upsilon.invariant_factors:
                assert result.psi_active.order % result.upsilon.order == 0


class TestConverseCheck:
    def test_identity_split(self):
        cert = converse_check(lm([[1, 0]], target=1), lm([[0, 1]], target=1),
                              lm([[1]]), lm([[1]]))
        assert cert.verdict == "TA-certified"
        assert cert.chi1.entries == ((1, 0), (0, 0))
        assert cert.chi2.entries == ((0, 0), (0, 1))
        assert cert.idempotent and cert.kernel_decomposition and cert.a_is_isomorphism

    def test_example_3_4_fails_hypothesis(self):
        cert = converse_check(lm([[2, 1]], target=1), lm([[0, 1]], target=1),
                              lm([[1]]), lm([[1]]))
        assert cert.verdict == "hypothesis-failed"
        assert cert.coker_at_psi == FinAb((2,))
        assert cert.coker_at_psi_a == FinAb((2, 2))

    def test_sum_difference_split_fails(self):
        cert = converse_check(lm([[1, 1]], target=1), lm([[1, -1]], target=1),
                              lm([[1]]), lm([[1]]))
        assert cert.verdict == "hypothesis-failed"
        assert cert.coker_at_psi == FinAb((2,))
        assert cert.coker_at_psi_a == FinAb((2, 2))

    def test_rejects_non_surjective(self):
        with pytest.raises(InputError, match="surjective"):
            converse_check(lm([[2, 0]], target=1), lm([[0, 1]], target=1),
                           lm([[1]]), lm([[1]]))

    def test_rejects_non_spd(self):
        with pytest.raises(InputError, match="positive definite"):
            converse_check(lm([[1, 0]], target=1), lm([[0, 1]], target=1),
                           lm([[-1]]), lm([[1]]))

    def test_random_ta_data_certify(self):
        rng = random.Random(83)
        for _ in range(50):
            datum = random_ta_datum(rng, max_mu=4, max_n=3, min_n=1)
            p_map, q_map, psi1, psi2 = converse_inputs_from_datum(datum)
            cert = converse_check(p_map, q_map, psi1, psi2)
            assert cert.verdict == "TA-certified"
            assert cert.idempotent and cert.kernel_decomposition
            assert cert.p_restricted_iso and cert.a_is_isomorphism

    def test_datum_split_matches_example_3_4(self, example_3_4):
        p_map, q_map, psi1, psi2 = converse_inputs_from_datum(example_3_4)
        assert p_map.entries == ((2, 1),)
        assert q_map.entries == ((0, 1),)
        assert psi1.entries == ((1,),)
        assert psi2.entries == ((1,),)
        assert converse_check(p_map, q_map, psi1, psi2).verdict == "hypothesis-failed"
