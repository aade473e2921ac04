"""degenkit: exact integer-lattice analysis of semiabelian degenerations."""

from .curves import CurveReport, DualGraph, GraphEdge, GraphVertex, curve_equivalences, graph_to_datum
from .degeneration import (
    Branch,
    DegenDatum,
    StratumOverride,
    Verdict,
    Violation,
    analyze,
    dual_datum,
    is_l_toric_additive,
    purity_matrix,
    toric_rank_profile,
    validate,
)
from .errors import DegenkitError, FalsificationError, InputError
from .galois import (
    GaloisRep,
    build_rep,
    closed_point_torsion,
    decomposition_check,
    star_condition,
    torsion_phi_group,
)
from .lattice import (
    FinAb,
    Lattice,
    LatticeMap,
    SNFDecomposition,
    cokernel,
    kernel_saturated,
    l_part,
    lattice_sum,
    smith_normal_form,
    torsion_kernel_qz,
)
from .monodromy import (
    ComposedPairing,
    StratumData,
    TraitProfile,
    closed_point_bound,
    component_group,
    compose_trait,
    stratum_lattice,
    sub_datum,
    validate_pairing,
)
from .neron import (
    ConverseCertificate,
    PsiFixedPoints,
    PsiGroup,
    TraitSurjectivity,
    converse_check,
    converse_inputs_from_datum,
    kummer_rescale,
    psi_fixed_points,
    psi_group,
    trait_surjectivity_check,
)

__version__ = "0.1.0"
