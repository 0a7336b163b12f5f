"""Sequence-space norms built from families of partition/weight pairs.

Each pair contributes an l_p sum over its blocks of weighted l_2 block
norms; the space norm is the supremum over the family, and the always
present trivial pair (discrete partition, weight 1) supplies the lower
l_p estimate.  The package evaluates these norms, classifies the
resulting spaces up to isomorphism by symbolic rules, and numerically
certifies every inequality those rules rest on.
"""

from .classify import (
    ClassificationEvidence,
    IsomorphismClass,
    classify,
    classify_admissible,
    classify_block,
    classify_nested,
    classify_one_regular,
    reduce_by_refinement,
    simplify_sum,
)
from .errors import (
    AddressOutOfRange,
    DimensionTooLarge,
    HypothesisNotMet,
    IncomparableLayout,
    NotARefinement,
    NotSimplifiable,
    PwError,
    RatioAssumptionViolated,
    SpecValidationError,
    UnsupportedFamily,
)
from .norms import (
    NormBreakdown,
    block_ratio,
    critical_exponent,
    fine_block_ratio,
    holder_majorant,
    pair_norm,
    pair_norm_pth_power_exact,
    refinement_majorant,
    space_norm,
)
from .partitions import ContainmentMap, PartitionScheme, RefinesResult, refines
from .rationals import INFINITE
from .spaces import (
    AdmissibleResult,
    BlockWeights,
    PartitionWeightPair,
    SparseVector,
    SpaceSpec,
    is_admissible,
)
from .verify import (
    RatioScan,
    VerificationReport,
    check_inequality,
    ratio_scan,
    sample_vectors,
    sphere_oracle,
)
from .weights import (
    BoundResult,
    RatioSup,
    SumResult,
    WeightFamily,
    ratio_supremum,
    tail_power_sum_converges,
    weight_at,
    weight_infimum,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
