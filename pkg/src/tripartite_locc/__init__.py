"""Deterministic LOCC transformations of three-qubit GHZ-type and W-type states."""

__version__ = "0.1.0"

from .config import DEFAULT_TOLERANCES, Tolerances
from .entangle import (
    CanonicalCoefficients,
    ClassLabel,
    InvariantSet,
    ckw_tangle,
    classify,
    ep_phase,
    invariants_from_canonical,
    kempe_j5,
    lue_equivalent,
    lue_partner,
    mixed_concurrence,
    oracle_invariants,
    pair_concurrence,
    state_from_canonical,
)
from .exceptions import (
    DegenerateFamilyError,
    DegenerateStepError,
    InconsistentInvariantsError,
    InfeasibleTargetError,
    InvalidDensityMatrixError,
    InvalidInputError,
    InvalidTargetError,
    LoccError,
    MonotonicityError,
    UnsupportedClassError,
    WrongClassError,
)
from .ghz import (
    GhzTarget,
    ghz_feasible,
    ghz_plan,
    single_party_pair,
    single_party_plan,
    three_party_third_step,
    two_party_plan,
)
from .qcore import (
    LocalOperator,
    MeasurementPair,
    Party,
    apply_local,
    fidelity_up_to_phase,
    ghz_state,
    povm_complete,
    reduced_density,
    w_state,
)
from .runner import (
    ExecutionReport,
    LuCorrection,
    ProtocolPlan,
    ProtocolStep,
    SampledReport,
    execute_exhaustive,
    execute_sampled,
    verify_deterministic,
)
from .verdict import FeasibilityVerdict
from .wtype import WCoefficients, WStepRecord, w_canonical_flip, w_chain_plan, w_feasible, w_step_pair
