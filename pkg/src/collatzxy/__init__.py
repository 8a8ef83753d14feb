"""Collatz parity decomposition, exact convergence quantities and claim verification."""

from .claims import Claim, ClaimResult, check_claim, group_by_xy, list_claims
from .errors import (
    BudgetExceeded,
    CheckpointLocked,
    CollatzError,
    ConfigMismatch,
    CorruptCheckpoint,
    UnknownClaim,
)
from .exact import (
    ExactWitness,
    canonical_decomposition,
    epsilon,
    epsilon_n,
    exact_witness,
    f_xy,
    fractional_part,
    recover_n,
    z_value,
)
from .sweep import SweepConfig, SweepSummary, resume, sweep_range
from .trajectory import DEFAULT_BUDGET, TrajectoryRecord, collatz_step, compute_trajectory

__version__ = "0.1.0"
