//! Block-sparse recovery over fusion frames.
//!
//! A fusion frame models a signal as a sum of components living in a fixed
//! collection of subspaces of `R^M`. When only a few subspaces carry energy,
//! the signal can be recovered from a small number of aggregated linear
//! measurements by minimizing a mixed group norm. This crate provides:
//!
//! - frame construction and analytics ([`frame`]),
//! - the block signal model and synthesis map ([`signal`]),
//! - sampling operators and their lifted forms ([`measurement`]),
//! - the convex recovery programs and an exhaustive oracle ([`solver`]),
//! - recovery certificates: coherence bounds, restricted isometry constants,
//!   null-space checks, dual certificates and an average-case failure bound
//!   ([`guarantees`]),
//! - a reproducible Monte Carlo experiment harness ([`experiment`]) with
//!   file formats ([`io`]) and a command-line front end ([`cli`]).
//!
//! The `examples/` directory has one runnable example per capability; start
//! with `recover_block_sparse`.

// Validation uses `!(x > 0.0)` so NaN fails the check along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod frame;
pub mod guarantees;
pub mod io;
pub mod measurement;
pub mod signal;
pub mod solver;

mod linalg;
pub mod rng;

pub use error::{Error, Result};
pub use experiment::{
    compare_bound_vs_empirical, run_lemma_battery, run_phase_diagram, wilson_interval,
    BoundComparison, CellSummary, ExperimentConfig, FrameSource, LemmaBatteryConfig,
    LemmaBatteryReport, MatrixSource, PhaseDiagram, SupportSource, TrialRecord,
};
pub use frame::{random_subspace, FusionFrame, SubspaceBasis};
pub use guarantees::{
    classical_rip_constant, coherence_recovery_bound, dual_certificate_check, frip_constant,
    frip_recovery_checks, nsp_sampled_check, recovery_failure_bound, rip_dominates_frip,
    verify_concentration_bounds, CertificateResult, CoherenceBound, ConcentrationReport,
    FailureBound, FripChecks, FripResult, NspCheck, TailCheck,
};
pub use measurement::{
    alpha_of_support, build_block_operator, coherence, fusion_coherence, measure,
    random_measurement_matrix, union_of_orthobases, BlockOperator, BlockOperatorKind,
    MeasurementMatrix,
};
pub use signal::{
    mixed_norm, random_gaussian_signal, sgn_rows, synthesize, unvectorize_rows, vectorize_rows,
    BlockCoefficients, SignalMatrix, SupportSet,
};
pub use solver::{
    recovered, solve_p0_bruteforce, solve_p1, solve_p1_noisy, BruteForceReport, SolveReport,
    SolveStatus, SolverOptions,
};
pub mod cli;
