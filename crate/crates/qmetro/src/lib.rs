//! Optimal probe states for lossy interferometric phase estimation.
//!
//! `qmetro` searches for N-probe input states that minimize the phase
//! estimation uncertainty of a lossy interferometer, working in the class of
//! diagonal symmetric matrix product states (2D complex parameters) and
//! validating against direct optimization over all N+1 Dicke amplitudes and
//! an exact quantum-Fisher-information oracle.

pub mod loss;
pub mod mps;
pub mod optimize;
pub mod qfi;
pub mod ramsey;
pub mod sweep;
pub mod symstate;
pub mod validate;
mod util;

pub use loss::{LossBranch, LossChannel, LossError};
pub use mps::{canonical_form, mps_amplitudes, DiagonalMps, MpsError};
pub use optimize::{
    minimal_bond_dimension, optimize_direct, optimize_mps, BestParams, Gauge, MinBondDimReport,
    ObjectiveKind, ObjectiveSpec, OptimizationResult, OptimizeError, OptimizerOptions,
};
pub use qfi::{
    approx_qfi, exact_qfi, precision_from_qfi, pure_qfi, QfiError, QfiKind, QfiValue,
};
pub use ramsey::{collective_moments, ramsey_precision, CollectiveMoments, RamseyError};
pub use sweep::{parse_config, run_sweep, serialize_config, SweepRecord, SweepSpec};
pub use symstate::{
    log_binomial, noon_state, normalize, product_state, ProductGauge, StateError, SymmetricState,
};
pub use validate::{run_validation, ValidationReport};
