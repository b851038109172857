//! Complex-coefficient operator splitting for `exp(i z (A_1 + … + A_n))`:
//! scheme construction, propagation, stability thresholds and model systems.

pub mod error;
pub mod fit;
pub mod models;
pub mod numkernel;
pub mod propagate;
pub mod schemes;
pub mod stability;

pub use error::{Error, Result};
pub use fit::{linear_fit, log_log_fit, median, LineFit, ERROR_FLOOR};
pub use models::{
    gamma_curve, gue_pair, gue_terms, ising_terms, pauli_terms, q_closed_form, q_direct, q_threshold,
    small_z_quadratic, Boundary, Completion, GammaPoint, GueSpec, IsingSpec, ModelSpec, PauliConfig, QSource,
};
pub use numkernel::{
    eigenvalues_general, expm_i, frob_distance, kron, random_state, ComplexMatrix, HermitianEigen, HermitianMatrix,
    StateVector, C64,
};
pub use propagate::{
    apply_step, build_step_operator, evolve, renormalized_fidelity, step_error, ErrorMetric, PropagationReport,
    Strategy, Term, TermSet,
};
pub use schemes::{
    baseline_scheme, c3_coefficients, c3_scheme, conjugate_scheme, empirical_order, k4_operator,
    k4_operator_as_printed, Baseline, OrderFit, PolicyKind, SchemeVariant, SplitScheme, Stage, StepPolicy,
};
pub use stability::{
    default_z_hint, find_zmax, radius_curve, scaling_fit, spectral_radius, ScalingFit, StabilityCurve,
    ThresholdResult,
};
