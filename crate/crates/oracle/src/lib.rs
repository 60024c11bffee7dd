//! Independent ground truth for the envelope estimates: a finite-box
//! discretization of `H = -L + V` in one dimension, its eigendecomposition
//! and heat kernel, verification reports against profile shapes and
//! envelopes, and a Monte Carlo Feynman-Kac estimator.

pub mod discretization;
pub mod error;
pub mod feynman_kac;
pub mod spectrum;
pub mod verify;

pub use discretization::{build_matrix, Discretization, Operator, SmallJumpPolicy};
pub use error::{OracleError, Result};
pub use feynman_kac::{convergence_study, simulate_ut1, McEstimate, PathConfig};
pub use spectrum::{eigensolve, Spectrum};
pub use verify::{spectral_functions, verify_envelope, verify_eig_profile, VerificationReport};
