//! Structural toolkit for two-sided heat-kernel estimates of non-local
//! Schrödinger operators `H = -L + V`.
//!
//! The crate is organized bottom-up:
//!
//! * [`quad`]: adaptive Gauss–Kronrod integration and shell-doubling
//!   convergence studies used by every integral below.
//! * [`profiles`]: the jump profile `f`, the potential profile `g` and the
//!   link function `h` tying them together.
//! * [`conditions`]: numerical checks of the growth, monotonicity and
//!   direct-jump conditions, and the constants pack feeding every bound.
//! * [`thresholds`]: regime classification and the threshold function
//!   `Λ(r) = |log f(r)| / h(|log f(r)|)` with its generalized inverse.
//! * [`bounds`]: the envelope integrals `F`, `G`, `H` and the two-sided
//!   envelopes built from them.
//! * [`free_process`]: the Lévy symbol `ψ`, transition densities by
//!   Fourier inversion and density-side condition checks.

pub mod bounds;
pub mod conditions;
pub mod error;
pub mod free_process;
pub mod profiles;
pub mod quad;
pub mod thresholds;

pub use error::{Error, Result};
