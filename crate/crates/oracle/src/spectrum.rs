//! Eigendecomposition of the discretized operator and the heat kernel
//! built from it.

use faer::Side;
use serde::{Deserialize, Serialize};

use crate::discretization::{Discretization, Operator};
use crate::{OracleError, Result};

/// Largest matrix decomposed with all eigenpairs retained.
pub const DENSE_LIMIT: usize = 4096;
/// Eigenpairs retained above [`DENSE_LIMIT`].
pub const PARTIAL_MODES: usize = 256;
/// Modes with `e^{-(λ_k - λ₀) t}` below this are dropped from kernel sums.
pub const KERNEL_CUTOFF: f64 = 1e-14;

/// Ascending eigenvalues and `Δ`-orthonormal eigenfunctions, stored
/// column-major: `phi[k * n + i] = φ_k(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub disc: Discretization,
    pub nodes: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    phi: Vec<f64>,
    /// `Σ_i φ_k(x_i) Δ`.
    masses: Vec<f64>,
    pub ground_state_positive: bool,
}

/// Decompose the operator, normalize `Σ φ_k² Δ = 1` and fix the sign of
/// `φ₀` so that it is positive.
pub fn eigensolve(op: &Operator) -> Result<Spectrum> {
    let n = op.nodes.len();
    let h = op.disc.spacing();
    let evd = op
        .matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| OracleError::Eigen(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let modes = if n > DENSE_LIMIT { PARTIAL_MODES } else { n };

    let scale = 1.0 / h.sqrt();
    let mut eigenvalues = Vec::with_capacity(modes);
    let mut phi = Vec::with_capacity(modes * n);
    for k in 0..modes {
        eigenvalues.push(s[k]);
        let col = u.col(k);
        let sign = if k == 0 && col.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        phi.extend(col.iter().map(|v| sign * scale * v));
    }
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(OracleError::Eigen("non-finite eigenvalue".into()));
    }

    let ground = &phi[..n];
    let peak = ground.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let negative = ground.iter().filter(|v| **v <= 0.0).count();
    // Entries at rounding level relative to the peak carry no sign.
    let wrong = ground.iter().filter(|v| **v < -1e-10 * peak).count();
    if wrong > 0 {
        return Err(OracleError::GroundState {
            negative: wrong,
            points: n,
            min: ground.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }

    let masses = (0..modes).map(|k| phi[k * n..(k + 1) * n].iter().sum::<f64>() * h).collect();
    Ok(Spectrum {
        disc: op.disc,
        nodes: op.nodes.clone(),
        eigenvalues,
        phi,
        masses,
        ground_state_positive: negative == 0,
    })
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spacing(&self) -> f64 {
        self.disc.spacing()
    }

    pub fn lambda0(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn gap(&self) -> f64 {
        self.eigenvalues.get(1).map_or(f64::INFINITY, |l| l - self.eigenvalues[0])
    }

    pub fn phi(&self, k: usize) -> &[f64] {
        let n = self.len();
        &self.phi[k * n..(k + 1) * n]
    }

    pub fn ground_state(&self) -> &[f64] {
        self.phi(0)
    }

    pub fn nearest(&self, x: f64) -> usize {
        self.disc.nearest(x)
    }

    /// Number of modes with `e^{-(λ_k - λ₀) t} ≥ 1e-14`.
    pub fn active_modes(&self, t: f64) -> usize {
        let l0 = self.lambda0();
        let cut = -KERNEL_CUTOFF.ln() / t;
        self.eigenvalues.partition_point(|l| l - l0 <= cut)
    }

    /// `e^{λ₀ t} u_t(x_i, x_j)`; stays of order one for large `t`.
    pub fn scaled_kernel(&self, t: f64, i: usize, j: usize) -> f64 {
        let l0 = self.lambda0();
        let n = self.len();
        (0..self.active_modes(t))
            .map(|k| (-(self.eigenvalues[k] - l0) * t).exp() * self.phi[k * n + i] * self.phi[k * n + j])
            .sum()
    }

    /// `u_t(x_i, x_j)`.
    pub fn heat_kernel(&self, t: f64, i: usize, j: usize) -> f64 {
        (-self.lambda0() * t).exp() * self.scaled_kernel(t, i, j)
    }

    /// `ln u_t(x_i, x_j)`, or NaN when the truncated sum is not positive.
    pub fn ln_heat_kernel(&self, t: f64, i: usize, j: usize) -> f64 {
        let s = self.scaled_kernel(t, i, j);
        if s > 0.0 {
            s.ln() - self.lambda0() * t
        } else {
            f64::NAN
        }
    }

    /// `Σ_j u_t(x_i, x_j) Δ`, the discrete `U_t 1(x_i)`.
    pub fn row_sum(&self, t: f64, i: usize) -> f64 {
        let n = self.len();
        (0..self.active_modes(t))
            .map(|k| (-self.eigenvalues[k] * t).exp() * self.phi[k * n + i] * self.masses[k])
            .sum()
    }

    /// `Σ_k e^{-λ_k t}` over the retained modes.
    pub fn trace(&self, t: f64) -> f64 {
        self.eigenvalues.iter().map(|l| (-l * t).exp()).sum()
    }

    /// `Σ_{ij} u_t(x_i, x_j) Δ²`.
    pub fn heat_content(&self, t: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.masses)
            .map(|(l, m)| (-l * t).exp() * m * m)
            .sum()
    }

    /// Largest entry of `Φᵀ Φ Δ - I` over the first `k` modes.
    pub fn orthonormality_residual(&self, k: usize) -> f64 {
        let h = self.spacing();
        let k = k.min(self.modes());
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in a..k {
                let dot: f64 = self.phi(a).iter().zip(self.phi(b)).map(|(p, q)| p * q).sum::<f64>() * h;
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}
