//! Finite-box discretization of `H = -L + V` in one dimension.

use faer::Mat;
use nlhk_core::free_process::LevySymbol;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{OracleError, Result};

/// How jumps shorter than half a grid cell enter the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallJumpPolicy {
    /// Replaced by a diffusion with matching second moment.
    #[default]
    Diffusion,
    /// Dropped.
    Truncate,
}

/// Box `[-M, M]` with `N` cells; unknowns live at the interior nodes
/// `x_i = -M + iΔ`, `i = 1..N`, and vanish outside the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub half_width: f64,
    pub points: usize,
    #[serde(default)]
    pub small_jumps: SmallJumpPolicy,
}

impl Discretization {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        let d = Self {
            half_width,
            points,
            small_jumps: SmallJumpPolicy::Diffusion,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn with_small_jumps(mut self, policy: SmallJumpPolicy) -> Self {
        self.small_jumps = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(OracleError::Discretization(format!(
                "half width {} must be positive",
                self.half_width
            )));
        }
        if self.points < 64 {
            return Err(OracleError::Discretization(format!(
                "N = {} is below the minimum of 64",
                self.points
            )));
        }
        if self.spacing() > 0.25 {
            return Err(OracleError::Discretization(format!(
                "spacing 2M/N = {:.4} exceeds 1/4; use N ≥ {}",
                self.spacing(),
                (8.0 * self.half_width).ceil()
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Number of unknowns, `N - 1`.
    pub fn unknowns(&self) -> usize {
        self.points - 1
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + (i + 1) as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.unknowns()).map(|i| self.x(i)).collect()
    }

    /// Index of the node nearest to `x`, clamped to the box.
    pub fn nearest(&self, x: f64) -> usize {
        let k = ((x + self.half_width) / self.spacing()).round() as i64 - 1;
        k.clamp(0, self.unknowns() as i64 - 1) as usize
    }
}

/// Symmetric matrix of the discretized operator together with its nodes.
#[derive(Debug, Clone)]
pub struct Operator {
    pub disc: Discretization,
    pub nodes: Vec<f64>,
    pub matrix: Mat<f64>,
    /// Killing rate for jumps leaving the box, per node.
    pub killing: Vec<f64>,
    /// Second-difference coefficient: diffusion plus small-jump substitute.
    pub local_diffusion: f64,
}

/// Assemble `-L + V` on the box.
///
/// Off-diagonal entries are `-ν(x_i - x_j) Δ`; the diagonal carries the
/// matching row sum, the rate of jumps landing outside the box, the local
/// second difference and `V(x_i)`.
pub fn build_matrix(
    disc: &Discretization,
    sym: &LevySymbol,
    v: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<Operator> {
    disc.validate()?;
    let n = disc.unknowns();
    let h = disc.spacing();
    let m = disc.half_width;

    let weights: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { sym.nu(k as f64 * h) * h }).collect();
    if let Some(k) = weights.iter().position(|w| !w.is_finite()) {
        return Err(OracleError::Construction(format!("ν({}) is not finite", k as f64 * h)));
    }

    let small = match disc.small_jumps {
        SmallJumpPolicy::Diffusion => 0.5 * sym.small_jump_variance(0.5 * h),
        SmallJumpPolicy::Truncate => 0.0,
    };
    let local_diffusion = sym.diffusion() + small;
    if !local_diffusion.is_finite() {
        return Err(OracleError::Construction("small-jump second moment is not finite".into()));
    }
    let c = local_diffusion / (h * h);

    // Jumps landing beyond the outermost cells, |x_i + z| > M - Δ/2.
    let edge = m - 0.5 * h;
    let killing: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = disc.x(i);
            0.5 * (sym.tail_mass(edge - x) + sym.tail_mass(edge + x))
        })
        .collect();
    if let Some(i) = killing.iter().position(|k| !k.is_finite()) {
        return Err(OracleError::Construction(format!("killing rate at x = {} is not finite", disc.x(i))));
    }

    // Prefix sums of the weights give each row sum in O(1).
    let mut prefix = vec![0.0; n + 1];
    for k in 0..n {
        prefix[k + 1] = prefix[k] + weights[k];
    }

    let mut matrix = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            if i != j {
                matrix[(i, j)] = -weights[i.abs_diff(j)];
            }
        }
    }
    for i in 0..n {
        let row = prefix[i + 1] + prefix[n - i];
        let x = disc.x(i);
        let vx = v(x);
        if !vx.is_finite() {
            return Err(OracleError::Construction(format!("V({x}) is not finite")));
        }
        matrix[(i, i)] = row + killing[i] + 2.0 * c + vx;
        if i > 0 {
            matrix[(i, i - 1)] -= c;
        }
        if i + 1 < n {
            matrix[(i, i + 1)] -= c;
        }
    }

    Ok(Operator {
        disc: *disc,
        nodes: disc.nodes(),
        matrix,
        killing,
        local_diffusion,
    })
}
