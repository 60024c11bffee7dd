//! Monte Carlo estimate of `U_t 1(x) = E^x[exp(-∫_0^t V(X_s) ds)]`.
//!
//! Jumps of size at least `ε` are simulated exactly as a compound Poisson
//! process; smaller jumps are replaced by a Brownian motion with the same
//! variance per unit time, or dropped.

use nlhk_core::free_process::LevySymbol;
use nlhk_core::quad::{integrate, QuadratureSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::SmallJumpPolicy;
use crate::{OracleError, Result};

/// Knots of the inverse-CDF table.
pub const TABLE_KNOTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub jump_cutoff: f64,
    pub time_step: f64,
    pub n_paths: usize,
    pub seed: u64,
    #[serde(default)]
    pub small_jumps: SmallJumpPolicy,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            jump_cutoff: 0.01,
            time_step: 0.01,
            n_paths: 100_000,
            seed: 0,
            small_jumps: SmallJumpPolicy::Diffusion,
        }
    }
}

impl PathConfig {
    pub fn validate(&self, t: f64) -> Result<()> {
        if !(self.jump_cutoff > 0.0 && self.jump_cutoff <= 1.0) {
            return Err(OracleError::PathConfig(format!("jump cutoff ε = {} must lie in (0, 1]", self.jump_cutoff)));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(OracleError::PathConfig(format!("time t = {t} must be positive")));
        }
        if !(self.time_step > 0.0 && self.time_step <= 0.01 * t) {
            return Err(OracleError::PathConfig(format!(
                "time step δ = {} must lie in (0, 0.01 t] = (0, {}]",
                self.time_step,
                0.01 * t
            )));
        }
        if self.n_paths == 0 {
            return Err(OracleError::PathConfig("at least one path is needed".into()));
        }
        Ok(())
    }

    /// `σ_ε² = ∫_{|z|<ε} z² ν(z) dz`, or zero under truncation; the
    /// Gaussian part of the symbol is added on top.
    pub fn substitute_variance(&self, sym: &LevySymbol) -> f64 {
        let small = match self.small_jumps {
            SmallJumpPolicy::Diffusion => sym.small_jump_variance(self.jump_cutoff),
            SmallJumpPolicy::Truncate => 0.0,
        };
        2.0 * sym.diffusion() + small
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub x0: f64,
    pub t: f64,
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub config: PathConfig,
}

/// Inverse CDF of `|Z|` for a jump `Z` with density `ν` on `|z| ≥ ε`.
///
/// Within each knot interval `f` is treated as a power law, which makes the
/// table exact for the polynomial family.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    knots: Vec<f64>,
    cdf: Vec<f64>,
    slopes: Vec<f64>,
    tail_slope: f64,
    /// `Λ_ε = ∫_{|z| ≥ ε} ν`.
    pub rate: f64,
}

impl JumpSampler {
    pub fn new(sym: &LevySymbol, eps: f64) -> Result<Self> {
        let f = sym.profile();
        let rate = sym.tail_mass(eps);
        if !(rate.is_finite() && rate > 0.0) {
            return Err(OracleError::PathConfig(format!(
                "jump rate Λ_ε = {rate} at ε = {eps} is not finite; increase ε"
            )));
        }
        let half = 0.5 * rate / sym.sigma0();
        // Last knot where the remaining tail mass is negligible.
        let mut r_max = 2.0 * eps;
        while r_max < 1e12 * eps && sym.tail_mass(r_max) > 1e-12 * rate {
            r_max *= 2.0;
        }
        let ln_lo = eps.ln();
        let step = (r_max.ln() - ln_lo) / (TABLE_KNOTS - 1) as f64;
        let knots: Vec<f64> = (0..TABLE_KNOTS).map(|k| (ln_lo + k as f64 * step).exp()).collect();
        let settings = QuadratureSettings::default().with_tolerances(0.0, 1e-10);
        let pieces: Vec<f64> = knots
            .par_windows(2)
            .map(|w| {
                let mut pts = vec![w[0]];
                pts.extend(f.kinks().into_iter().filter(|k| *k > w[0] && *k < w[1]));
                pts.push(w[1]);
                pts.windows(2).map(|p| integrate(|z| f.value(z), p[0], p[1], &settings).value).sum()
            })
            .collect();
        let mut cdf = Vec::with_capacity(TABLE_KNOTS);
        cdf.push(0.0);
        let mut acc = 0.0;
        for p in &pieces {
            acc += p / half;
            cdf.push(acc.min(1.0));
        }
        let slopes = knots
            .windows(2)
            .map(|w| -(f.value(w[1]) / f.value(w[0])).ln() / (w[1] / w[0]).ln())
            .collect::<Vec<_>>();
        let tail_slope = -f.log_derivative(r_max) * r_max;
        Ok(Self {
            knots,
            cdf,
            slopes,
            tail_slope,
            rate,
        })
    }

    /// `|Z|` from a uniform variate.
    pub fn radius(&self, u: f64) -> f64 {
        let last = *self.cdf.last().unwrap();
        if u >= last {
            // Beyond the table: power tail with the last local exponent.
            let r = *self.knots.last().unwrap();
            let w = ((1.0 - u) / (1.0 - last).max(f64::MIN_POSITIVE)).clamp(f64::MIN_POSITIVE, 1.0);
            let p = self.tail_slope.max(1.0 + 1e-6);
            return r * w.powf(-1.0 / (p - 1.0));
        }
        let k = self.cdf.partition_point(|c| *c <= u).saturating_sub(1).min(self.knots.len() - 2);
        let (a, b) = (self.knots[k], self.knots[k + 1]);
        let span = self.cdf[k + 1] - self.cdf[k];
        let w = if span > 0.0 { (u - self.cdf[k]) / span } else { 0.5 };
        let e = 1.0 - self.slopes[k];
        if e.abs() < 1e-9 {
            a * (b / a).powf(w)
        } else {
            let (pa, pb) = (a.powf(e), b.powf(e));
            (pa + w * (pb - pa)).powf(1.0 / e).clamp(a, b)
        }
    }
}

/// Trapezoid-rule exponent integral along one path.
fn path_exponent(
    x0: f64,
    t: f64,
    steps: usize,
    sigma: f64,
    sampler: &JumpSampler,
    v: &(dyn Fn(f64) -> f64 + Sync),
    rng: &mut ChaCha8Rng,
) -> f64 {
    let dt = t / steps as f64;
    let waiting = Exp::new(sampler.rate).expect("positive rate");
    let sd = sigma * dt.sqrt();
    let mut next_jump = waiting.sample(rng);
    let mut x = x0;
    let mut total = 0.0;
    for step in 0..steps {
        let t0 = step as f64 * dt;
        let t1 = t0 + dt;
        let z: f64 = rng.sample(StandardNormal);
        let w = sd * z;
        let mut jumps = 0.0;
        let mut cur_t = t0;
        let mut cur_v = v(x);
        while next_jump < t1 {
            let left = x + w * (next_jump - t0) / dt + jumps;
            let v_left = v(left);
            total += 0.5 * (cur_v + v_left) * (next_jump - cur_t);
            let r = sampler.radius(rng.random::<f64>());
            let jump = if rng.random::<bool>() { r } else { -r };
            jumps += jump;
            cur_t = next_jump;
            cur_v = v(left + jump);
            next_jump += waiting.sample(rng);
        }
        let end = x + w + jumps;
        total += 0.5 * (cur_v + v(end)) * (t1 - cur_t);
        x = end;
    }
    total
}

/// Estimate `U_t 1(x₀)`; path `k` draws from stream `k` of the seeded
/// generator, so the result does not depend on the thread count.
pub fn simulate_ut1(
    x0: f64,
    t: f64,
    v: &(dyn Fn(f64) -> f64 + Sync),
    sym: &LevySymbol,
    cfg: &PathConfig,
) -> Result<McEstimate> {
    cfg.validate(t)?;
    let sampler = JumpSampler::new(sym, cfg.jump_cutoff)?;
    let sigma = cfg.substitute_variance(sym).sqrt();
    if !sigma.is_finite() {
        return Err(OracleError::PathConfig("small-jump variance is not finite".into()));
    }
    let steps = (t / cfg.time_step).ceil() as usize;
    let weights: Vec<f64> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            (-path_exponent(x0, t, steps, sigma, &sampler, v, &mut rng)).exp()
        })
        .collect();
    let n = weights.len() as f64;
    let mean = weights.iter().sum::<f64>() / n;
    let var = if weights.len() > 1 {
        weights.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        x0,
        t,
        mean,
        std_error: (var / n).sqrt(),
        n_paths: cfg.n_paths,
        config: *cfg,
    })
}

/// One row of a bias study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub jump_cutoff: f64,
    pub time_step: f64,
    pub n_paths: usize,
    pub estimate: McEstimate,
}

/// Estimates at the base configuration and with `ε`, `δ` halved and the
/// path count quadrupled, one change at a time.
pub fn convergence_study(
    x0: f64,
    t: f64,
    v: &(dyn Fn(f64) -> f64 + Sync),
    sym: &LevySymbol,
    base: &PathConfig,
) -> Result<Vec<StudyRow>> {
    let variants = [
        *base,
        PathConfig {
            jump_cutoff: 0.5 * base.jump_cutoff,
            ..*base
        },
        PathConfig {
            time_step: 0.5 * base.time_step,
            ..*base
        },
        PathConfig {
            n_paths: 4 * base.n_paths,
            ..*base
        },
    ];
    variants
        .iter()
        .map(|cfg| {
            let estimate = simulate_ut1(x0, t, v, sym, cfg)?;
            Ok(StudyRow {
                jump_cutoff: cfg.jump_cutoff,
                time_step: cfg.time_step,
                n_paths: cfg.n_paths,
                estimate,
            })
        })
        .collect()
}
