//! Numerical checks of the structural assumptions on `(f, g, h)` and the
//! constants pack that parameterizes every envelope.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::profiles::{
    JumpFamily, JumpProfile, LinkFamily, LinkFunction, PotentialFamily, PotentialProfile,
    RatioMonotonicity,
};
use crate::quad::{
    integrate, integrate_to_infinity, integrate_with_breaks, shell_study, QuadratureSettings,
    ShellStudy,
};
use crate::{Error, Result};

/// Relative size below which a ratio increment counts as numerically zero.
const NEGLIGIBLE_INCREMENT: f64 = 1e-9;
/// Largest admissible contraction factor of successive increments.
const MAX_INCREMENT_RATIO: f64 = 0.97;

/// Result of the direct-jump scan `J(x) / f(|x|)` over a radius grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DjpReport {
    /// Fitted direct-jump constant: the largest sampled ratio, or the
    /// extrapolated limit when the ratios still increase geometrically.
    pub c3_hat: f64,
    pub sup_location: f64,
    pub converged: bool,
    /// `(|x|, J(x)/f(|x|))` in the order of the radius grid.
    pub samples: Vec<(f64, f64)>,
    /// Geometric extrapolation of the ratio sequence, when it converges.
    pub limit_estimate: Option<f64>,
    /// All quadratures met their tolerance.
    pub quadrature_converged: bool,
}

/// Doubling radius grid `1, 2, 4, …, 2^20` used when no grid is given.
pub fn default_djp_radii() -> Vec<f64> {
    (0..=20).map(|k| 2f64.powi(k)).collect()
}

fn djp_settings() -> QuadratureSettings {
    QuadratureSettings::default().with_tolerances(1e-14, 1e-11)
}

/// Geometric breakpoints `a, 2a, 4a, …` strictly below `b`, followed by `b`.
fn geometric_breaks(a: f64, b: f64) -> Vec<f64> {
    let mut pts = vec![a];
    let mut p = 2.0 * a.max(1.0);
    while p < b {
        pts.push(p);
        p *= 2.0;
    }
    pts.push(b);
    pts
}

/// `J(x)/f(x)` for `x = r ≥ 1` in one dimension.
fn djp_ratio_1d(f: &JumpProfile, r: f64, q: &QuadratureSettings) -> (f64, bool) {
    let lf_x = f.ln_value(r);
    // The outer pieces y < -1 and y > x + 1 contribute equally.
    let outer = integrate_to_infinity(
        |w: f64| (f.ln_value(r + w) + f.ln_value(w) - lf_x).exp(),
        1.0,
        q,
    );
    let mut value = 2.0 * outer.value;
    let mut ok = outer.converged;
    if r > 2.0 {
        let mut pts = geometric_breaks(1.0, 0.5 * r);
        for k in f.kinks() {
            for c in [k, r - k] {
                if c > 1.0 && c < 0.5 * r {
                    pts.push(c);
                }
            }
        }
        // Symmetric about r/2.
        let inner = integrate_with_breaks(
            |y: f64| (f.ln_value(r - y) + f.ln_value(y) - lf_x).exp(),
            &pts,
            q,
        );
        value += 2.0 * inner.value;
        ok &= inner.converged;
    }
    (value, ok)
}

/// `J(x)/f(|x|)` for `|x| = r ≥ 1` in two dimensions, in polar coordinates
/// around the origin with the disc `|x - y| ≤ 1` cut out angle by angle.
fn djp_ratio_2d(f: &JumpProfile, r: f64, q: &QuadratureSettings) -> (f64, bool) {
    let lf_x = f.ln_value(r);
    let inner_q = q.with_tolerances(q.abs_tol, q.rel_tol.max(1e-9));
    let angular = |rho: f64| -> f64 {
        let c = (r * r + rho * rho - 1.0) / (2.0 * r * rho);
        if c <= -1.0 {
            return 0.0;
        }
        let theta_c = if c >= 1.0 { 0.0 } else { c.acos() };
        let lf_rho = f.ln_value(rho);
        let v = integrate(
            |th: f64| {
                let dist = (r * r + rho * rho - 2.0 * r * rho * th.cos()).max(0.0).sqrt();
                (f.ln_value(dist) + lf_rho - lf_x).exp()
            },
            theta_c,
            PI,
            &inner_q,
        );
        2.0 * rho * v.value
    };
    let mut pts = geometric_breaks(1.0, 4.0 * r + 8.0);
    for c in [r - 1.0, r, r + 1.0] {
        if c > 1.0 {
            pts.push(c);
        }
    }
    let near = integrate_with_breaks(angular, &pts, q);
    let far = integrate_to_infinity(angular, 4.0 * r + 8.0, q);
    (near.value + far.value, near.converged && far.converged)
}

/// Scan `J(x)/f(|x|)` with
/// `J(x) = ∫_{|x-y|>1, |y|>1} f(|x-y|) f(|y|) dy` over the given radii.
///
/// The ratios are declared convergent when, over the last quarter of the
/// grid (at least four increments), every increment is either negligible
/// or positive and shrinking by a factor of at most 0.97 per step. The
/// grid is meant to double from one radius to the next.
pub fn check_direct_jump(
    f: &JumpProfile,
    d: usize,
    radii: &[f64],
    q: Option<&QuadratureSettings>,
) -> Result<DjpReport> {
    if !(1..=2).contains(&d) {
        return Err(Error::invalid("direct-jump check", format!("dimension {d} (1 or 2 only)")));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r >= 1.0 && r.is_finite())) {
        return Err(Error::invalid("direct-jump check", "radii must be finite and ≥ 1"));
    }
    let q = q.copied().unwrap_or_else(djp_settings);
    let evals: Vec<(f64, bool)> = radii
        .par_iter()
        .map(|&r| if d == 1 { djp_ratio_1d(f, r, &q) } else { djp_ratio_2d(f, r, &q) })
        .collect();
    let samples: Vec<(f64, f64)> = radii.iter().zip(&evals).map(|(r, e)| (*r, e.0)).collect();
    let quadrature_converged = evals.iter().all(|e| e.1);

    let (mut c3_hat, mut sup_location) = (f64::NEG_INFINITY, radii[0]);
    for &(r, v) in &samples {
        if v > c3_hat {
            c3_hat = v;
            sup_location = r;
        }
    }
    let finite = samples.iter().all(|s| s.1.is_finite());

    let mut converged = false;
    let mut limit_estimate = None;
    let n = samples.len();
    let window = (n / 4).max(4);
    if finite && n > window + 1 {
        let incs: Vec<f64> = samples.windows(2).map(|w| w[1].1 - w[0].1).collect();
        let scale = samples[n - 1].1.abs().max(f64::MIN_POSITIVE);
        let tiny = NEGLIGIBLE_INCREMENT * scale;
        let start = incs.len() - window;
        let mut rho_max: f64 = 0.0;
        converged = (start..incs.len()).all(|k| {
            let inc = incs[k];
            if inc <= tiny {
                return true;
            }
            let prev = incs[k - 1];
            if prev <= tiny {
                return false;
            }
            let rho = inc / prev;
            rho_max = rho_max.max(rho);
            rho <= MAX_INCREMENT_RATIO
        });
        if converged {
            let last = samples[n - 1].1;
            let inc = incs[incs.len() - 1];
            let limit = if inc > tiny {
                last + inc * rho_max / (1.0 - rho_max)
            } else {
                last
            };
            limit_estimate = Some(limit);
            c3_hat = c3_hat.max(limit);
        }
    }
    Ok(DjpReport {
        c3_hat,
        sup_location,
        converged: converged && quadrature_converged,
        samples,
        limit_estimate,
        quadrature_converged,
    })
}

/// Which sufficient criterion establishes the direct-jump property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DjpCriterion {
    Doubling,
    Tempered,
    LogConvex,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DjpSufficiency {
    pub criterion: DjpCriterion,
    /// Shell study of the integrability condition, when it was evaluated.
    pub integrability: Option<ShellStudy>,
}

/// Modified Bessel function `e^{-x} I₀(x)` for `x ≥ 0` (polynomial
/// approximations, relative error below 2e-7).
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 3.75 {
        let t = (ax / 3.75).powi(2);
        let i0 = 1.0
            + t * (3.515_622_9
                + t * (3.089_942_4
                    + t * (1.206_749_2 + t * (0.265_973_2 + t * (0.036_076_8 + t * 0.004_581_3)))));
        i0 * (-ax).exp()
    } else {
        let t = 3.75 / ax;
        let p = 0.398_942_28
            + t * (0.013_285_92
                + t * (0.002_253_19
                    + t * (-0.001_575_65
                        + t * (0.009_162_81
                            + t * (-0.020_577_06
                                + t * (0.026_355_37 + t * (-0.016_476_33 + t * 0.003_923_77)))))));
        p / ax.sqrt()
    }
}

/// Radial integrand of `∫_{|y|>1} e^{-(f'/f)(|y|) y₁} f(|y|) dy`.
fn tilted_radial(f: &JumpProfile, d: usize, r: f64) -> f64 {
    let b = -f.log_derivative(r) * r;
    let lt = f.ln_tilt(r);
    if d == 1 {
        lt.exp() + (lt - 2.0 * b).exp()
    } else {
        2.0 * PI * r * bessel_i0_scaled(b) * lt.exp()
    }
}

/// Shell-doubling study of the integrability condition of the log-convex
/// criterion.
pub fn integrability_condition(f: &JumpProfile, d: usize, rel_tol: f64) -> ShellStudy {
    let q = QuadratureSettings::default().with_tolerances(1e-300, 1e-10);
    let kinks = f.kinks();
    shell_study(
        |a, b| {
            let mut pts = vec![a, b];
            pts.extend(kinks.iter().copied().filter(|k| *k > a && *k < b));
            integrate_with_breaks(|r: f64| tilted_radial(f, d, r), &pts, &q).value
        },
        1.0,
        rel_tol,
        400,
    )
}

fn log_convex_beyond_one(f: &JumpProfile) -> bool {
    match f.family() {
        JumpFamily::Poly { gamma, .. } => *gamma == 0.0,
        JumpFamily::Exponential { .. } => true,
        JumpFamily::Tabulated(t) => {
            let mut slopes: Vec<f64> = Vec::new();
            for i in 0..t.knots.len() - 1 {
                if t.knots[i + 1] > 1.0 {
                    slopes.push((t.ln_values[i + 1] - t.ln_values[i]) / (t.knots[i + 1] - t.knots[i]));
                }
            }
            let last = *t.knots.last().unwrap_or(&1.0);
            slopes.push(t.tail_exponent / last.max(1.0));
            slopes.windows(2).all(|w| w[1] >= w[0])
        }
    }
}

/// First applicable sufficient criterion for the direct-jump property.
///
/// The integrability condition of the log-convex criterion is declared
/// finite when the shell partial integrals stabilize within relative 1e-3.
pub fn check_djp_sufficient(f: &JumpProfile, d: usize) -> DjpSufficiency {
    let df = d as f64;
    let doubling = match f.family() {
        JumpFamily::Poly { alpha, .. } => *alpha > 0.0,
        JumpFamily::Tabulated(t) => f.is_doubling() && t.tail_exponent < -df,
        JumpFamily::Exponential { .. } => false,
    };
    if doubling {
        return DjpSufficiency {
            criterion: DjpCriterion::Doubling,
            integrability: None,
        };
    }
    if let JumpFamily::Exponential { gamma, .. } = f.family() {
        if *gamma > df {
            return DjpSufficiency {
                criterion: DjpCriterion::Tempered,
                integrability: None,
            };
        }
    }
    if !log_convex_beyond_one(f) || d > 2 {
        return DjpSufficiency {
            criterion: DjpCriterion::Unknown,
            integrability: None,
        };
    }
    let study = integrability_condition(f, d, 1e-3);
    DjpSufficiency {
        criterion: if study.converged {
            DjpCriterion::LogConvex
        } else {
            DjpCriterion::Unknown
        },
        integrability: Some(study),
    }
}

/// Convergence of `∫_{|x|>R₀} e^{-sV(x)} dx`, judged on expanding shells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpIntReport {
    pub s: f64,
    pub convergent: bool,
    pub study: ShellStudy,
}

pub fn check_exp_int(v: &PotentialProfile, s: f64, d: usize) -> Result<ExpIntReport> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("exp-int check", s, "s > 0"));
    }
    if !(1..=2).contains(&d) {
        return Err(Error::invalid("exp-int check", format!("dimension {d} (1 or 2 only)")));
    }
    let q = QuadratureSettings::default().with_tolerances(1e-300, 1e-10);
    let kinks = v.kinks();
    let weight = move |r: f64| if d == 1 { 2.0 } else { 2.0 * PI * r };
    let study = shell_study(
        |a, b| {
            let mut pts = vec![a, b];
            pts.extend(kinks.iter().copied().filter(|k| *k > a && *k < b));
            integrate_with_breaks(|r: f64| weight(r) * (-s * v.value(r)).exp(), &pts, &q).value
        },
        v.r0(),
        1e-3,
        400,
    );
    Ok(ExpIntReport {
        s,
        convergent: study.converged,
        study,
    })
}

/// Structural constants and the K-constants derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsPack {
    pub r0: f64,
    pub n0: u64,
    /// Whether `n0` satisfies `g(n0 - 2) ≥ θ`; false when the search hit
    /// its cap and fell back to the smallest admissible value.
    pub n0_threshold_met: bool,
    pub theta: f64,
    pub t_b: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
    pub c6: f64,
    pub c7: f64,
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub lambda0_hat: f64,
    /// Some constant came from a grid scan rather than a closed form.
    pub heuristic: bool,
}

impl ConstantsPack {
    /// Recompute the K-constants from `C₆` and `C₇`.
    pub fn with_c6_c7(mut self, c6: f64, c7: f64) -> Self {
        self.c6 = c6;
        self.c7 = c7;
        let base = c6 * c7 * c7;
        self.k = 4.0 * base;
        self.k1 = 8.0 * base;
        self.k2 = 12.0 * base;
        self.k3 = 16.0 * base;
        self.k4 = 12.0 * c6 * base;
        self
    }

    pub fn with_lambda0(mut self, lambda0: f64) -> Self {
        self.lambda0_hat = lambda0;
        self
    }

    pub fn with_n0(mut self, n0: u64) -> Self {
        self.n0 = n0;
        self
    }

    /// `30·t_b`, the large-time threshold of the sharp estimates.
    pub fn time_threshold(&self) -> f64 {
        30.0 * self.t_b
    }

    /// Inner radius `n₀ + 3` separating the regions of the sharp estimates.
    pub fn inner_radius(&self) -> f64 {
        self.n0 as f64 + 3.0
    }
}

/// Inputs to [`estimate_constants`] beyond the profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsOptions {
    /// The actual potential `V`, when it differs from `g`.
    pub potential: Option<PotentialProfile>,
    /// Angular factor `σ₀` in `ν = σ₀ f`.
    pub nu_scale: f64,
    pub lambda0_hat: f64,
    /// Threshold for `g(n₀ - 2)`; defaults to `10·C₆·(1 + |λ₀|)`.
    pub theta: Option<f64>,
    pub n0: Option<u64>,
    pub n0_search_cap: u64,
    /// Direct-jump constant; estimated on the default grid when absent.
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
}

impl Default for ConstantsOptions {
    fn default() -> Self {
        Self {
            potential: None,
            nu_scale: 1.0,
            lambda0_hat: 0.0,
            theta: None,
            n0: None,
            n0_search_cap: 1_000_000,
            c3: None,
            c4: None,
            c5: None,
        }
    }
}

/// Geometric grid on `[a, b]` with `n` points, merged with `extra` points
/// inside the interval.
pub fn geometric_grid(a: f64, b: f64, n: usize, extra: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect();
    v.extend(extra.iter().copied().filter(|x| *x >= a && *x <= b));
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn grid_sup(grid: &[f64], ratio: impl Fn(f64) -> f64) -> f64 {
    grid.iter().map(|&r| ratio(r)).fold(f64::NEG_INFINITY, f64::max)
}

/// Grid sup that also reports whether halving the grid density changes it.
fn refined_sup(a: f64, b: f64, extra: &[f64], ratio: impl Fn(f64) -> f64) -> (f64, bool) {
    let coarse = grid_sup(&geometric_grid(a, b, 1000, extra), &ratio);
    let fine = grid_sup(&geometric_grid(a, b, 2000, extra), &ratio);
    let stable = (fine - coarse).abs() <= 1e-9 * fine.abs();
    (fine.max(coarse), stable)
}

fn c7_known(g: &PotentialProfile) -> bool {
    match g.family() {
        PotentialFamily::LogPower { .. } | PotentialFamily::Power { .. } => true,
        PotentialFamily::Composed { h, f } => {
            matches!(h.family(), LinkFamily::PowerOverScale { .. }) && !f.is_tabulated()
        }
    }
}

/// `C₇ = sup_{r ≥ R₀} g(r+1)/g(r)` by a grid scan that contains the
/// maximizer of the parametric families. Second value: heuristic flag.
pub fn growth_constant_c7(g: &PotentialProfile) -> (f64, bool) {
    let r0 = g.r0();
    let mut extra = vec![r0, E, E - 1.0, 1.0];
    extra.extend(g.kinks());
    extra.extend(g.kinks().iter().map(|k| k - 1.0));
    let (sup, stable) = refined_sup(r0, r0.max(1.0) * 1e8, &extra, |r| g.value(r + 1.0) / g.value(r));
    (sup.max(1.0), !(stable && c7_known(g)))
}

/// `C₂ = sup_{r ≥ 1} f(r)/f(r+1)`.
pub fn growth_constant_c2(f: &JumpProfile) -> (f64, bool) {
    let mut extra = vec![1.0, E, E - 1.0];
    extra.extend(f.kinks());
    extra.extend(f.kinks().iter().map(|k| k - 1.0));
    let (sup, stable) = refined_sup(1.0, 1e8, &extra, |r| (f.ln_value(r) - f.ln_value(r + 1.0)).exp());
    (sup.max(1.0), !(stable && !f.is_tabulated()))
}

/// `C₆ = sup_{r ≥ R₀} max(g/V, V/g)`.
pub fn comparability_constant_c6(g: &PotentialProfile, v: &PotentialProfile) -> (f64, bool) {
    let r0 = g.r0();
    let mut extra = vec![r0, E, 1.0];
    extra.extend(g.kinks());
    extra.extend(v.kinks());
    let (sup, stable) = refined_sup(r0, r0.max(1.0) * 1e8, &extra, |r| {
        let (a, b) = (g.value(r), v.value(r));
        (a / b).max(b / a)
    });
    let known = matches!(
        (g.family(), v.family()),
        (PotentialFamily::Composed { .. }, PotentialFamily::Power { .. })
            | (PotentialFamily::Composed { .. }, PotentialFamily::LogPower { .. })
    ) && c7_known(g);
    (sup.max(1.0), !(stable && known))
}

/// Smallest integer `n ≥ R₀ + 2` with `g(n - 2) ≥ θ`, searched up to
/// `cap`; `None` when the cap is reached.
pub fn select_n0(g: &PotentialProfile, theta: f64, cap: u64) -> Option<u64> {
    let lo0 = (g.r0() + 2.0).ceil() as u64;
    let ok = |n: u64| g.value(n as f64 - 2.0) >= theta;
    if ok(lo0) {
        return Some(lo0);
    }
    let mut hi = lo0.max(1);
    let mut lo = lo0;
    while !ok(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi > cap {
            if ok(cap) {
                hi = cap;
                break;
            }
            return None;
        }
    }
    // ok(hi), !ok(lo)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Estimate the structural constants for the profiles `f` and `g`.
pub fn estimate_constants(
    f: &JumpProfile,
    g: &PotentialProfile,
    d: usize,
    t_b: f64,
    opts: &ConstantsOptions,
) -> Result<ConstantsPack> {
    if !(t_b > 0.0 && t_b.is_finite()) {
        return Err(Error::domain("t_b", t_b, "t_b > 0"));
    }
    if !(opts.nu_scale > 0.0 && opts.nu_scale.is_finite()) {
        return Err(Error::invalid("constants options", "nu_scale must be positive"));
    }
    let r0 = g.r0();
    let (c2, h2) = growth_constant_c2(f);
    let (c7, h7) = growth_constant_c7(g);
    let (c6, h6) = match &opts.potential {
        Some(v) if v != g => comparability_constant_c6(g, v),
        _ => (1.0, false),
    };
    let c1 = opts.nu_scale.max(1.0 / opts.nu_scale);
    let c3 = match opts.c3 {
        Some(c) => c,
        None => check_direct_jump(f, d, &default_djp_radii(), None)?.c3_hat,
    };
    let lambda0 = opts.lambda0_hat;
    let theta = opts.theta.unwrap_or(10.0 * c6 * (1.0 + lambda0.abs()));
    let min_n0 = (r0 + 2.0).ceil() as u64;
    let (n0, met) = match opts.n0 {
        Some(n) => {
            if (n as f64) < r0 + 2.0 {
                return Err(Error::invalid(
                    "constants options",
                    format!("n0 = {n} below R0 + 2 = {}", r0 + 2.0),
                ));
            }
            (n, g.value(n as f64 - 2.0) >= theta)
        }
        None => match select_n0(g, theta, opts.n0_search_cap) {
            Some(n) => (n, true),
            None => (min_n0, false),
        },
    };
    let pack = ConstantsPack {
        r0,
        n0,
        n0_threshold_met: met,
        theta,
        t_b,
        c1,
        c2,
        c3,
        c4: opts.c4,
        c5: opts.c5,
        c6: 1.0,
        c7: 1.0,
        k: 0.0,
        k1: 0.0,
        k2: 0.0,
        k3: 0.0,
        k4: 0.0,
        lambda0_hat: lambda0,
        heuristic: h2 || h6 || h7 || f.is_tabulated(),
    };
    Ok(pack.with_c6_c7(c6, c7))
}

/// Boolean growth and monotonicity conditions on a grid of radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `f` decreasing with `f → 0`.
    pub a1b: bool,
    /// `f(r) ≤ C₂ f(r+1)` with finite `C₂`.
    pub a1c: bool,
    /// `g` increasing on `[R₀, ∞)`.
    pub a3b: bool,
    /// `g(r+1) ≤ C₇ g(r)` with finite `C₇`.
    pub a3c: bool,
    /// `h(s)/s` monotone; `None` without a link function.
    pub a4_monotone_ratio: Option<bool>,
}

impl GrowthReport {
    pub fn all_pass(&self) -> bool {
        self.a1b && self.a1c && self.a3b && self.a3c && self.a4_monotone_ratio.unwrap_or(true)
    }
}

pub fn check_growth_conditions(
    f: &JumpProfile,
    g: &PotentialProfile,
    h: Option<&LinkFunction>,
) -> GrowthReport {
    let fgrid = geometric_grid(1e-3, 1e6, 400, &f.kinks());
    let lf: Vec<f64> = fgrid.iter().map(|&r| f.ln_value(r)).collect();
    let a1b = lf.windows(2).all(|w| w[1] <= w[0])
        && lf.first().zip(lf.last()).is_some_and(|(a, b)| b < a)
        && lf.last().is_some_and(|l| *l < (1e-6f64).ln());
    let c2 = growth_constant_c2(f).0;
    let a1c = c2.is_finite();

    let r0 = g.r0();
    let ggrid = geometric_grid(r0, r0.max(1.0) * 1e6, 400, &g.kinks());
    let gv: Vec<f64> = ggrid.iter().map(|&r| g.value(r)).collect();
    let a3b = gv.windows(2).all(|w| w[1] >= w[0])
        && gv.first().zip(gv.last()).is_some_and(|(a, b)| b > a);
    let a3c = growth_constant_c7(g).0.is_finite();

    let a4 = h.map(|h| {
        let s0 = h.domain_start().max(1e-6);
        let sgrid = geometric_grid(s0, s0 * 1e6, 400, &[]);
        let ratios: Vec<f64> = sgrid.iter().map(|&s| h.value(s) / s).collect();
        let tol = 1e-12;
        match h.ratio_monotonicity() {
            RatioMonotonicity::Increasing => {
                ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - tol))
            }
            RatioMonotonicity::Decreasing => {
                ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol))
            }
            RatioMonotonicity::Constant => {
                ratios.windows(2).all(|w| (w[1] - w[0]).abs() <= tol * w[0])
            }
        }
    });
    GrowthReport {
        a1b,
        a1c,
        a3b,
        a3c,
        a4_monotone_ratio: a4,
    }
}
