//! Comparison of the oracle kernel with profile shapes and envelopes.

use nlhk_core::conditions::{check_exp_int, ExpIntReport};
use nlhk_core::profiles::{JumpProfile, PotentialProfile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spectrum::Spectrum;
use crate::{OracleError, Result};

/// Default admissible `max/min` spread of `φ₀ g / f`.
pub const DEFAULT_BAND: f64 = 50.0;
/// Admissible relative drift of a fitted constant between the two largest
/// times, and under grid refinement.
pub const T_STABILITY: f64 = 0.25;
pub const REFINEMENT_STABILITY: f64 = 0.10;
/// Width of the strip next to the box boundary excluded from checks.
pub const BOUNDARY_STRIP: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub ratio: f64,
}

/// Fitted constant at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeFit {
    pub t: f64,
    pub c_hat: f64,
    /// `sup u / upper`.
    pub upper_side: f64,
    /// `sup lower / u`.
    pub lower_side: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub region: String,
    pub samples: Vec<RatioSample>,
    pub fits: Vec<TimeFit>,
    /// Largest fitted constant over all times, at least 1.
    pub c_hat: f64,
    /// `max/min` of the ratios, for profile comparisons.
    pub band: f64,
    /// Relative change of `Ĉ` between the two largest times.
    pub t_drift: Option<f64>,
    /// Relative change of the headline constant under refinement.
    pub refinement_drift: Option<f64>,
    pub flags: Vec<(String, bool)>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.flags.iter().all(|(_, ok)| *ok)
    }

    /// `max/min - 1` of `Ĉ` across all times.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .fits
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), f| (lo.min(f.c_hat), hi.max(f.c_hat)));
        hi / lo - 1.0
    }

    /// Record the drift of the headline constant against a report computed
    /// on a refined grid.
    pub fn compare_refined(&mut self, refined: &VerificationReport) {
        let (a, b) = if self.fits.is_empty() {
            (self.band, refined.band)
        } else {
            (self.c_hat, refined.c_hat)
        };
        let drift = (a - b).abs() / a.min(b);
        self.refinement_drift = Some(drift);
        self.flags
            .push(("refinement_stable".into(), drift.is_finite() && drift < REFINEMENT_STABILITY));
    }
}

fn relative_drift(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.min(b)
}

/// Compare `φ₀` with `f/g` over `r_lo ≤ |x| ≤ r_hi`, and with a constant on
/// the core `|x| ≤ R₀`.
pub fn verify_eig_profile(
    spec: &Spectrum,
    f: &JumpProfile,
    g: &PotentialProfile,
    r_lo: f64,
    r_hi: f64,
    band_limit: f64,
) -> Result<VerificationReport> {
    let m = spec.disc.half_width;
    let r0 = g.r0();
    if r_lo < r0 + 1.0 || r_hi > m - BOUNDARY_STRIP || r_lo >= r_hi {
        return Err(OracleError::Window(format!(
            "profile region [{r_lo}, {r_hi}] must lie inside [R0 + 1, M - 5] = [{}, {}]",
            r0 + 1.0,
            m - BOUNDARY_STRIP
        )));
    }
    let phi0 = spec.ground_state();
    let mut samples = Vec::new();
    let mut core = (f64::INFINITY, 0.0f64);
    for (i, &x) in spec.nodes.iter().enumerate() {
        let r = x.abs();
        if r >= r_lo && r <= r_hi {
            let ratio = phi0[i] * g.value(r) / f.value(r);
            samples.push(RatioSample { t: 0.0, x, y: x, ratio });
        } else if r <= r0 {
            core = (core.0.min(phi0[i]), core.1.max(phi0[i]));
        }
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.ratio), hi.max(s.ratio)));
    let band = hi / lo;
    let core_band = core.1 / core.0;
    let flags = vec![
        ("ground_state_positive".into(), spec.ground_state_positive),
        ("profile_band".into(), band.is_finite() && band < band_limit),
        ("core_band".into(), core_band.is_finite() && core_band < band_limit),
    ];
    Ok(VerificationReport {
        region: format!("profile |x| in [{r_lo}, {r_hi}]"),
        samples,
        fits: Vec::new(),
        c_hat: band.sqrt().max(1.0),
        band,
        t_drift: None,
        refinement_drift: None,
        flags,
    })
}

/// `ln` of the lower and upper envelope at `(t, x, y)`.
pub type EnvelopeFn<'a> = dyn Fn(f64, f64, f64) -> Result<(f64, f64)> + Sync + 'a;

/// `e^{-λ₀ t} φ₀(x) φ₀(y)` from the oracle itself.
pub fn ground_state_envelope(spec: &Spectrum) -> impl Fn(f64, f64, f64) -> Result<(f64, f64)> + Sync + '_ {
    move |t, x, y| {
        let p = spec.ground_state();
        let v = p[spec.nearest(x)].ln() + p[spec.nearest(y)].ln() - spec.lambda0() * t;
        Ok((v, v))
    }
}

/// Fit `Ĉ = max(sup u/upper, sup lower/u)` at each time over the node
/// pairs `points`, and check its stability between the two largest times.
pub fn verify_envelope(
    spec: &Spectrum,
    envelope: &EnvelopeFn<'_>,
    t_list: &[f64],
    points: &[(usize, usize)],
    t_min: f64,
    region: &str,
) -> Result<VerificationReport> {
    if t_list.is_empty() || points.is_empty() {
        return Err(OracleError::Window(format!("{region}: empty time list or point set")));
    }
    if let Some(t) = t_list.iter().find(|t| **t <= t_min) {
        return Err(OracleError::Window(format!(
            "{region}: t = {t} is not above the large-time threshold {t_min}"
        )));
    }
    let mut times = t_list.to_vec();
    times.sort_by(f64::total_cmp);

    let mut samples = Vec::with_capacity(times.len() * points.len());
    let mut fits = Vec::with_capacity(times.len());
    for &t in &times {
        let rows: Vec<(RatioSample, f64, f64)> = points
            .par_iter()
            .map(|&(i, j)| {
                let (x, y) = (spec.nodes[i], spec.nodes[j]);
                let ln_u = spec.ln_heat_kernel(t, i, j);
                let (ln_lo, ln_hi) = envelope(t, x, y)?;
                let ratio = (ln_u - ln_hi).exp();
                Ok((RatioSample { t, x, y, ratio }, ln_u - ln_hi, ln_lo - ln_u))
            })
            .collect::<Result<_>>()?;
        let upper_side = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max).exp();
        let lower_side = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max).exp();
        let c_hat = upper_side.max(lower_side).max(1.0);
        fits.push(TimeFit {
            t,
            c_hat,
            upper_side,
            lower_side,
        });
        samples.extend(rows.into_iter().map(|r| r.0));
    }

    let c_hat = fits.iter().map(|f| f.c_hat).fold(1.0, f64::max);
    let t_drift = (fits.len() >= 2).then(|| {
        let n = fits.len();
        relative_drift(fits[n - 1].c_hat, fits[n - 2].c_hat)
    });
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.ratio), hi.max(s.ratio)));
    let mut flags = vec![("c_hat_finite".to_string(), c_hat.is_finite())];
    if let Some(d) = t_drift {
        flags.push(("t_stable".into(), d < T_STABILITY));
    }
    Ok(VerificationReport {
        region: region.to_string(),
        samples,
        fits,
        c_hat,
        band: hi / lo,
        t_drift,
        refinement_drift: None,
        flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunctions {
    pub t: f64,
    pub trace: f64,
    pub hilbert_schmidt: f64,
    pub heat_content: f64,
}

pub fn spectral_functions(spec: &Spectrum, t: f64) -> SpectralFunctions {
    SpectralFunctions {
        t,
        trace: spec.trace(t),
        hilbert_schmidt: spec.trace(2.0 * t),
        heat_content: spec.heat_content(t),
    }
}

/// `∫ e^{-sV}` classified on the whole line, with the partial integrals
/// over `R₀ < |x| < m` on the boxes `m = M/4, M/2, M` alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub s: f64,
    pub convergent: bool,
    pub boxes: Vec<(f64, f64)>,
    pub report: ExpIntReport,
}

pub fn condition_check(v: &PotentialProfile, s: f64, half_width: f64) -> Result<ConditionCheck> {
    let report = check_exp_int(v, s, 1)?;
    let r0 = v.r0();
    let settings = nlhk_core::quad::QuadratureSettings::default();
    let boxes = [0.25, 0.5, 1.0]
        .iter()
        .map(|c| {
            let m = c * half_width;
            let val = if m > r0 {
                2.0 * nlhk_core::quad::integrate(|x| (-s * v.value(x)).exp(), r0, m, &settings).value
            } else {
                0.0
            };
            (m, val)
        })
        .collect();
    Ok(ConditionCheck {
        s,
        convergent: report.convergent,
        boxes,
        report,
    })
}
