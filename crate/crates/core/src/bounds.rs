//! The envelope integrals `F`, `G`, `H` and the two-sided estimates built
//! from them.
//!
//! All estimates hold up to multiplicative constants that cannot be
//! computed; an [`Envelope`] therefore carries shapes, not bounds. Values
//! are kept as logarithms because the shapes underflow long before the
//! regimes of interest are reached.

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::conditions::ConstantsPack;
use crate::profiles::{JumpFamily, JumpProfile, PotentialFamily, PotentialProfile};
use crate::quad::{integrate_with_breaks, QuadratureSettings};
use crate::thresholds::{RegimeClass, ThresholdData};
use crate::{Error, Result};

/// Logarithm of a nonnegative integral together with its accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeIntegral {
    /// `ln` of the value; `-∞` for an empty domain.
    pub ln_value: f64,
    pub rel_error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl EnvelopeIntegral {
    fn empty() -> Self {
        Self {
            ln_value: f64::NEG_INFINITY,
            rel_error: 0.0,
            converged: true,
            evaluations: 0,
        }
    }

    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    fn combine(self, other: Self) -> Self {
        let ln_value = log_add(self.ln_value, other.ln_value);
        let w = |e: &Self| {
            if ln_value.is_finite() {
                (e.ln_value - ln_value).exp() * e.rel_error
            } else {
                0.0
            }
        };
        Self {
            ln_value,
            rel_error: w(&self) + w(&other),
            converged: self.converged && other.converged,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Which result produced an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResultId {
    /// Sharp two-sided kernel estimate in terms of `F`.
    KernelTheorem,
    /// Sharp two-sided estimate of `U_t 1` in terms of `G`.
    Ut1Theorem,
    /// Ground-state comparison everywhere in the bounded regime.
    Aiuc,
    /// Ground-state comparison inside the progressive window.
    PiucWindow,
    /// Tail estimate for doubling jump profiles.
    DoublingTail,
    /// Tail estimate for exponentially decaying jump profiles.
    ExponentialTail,
    Ut1Aiuc,
    Ut1Window,
    Ut1Tail,
}

impl ResultId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResultId::KernelTheorem => "kernel_theorem",
            ResultId::Ut1Theorem => "ut1_theorem",
            ResultId::Aiuc => "aiuc",
            ResultId::PiucWindow => "piuc_window",
            ResultId::DoublingTail => "doubling_tail",
            ResultId::ExponentialTail => "exponential_tail",
            ResultId::Ut1Aiuc => "ut1_aiuc",
            ResultId::Ut1Window => "ut1_window",
            ResultId::Ut1Tail => "ut1_tail",
        }
    }
}

impl std::fmt::Display for ResultId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    BothInner,
    Mixed,
    BothOuter,
    PiucWindow,
    OuterTail,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::BothInner => "both_inner",
            Region::Mixed => "mixed",
            Region::BothOuter => "both_outer",
            Region::PiucWindow => "piuc_window",
            Region::OuterTail => "outer_tail",
        }
    }
}

/// Lower and upper shapes of a two-sided estimate at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub t: f64,
    pub x_norm: f64,
    /// `None` for estimates of `U_t 1`.
    pub y_norm: Option<f64>,
    pub ln_lower: f64,
    pub ln_upper: f64,
    pub region: Region,
    pub result: ResultId,
    /// Always true: the shapes hold up to unknown constants.
    pub modulo_constant: bool,
    pub quadrature_converged: bool,
    pub constants_used: ConstantsPack,
}

impl Envelope {
    pub fn lower(&self) -> f64 {
        self.ln_lower.exp()
    }

    pub fn upper(&self) -> f64 {
        self.ln_upper.exp()
    }
}

/// Special pairings of jump profile and potential with explicit shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Pairing {
    /// Polynomial jumps with a logarithmic potential.
    Stable { q: f64, beta: f64 },
    /// Exponential jumps with a power potential.
    Relativistic { kappa: f64, gamma: f64, beta: f64 },
    General,
}

/// Profiles, constants and quadrature settings shared by all envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub f: JumpProfile,
    pub g: PotentialProfile,
    pub pack: ConstantsPack,
    pub q: QuadratureSettings,
    thresholds: Option<ThresholdData>,
    pairing: Pairing,
}

impl Model {
    pub fn new(
        f: JumpProfile,
        g: PotentialProfile,
        pack: ConstantsPack,
        q: QuadratureSettings,
    ) -> Result<Self> {
        q.validate()?;
        if q.dimension != f.dimension() {
            return Err(Error::invalid(
                "model",
                format!(
                    "quadrature dimension {} differs from profile dimension {}",
                    q.dimension,
                    f.dimension()
                ),
            ));
        }
        let thresholds = ThresholdData::for_profiles(&f, &g).ok();
        let pairing = match (f.family(), g.family()) {
            (JumpFamily::Poly { d, alpha, gamma }, PotentialFamily::LogPower { beta }) => {
                Pairing::Stable {
                    q: *d as f64 + alpha + gamma,
                    beta: *beta,
                }
            }
            (JumpFamily::Exponential { kappa, gamma, .. }, PotentialFamily::Power { beta }) => {
                Pairing::Relativistic {
                    kappa: *kappa,
                    gamma: *gamma,
                    beta: *beta,
                }
            }
            _ => Pairing::General,
        };
        Ok(Self {
            f,
            g,
            pack,
            q,
            thresholds,
            pairing,
        })
    }

    pub fn dimension(&self) -> usize {
        self.f.dimension()
    }

    pub fn thresholds(&self) -> Option<&ThresholdData> {
        self.thresholds.as_ref()
    }

    pub fn regime(&self) -> Option<RegimeClass> {
        self.thresholds.as_ref().map(|t| t.regime())
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    /// Inner radius of the annuli, `n₀ + 2`.
    pub fn annulus_start(&self) -> f64 {
        self.pack.n0 as f64 + 2.0
    }

    /// `ln` of the ground-state shape `1 ∧ f(r)/g(r)`, using the explicit
    /// forms of the special pairings.
    pub fn ln_ground_state_shape(&self, r: f64) -> f64 {
        match self.pairing {
            Pairing::Stable { q, .. } => -q * (1.0 + r).ln() - self.g.value(r).ln(),
            Pairing::Relativistic { kappa, gamma, beta } => {
                -kappa * r - (gamma + beta) * (1.0 + r).ln() - self.g.scale().ln()
            }
            Pairing::General => (self.f.ln_value(r) - self.g.value(r).ln()).min(0.0),
        }
    }

    fn check_point(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.dimension() {
            return Err(Error::invalid(
                "point",
                format!("expected {} coordinates, got {}", self.dimension(), p.len()),
            ));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point", "coordinates must be finite"));
        }
        Ok(norm(p))
    }

    fn check_tau(tau: f64) -> Result<()> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::domain("τ", tau, "τ > 0"));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let threshold = self.pack.time_threshold();
        if !(t > threshold) {
            return Err(Error::TimeBelowThreshold { t, threshold });
        }
        Ok(())
    }

    /// Radii where `f ∧ 1` is not smooth.
    fn f1_kinks(&self) -> Vec<f64> {
        let mut k = self.f.kinks();
        if let Some(r1) = self.f.unit_radius() {
            k.push(r1);
        }
        k.push(1.0);
        k
    }

    fn ln_g(&self, r: f64) -> f64 {
        self.g.value(r).ln()
    }
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// A point at which the integrand has kinks on spheres of the given radii.
struct Center {
    point: [f64; 2],
    radii: Vec<f64>,
}

fn as_2d(p: &[f64]) -> [f64; 2] {
    [p[0], p.get(1).copied().unwrap_or(0.0)]
}

/// `∫` of `exp(ln_f)` over `a ≤ |z| ≤ b` in dimension 1 or 2.
fn log_integral<L>(
    ln_f: L,
    a: f64,
    b: f64,
    centers: &[Center],
    radial_kinks: &[f64],
    q: &QuadratureSettings,
) -> EnvelopeIntegral
where
    L: Fn([f64; 2]) -> f64,
{
    if !(b > a) {
        return EnvelopeIntegral::empty();
    }
    if q.dimension == 1 {
        let mut total = EnvelopeIntegral::empty();
        for sign in [1.0, -1.0] {
            let (lo, hi) = if sign > 0.0 { (a, b) } else { (-b, -a) };
            let mut pts = vec![lo, hi];
            for c in centers {
                for r in std::iter::once(0.0).chain(c.radii.iter().copied()) {
                    pts.push(c.point[0] - r);
                    pts.push(c.point[0] + r);
                }
            }
            for k in radial_kinks {
                pts.push(sign * k);
            }
            pts.retain(|p| *p >= lo && *p <= hi);
            let piece = log_integral_segment(|z| ln_f([z, 0.0]), lo, hi, &pts, q);
            total = total.combine(piece);
        }
        return total;
    }
    log_integral_polar(ln_f, a, b, centers, radial_kinks, q)
}

fn sample_shift(ln_f: impl Fn(f64) -> f64, pts: &[f64], lo: f64, hi: f64) -> f64 {
    let mut m = f64::NEG_INFINITY;
    let n = 64;
    for i in 0..=n {
        m = m.max(ln_f(lo + (hi - lo) * i as f64 / n as f64));
    }
    for w in pts.windows(2) {
        m = m.max(ln_f(w[0])).max(ln_f(0.5 * (w[0] + w[1])));
    }
    if let Some(p) = pts.last() {
        m = m.max(ln_f(*p));
    }
    m
}

fn log_integral_segment(
    ln_f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    pts: &[f64],
    q: &QuadratureSettings,
) -> EnvelopeIntegral {
    let mut pts = pts.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let shift = sample_shift(&ln_f, &pts, lo, hi);
    if shift == f64::NEG_INFINITY {
        return EnvelopeIntegral::empty();
    }
    let r = integrate_with_breaks(|z| (ln_f(z) - shift).exp(), &pts, q);
    EnvelopeIntegral {
        ln_value: shift + r.value.ln(),
        rel_error: if r.value > 0.0 { r.abs_error / r.value } else { 0.0 },
        converged: r.converged,
        evaluations: r.evaluations,
    }
}

fn angle_breaks(rho: f64, centers: &[Center], panels: usize) -> Vec<f64> {
    let two_pi = 2.0 * PI;
    let mut pts: Vec<f64> = (0..=panels).map(|i| two_pi * i as f64 / panels as f64).collect();
    for c in centers {
        let p = (c.point[0] * c.point[0] + c.point[1] * c.point[1]).sqrt();
        if p == 0.0 {
            continue;
        }
        let theta = c.point[1].atan2(c.point[0]).rem_euclid(two_pi);
        pts.push(theta);
        for &r in &c.radii {
            let cos = (rho * rho + p * p - r * r) / (2.0 * rho * p);
            if cos.abs() < 1.0 {
                let d = cos.acos();
                pts.push((theta + d).rem_euclid(two_pi));
                pts.push((theta - d).rem_euclid(two_pi));
            }
        }
    }
    pts
}

fn log_integral_polar<L>(
    ln_f: L,
    a: f64,
    b: f64,
    centers: &[Center],
    radial_kinks: &[f64],
    q: &QuadratureSettings,
) -> EnvelopeIntegral
where
    L: Fn([f64; 2]) -> f64,
{
    let polar = |rho: f64, th: f64| ln_f([rho * th.cos(), rho * th.sin()]);
    let mut rpts = vec![a, b];
    rpts.extend(radial_kinks.iter().copied());
    for c in centers {
        let p = (c.point[0] * c.point[0] + c.point[1] * c.point[1]).sqrt();
        rpts.push(p);
        for &r in &c.radii {
            rpts.push(p - r);
            rpts.push(p + r);
        }
    }
    rpts.retain(|p| *p >= a && *p <= b);
    rpts.sort_by(f64::total_cmp);
    rpts.dedup();

    let mut shift = f64::NEG_INFINITY;
    let nr = 32;
    let mut rho_samples: Vec<f64> = (0..=nr).map(|i| a + (b - a) * i as f64 / nr as f64).collect();
    rho_samples.extend(rpts.iter().copied());
    for &rho in &rho_samples {
        for th in angle_breaks(rho, centers, 32) {
            shift = shift.max(polar(rho, th));
        }
    }
    if shift == f64::NEG_INFINITY {
        return EnvelopeIntegral::empty();
    }

    let inner_q = q.with_tolerances(q.abs_tol * 0.1, q.rel_tol * 0.1);
    let inner_ok = Cell::new(true);
    let inner_evals = Cell::new(0usize);
    let radial = |rho: f64| {
        let pts = angle_breaks(rho, centers, q.angular_points);
        let r = integrate_with_breaks(|th| (polar(rho, th) - shift).exp(), &pts, &inner_q);
        if !r.converged {
            inner_ok.set(false);
        }
        inner_evals.set(inner_evals.get() + r.evaluations);
        rho * r.value
    };
    let r = integrate_with_breaks(radial, &rpts, q);
    EnvelopeIntegral {
        ln_value: shift + r.value.ln(),
        rel_error: if r.value > 0.0 { r.abs_error / r.value } else { 0.0 },
        converged: r.converged && inner_ok.get(),
        evaluations: inner_evals.get(),
    }
}

/// `F(τ,x,y) = ∫_{n₀+2 < |z| < |x|∨|y|} f₁(|x-z|) f₁(|z-y|) e^{-τ g(|z|)} dz`.
pub fn integral_f(tau: f64, x: &[f64], y: &[f64], m: &Model) -> Result<EnvelopeIntegral> {
    Model::check_tau(tau)?;
    let (nx, ny) = (m.check_point(x)?, m.check_point(y)?);
    let a = m.annulus_start();
    if nx.min(ny) <= a + 1.0 {
        return Err(Error::Precondition(format!(
            "F needs |x|, |y| > n0 + 3 = {}",
            a + 1.0
        )));
    }
    let (px, py) = (as_2d(x), as_2d(y));
    let kinks = m.f1_kinks();
    let centers = [
        Center { point: px, radii: kinks.clone() },
        Center { point: py, radii: kinks },
    ];
    let ln_f = |z: [f64; 2]| {
        let dx = ((z[0] - px[0]).powi(2) + (z[1] - px[1]).powi(2)).sqrt();
        let dy = ((z[0] - py[0]).powi(2) + (z[1] - py[1]).powi(2)).sqrt();
        let rz = (z[0] * z[0] + z[1] * z[1]).sqrt();
        m.f.ln_value1(dx) + m.f.ln_value1(dy) - tau * m.g.value(rz)
    };
    Ok(log_integral(ln_f, a, nx.max(ny), &centers, &m.g.kinks(), &m.q))
}

/// `G(τ,x) = ∫_{n₀+2 < |z| ≤ |x|} f₁(|x-z|) e^{-τ g(|z|)} dz`.
pub fn integral_g(tau: f64, x: &[f64], m: &Model) -> Result<EnvelopeIntegral> {
    Model::check_tau(tau)?;
    let nx = m.check_point(x)?;
    let a = m.annulus_start();
    if nx <= a + 1.0 {
        return Err(Error::Precondition(format!("G needs |x| > n0 + 3 = {}", a + 1.0)));
    }
    let px = as_2d(x);
    let centers = [Center { point: px, radii: m.f1_kinks() }];
    let ln_f = |z: [f64; 2]| {
        let dx = ((z[0] - px[0]).powi(2) + (z[1] - px[1]).powi(2)).sqrt();
        let rz = (z[0] * z[0] + z[1] * z[1]).sqrt();
        m.f.ln_value1(dx) - tau * m.g.value(rz)
    };
    Ok(log_integral(ln_f, a, nx, &centers, &m.g.kinks(), &m.q))
}

/// `H(τ,x,y) = ∫_{n₀+2 ≤ |z| ≤ |x|∧|y|} e^{-κ(|x-z|+|z-y|)}
/// (1∨|x-z|)^{-γ} (1∨|z-y|)^{-γ} e^{-τ g(|z|)} dz` for exponential jumps.
pub fn integral_h(tau: f64, x: &[f64], y: &[f64], m: &Model) -> Result<EnvelopeIntegral> {
    Model::check_tau(tau)?;
    let JumpFamily::Exponential { kappa, gamma, .. } = *m.f.family() else {
        return Err(Error::Precondition("H needs an exponential jump profile".into()));
    };
    let (nx, ny) = (m.check_point(x)?, m.check_point(y)?);
    let a = m.annulus_start();
    if nx.min(ny) < a {
        return Err(Error::Precondition(format!("H needs |x|, |y| ≥ n0 + 2 = {a}")));
    }
    let (px, py) = (as_2d(x), as_2d(y));
    let centers = [
        Center { point: px, radii: vec![1.0] },
        Center { point: py, radii: vec![1.0] },
    ];
    let ln_f = |z: [f64; 2]| {
        let dx = ((z[0] - px[0]).powi(2) + (z[1] - px[1]).powi(2)).sqrt();
        let dy = ((z[0] - py[0]).powi(2) + (z[1] - py[1]).powi(2)).sqrt();
        let rz = (z[0] * z[0] + z[1] * z[1]).sqrt();
        -kappa * (dx + dy) - gamma * (dx.max(1.0).ln() + dy.max(1.0).ln()) - tau * m.g.value(rz)
    };
    Ok(log_integral(ln_f, a, nx.min(ny), &centers, &m.g.kinks(), &m.q))
}

fn envelope(
    m: &Model,
    t: f64,
    x_norm: f64,
    y_norm: Option<f64>,
    ln_lower: f64,
    ln_upper: f64,
    region: Region,
    result: ResultId,
    quadrature_converged: bool,
) -> Envelope {
    Envelope {
        t,
        x_norm,
        y_norm,
        ln_lower,
        ln_upper,
        region,
        result,
        modulo_constant: true,
        quadrature_converged,
        constants_used: m.pack.clone(),
    }
}

/// Two-sided shapes for `u_t(x,y)` by region, valid for `t > 30 t_b`.
pub fn envelope_heat_kernel(t: f64, x: &[f64], y: &[f64], m: &Model) -> Result<Envelope> {
    m.check_time(t)?;
    let (nx, ny) = (m.check_point(x)?, m.check_point(y)?);
    let inner = m.pack.inner_radius();
    let ln_e = -m.pack.lambda0_hat * t;
    let (x_out, y_out) = (nx > inner, ny > inner);
    let env = |lo, hi, region, ok| {
        envelope(m, t, nx, Some(ny), lo, hi, region, ResultId::KernelTheorem, ok)
    };
    match (x_out, y_out) {
        (false, false) => Ok(env(ln_e, ln_e, Region::BothInner, true)),
        (true, false) | (false, true) => {
            let r = if x_out { nx } else { ny };
            let s = ln_e + m.f.ln_value(r) - m.ln_g(r);
            Ok(env(s, s, Region::Mixed, true))
        }
        (true, true) => {
            let k = m.pack.k;
            let lo_f = integral_f(k * t, x, y, m)?;
            let hi_f = integral_f(t / k, x, y, m)?;
            let ground = ln_e + m.f.ln_value(nx) + m.f.ln_value(ny);
            let denom = m.ln_g(nx) + m.ln_g(ny);
            Ok(env(
                lo_f.ln_value.max(ground) - denom,
                hi_f.ln_value.max(ground) - denom,
                Region::BothOuter,
                lo_f.converged && hi_f.converged,
            ))
        }
    }
}

/// Two-sided shapes for `U_t 1(x)`, valid for `t > 30 t_b`.
pub fn envelope_ut1(t: f64, x: &[f64], m: &Model) -> Result<Envelope> {
    m.check_time(t)?;
    let nx = m.check_point(x)?;
    let ln_e = -m.pack.lambda0_hat * t;
    if nx <= m.pack.inner_radius() {
        return Ok(envelope(m, t, nx, None, ln_e, ln_e, Region::BothInner, ResultId::Ut1Theorem, true));
    }
    let k = m.pack.k;
    let lo = integral_g(k * t, x, m)?;
    let hi = integral_g(t / k, x, m)?;
    let ground = ln_e + m.f.ln_value(nx);
    let lg = m.ln_g(nx);
    Ok(envelope(
        m,
        t,
        nx,
        None,
        lo.ln_value.max(ground) - lg,
        hi.ln_value.max(ground) - lg,
        Region::BothOuter,
        ResultId::Ut1Theorem,
        lo.converged && hi.converged,
    ))
}

fn uncovered(reason: impl Into<String>) -> Error {
    Error::OutsideSimplifiedCoverage(format!(
        "{}; use the full kernel envelope instead",
        reason.into()
    ))
}

/// Start of the time range of the bounded-regime comparison, `30 t_b + K τ₀`.
pub fn aiuc_time_threshold(m: &Model, k: f64) -> Option<f64> {
    let tau0 = m.regime()?.tau0()?;
    Some(m.pack.time_threshold() + k * tau0)
}

/// Start of the time range of the progressive window, `max(30 t_b, K Λ(n₀+4))`.
pub fn window_time_threshold(m: &Model, k: f64) -> Result<f64> {
    let th = m
        .thresholds()
        .ok_or_else(|| uncovered("no threshold function for these profiles"))?;
    let lam = th.lambda(m.pack.n0 as f64 + 4.0)?;
    Ok(m.pack.time_threshold().max(k * lam))
}

/// Closed-form shapes of the regime-specific corollaries for `u_t(x,y)`.
pub fn simplified_bounds(t: f64, x: &[f64], y: &[f64], m: &Model) -> Result<Envelope> {
    let (nx, ny) = (m.check_point(x)?, m.check_point(y)?);
    let th = m
        .thresholds()
        .ok_or_else(|| uncovered("no threshold function for these profiles"))?;
    let ln_e = -m.pack.lambda0_hat * t;
    let k2 = m.pack.k2;
    let ground = ln_e + m.ln_ground_state_shape(nx) + m.ln_ground_state_shape(ny);
    let env = |lo, hi, region, id, ok| envelope(m, t, nx, Some(ny), lo, hi, region, id, ok);

    if th.regime().is_aiuc() {
        let start = aiuc_time_threshold(m, k2).unwrap_or(f64::INFINITY);
        if !(t > start) {
            return Err(uncovered(format!("t = {t} not above {start}")));
        }
        return Ok(env(ground, ground, Region::PiucWindow, ResultId::Aiuc, true));
    }

    let start = window_time_threshold(m, k2)?;
    if !(t > start) {
        return Err(uncovered(format!("t = {t} not above {start}")));
    }
    let window = th.lambda_inv(t / k2)?;
    let lo_r = nx.min(ny);
    if lo_r < window {
        return Ok(env(ground, ground, Region::PiucWindow, ResultId::PiucWindow, true));
    }
    let g_window = m.g.value(window);
    let lambda0 = m.pack.lambda0_hat.abs();

    if m.f.is_doubling() {
        if g_window < 4.0 * k2 * lambda0 {
            return Err(uncovered(format!(
                "g at the window radius ({g_window}) below 4·K2·|λ0| = {}",
                4.0 * k2 * lambda0
            )));
        }
        let k3 = m.pack.k3;
        let dist = distance(x, y);
        let base = m.f.ln_value1(dist) - m.ln_g(nx) - m.ln_g(ny);
        let g_min = m.g.value(lo_r);
        Ok(env(
            base - k3 * t * g_min,
            base - t / k3 * g_min,
            Region::OuterTail,
            ResultId::DoublingTail,
            true,
        ))
    } else {
        let JumpFamily::Exponential { kappa, gamma, .. } = *m.f.family() else {
            return Err(uncovered("tail estimates need a doubling or exponential jump profile"));
        };
        // The power pairing uses V itself and the larger constant C6·K2.
        let (kk, g_min, denom) = match m.pairing {
            Pairing::Relativistic { beta, .. } => (
                m.pack.k4,
                lo_r.powf(beta),
                beta * (nx.ln() + ny.ln()) + 2.0 * m.g.scale().ln(),
            ),
            _ => (k2, m.g.value(lo_r), m.ln_g(nx) + m.ln_g(ny)),
        };
        let dist = distance(x, y);
        let ground_tail = ln_e - kappa * (nx + ny) - gamma * (nx.ln() + ny.ln());
        let jump = |k_t: f64| -k_t * g_min - kappa * dist - gamma * (1.0 + dist).ln();
        let mut lo = ground_tail.max(jump(kk * t));
        let mut hi = ground_tail.max(jump(t / kk));
        let mut ok = true;
        if m.dimension() == 2 || gamma <= 1.0 {
            let hl = integral_h(kk * t, x, y, m)?;
            let hu = integral_h(t / kk, x, y, m)?;
            lo = lo.max(hl.ln_value);
            hi = hi.max(hu.ln_value);
            ok = hl.converged && hu.converged;
        }
        Ok(env(lo - denom, hi - denom, Region::OuterTail, ResultId::ExponentialTail, ok))
    }
}

/// Closed-form shapes for `U_t 1(x)` in both regimes.
pub fn simplified_ut1(t: f64, x: &[f64], m: &Model) -> Result<Envelope> {
    let nx = m.check_point(x)?;
    let th = m
        .thresholds()
        .ok_or_else(|| uncovered("no threshold function for these profiles"))?;
    let ln_e = -m.pack.lambda0_hat * t;
    let k1 = m.pack.k1;
    let ground = ln_e + m.ln_ground_state_shape(nx);
    let env = |lo, hi, region, id| envelope(m, t, nx, None, lo, hi, region, id, true);
    if th.regime().is_aiuc() {
        let tau0 = th.regime().tau0().unwrap_or(f64::INFINITY);
        let start = m.pack.time_threshold().max(k1 * tau0);
        if !(t > start) {
            return Err(uncovered(format!("t = {t} not above {start}")));
        }
        return Ok(env(ground, ground, Region::PiucWindow, ResultId::Ut1Aiuc));
    }
    let lam = th.lambda(m.pack.n0 as f64 + 4.0)?;
    let start = m.pack.t_b.max(k1 * lam);
    if !(t > start) {
        return Err(uncovered(format!("t = {t} not above {start}")));
    }
    let window = th.lambda_inv(t / k1)?;
    if nx < window {
        return Ok(env(ground, ground, Region::PiucWindow, ResultId::Ut1Window));
    }
    let gx = m.g.value(nx);
    let lg = gx.ln();
    Ok(env(-k1 * t * gx - lg, -t / k1 * gx - lg, Region::OuterTail, ResultId::Ut1Tail))
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}
