//! The profile triple: jump profile `f`, potential profile `g` and the link
//! function `h` with `g(r) = h(|log f(r)|)`.
//!
//! Every type is immutable after construction; constructors validate the
//! structural requirements so evaluation never has to.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parametric or tabulated jump profile family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum JumpFamily {
    /// `f(r) = r^{-d-α} (e ∨ r)^{-γ}`.
    Poly { d: usize, alpha: f64, gamma: f64 },
    /// `f(r) = e^{-κ r} r^{-γ}` for `r ≥ 1` and `e^{-κ r} r^{-γ'}` below,
    /// where `γ'` is `core_gamma`.
    Exponential {
        d: usize,
        kappa: f64,
        gamma: f64,
        core_gamma: f64,
    },
    /// Log-linear interpolation of positive, strictly decreasing values.
    Tabulated(Table),
}

/// Knot table for a tabulated profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub d: usize,
    pub knots: Vec<f64>,
    /// Natural logarithms of the tabulated values.
    pub ln_values: Vec<f64>,
    /// Power-law exponent (negative) continuing the table past the last knot.
    pub tail_exponent: f64,
}

impl Table {
    fn ln_eval(&self, r: f64) -> f64 {
        let k = &self.knots;
        let n = k.len();
        if r <= k[0] {
            return self.ln_values[0];
        }
        if r >= k[n - 1] {
            return self.ln_values[n - 1] + self.tail_exponent * (r / k[n - 1]).ln();
        }
        let i = k.partition_point(|&x| x <= r) - 1;
        let w = (r - k[i]) / (k[i + 1] - k[i]);
        self.ln_values[i] * (1.0 - w) + self.ln_values[i + 1] * w
    }

    fn ln_slope(&self, r: f64) -> f64 {
        let k = &self.knots;
        let n = k.len();
        if r < k[0] {
            return 0.0;
        }
        if r >= k[n - 1] {
            return self.tail_exponent / r;
        }
        let i = k.partition_point(|&x| x <= r) - 1;
        (self.ln_values[i + 1] - self.ln_values[i]) / (k[i + 1] - k[i])
    }
}

/// The radial profile `f` of the jump density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpProfile {
    family: JumpFamily,
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("jump profile", "dimension must be positive"));
    }
    Ok(())
}

impl JumpProfile {
    pub fn poly(d: usize, alpha: f64, gamma: f64) -> Result<Self> {
        check_dim(d)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid("jump profile", format!("alpha = {alpha} not in (0,2)")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("jump profile", format!("gamma = {gamma} must be ≥ 0")));
        }
        Ok(Self {
            family: JumpFamily::Poly { d, alpha, gamma },
        })
    }

    /// Exponential profile with the tail exponent continued below `r = 1`.
    pub fn exponential(d: usize, kappa: f64, gamma: f64) -> Result<Self> {
        Self::exponential_with_core(d, kappa, gamma, gamma)
    }

    /// Exponential profile with a separate power `core_gamma` on `(0, 1)`,
    /// e.g. `d + α` for a stable-like core.
    pub fn exponential_with_core(d: usize, kappa: f64, gamma: f64, core_gamma: f64) -> Result<Self> {
        check_dim(d)?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid("jump profile", format!("kappa = {kappa} must be > 0")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("jump profile", format!("gamma = {gamma} must be ≥ 0")));
        }
        if !(core_gamma >= 0.0 && core_gamma.is_finite()) {
            return Err(Error::invalid(
                "jump profile",
                format!("core exponent {core_gamma} must be ≥ 0"),
            ));
        }
        Ok(Self {
            family: JumpFamily::Exponential {
                d,
                kappa,
                gamma,
                core_gamma,
            },
        })
    }

    /// Tabulated profile on strictly increasing radii with strictly
    /// decreasing positive values. At least two knots are required for the
    /// tail fit.
    pub fn tabulated(d: usize, knots: &[f64], values: &[f64]) -> Result<Self> {
        check_dim(d)?;
        if knots.len() != values.len() {
            return Err(Error::invalid("jump profile", "knots and values differ in length"));
        }
        if knots.len() < 2 {
            return Err(Error::invalid("jump profile", "need at least two knots"));
        }
        if knots.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(Error::invalid("jump profile", "knots must be positive and finite"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("jump profile", "values must be positive and finite"));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("jump profile", "knots must be strictly increasing"));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("jump profile", "values must be strictly decreasing"));
        }
        let n = knots.len();
        let ln_values: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let tail_exponent =
            (ln_values[n - 1] - ln_values[n - 2]) / (knots[n - 1] / knots[n - 2]).ln();
        Ok(Self {
            family: JumpFamily::Tabulated(Table {
                d,
                knots: knots.to_vec(),
                ln_values,
                tail_exponent,
            }),
        })
    }

    pub fn family(&self) -> &JumpFamily {
        &self.family
    }

    pub fn dimension(&self) -> usize {
        match &self.family {
            JumpFamily::Poly { d, .. } | JumpFamily::Exponential { d, .. } => *d,
            JumpFamily::Tabulated(t) => t.d,
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.family, JumpFamily::Tabulated(_))
    }

    /// `ln f(r)` for `r > 0`, without argument checks.
    pub fn ln_value(&self, r: f64) -> f64 {
        match &self.family {
            JumpFamily::Poly { d, alpha, gamma } => {
                let lr = r.ln();
                -(*d as f64 + alpha) * lr - gamma * lr.max(1.0)
            }
            JumpFamily::Exponential {
                kappa,
                gamma,
                core_gamma,
                ..
            } => {
                let p = if r >= 1.0 { *gamma } else { *core_gamma };
                -kappa * r - p * r.ln()
            }
            JumpFamily::Tabulated(t) => t.ln_eval(r),
        }
    }

    /// `f(r)` for `r > 0`, without argument checks.
    pub fn value(&self, r: f64) -> f64 {
        match &self.family {
            JumpFamily::Poly { d, alpha, gamma } => {
                let core = r.powf(-(*d as f64 + alpha));
                if *gamma == 0.0 {
                    core
                } else {
                    core * r.max(E).powf(-gamma)
                }
            }
            JumpFamily::Exponential {
                kappa,
                gamma,
                core_gamma,
                ..
            } => {
                let p = if r >= 1.0 { *gamma } else { *core_gamma };
                (-kappa * r).exp() * r.powf(-p)
            }
            JumpFamily::Tabulated(t) => t.ln_eval(r).exp(),
        }
    }

    pub fn eval_f(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("f", r, "r > 0"));
        }
        Ok(self.value(r))
    }

    /// `f ∧ 1`.
    pub fn eval_f1(&self, r: f64) -> Result<f64> {
        Ok(self.eval_f(r)?.min(1.0))
    }

    /// Unchecked `f ∧ 1`.
    pub fn value1(&self, r: f64) -> f64 {
        self.value(r).min(1.0)
    }

    /// `ln(f ∧ 1)`.
    pub fn ln_value1(&self, r: f64) -> f64 {
        self.ln_value(r).min(0.0)
    }

    /// `|log f(r)|`, defined where `f(r) < 1`.
    pub fn abs_log_f(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("|log f|", r, "r > 0"));
        }
        let l = self.ln_value(r);
        if !(l < 0.0) {
            return Err(Error::Precondition(format!(
                "|log f| requires f(r) < 1, but f({r}) = {}",
                l.exp()
            )));
        }
        Ok(-l)
    }

    /// `d/dr ln f(r)`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        match &self.family {
            JumpFamily::Poly { d, alpha, gamma } => {
                let tail = if r > E { *gamma } else { 0.0 };
                -(*d as f64 + alpha + tail) / r
            }
            JumpFamily::Exponential {
                kappa,
                gamma,
                core_gamma,
                ..
            } => {
                let p = if r >= 1.0 { *gamma } else { *core_gamma };
                -kappa - p / r
            }
            JumpFamily::Tabulated(t) => t.ln_slope(r),
        }
    }

    /// `ln f(r) - r · (ln f)'(r)`, evaluated without the cancellation of the
    /// two large terms for the parametric families.
    pub fn ln_tilt(&self, r: f64) -> f64 {
        match &self.family {
            JumpFamily::Poly { d, alpha, gamma } if r > E => {
                let q = *d as f64 + alpha + gamma;
                q * (1.0 - r.ln())
            }
            JumpFamily::Exponential { gamma, .. } if r >= 1.0 => gamma * (1.0 - r.ln()),
            _ => self.ln_value(r) - r * self.log_derivative(r),
        }
    }

    /// Exponent `q` of the small-radius behaviour `f(r) ~ r^{-q}`.
    pub fn core_exponent(&self) -> f64 {
        match &self.family {
            JumpFamily::Poly { d, alpha, .. } => *d as f64 + alpha,
            JumpFamily::Exponential { core_gamma, .. } => *core_gamma,
            JumpFamily::Tabulated(_) => 0.0,
        }
    }

    /// Radii where `f` is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.family {
            JumpFamily::Poly { gamma, .. } if *gamma > 0.0 => vec![E],
            JumpFamily::Poly { .. } => vec![],
            JumpFamily::Exponential { gamma, core_gamma, .. } if gamma != core_gamma => vec![1.0],
            JumpFamily::Exponential { .. } => vec![],
            JumpFamily::Tabulated(t) => t.knots.clone(),
        }
    }

    /// The radius `r₁` with `f(r₁) = 1`, where `f ∧ 1` has its kink, if it
    /// exists.
    pub fn unit_radius(&self) -> Option<f64> {
        match &self.family {
            JumpFamily::Poly { d, alpha, gamma } => Some((-gamma / (*d as f64 + alpha)).exp()),
            _ => {
                let g = |r: f64| self.ln_value(r);
                let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
                if g(lo) <= 0.0 {
                    return None;
                }
                while g(hi) > 0.0 {
                    hi *= 2.0;
                    if hi > 1e12 {
                        return None;
                    }
                }
                for _ in 0..200 {
                    let mid = (lo * hi).sqrt();
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if g(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(hi)
            }
        }
    }

    /// Symbolic doubling property `f(r) ≤ C f(2r)`: true for the polynomial
    /// family, false for exponential decay; tabulated profiles qualify when
    /// their power-law tail does.
    pub fn is_doubling(&self) -> bool {
        match &self.family {
            JumpFamily::Poly { .. } => true,
            JumpFamily::Exponential { .. } => false,
            JumpFamily::Tabulated(t) => t.tail_exponent.is_finite() && t.tail_exponent < 0.0,
        }
    }
}

/// Direction of the monotonicity of `s ↦ h(s)/s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RatioMonotonicity {
    Increasing,
    Decreasing,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LinkFamily {
    /// `h(s) = (s / scale)^β`.
    PowerOverScale { beta: f64, scale: f64 },
    /// Piecewise linear between knots; power law `c·s^p` beyond the last.
    Tabulated {
        knots: Vec<f64>,
        values: Vec<f64>,
        tail_exponent: f64,
    },
}

/// The increasing link `h` of `g(r) = h(|log f(r)|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkFunction {
    family: LinkFamily,
    domain_start: f64,
    ratio: RatioMonotonicity,
}

impl LinkFunction {
    pub fn power_over_scale(beta: f64, scale: f64, domain_start: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("link function", format!("beta = {beta} must be > 0")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid("link function", format!("scale = {scale} must be > 0")));
        }
        if !(domain_start >= 0.0 && domain_start.is_finite()) {
            return Err(Error::invalid("link function", "domain start must be finite and ≥ 0"));
        }
        let ratio = if beta > 1.0 {
            RatioMonotonicity::Increasing
        } else if beta < 1.0 {
            RatioMonotonicity::Decreasing
        } else {
            RatioMonotonicity::Constant
        };
        Ok(Self {
            family: LinkFamily::PowerOverScale { beta, scale },
            domain_start,
            ratio,
        })
    }

    /// Tabulated link starting at the first knot. Needs at least three
    /// knots for the tail fit.
    pub fn tabulated(knots: &[f64], values: &[f64]) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 3 {
            return Err(Error::invalid("link function", "need ≥ 3 knots with matching values"));
        }
        if knots.iter().chain(values).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid("link function", "knots and values must be positive"));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) || values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "link function",
                "knots and values must be strictly increasing",
            ));
        }
        let ratios: Vec<f64> = knots.iter().zip(values).map(|(s, h)| h / s).collect();
        let ratio = if ratios.windows(2).all(|w| w[1] == w[0]) {
            RatioMonotonicity::Constant
        } else if ratios.windows(2).all(|w| w[1] >= w[0]) {
            RatioMonotonicity::Increasing
        } else if ratios.windows(2).all(|w| w[1] <= w[0]) {
            RatioMonotonicity::Decreasing
        } else {
            return Err(Error::invalid("link function", "h(s)/s is not monotone on the knots"));
        };
        let n = knots.len();
        let xs: Vec<f64> = knots[n - 3..].iter().map(|s| s.ln()).collect();
        let ys: Vec<f64> = values[n - 3..].iter().map(|h| h.ln()).collect();
        let tail_exponent = log_log_slope(&xs, &ys);
        Ok(Self {
            family: LinkFamily::Tabulated {
                knots: knots.to_vec(),
                values: values.to_vec(),
                tail_exponent,
            },
            domain_start: knots[0],
            ratio,
        })
    }

    pub fn family(&self) -> &LinkFamily {
        &self.family
    }

    pub fn domain_start(&self) -> f64 {
        self.domain_start
    }

    pub fn ratio_monotonicity(&self) -> RatioMonotonicity {
        self.ratio
    }

    /// Unchecked evaluation.
    pub fn value(&self, s: f64) -> f64 {
        match &self.family {
            LinkFamily::PowerOverScale { beta, scale } => {
                let u = s / scale;
                if *beta == 1.0 {
                    u
                } else if *beta == 0.5 {
                    u.sqrt()
                } else {
                    u.powf(*beta)
                }
            }
            LinkFamily::Tabulated {
                knots,
                values,
                tail_exponent,
            } => {
                let n = knots.len();
                if s >= knots[n - 1] {
                    return values[n - 1] * (s / knots[n - 1]).powf(*tail_exponent);
                }
                if s <= knots[0] {
                    return values[0];
                }
                let i = knots.partition_point(|&x| x <= s) - 1;
                let w = (s - knots[i]) / (knots[i + 1] - knots[i]);
                values[i] * (1.0 - w) + values[i + 1] * w
            }
        }
    }

    pub fn eval_h(&self, s: f64) -> Result<f64> {
        if !(s >= self.domain_start) {
            return Err(Error::domain(
                "h",
                s,
                format!("s ≥ {}", self.domain_start),
            ));
        }
        Ok(self.value(s))
    }

    /// Same link with `h` replaced by `c·h`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("link function", "scale factor must be positive"));
        }
        let family = match &self.family {
            LinkFamily::PowerOverScale { beta, scale } => LinkFamily::PowerOverScale {
                beta: *beta,
                scale: scale * c.powf(-1.0 / beta),
            },
            LinkFamily::Tabulated {
                knots,
                values,
                tail_exponent,
            } => LinkFamily::Tabulated {
                knots: knots.clone(),
                values: values.iter().map(|v| v * c).collect(),
                tail_exponent: *tail_exponent,
            },
        };
        Ok(Self {
            family,
            domain_start: self.domain_start,
            ratio: self.ratio,
        })
    }
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialFamily {
    /// `g(r) = (1 ∨ log r)^β`.
    LogPower { beta: f64 },
    /// `g(r) = (1 ∨ r)^β`.
    Power { beta: f64 },
    /// `g(r) = h(|log f(r)|)` for `r ≥ R₀`.
    Composed { h: LinkFunction, f: JumpProfile },
}

/// The potential profile `g`, flattened to 1 on `[0, R₀)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    family: PotentialFamily,
    r0: f64,
    /// Constant multiplier applied everywhere, core included.
    scale: f64,
}

impl PotentialProfile {
    /// Logarithmic power with `R₀ = e`.
    pub fn log_power(beta: f64) -> Result<Self> {
        Self::log_power_with_r0(beta, E)
    }

    pub fn log_power_with_r0(beta: f64, r0: f64) -> Result<Self> {
        check_beta(beta)?;
        check_r0(r0)?;
        Ok(Self {
            family: PotentialFamily::LogPower { beta },
            r0,
            scale: 1.0,
        })
    }

    /// Power potential with `R₀ = 1`.
    pub fn power(beta: f64) -> Result<Self> {
        Self::power_with_r0(beta, 1.0)
    }

    pub fn power_with_r0(beta: f64, r0: f64) -> Result<Self> {
        check_beta(beta)?;
        check_r0(r0)?;
        Ok(Self {
            family: PotentialFamily::Power { beta },
            r0,
            scale: 1.0,
        })
    }

    /// `g = h(|log f|)` on `[R₀, ∞)`. Requires `f(R₀) < 1` and `R₀` inside
    /// the domain of `h`.
    pub fn composed(h: LinkFunction, f: JumpProfile, r0: f64) -> Result<Self> {
        check_r0(r0)?;
        let s0 = f.abs_log_f(r0).map_err(|_| {
            Error::invalid("potential profile", format!("f(R0) must be < 1 at R0 = {r0}"))
        })?;
        if s0 < h.domain_start() {
            return Err(Error::invalid(
                "potential profile",
                format!(
                    "|log f(R0)| = {s0} lies below the link domain start {}",
                    h.domain_start()
                ),
            ));
        }
        Ok(Self {
            family: PotentialFamily::Composed { h, f },
            r0,
            scale: 1.0,
        })
    }

    pub fn family(&self) -> &PotentialFamily {
        &self.family
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// `c·g`, without re-flattening the core.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("potential profile", "scale factor must be positive"));
        }
        Ok(Self {
            scale: self.scale * c,
            ..self.clone()
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Growth exponent of the parametric families.
    pub fn beta(&self) -> Option<f64> {
        match &self.family {
            PotentialFamily::LogPower { beta } | PotentialFamily::Power { beta } => Some(*beta),
            PotentialFamily::Composed { h, .. } => match h.family() {
                LinkFamily::PowerOverScale { beta, .. } => Some(*beta),
                LinkFamily::Tabulated { .. } => None,
            },
        }
    }

    /// Unchecked evaluation for `r ≥ 0`.
    pub fn value(&self, r: f64) -> f64 {
        if r < self.r0 {
            return self.scale;
        }
        let v = match &self.family {
            PotentialFamily::LogPower { beta } => {
                let l = r.ln().max(1.0);
                if *beta == 1.0 {
                    l
                } else {
                    l.powf(*beta)
                }
            }
            PotentialFamily::Power { beta } => {
                let b = r.max(1.0);
                if *beta == 1.0 {
                    b
                } else {
                    b.powf(*beta)
                }
            }
            PotentialFamily::Composed { h, f } => h.value(-f.ln_value(r)),
        };
        if self.scale == 1.0 {
            v
        } else {
            self.scale * v
        }
    }

    pub fn eval_g(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain("g", r, "r ≥ 0"));
        }
        Ok(self.value(r))
    }

    /// Radii where `g` is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k = vec![self.r0];
        match &self.family {
            PotentialFamily::LogPower { .. } => k.push(E),
            PotentialFamily::Power { .. } => k.push(1.0),
            PotentialFamily::Composed { f, .. } => k.extend(f.kinks()),
        }
        k
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid("potential profile", format!("beta = {beta} must be > 0")));
    }
    Ok(())
}

fn check_r0(r0: f64) -> Result<()> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::invalid("potential profile", format!("R0 = {r0} must be > 0")));
    }
    Ok(())
}

/// The pairing of the fractional family with a logarithmic potential:
/// `h(s) = (s/(d+α+γ))^β` starting at `|log f(e)| = d+α+γ`.
pub fn stable_link(d: usize, alpha: f64, gamma: f64, beta: f64) -> Result<LinkFunction> {
    let q = d as f64 + alpha + gamma;
    LinkFunction::power_over_scale(beta, q, q)
}

/// The pairing of the exponential family with a power potential:
/// `h(s) = (s/κ)^β` starting at `|log f(1)| = κ`.
pub fn relativistic_link(kappa: f64, beta: f64) -> Result<LinkFunction> {
    LinkFunction::power_over_scale(beta, kappa, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_values() {
        let f = JumpProfile::poly(1, 1.0, 0.0).unwrap();
        assert_eq!(f.eval_f(2.0).unwrap(), 0.25);
        assert_eq!(f.eval_f(1.0).unwrap(), 1.0);
        assert_eq!(f.eval_f1(0.5).unwrap(), 1.0);
        assert!(f.eval_f(0.0).is_err());
        assert!(f.eval_f(-1.0).is_err());
        assert!((f.abs_log_f(E).unwrap() - 2.0).abs() < 1e-15);
        assert!(f.abs_log_f(0.5).is_err());
    }

    #[test]
    fn exponential_values() {
        let f = JumpProfile::exponential(1, 1.0, 1.0).unwrap();
        let want = (-2.0f64).exp() / 2.0;
        assert!((f.eval_f(2.0).unwrap() - want).abs() < 1e-16);
        let f0 = JumpProfile::exponential(1, 1.0, 0.0).unwrap();
        assert!((f0.abs_log_f(5.0).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn tabulated_interpolates_and_extrapolates() {
        let f = JumpProfile::tabulated(1, &[1.0, 2.0, 4.0], &[1.0, 0.25, 0.0625]).unwrap();
        assert_eq!(f.value(0.5), 1.0);
        assert!((f.value(2.0) - 0.25).abs() < 1e-15);
        // power tail r^{-2}
        assert!((f.value(8.0) - 0.015625).abs() < 1e-15);
        assert!(JumpProfile::tabulated(1, &[1.0, 2.0], &[1.0, 1.0]).is_err());
        assert!(JumpProfile::tabulated(1, &[2.0, 1.0], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn potentials() {
        let g = PotentialProfile::log_power(2.0).unwrap();
        assert!((g.eval_g(E * E).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(g.eval_g(1.0).unwrap(), 1.0);
        let p = PotentialProfile::power(1.0).unwrap();
        assert_eq!(p.eval_g(3.0).unwrap(), 3.0);
    }

    #[test]
    fn links() {
        let h = LinkFunction::power_over_scale(0.5, 2.0, 2.0).unwrap();
        assert_eq!(h.eval_h(8.0).unwrap(), 2.0);
        assert_eq!(h.eval_h(2.0).unwrap(), 1.0);
        assert!(h.eval_h(1.0).is_err());
        assert_eq!(h.ratio_monotonicity(), RatioMonotonicity::Decreasing);
        let id = LinkFunction::power_over_scale(1.0, 1.0, 0.0).unwrap();
        assert_eq!(id.eval_h(5.0).unwrap(), 5.0);
    }

    #[test]
    fn unit_radius_is_where_f_crosses_one() {
        for f in [
            JumpProfile::poly(1, 1.0, 0.5).unwrap(),
            JumpProfile::exponential_with_core(1, 1.0, 2.0, 2.0).unwrap(),
        ] {
            let r1 = f.unit_radius().unwrap();
            assert!((f.value(r1) - 1.0).abs() < 1e-9, "{f:?}");
        }
        // γ' = 0: f < 1 on all of (0, ∞)
        assert!(JumpProfile::exponential(1, 1.0, 0.0).unwrap().unit_radius().is_none());
    }
}
