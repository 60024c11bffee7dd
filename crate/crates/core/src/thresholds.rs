//! Regime classification and the moving boundary `Λ`, `Λ⁻¹`.

use serde::{Deserialize, Serialize};

use crate::profiles::{
    relativistic_link, stable_link, JumpFamily, JumpProfile, LinkFamily, LinkFunction,
    PotentialFamily, PotentialProfile,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegimeKind {
    /// `h(s)/s` has a positive limit; `Λ ≤ τ₀` everywhere.
    Aiuc { tau0: f64 },
    NonAiuc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassificationBasis {
    ClosedForm,
    NumericExtrapolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClass {
    pub kind: RegimeKind,
    pub basis: ClassificationBasis,
}

impl RegimeClass {
    pub fn is_aiuc(&self) -> bool {
        matches!(self.kind, RegimeKind::Aiuc { .. })
    }

    pub fn tau0(&self) -> Option<f64> {
        match self.kind {
            RegimeKind::Aiuc { tau0 } => Some(tau0),
            RegimeKind::NonAiuc => None,
        }
    }
}

/// Decide the regime from the behavior of `h(s)/s` as `s → ∞`.
///
/// In the bounded regime `τ₀ = sup_{s ≥ s₀} s/h(s)`, which for
/// `(s/scale)^β` with `β ≥ 1` is `scale^β s₀^{1-β}`.
pub fn classify(h: &LinkFunction) -> RegimeClass {
    let s0 = h.domain_start();
    match h.family() {
        LinkFamily::PowerOverScale { beta, scale } => {
            let kind = if *beta >= 1.0 {
                let tau0 = if *beta == 1.0 {
                    *scale
                } else {
                    scale.powf(*beta) * s0.powf(1.0 - beta)
                };
                RegimeKind::Aiuc { tau0 }
            } else {
                RegimeKind::NonAiuc
            };
            RegimeClass {
                kind,
                basis: ClassificationBasis::ClosedForm,
            }
        }
        LinkFamily::Tabulated {
            knots,
            values,
            tail_exponent,
        } => {
            let n = knots.len();
            let ratios: Vec<f64> = knots[n - 3..]
                .iter()
                .zip(&values[n - 3..])
                .map(|(s, v)| v / s)
                .collect();
            // A tail exponent at or above one keeps h(s)/s away from zero.
            let bounded = *tail_exponent >= 1.0 - 1e-9
                || ratios.windows(2).all(|w| w[1] >= w[0]);
            let kind = if bounded {
                let probe = [s0, knots[n - 1]];
                let tau0 = probe
                    .iter()
                    .map(|&s| s / h.value(s))
                    .chain(knots.iter().zip(values).map(|(s, v)| s / v))
                    .fold(0.0, f64::max);
                RegimeKind::Aiuc { tau0 }
            } else {
                RegimeKind::NonAiuc
            };
            RegimeClass {
                kind,
                basis: ClassificationBasis::NumericExtrapolation,
            }
        }
    }
}

/// `Λ(r) = |log f(r)| / h(|log f(r)|)`.
pub fn lambda_of_r(f: &JumpProfile, h: &LinkFunction, r: f64) -> Result<f64> {
    let s = f.abs_log_f(r)?;
    let hv = h.eval_h(s)?;
    Ok(s / hv)
}

/// Closed forms of `|log f|` on the range where they hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// `|log f(r)| = q log r` for `r ≥ e`.
    Stable { q: f64 },
    /// `|log f(r)| = κ r + γ log r` for `r ≥ 1`.
    Relativistic { kappa: f64, gamma: f64 },
}

/// The moving-boundary machinery for a fixed pair `(f, h)` and base
/// radius `R₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdData {
    f: JumpProfile,
    h: LinkFunction,
    r0: f64,
    regime: RegimeClass,
    closed_form: Option<ClosedForm>,
}

impl ThresholdData {
    pub fn new(f: JumpProfile, h: LinkFunction, r0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::invalid("threshold data", format!("R0 = {r0}")));
        }
        lambda_of_r(&f, &h, r0)?;
        let closed_form = match (f.family(), h.family()) {
            (JumpFamily::Poly { d, alpha, gamma }, LinkFamily::PowerOverScale { .. }) => {
                Some(ClosedForm::Stable {
                    q: *d as f64 + alpha + gamma,
                })
            }
            (JumpFamily::Exponential { kappa, gamma, .. }, LinkFamily::PowerOverScale { .. }) => {
                Some(ClosedForm::Relativistic {
                    kappa: *kappa,
                    gamma: *gamma,
                })
            }
            _ => None,
        };
        let regime = classify(&h);
        Ok(Self {
            f,
            h,
            r0,
            regime,
            closed_form,
        })
    }

    /// Threshold data for `g`, reading `h` off a composed potential or
    /// pairing the parametric potentials with their matching jump family.
    pub fn for_profiles(f: &JumpProfile, g: &PotentialProfile) -> Result<Self> {
        let (h, jump) = match (g.family(), f.family()) {
            (PotentialFamily::Composed { h, f: inner }, _) => (h.clone(), inner.clone()),
            (PotentialFamily::LogPower { beta }, JumpFamily::Poly { d, alpha, gamma }) => {
                (stable_link(*d, *alpha, *gamma, *beta)?, f.clone())
            }
            (PotentialFamily::Power { beta }, JumpFamily::Exponential { kappa, .. }) => {
                (relativistic_link(*kappa, *beta)?, f.clone())
            }
            _ => {
                return Err(Error::invalid(
                    "threshold data",
                    "potential is neither composed nor paired with a matching jump family",
                ))
            }
        };
        let h = if g.scale() == 1.0 { h } else { h.scaled(g.scale())? };
        let r0 = match (g.family(), f.family()) {
            (PotentialFamily::LogPower { .. }, _) => g.r0().max(std::f64::consts::E),
            (PotentialFamily::Power { .. }, _) => g.r0().max(1.0),
            _ => g.r0(),
        };
        Self::new(jump, h, r0)
    }

    pub fn jump(&self) -> &JumpProfile {
        &self.f
    }

    pub fn link(&self) -> &LinkFunction {
        &self.h
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn regime(&self) -> RegimeClass {
        self.regime
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    pub fn lambda(&self, r: f64) -> Result<f64> {
        if !(r >= self.r0) {
            return Err(Error::domain("Λ", r, format!("r ≥ R0 = {}", self.r0)));
        }
        lambda_of_r(&self.f, &self.h, r)
    }

    fn lambda_unchecked(&self, r: f64) -> f64 {
        let s = -self.f.ln_value(r);
        s / self.h.value(s)
    }

    /// `Λ⁻¹(τ) = inf{r ≥ R₀ : Λ(r) > τ}`; `+∞` in the bounded regime and
    /// whenever `Λ` never exceeds `τ`.
    pub fn lambda_inv(&self, tau: f64) -> Result<f64> {
        let base = self.lambda_unchecked(self.r0);
        if !(tau >= base) {
            return Err(Error::domain("Λ⁻¹", tau, format!("τ ≥ Λ(R0) = {base}")));
        }
        if self.regime.is_aiuc() {
            return Ok(f64::INFINITY);
        }
        let guess = self.closed_form_inverse(tau);
        let r = match guess {
            Some(r) if r >= self.r0 => self.polish(r, tau),
            _ => self.bisect(tau),
        };
        Ok(r)
    }

    fn closed_form_inverse(&self, tau: f64) -> Option<f64> {
        let LinkFamily::PowerOverScale { beta, scale } = self.h.family() else {
            return None;
        };
        if *beta >= 1.0 {
            return None;
        }
        // Λ = scale^β u^{1-β} with u = |log f|.
        let u = (tau / scale.powf(*beta)).powf(1.0 / (1.0 - beta));
        match self.closed_form? {
            ClosedForm::Stable { q } => {
                let r = (u / q).exp();
                (r >= std::f64::consts::E).then_some(r)
            }
            ClosedForm::Relativistic { kappa, gamma } => {
                if u < kappa {
                    return None;
                }
                let uf = |r: f64| kappa * r + gamma * r.ln();
                let (mut lo, mut hi) = (1.0, (u / kappa).max(1.0));
                while uf(hi) < u {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if uf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(hi)
            }
        }
    }

    /// Move a closed-form root by a few ulps so that `Λ(r) > τ` while
    /// `Λ ≤ τ` just below it.
    fn polish(&self, mut r: f64, tau: f64) -> f64 {
        for _ in 0..64 {
            if self.lambda_unchecked(r) > tau {
                break;
            }
            r = r.next_up();
        }
        for _ in 0..64 {
            let below = r.next_down();
            if below < self.r0 || self.lambda_unchecked(below) <= tau {
                break;
            }
            r = below;
        }
        r
    }

    fn bisect(&self, tau: f64) -> f64 {
        let above = |r: f64| self.lambda_unchecked(r) > tau;
        if above(self.r0) {
            return self.r0;
        }
        let mut lo = self.r0.ln();
        let mut hi = lo + 1.0;
        while !above(hi.exp()) {
            lo = hi;
            hi = 2.0 * hi + 1.0;
            if hi > 690.0 {
                return f64::INFINITY;
            }
        }
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if above(mid.exp()) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi.exp()
    }
}
