//! The free symmetric Lévy process: characteristic exponent, transition
//! density by Fourier inversion, and checks of the density assumptions.
//!
//! Densities are one-dimensional.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::profiles::{JumpFamily, JumpProfile};
use crate::quad::{integrate, integrate_to_infinity, wynn_epsilon, QuadratureSettings};
use crate::{Error, Result};

/// `ψ(ξ) t` required at the Nyquist frequency.
pub const NYQUIST_EXPONENT: f64 = 36.0;

/// `ψ(ξ) = a ξ² + ∫ (1 - cos ξz) ν(z) dz` with `ν(z) = σ₀ f(|z|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevySymbol {
    diffusion: f64,
    sigma0: f64,
    f: JumpProfile,
}

/// `∫_0^∞ (1 - cos u) u^{-1-α} du`.
pub fn stable_constant(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        PI / 2.0
    } else {
        gamma(1.0 - alpha) * (PI * alpha / 2.0).cos() / alpha
    }
}

fn q() -> QuadratureSettings {
    QuadratureSettings::default().with_tolerances(1e-15, 1e-12)
}

impl LevySymbol {
    pub fn new(diffusion: f64, sigma0: f64, f: JumpProfile) -> Result<Self> {
        if !(diffusion >= 0.0 && diffusion.is_finite()) {
            return Err(Error::invalid("Lévy symbol", format!("diffusion {diffusion} must be ≥ 0")));
        }
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(Error::invalid("Lévy symbol", format!("σ0 = {sigma0} must be > 0")));
        }
        if f.dimension() != 1 {
            return Err(Error::invalid("Lévy symbol", "only d = 1 symbols are supported"));
        }
        let core = f.core_exponent();
        if core >= 3.0 {
            return Err(Error::invalid(
                "Lévy symbol",
                format!("∫(1∧z²)ν diverges at the origin (core exponent {core} ≥ 3)"),
            ));
        }
        let s = Self {
            diffusion,
            sigma0,
            f,
        };
        let tail = s.tail_mass(1.0);
        if !tail.is_finite() {
            return Err(Error::invalid("Lévy symbol", "∫_{|z|>1} ν diverges"));
        }
        Ok(s)
    }

    /// Pure-jump symbol normalized so that `ψ(ξ) ~ |ξ|^α` at high
    /// frequency for the polynomial family (`ψ(ξ) = |ξ|^α` when `γ = 0`);
    /// `σ₀ = 1` otherwise.
    pub fn normalized(f: JumpProfile) -> Result<Self> {
        let sigma0 = match f.family() {
            JumpFamily::Poly { alpha, gamma, .. } => gamma.exp() / (2.0 * stable_constant(*alpha)),
            _ => 1.0,
        };
        Self::new(0.0, sigma0, f)
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn profile(&self) -> &JumpProfile {
        &self.f
    }

    /// Jump density `ν(z)`.
    pub fn nu(&self, z: f64) -> f64 {
        self.sigma0 * self.f.value(z.abs())
    }

    /// `∫_{|z| ≥ ε} ν(z) dz`.
    pub fn tail_mass(&self, eps: f64) -> f64 {
        let mut total = 0.0;
        let mut a = eps;
        for k in self.f.kinks().into_iter().filter(|k| *k > eps) {
            total += integrate(|z| self.f.value(z), a, k, &q()).value;
            a = k;
        }
        total += integrate_to_infinity(|z| self.f.value(z), a, &q()).value;
        2.0 * self.sigma0 * total
    }

    /// `∫_{|z| < ε} z² ν(z) dz`.
    pub fn small_jump_variance(&self, eps: f64) -> f64 {
        2.0 * self.sigma0 * self.moment_below(eps, |z| z * z)
    }

    /// `∫_0^ε w(z) f(z) dz` for a weight vanishing like `z²`, on geometric
    /// panels with the power-law remainder near the origin added in closed
    /// form.
    fn moment_below(&self, eps: f64, w: impl Fn(f64) -> f64) -> f64 {
        const PANELS: i32 = 60;
        let mut total = 0.0;
        let mut hi = eps;
        let mut kinks: Vec<f64> = self.f.kinks().into_iter().filter(|k| *k < eps).collect();
        kinks.sort_by(f64::total_cmp);
        for _ in 0..PANELS {
            let lo = 0.5 * hi;
            let mut pts = vec![lo, hi];
            pts.extend(kinks.iter().copied().filter(|k| *k > lo && *k < hi));
            total += crate::quad::integrate_with_breaks(|z| w(z) * self.f.value(z), &pts, &q()).value;
            hi = lo;
        }
        // f(z) ≈ f(ε') (ε'/z)^q below ε', weight ≈ z² · w(ε')/ε'².
        let qexp = self.f.core_exponent();
        total + w(hi) / (hi * hi) * self.f.value(hi) * hi.powi(3) / (3.0 - qexp)
    }

    /// `ψ(ξ)`, in closed form for the pure polynomial family and by
    /// quadrature otherwise.
    pub fn psi(&self, xi: f64) -> f64 {
        if let JumpFamily::Poly { alpha, gamma, .. } = self.f.family() {
            if *gamma == 0.0 {
                let c = 2.0 * self.sigma0 * stable_constant(*alpha);
                return self.diffusion * xi * xi + c * xi.abs().powf(*alpha);
            }
        }
        self.psi_numeric(xi)
    }

    /// `ψ(ξ)` by quadrature, split at `|z| = 1/|ξ|`.
    pub fn psi_numeric(&self, xi: f64) -> f64 {
        let xi = xi.abs();
        if xi == 0.0 {
            return 0.0;
        }
        let z0 = 1.0 / xi;
        let one_minus_cos = |z: f64| {
            let s = (0.5 * xi * z).sin();
            2.0 * s * s
        };
        let inner = self.moment_below(z0, one_minus_cos);
        let outer = self.oscillatory_tail(xi, z0);
        self.diffusion * xi * xi + 2.0 * self.sigma0 * (inner + outer)
    }

    /// `∫_{z₀}^∞ (1 - cos ξz) f(z) dz`: the non-oscillatory part directly,
    /// the cosine part over half periods with Wynn acceleration.
    fn oscillatory_tail(&self, xi: f64, z0: f64) -> f64 {
        let mut plain = 0.0;
        let mut a = z0;
        let kinks: Vec<f64> = self.f.kinks().into_iter().filter(|k| *k > z0).collect();
        for &k in &kinks {
            plain += integrate(|z| self.f.value(z), a, k, &q()).value;
            a = k;
        }
        plain += integrate_to_infinity(|z| self.f.value(z), a, &q()).value;

        let half = PI / xi;
        let mut sums = Vec::new();
        let mut acc = 0.0;
        // Start the alternating part at the first zero of cos(ξz) past z₀.
        let first = ((xi * z0 / PI - 0.5).ceil() + 0.5) * half;
        let mut pts = vec![z0, first];
        pts.extend(kinks.iter().copied().filter(|k| *k < first));
        acc += crate::quad::integrate_with_breaks(|z| (xi * z).cos() * self.f.value(z), &pts, &q()).value;
        let mut lo = first;
        for _ in 0..60 {
            let hi = lo + half;
            let mut pts = vec![lo, hi];
            pts.extend(kinks.iter().copied().filter(|k| *k > lo && *k < hi));
            acc += crate::quad::integrate_with_breaks(
                |z| (xi * z).cos() * self.f.value(z),
                &pts,
                &q(),
            )
            .value;
            sums.push(acc);
            lo = hi;
        }
        plain - wynn_epsilon(&sums)
    }

    /// Smallest frequency with `t ψ(ξ) ≥ 36`.
    pub fn required_frequency(&self, t: f64) -> f64 {
        let target = NYQUIST_EXPONENT / t;
        let mut hi = 1.0;
        while self.psi(hi) < target {
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.psi(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Periodic spatial grid `x_j = (j - n/2) Δ`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub points: usize,
    pub spacing: f64,
}

impl SpatialGrid {
    pub fn new(points: usize, spacing: f64) -> Result<Self> {
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::invalid("grid", format!("{points} points (need a power of two ≥ 16)")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid("grid", format!("spacing {spacing} must be > 0")));
        }
        Ok(Self { points, spacing })
    }

    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.spacing
    }

    pub fn period(&self) -> f64 {
        self.points as f64 * self.spacing
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.spacing
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub t: f64,
    pub grid: SpatialGrid,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub mass_defect: f64,
}

impl DensityGrid {
    /// Indices with `|x| ≤ r`.
    pub fn within(&self, r: f64) -> impl Iterator<Item = usize> + '_ {
        (0..self.xs.len()).filter(move |&j| self.xs[j].abs() <= r)
    }
}

/// `p_t` on the grid by discrete Fourier inversion of `e^{-tψ}`.
pub fn density_fft(sym: &LevySymbol, t: f64, grid: &SpatialGrid) -> Result<DensityGrid> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("t", t, "t > 0"));
    }
    let n = grid.points;
    let nyq = grid.nyquist();
    if sym.psi(nyq) * t < NYQUIST_EXPONENT {
        let required_xi = sym.required_frequency(t);
        let required_spacing = PI / required_xi;
        let required_points = ((grid.period() / required_spacing).ceil() as usize).next_power_of_two();
        return Err(Error::Nyquist {
            nyquist: nyq,
            required_xi,
            required_spacing,
            required_points,
        });
    }
    let dxi = 2.0 * PI / grid.period();
    let half: Vec<f64> = (0..=n / 2)
        .into_par_iter()
        .map(|k| (-t * sym.psi(k as f64 * dxi)).exp())
        .collect();
    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| {
            let kk = if k <= n / 2 { k } else { n - k };
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * half[kk], 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / grid.period();
    let mut values: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
    for j in 1..n / 2 {
        let m = 0.5 * (values[j] + values[n - j]);
        values[j] = m;
        values[n - j] = m;
    }
    let xs: Vec<f64> = (0..n).map(|j| grid.x(j)).collect();
    let mass: f64 = values.iter().sum::<f64>() * grid.spacing;
    Ok(DensityGrid {
        t,
        grid: *grid,
        xs,
        values,
        mass_defect: (1.0 - mass).abs(),
    })
}

/// Circular convolution of two grid densities, `Σ_k p(x_j - x_k) q(x_k) Δ`.
pub fn convolve(p: &DensityGrid, q: &DensityGrid) -> Result<Vec<f64>> {
    if p.grid != q.grid {
        return Err(Error::invalid("convolution", "grids differ"));
    }
    let n = p.grid.points;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    // Index j ↔ x_j = (j - n/2)Δ; shift so that index 0 is x = 0.
    let shifted = |v: &[f64]| -> Vec<Complex64> {
        (0..n).map(|j| Complex64::new(v[(j + n / 2) % n], 0.0)).collect()
    };
    let mut a = shifted(&p.values);
    let mut b = shifted(&q.values);
    fwd.process(&mut a);
    fwd.process(&mut b);
    let mut c: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    inv.process(&mut c);
    let s = p.grid.spacing / n as f64;
    Ok((0..n).map(|j| c[(j + n / 2) % n].re * s).collect())
}

/// Fitted constants of `p_t(x) ≤ C₄ ([e^{C₅ t} f(|x|)] ∧ 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A2aFit {
    pub c4: f64,
    pub c5: f64,
    /// `C₄` fitted on the inner half of the trusted window.
    pub c4_inner: f64,
    pub pass: bool,
    pub times: Vec<f64>,
}

/// Largest `|x|` at which the periodized grid density is trusted.
fn trusted_radius(grid: &SpatialGrid) -> f64 {
    grid.period() / 4.0
}

pub fn check_a2a(sym: &LevySymbol, f: &JumpProfile, t_b: f64, grid: &SpatialGrid) -> Result<A2aFit> {
    if !(t_b > 0.0) {
        return Err(Error::domain("t_b", t_b, "t_b > 0"));
    }
    let times: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 4.0].iter().map(|s| s * t_b).collect();
    let dens: Vec<DensityGrid> = times
        .iter()
        .map(|&t| density_fft(sym, t, grid))
        .collect::<Result<_>>()?;
    let r_max = trusted_radius(grid);
    let floor = 1e-13;

    // Log-linear fit of the tail ratio p_t/f against t gives C₅.
    let tail_ln: Vec<f64> = dens
        .iter()
        .map(|d| {
            d.within(r_max)
                .filter(|&j| d.xs[j].abs() >= 1.0 && d.values[j] > floor)
                .map(|j| d.values[j].ln() - f.ln_value(d.xs[j].abs()))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let n = times.len() as f64;
    let mt = times.iter().sum::<f64>() / n;
    let my = tail_ln.iter().sum::<f64>() / n;
    let sxy: f64 = times.iter().zip(&tail_ln).map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    let c5 = if sxx > 0.0 && sxy.is_finite() { (sxy / sxx).max(0.0) } else { 0.0 };

    let fit = |radius: f64| -> f64 {
        dens.iter()
            .map(|d| {
                d.within(radius)
                    .filter(|&j| d.values[j] > floor || d.xs[j].abs() < 1.0)
                    .map(|j| {
                        let bound = (c5 * d.t + f.ln_value(d.xs[j].abs().max(1e-300))).min(0.0);
                        (d.values[j].max(0.0).ln() - bound).exp()
                    })
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };
    let c4 = fit(r_max);
    let c4_inner = fit(r_max / 2.0);
    let pass = c4.is_finite() && c4 > 0.0 && c4 <= 10.0 * c4_inner.max(f64::MIN_POSITIVE);
    Ok(A2aFit {
        c4,
        c5,
        c4_inner,
        pass,
        times,
    })
}

/// Fitted `C` of `p_t(x) ≥ C ν(x)` on `|x| ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityLowerFit {
    pub c: f64,
    /// The same fit on the inner half of the trusted window.
    pub c_inner: f64,
    pub pass: bool,
}

pub fn check_density_lower(sym: &LevySymbol, t: f64, grid: &SpatialGrid) -> Result<DensityLowerFit> {
    let d = density_fft(sym, t, grid)?;
    let r_max = trusted_radius(grid);
    // Values at round-off level carry no information about the tail.
    let floor = 1e-13;
    let fit = |radius: f64| -> f64 {
        d.within(radius)
            .filter(|&j| d.xs[j].abs() >= 1.0 && d.values[j] > floor)
            .map(|j| d.values[j] / sym.nu(d.xs[j]))
            .fold(f64::INFINITY, f64::min)
    };
    let c = fit(r_max);
    let c_inner = fit(r_max / 2.0);
    let pass = c > 0.0 && c.is_finite() && c >= 0.5 * c_inner;
    Ok(DensityLowerFit { c, c_inner, pass })
}
