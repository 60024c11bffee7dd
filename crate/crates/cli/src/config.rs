//! Run configuration.
//!
//! Times are given in units of `t_b`; lengths are spatial units of the
//! process. Every numeric constraint of the library is re-checked when the
//! configuration is turned into a [`Setup`].

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nlhk_core::bounds::Model;
use nlhk_core::conditions::{estimate_constants, ConstantsOptions, ConstantsPack};
use nlhk_core::free_process::LevySymbol;
use nlhk_core::profiles::{JumpProfile, LinkFunction, PotentialProfile};
use nlhk_core::quad::QuadratureSettings;
use nlhk_oracle::{Discretization, PathConfig, SmallJumpPolicy};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub profile: ProfileConfig,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub process: ProcessConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub mc: McConfig,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

// The family enums go through flat tables so that a bad or unknown key is
// reported at its own line instead of at the table header.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub enum ProfileConfig {
    Poly {
        d: usize,
        alpha: f64,
        gamma: f64,
    },
    Exponential {
        d: usize,
        kappa: f64,
        gamma: f64,
        core_gamma: Option<f64>,
    },
    /// Knots and values inline, or a two-column text file.
    Tabulated {
        d: usize,
        knots: Vec<f64>,
        values: Vec<f64>,
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ProfileFamily {
    Poly,
    Exponential,
    Tabulated,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    family: Option<ProfileFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    core_gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    knots: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<PathBuf>,
}

/// Error for a key given to a family that does not take it.
fn reject<T>(table: &str, family: &str, key: &str, v: &Option<T>) -> Result<(), String> {
    match v {
        Some(_) => Err(format!("{table}: family {family} takes no `{key}`")),
        None => Ok(()),
    }
}

fn need<T: Clone>(table: &str, family: &str, key: &str, v: &Option<T>) -> Result<T, String> {
    v.clone().ok_or_else(|| format!("{table}: family {family} needs `{key}`"))
}

impl TryFrom<RawProfile> for ProfileConfig {
    type Error = String;

    fn try_from(r: RawProfile) -> Result<Self, String> {
        let t = "profile";
        let d = r.d.unwrap_or(1);
        match r.family {
            None => Err("profile: missing `family` (poly, exponential or tabulated)".into()),
            Some(ProfileFamily::Poly) => {
                let n = "poly";
                reject(t, n, "kappa", &r.kappa)?;
                reject(t, n, "core_gamma", &r.core_gamma)?;
                reject(t, n, "knots", &r.knots)?;
                reject(t, n, "values", &r.values)?;
                reject(t, n, "file", &r.file)?;
                Ok(ProfileConfig::Poly {
                    d,
                    alpha: need(t, n, "alpha", &r.alpha)?,
                    gamma: r.gamma.unwrap_or(0.0),
                })
            }
            Some(ProfileFamily::Exponential) => {
                let n = "exponential";
                reject(t, n, "alpha", &r.alpha)?;
                reject(t, n, "knots", &r.knots)?;
                reject(t, n, "values", &r.values)?;
                reject(t, n, "file", &r.file)?;
                Ok(ProfileConfig::Exponential {
                    d,
                    kappa: need(t, n, "kappa", &r.kappa)?,
                    gamma: need(t, n, "gamma", &r.gamma)?,
                    core_gamma: r.core_gamma,
                })
            }
            Some(ProfileFamily::Tabulated) => {
                let n = "tabulated";
                reject(t, n, "alpha", &r.alpha)?;
                reject(t, n, "kappa", &r.kappa)?;
                reject(t, n, "gamma", &r.gamma)?;
                reject(t, n, "core_gamma", &r.core_gamma)?;
                Ok(ProfileConfig::Tabulated {
                    d,
                    knots: r.knots.unwrap_or_default(),
                    values: r.values.unwrap_or_default(),
                    file: r.file,
                })
            }
        }
    }
}

impl From<ProfileConfig> for RawProfile {
    fn from(p: ProfileConfig) -> Self {
        match p {
            ProfileConfig::Poly { d, alpha, gamma } => RawProfile {
                family: Some(ProfileFamily::Poly),
                d: Some(d),
                alpha: Some(alpha),
                gamma: Some(gamma),
                ..Default::default()
            },
            ProfileConfig::Exponential {
                d,
                kappa,
                gamma,
                core_gamma,
            } => RawProfile {
                family: Some(ProfileFamily::Exponential),
                d: Some(d),
                kappa: Some(kappa),
                gamma: Some(gamma),
                core_gamma,
                ..Default::default()
            },
            ProfileConfig::Tabulated { d, knots, values, file } => RawProfile {
                family: Some(ProfileFamily::Tabulated),
                d: Some(d),
                knots: (!knots.is_empty()).then_some(knots),
                values: (!values.is_empty()).then_some(values),
                file,
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential", into = "RawPotential")]
pub enum PotentialConfig {
    LogPower {
        beta: f64,
        r0: Option<f64>,
        scale: Option<f64>,
    },
    Power {
        beta: f64,
        r0: Option<f64>,
        scale: Option<f64>,
    },
    /// `g = h(|log f|)` with `h(s) = (s/scale)^β` on `[domain_start, ∞)`.
    Composed {
        beta: f64,
        scale: f64,
        domain_start: f64,
        r0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PotentialFamily {
    LogPower,
    Power,
    Composed,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    family: Option<PotentialFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    domain_start: Option<f64>,
}

impl TryFrom<RawPotential> for PotentialConfig {
    type Error = String;

    fn try_from(r: RawPotential) -> Result<Self, String> {
        let t = "potential";
        match r.family {
            None => Err("potential: missing `family` (log_power, power or composed)".into()),
            Some(PotentialFamily::LogPower) => {
                reject(t, "log_power", "domain_start", &r.domain_start)?;
                Ok(PotentialConfig::LogPower {
                    beta: need(t, "log_power", "beta", &r.beta)?,
                    r0: r.r0,
                    scale: r.scale,
                })
            }
            Some(PotentialFamily::Power) => {
                reject(t, "power", "domain_start", &r.domain_start)?;
                Ok(PotentialConfig::Power {
                    beta: need(t, "power", "beta", &r.beta)?,
                    r0: r.r0,
                    scale: r.scale,
                })
            }
            Some(PotentialFamily::Composed) => {
                let n = "composed";
                Ok(PotentialConfig::Composed {
                    beta: need(t, n, "beta", &r.beta)?,
                    scale: need(t, n, "scale", &r.scale)?,
                    domain_start: need(t, n, "domain_start", &r.domain_start)?,
                    r0: need(t, n, "r0", &r.r0)?,
                })
            }
        }
    }
}

impl From<PotentialConfig> for RawPotential {
    fn from(p: PotentialConfig) -> Self {
        match p {
            PotentialConfig::LogPower { beta, r0, scale } => RawPotential {
                family: Some(PotentialFamily::LogPower),
                beta: Some(beta),
                r0,
                scale,
                domain_start: None,
            },
            PotentialConfig::Power { beta, r0, scale } => RawPotential {
                family: Some(PotentialFamily::Power),
                beta: Some(beta),
                r0,
                scale,
                domain_start: None,
            },
            PotentialConfig::Composed {
                beta,
                scale,
                domain_start,
                r0,
            } => RawPotential {
                family: Some(PotentialFamily::Composed),
                beta: Some(beta),
                r0: Some(r0),
                scale: Some(scale),
                domain_start: Some(domain_start),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProcessConfig {
    pub diffusion: f64,
    /// Angular factor of `ν = σ₀ f`; normalized when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
}

impl Default for ProcessConfig {
    fn default() -> Self {
        Self {
            diffusion: 0.0,
            sigma0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub t_b: f64,
    /// Used by `bounds` and `classify`; `verify` takes it from the oracle.
    pub lambda0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            t_b: 1.0,
            lambda0: 0.0,
            n0: None,
            c3: None,
            theta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub points: usize,
    pub small_jumps: SmallJumpPolicy,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 40.0,
            points: 2048,
            small_jumps: SmallJumpPolicy::Diffusion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMode {
    /// Closed-form corollary shapes.
    #[default]
    Simplified,
    /// Theorem-level shapes built from the envelope integrals.
    Theorem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub mode: BoundsMode,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            times: vec![35.0, 60.0, 100.0],
            xs: vec![0.0, 2.0, 5.0, 10.0, 20.0, 30.0],
            ys: vec![0.0, 2.0, 5.0, 10.0, 20.0, 30.0],
            mode: BoundsMode::Simplified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Defaults to the sweep times.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    /// Envelope checks use `|x|, |y| ≤ region_radius`.
    pub region_radius: f64,
    /// Sample radii per axis for the ground-state region.
    pub region_points: usize,
    /// Sample radii per axis for the theorem-level region.
    pub theorem_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_window: Option<[f64; 2]>,
    pub band_limit: f64,
    /// Repeat the checks on a grid with twice the points.
    pub refine: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            times: None,
            region_radius: 30.0,
            region_points: 61,
            theorem_points: 11,
            profile_window: None,
            band_limit: nlhk_oracle::verify::DEFAULT_BAND,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    /// Include the Monte Carlo cross-check in `verify`.
    pub enabled: bool,
    pub x0: f64,
    pub t: f64,
    pub jump_cutoff: f64,
    pub time_step: f64,
    pub n_paths: usize,
    pub small_jumps: SmallJumpPolicy,
    /// Run the bias study in `mc`.
    pub study: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        let p = PathConfig::default();
        Self {
            enabled: false,
            x0: 0.0,
            t: 2.0,
            jump_cutoff: p.jump_cutoff,
            time_step: p.time_step,
            n_paths: p.n_paths,
            small_jumps: p.small_jumps,
            study: false,
        }
    }
}

/// Two-column text table: `r  f(r)` per line, separated by whitespace or a
/// comma. Blank lines and lines starting with `#` are skipped.
pub fn parse_table(text: &str) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if cols.len() != 2 {
            bail!("table line {}: expected 2 columns, found {}", n + 1, cols.len());
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .with_context(|| format!("table line {}: '{s}' is not a number", n + 1))
        };
        knots.push(parse(cols[0])?);
        values.push(parse(cols[1])?);
    }
    if knots.is_empty() {
        bail!("table is empty");
    }
    Ok((knots, values))
}

/// Profiles, constants and the Lévy symbol assembled from a configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub f: JumpProfile,
    pub g: PotentialProfile,
    /// The free process; only available for `d = 1`.
    pub sym: Option<LevySymbol>,
    pub pack: ConstantsPack,
    pub model: Model,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        // Relative table paths are read next to the config.
        if let ProfileConfig::Tabulated { file: Some(f), .. } = &mut cfg.profile {
            if f.is_relative() {
                if let Some(dir) = path.parent() {
                    *f = dir.join(&*f);
                }
            }
        }
        cfg.validate()
            .with_context(|| format!("validating config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Re-check every constraint by building the derived objects once.
    pub fn validate(&self) -> anyhow::Result<()> {
        let t_b = self.constants.t_b;
        if !(t_b > 0.0 && t_b.is_finite()) {
            bail!("constants.t_b = {t_b} must be positive");
        }
        if self.sweep.times.iter().chain(self.verify_times()).any(|t| !(*t > 0.0 && t.is_finite())) {
            bail!("times must be positive");
        }
        if self.sweep.xs.iter().chain(&self.sweep.ys).any(|x| !x.is_finite()) {
            bail!("sweep points must be finite");
        }
        self.discretization()?;
        let v = &self.verify;
        if !(v.region_radius > 0.0) || v.region_points < 2 || v.theorem_points < 2 {
            bail!("verify needs a positive region radius and at least 2 sample radii");
        }
        if !(v.band_limit > 1.0) {
            bail!("verify.band_limit must exceed 1");
        }
        let f = self.jump_profile()?;
        self.potential_profile(&f)?;
        if f.dimension() == 1 {
            self.symbol(&f)?;
        }
        self.path_config(self.seed)?.validate(self.mc.t * t_b)?;
        Ok(())
    }

    fn verify_times(&self) -> &[f64] {
        self.verify.times.as_deref().unwrap_or(&[])
    }

    /// Verification times in units of `t_b`.
    pub fn verification_times(&self) -> Vec<f64> {
        self.verify.times.clone().unwrap_or_else(|| self.sweep.times.clone())
    }

    pub fn jump_profile(&self) -> anyhow::Result<JumpProfile> {
        Ok(match &self.profile {
            ProfileConfig::Poly { d, alpha, gamma } => JumpProfile::poly(*d, *alpha, *gamma)?,
            ProfileConfig::Exponential {
                d,
                kappa,
                gamma,
                core_gamma,
            } => JumpProfile::exponential_with_core(*d, *kappa, *gamma, core_gamma.unwrap_or(*gamma))?,
            ProfileConfig::Tabulated {
                d,
                knots,
                values,
                file,
            } => {
                let (k, v) = match file {
                    Some(path) => {
                        if !knots.is_empty() || !values.is_empty() {
                            bail!("tabulated profile: give either a file or inline knots, not both");
                        }
                        let text = std::fs::read_to_string(path)
                            .with_context(|| format!("reading table {}", path.display()))?;
                        parse_table(&text).with_context(|| format!("in {}", path.display()))?
                    }
                    None => (knots.clone(), values.clone()),
                };
                JumpProfile::tabulated(*d, &k, &v)?
            }
        })
    }

    pub fn potential_profile(&self, f: &JumpProfile) -> anyhow::Result<PotentialProfile> {
        let scaled = |g: PotentialProfile, s: &Option<f64>| -> anyhow::Result<PotentialProfile> {
            Ok(match s {
                Some(c) => g.scaled(*c)?,
                None => g,
            })
        };
        Ok(match &self.potential {
            PotentialConfig::LogPower { beta, r0, scale } => scaled(
                match r0 {
                    Some(r) => PotentialProfile::log_power_with_r0(*beta, *r)?,
                    None => PotentialProfile::log_power(*beta)?,
                },
                scale,
            )?,
            PotentialConfig::Power { beta, r0, scale } => scaled(
                match r0 {
                    Some(r) => PotentialProfile::power_with_r0(*beta, *r)?,
                    None => PotentialProfile::power(*beta)?,
                },
                scale,
            )?,
            PotentialConfig::Composed {
                beta,
                scale,
                domain_start,
                r0,
            } => {
                let h = LinkFunction::power_over_scale(*beta, *scale, *domain_start)?;
                PotentialProfile::composed(h, f.clone(), *r0)?
            }
        })
    }

    pub fn symbol(&self, f: &JumpProfile) -> anyhow::Result<LevySymbol> {
        let sigma0 = match self.process.sigma0 {
            Some(s) => s,
            None => LevySymbol::normalized(f.clone())?.sigma0(),
        };
        Ok(LevySymbol::new(self.process.diffusion, sigma0, f.clone())?)
    }

    pub fn discretization(&self) -> anyhow::Result<Discretization> {
        Ok(Discretization::new(self.grid.half_width, self.grid.points)?
            .with_small_jumps(self.grid.small_jumps))
    }

    pub fn path_config(&self, seed: u64) -> anyhow::Result<PathConfig> {
        Ok(PathConfig {
            jump_cutoff: self.mc.jump_cutoff,
            time_step: self.mc.time_step,
            n_paths: self.mc.n_paths,
            seed,
            small_jumps: self.mc.small_jumps,
        })
    }

    /// Build profiles, constants and the envelope model, using `lambda0`
    /// for the ground-state eigenvalue.
    pub fn setup(&self, lambda0: f64) -> anyhow::Result<Setup> {
        let f = self.jump_profile()?;
        let g = self.potential_profile(&f)?;
        let sym = if f.dimension() == 1 { Some(self.symbol(&f)?) } else { None };
        let c = &self.constants;
        let opts = ConstantsOptions {
            nu_scale: sym.as_ref().map_or(1.0, |s| s.sigma0()),
            lambda0_hat: lambda0,
            theta: c.theta,
            n0: c.n0,
            c3: c.c3,
            ..Default::default()
        };
        let pack = estimate_constants(&f, &g, f.dimension(), c.t_b, &opts)?;
        let q = QuadratureSettings::default().with_dimension(f.dimension());
        let model = Model::new(f.clone(), g.clone(), pack.clone(), q)?;
        Ok(Setup {
            f,
            g,
            sym,
            pack,
            model,
        })
    }
}
