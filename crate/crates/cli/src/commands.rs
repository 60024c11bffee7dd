//! The subcommands. Each writes its files into the output directory and
//! returns whether every hard check passed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use nlhk_core::bounds::{envelope_heat_kernel, simplified_bounds, Envelope};
use nlhk_core::conditions::{
    check_direct_jump, check_djp_sufficient, check_exp_int, check_growth_conditions,
    default_djp_radii, DjpCriterion,
};
use nlhk_core::free_process::{check_a2a, check_density_lower, SpatialGrid};
use nlhk_core::thresholds::{RegimeKind, ThresholdData};
use nlhk_core::Error as CoreError;
use nlhk_oracle::verify::{ground_state_envelope, RatioSample, SpectralFunctions, TimeFit};
use nlhk_oracle::{
    build_matrix, convergence_study, eigensolve, simulate_ut1, spectral_functions, verify_envelope,
    verify_eig_profile, McEstimate, Spectrum, VerificationReport,
};
use serde::{Deserialize, Serialize};

use crate::config::{BoundsMode, RunConfig, Setup};

/// Result of a command: pass flag, a short summary and the files written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// First failing hard check, if any.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub name: String,
    pub pass: bool,
}

fn flag(name: impl Into<String>, pass: bool) -> Flag {
    Flag {
        name: name.into(),
        pass,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> anyhow::Result<String> {
    let bytes = w.into_inner().map_err(|e| anyhow!("csv buffer: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

// ---------------------------------------------------------------- check

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub name: String,
    pub pass: bool,
    /// Hard conditions decide the exit status; soft ones are empirical.
    pub hard: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub conditions: Vec<ConditionRow>,
    pub pass: bool,
}

pub fn check_report(cfg: &RunConfig) -> anyhow::Result<CheckReport> {
    let setup = cfg.setup(cfg.constants.lambda0)?;
    let Setup { f, g, sym, .. } = &setup;
    let d = f.dimension();
    let mut rows = Vec::new();
    let mut push = |name: &str, pass: bool, hard: bool, detail: String| {
        rows.push(ConditionRow {
            name: name.into(),
            pass,
            hard,
            detail,
        })
    };

    let link = ThresholdData::for_profiles(f, g).ok().map(|t| t.link().clone());
    let growth = check_growth_conditions(f, g, link.as_ref());
    push("a1b_f_decreasing", growth.a1b, true, "f decreasing to 0".into());
    push("a1c_f_comparable", growth.a1c, true, "f(r) ≤ C2 f(r+1)".into());
    push("a3b_g_increasing", growth.a3b, true, "g increasing on [R0, ∞)".into());
    push("a3c_g_growth", growth.a3c, true, "g(r+1) ≤ C7 g(r)".into());
    if let Some(a4) = growth.a4_monotone_ratio {
        push("a4_link_ratio", a4, true, "h(s)/s monotone".into());
    }

    let djp = check_direct_jump(f, d, &default_djp_radii(), None)?;
    let suff = check_djp_sufficient(f, d);
    push(
        "direct_jump",
        djp.converged,
        true,
        format!(
            "C3 = {:.6e} at |x| = {}; sufficient criterion: {:?}",
            djp.c3_hat, djp.sup_location, suff.criterion
        ),
    );
    if suff.criterion != DjpCriterion::Unknown && !djp.converged {
        push(
            "direct_jump_consistency",
            false,
            false,
            "a sufficient criterion holds but the scan did not stabilize".into(),
        );
    }

    if let Some(sym) = sym {
        let t_b = cfg.constants.t_b;
        let spacing = (0.9 * std::f64::consts::PI / sym.required_frequency(t_b)).min(0.05);
        let grid = SpatialGrid::new(4096, spacing);
        match grid.as_ref().map_err(|e| e.clone()).and_then(|g| check_a2a(sym, f, t_b, g)) {
            Ok(fit) => push(
                "a2a_density_upper",
                fit.pass,
                false,
                format!("C4 = {:.4e}, C5 = {:.4e}", fit.c4, fit.c5),
            ),
            Err(e) => push("a2a_density_upper", false, false, e.to_string()),
        }
        match grid.and_then(|g| check_density_lower(sym, t_b, &g)) {
            Ok(fit) => push("density_lower", fit.pass, false, format!("C = {:.4e}", fit.c)),
            Err(e) => push("density_lower", false, false, e.to_string()),
        }
    }
    for s in [0.5, 1.0, 2.0] {
        let r = check_exp_int(g, s, d)?;
        push(
            &format!("exp_int_s{s}"),
            r.convergent,
            false,
            format!("∫ e^(-{s} V) {}", if r.convergent { "converges" } else { "diverges" }),
        );
    }

    let pass = rows.iter().filter(|r| r.hard).all(|r| r.pass);
    Ok(CheckReport {
        conditions: rows,
        pass,
    })
}

pub fn cmd_check(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let report = check_report(cfg)?;
    let mut summary = String::new();
    for r in &report.conditions {
        let kind = if r.hard { "hard" } else { "soft" };
        let status = if r.pass { "pass" } else { "FAIL" };
        writeln!(summary, "{status:4}  {kind}  {:22} {}", r.name, r.detail)?;
    }
    let file = write_file(out, "check.toml", &toml::to_string(&report)?)?;
    let failure = report
        .conditions
        .iter()
        .find(|r| r.hard && !r.pass)
        .map(|r| format!("condition {} failed: {}", r.name, r.detail));
    Ok(Outcome {
        pass: report.pass,
        summary,
        files: vec![file],
        failure,
    })
}

// ------------------------------------------------------------- classify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    /// Time in units of `t_b`.
    pub t: f64,
    /// `Λ⁻¹(t/K₂)`; infinite in the bounded regime.
    pub window: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub r: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub regime: String,
    pub basis: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau0: Option<f64>,
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub c6: f64,
    pub c7: f64,
    pub n0: u64,
    pub n0_threshold_met: bool,
    pub lambda_table: Vec<LambdaRow>,
    pub windows: Vec<WindowRow>,
}

pub fn classify_report(cfg: &RunConfig) -> anyhow::Result<ClassifyReport> {
    let setup = cfg.setup(cfg.constants.lambda0)?;
    let th = ThresholdData::for_profiles(&setup.f, &setup.g)
        .context("classification needs a threshold function for these profiles")?;
    let regime = th.regime();
    let pack = &setup.pack;
    let t_b = cfg.constants.t_b;
    let lambda_table = (0..12)
        .map(|k| {
            let r = th.r0() * 2f64.powi(k);
            Ok(LambdaRow {
                r,
                lambda: th.lambda(r)?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let base = th.lambda(th.r0())?;
    let windows = cfg
        .sweep
        .times
        .iter()
        .map(|&t| {
            let tau = t * t_b / pack.k2;
            // Below Λ(R₀) the window is empty.
            let window = if regime.is_aiuc() {
                f64::INFINITY
            } else if tau < base {
                th.r0()
            } else {
                th.lambda_inv(tau)?
            };
            Ok(WindowRow { t, window })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(ClassifyReport {
        regime: match regime.kind {
            RegimeKind::Aiuc { .. } => "aIUC".into(),
            RegimeKind::NonAiuc => "non-aIUC".into(),
        },
        basis: format!("{:?}", regime.basis),
        tau0: regime.tau0(),
        k: pack.k,
        k1: pack.k1,
        k2: pack.k2,
        k3: pack.k3,
        k4: pack.k4,
        c6: pack.c6,
        c7: pack.c7,
        n0: pack.n0,
        n0_threshold_met: pack.n0_threshold_met,
        lambda_table,
        windows,
    })
}

pub fn cmd_classify(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let rep = classify_report(cfg)?;
    let mut summary = String::new();
    let window = |w: f64| if w.is_finite() { format!("{w:.6}") } else { "∞".to_string() };
    if !rep.windows.is_empty() && rep.windows.iter().all(|w| w.window.is_infinite()) {
        writeln!(summary, "{}; window = ∞", rep.regime)?;
    } else {
        writeln!(summary, "{}", rep.regime)?;
    }
    if let Some(t0) = rep.tau0 {
        writeln!(summary, "tau0 = {t0:.6}")?;
    }
    writeln!(
        summary,
        "K = {:.6}, K1 = {:.6}, K2 = {:.6}, K3 = {:.6}, K4 = {:.6}",
        rep.k, rep.k1, rep.k2, rep.k3, rep.k4
    )?;
    for w in &rep.windows {
        writeln!(summary, "t = {} t_b: window = {}", w.t, window(w.window))?;
    }
    let file = write_file(out, "classify.toml", &toml::to_string(&rep)?)?;
    Ok(Outcome {
        pass: true,
        summary,
        files: vec![file],
        failure: None,
    })
}

// --------------------------------------------------------------- bounds

/// One row of `bounds.csv`; `lower`/`upper` are natural logarithms and
/// empty for uncovered points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub region: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub result_id: String,
}

/// Envelope for one sweep point; `None` when no estimate covers it.
pub fn envelope_at(setup: &Setup, mode: BoundsMode, t: f64, x: f64, y: f64) -> anyhow::Result<Option<Envelope>> {
    let (px, py) = (point(setup, x), point(setup, y));
    let r = match mode {
        BoundsMode::Simplified => simplified_bounds(t, &px, &py, &setup.model),
        BoundsMode::Theorem => envelope_heat_kernel(t, &px, &py, &setup.model),
    };
    match r {
        Ok(e) => Ok(Some(e)),
        Err(CoreError::OutsideSimplifiedCoverage(_)) | Err(CoreError::TimeBelowThreshold { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn point(setup: &Setup, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; setup.f.dimension()];
    p[0] = x;
    p
}

pub fn bounds_rows(cfg: &RunConfig) -> anyhow::Result<Vec<BoundsRow>> {
    use rayon::prelude::*;
    let setup = cfg.setup(cfg.constants.lambda0)?;
    let t_b = cfg.constants.t_b;
    let mut jobs = Vec::new();
    for &t in &cfg.sweep.times {
        for &x in &cfg.sweep.xs {
            for &y in &cfg.sweep.ys {
                jobs.push((t, x, y));
            }
        }
    }
    jobs.par_iter()
        .map(|&(t, x, y)| {
            let row = match envelope_at(&setup, cfg.sweep.mode, t * t_b, x, y)? {
                Some(e) => BoundsRow {
                    t,
                    x,
                    y,
                    region: e.region.as_str().into(),
                    lower: Some(e.ln_lower),
                    upper: Some(e.ln_upper),
                    result_id: e.result.as_str().into(),
                },
                None => BoundsRow {
                    t,
                    x,
                    y,
                    region: "uncovered".into(),
                    lower: None,
                    upper: None,
                    result_id: String::new(),
                },
            };
            Ok(row)
        })
        .collect()
}

pub fn cmd_bounds(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let rows = bounds_rows(cfg)?;
    let mut w = csv_writer();
    for r in &rows {
        w.serialize(r)?;
    }
    let file = write_file(out, "bounds.csv", &finish_csv(w)?)?;
    let uncovered = rows.iter().filter(|r| r.region == "uncovered").count();
    Ok(Outcome {
        pass: true,
        summary: format!("{} rows, {} uncovered\n", rows.len(), uncovered),
        files: vec![file],
        failure: None,
    })
}

// --------------------------------------------------------------- verify

/// Spectrum of the configured operator on the configured grid, or on one
/// with `points` cells instead.
pub fn build_spectrum(cfg: &RunConfig, points: Option<usize>) -> anyhow::Result<Spectrum> {
    build_spectrum_on(cfg, cfg.grid.half_width, points.unwrap_or(cfg.grid.points))
}

/// Spectrum of the configured operator on `[-half_width, half_width]` with
/// `points` cells.
pub fn build_spectrum_on(cfg: &RunConfig, half_width: f64, points: usize) -> anyhow::Result<Spectrum> {
    let mut disc = cfg.discretization()?;
    disc.half_width = half_width;
    disc.points = points;
    let f = cfg.jump_profile()?;
    if f.dimension() != 1 {
        return Err(anyhow!("the oracle supports d = 1 only"));
    }
    let g = cfg.potential_profile(&f)?;
    let sym = cfg.symbol(&f)?;
    let v = move |x: f64| g.value(x.abs());
    let op = build_matrix(&disc, &sym, &v).context("building the operator")?;
    eigensolve(&op).context("eigensolve")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub region: String,
    pub c_hat: f64,
    pub band: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_drift: Option<f64>,
    pub fits: Vec<TimeFit>,
    pub flags: Vec<Flag>,
}

impl From<&VerificationReport> for RegionSummary {
    fn from(r: &VerificationReport) -> Self {
        Self {
            region: r.region.clone(),
            c_hat: r.c_hat,
            band: r.band,
            t_drift: r.t_drift,
            refinement_drift: r.refinement_drift,
            fits: r.fits.clone(),
            flags: r.flags.iter().map(|(n, p)| flag(n.clone(), *p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub estimate: McEstimate,
    pub oracle_row_sum: f64,
    pub deviation_in_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub regime: String,
    pub lambda0: f64,
    pub gap: f64,
    pub ground_state_positive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0_refined: Option<f64>,
    /// `λ₀` on the box widened by [`BOX_EXTENSION`] at the same spacing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0_wide_box: Option<f64>,
    /// `Λ⁻¹(t/K₂)` at the smallest verification time.
    pub window: f64,
    /// `max/min` of the kernel-to-ground-state ratio beyond the window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beyond_window_spread: Option<f64>,
    pub regions: Vec<RegionSummary>,
    pub spectral: Vec<SpectralFunctions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McCheck>,
    pub flags: Vec<Flag>,
    pub pass: bool,
}

/// Relative change of `λ₀` under refinement that still counts as resolved.
pub const LAMBDA0_REFINEMENT: f64 = 1e-3;

/// Widening of the box half width in the box-size refinement.
pub const BOX_EXTENSION: f64 = 10.0;

/// Node indices nearest to `count` evenly spaced radii in `[-r, r]`.
fn sample_nodes(spec: &Spectrum, r: f64, count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..count)
        .map(|k| spec.nearest(-r + 2.0 * r * k as f64 / (count - 1) as f64))
        .collect();
    idx.dedup();
    idx
}

struct RegionOutput {
    report: VerificationReport,
    label: &'static str,
}

fn ground_state_region(
    cfg: &RunConfig,
    spec: &Spectrum,
    times: &[f64],
    window: f64,
) -> anyhow::Result<VerificationReport> {
    let v = &cfg.verify;
    let nodes = sample_nodes(spec, v.region_radius, v.region_points);
    let mut pairs = Vec::new();
    for &i in &nodes {
        for &j in &nodes {
            if spec.nodes[i].abs().min(spec.nodes[j].abs()) < window {
                pairs.push((i, j));
            }
        }
    }
    let env = ground_state_envelope(spec);
    let t_min = 30.0 * cfg.constants.t_b;
    let region = if window.is_infinite() { "ground_state" } else { "ground_state_window" };
    Ok(verify_envelope(spec, &env, times, &pairs, t_min * (1.0 - 1e-12), region)?)
}

/// Profile comparison on the configured window, or on `[R₀+1, min(M-5, R)]`
/// when that is nonempty; `None` when the box is too small for a default.
fn profile_region(cfg: &RunConfig, setup: &Setup, spec: &Spectrum) -> anyhow::Result<Option<VerificationReport>> {
    let m = spec.disc.half_width;
    let [lo, hi] = match cfg.verify.profile_window {
        Some(w) => w,
        None => {
            let w = [setup.g.r0() + 1.0, (m - nlhk_oracle::verify::BOUNDARY_STRIP).min(cfg.verify.region_radius)];
            if w[0] >= w[1] {
                return Ok(None);
            }
            w
        }
    };
    Ok(Some(verify_eig_profile(spec, &setup.f, &setup.g, lo, hi, cfg.verify.band_limit)?))
}

/// One row of `kernel.csv`: the oracle kernel along `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

/// Everything `verify` writes.
#[derive(Debug, Clone)]
pub struct VerifyOutput {
    pub report: VerifyReport,
    /// Ratio samples labelled by region.
    pub samples: Vec<(String, RatioSample)>,
    pub eigenvalues: Vec<f64>,
    pub kernel: Vec<KernelRow>,
}

pub fn verify_report(cfg: &RunConfig, seed: u64) -> anyhow::Result<VerifyOutput> {
    let t_b = cfg.constants.t_b;
    let times: Vec<f64> = cfg.verification_times().iter().map(|t| t * t_b).collect();
    let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
    if cfg.verify.region_radius > cfg.grid.half_width - nlhk_oracle::verify::BOUNDARY_STRIP {
        return Err(anyhow!(
            "verify.region_radius = {} must stay 5 units inside the box half width {}",
            cfg.verify.region_radius,
            cfg.grid.half_width
        ));
    }

    let spec = build_spectrum(cfg, None)?;
    let setup = cfg.setup(spec.lambda0())?;
    let th = ThresholdData::for_profiles(&setup.f, &setup.g).ok();
    let regime = th.as_ref().map(|t| t.regime());
    let window = match &th {
        Some(th) if !th.regime().is_aiuc() => {
            let tau = t_min / setup.pack.k2;
            let base = th.lambda(th.r0())?;
            if tau < base {
                th.r0()
            } else {
                th.lambda_inv(tau)?
            }
        }
        _ => f64::INFINITY,
    };

    let mut outputs = Vec::new();
    if let Some(report) = profile_region(cfg, &setup, &spec)? {
        outputs.push(RegionOutput {
            report,
            label: "profile",
        });
    }
    outputs.push(RegionOutput {
        report: ground_state_region(cfg, &spec, &times, window)?,
        label: "ground_state",
    });

    // Theorem-level sandwich on a coarse point set, above its time threshold.
    let th_times: Vec<f64> = times.iter().copied().filter(|t| *t > setup.pack.time_threshold()).collect();
    if !th_times.is_empty() {
        let nodes = sample_nodes(&spec, cfg.verify.region_radius, cfg.verify.theorem_points);
        let pairs: Vec<(usize, usize)> = nodes.iter().flat_map(|&i| nodes.iter().map(move |&j| (i, j))).collect();
        let model = &setup.model;
        let env = move |t: f64, x: f64, y: f64| -> nlhk_oracle::Result<(f64, f64)> {
            let e = envelope_heat_kernel(t, &[x], &[y], model)?;
            Ok((e.ln_lower, e.ln_upper))
        };
        let rep = verify_envelope(&spec, &env, &th_times, &pairs, setup.pack.time_threshold(), "theorem")?;
        outputs.push(RegionOutput {
            report: rep,
            label: "theorem",
        });
    }

    let mut flags = vec![flag("ground_state_positive", spec.ground_state_positive)];
    let mut lambda0_refined = None;
    let mut lambda0_wide_box = None;
    if cfg.verify.refine {
        let fine = build_spectrum(cfg, Some(2 * cfg.grid.points))?;
        let drift = (fine.lambda0() - spec.lambda0()).abs() / spec.lambda0().abs().max(1e-300);
        lambda0_refined = Some(fine.lambda0());
        flags.push(flag("lambda0_refinement_stable", drift < LAMBDA0_REFINEMENT));

        let m = cfg.grid.half_width;
        let wide_points = (cfg.grid.points as f64 * (m + BOX_EXTENSION) / m).round() as usize;
        let wide = build_spectrum_on(cfg, m + BOX_EXTENSION, wide_points)?;
        let box_drift = (wide.lambda0() - spec.lambda0()).abs() / spec.lambda0().abs().max(1e-300);
        lambda0_wide_box = Some(wide.lambda0());
        flags.push(flag("lambda0_box_stable", box_drift < LAMBDA0_REFINEMENT));
        let fine_profile = profile_region(cfg, &setup, &fine)?;
        let fine_ground = ground_state_region(cfg, &fine, &times, window)?;
        for o in outputs.iter_mut() {
            match o.label {
                "profile" => {
                    if let Some(p) = &fine_profile {
                        o.report.compare_refined(p)
                    }
                }
                "ground_state" => o.report.compare_refined(&fine_ground),
                _ => {}
            }
        }
    }

    // Beyond the window: the ratio to the ground-state shape along |x| = |y|.
    let mut samples: Vec<(String, RatioSample)> = Vec::new();
    let mut beyond_window_spread = None;
    if window.is_finite() {
        let phi = spec.ground_state();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (i, &x) in spec.nodes.iter().enumerate() {
            if x > window && x <= cfg.verify.region_radius {
                let ratio = (spec.ln_heat_kernel(t_min, i, i) + spec.lambda0() * t_min).exp() / (phi[i] * phi[i]);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
                samples.push(("beyond_window".into(), RatioSample { t: t_min, x, y: x, ratio }));
            }
        }
        if hi > 0.0 {
            beyond_window_spread = Some(hi / lo);
        }
    }

    let mc = if cfg.mc.enabled {
        let pc = cfg.path_config(seed)?;
        let g = setup.g.clone();
        let v = move |x: f64| g.value(x.abs());
        let sym = setup.sym.as_ref().ok_or_else(|| anyhow!("Monte Carlo needs d = 1"))?;
        let t = cfg.mc.t * t_b;
        let est = simulate_ut1(cfg.mc.x0, t, &v, sym, &pc)?;
        let row = spec.row_sum(t, spec.nearest(cfg.mc.x0));
        let dev = (est.mean - row).abs() / est.std_error.max(f64::MIN_POSITIVE);
        flags.push(flag("mc_agrees_3se", dev <= 3.0));
        Some(McCheck {
            estimate: est,
            oracle_row_sum: row,
            deviation_in_se: dev,
        })
    } else {
        None
    };

    let mut regions = Vec::new();
    for o in &outputs {
        for s in &o.report.samples {
            samples.push((o.report.region.clone(), *s));
        }
        let summary = RegionSummary::from(&o.report);
        for f in &summary.flags {
            flags.push(flag(format!("{}.{}", summary.region, f.name), f.pass));
        }
        regions.push(summary);
    }
    let pass = flags.iter().all(|f| f.pass);
    let report = VerifyReport {
        regime: match regime {
            Some(r) if r.is_aiuc() => "aIUC".into(),
            Some(_) => "non-aIUC".into(),
            None => "unclassified".into(),
        },
        lambda0: spec.lambda0(),
        gap: spec.gap(),
        ground_state_positive: spec.ground_state_positive,
        lambda0_refined,
        lambda0_wide_box,
        window,
        beyond_window_spread,
        regions,
        spectral: times.iter().map(|&t| spectral_functions(&spec, t)).collect(),
        mc,
        flags,
        pass,
    };
    let centre = spec.nearest(0.0);
    let mut kernel = Vec::new();
    for &t in &times {
        for (i, &x) in spec.nodes.iter().enumerate() {
            if x.abs() <= cfg.verify.region_radius {
                kernel.push(KernelRow {
                    t,
                    x,
                    y: spec.nodes[centre],
                    u: spec.heat_kernel(t, i, centre),
                });
            }
        }
    }
    Ok(VerifyOutput {
        report,
        samples,
        eigenvalues: spec.eigenvalues.clone(),
        kernel,
    })
}

pub fn cmd_verify(cfg: &RunConfig, out: &Path, seed: u64) -> anyhow::Result<Outcome> {
    let VerifyOutput {
        report,
        samples,
        eigenvalues,
        kernel,
    } = verify_report(cfg, seed)?;
    let mut files = vec![write_file(out, "verify_report.toml", &toml::to_string(&report)?)?];

    #[derive(Serialize)]
    struct SpectrumRow {
        k: usize,
        lambda: f64,
    }
    let mut w = csv_writer();
    for (k, l) in eigenvalues.iter().enumerate() {
        w.serialize(SpectrumRow { k, lambda: *l })?;
    }
    files.push(write_file(out, "spectrum.csv", &finish_csv(w)?)?);

    #[derive(Serialize)]
    struct RatioRow<'a> {
        t: f64,
        x: f64,
        y: f64,
        ratio: f64,
        region: &'a str,
    }
    let mut w = csv_writer();
    for (region, s) in &samples {
        w.serialize(RatioRow {
            t: s.t,
            x: s.x,
            y: s.y,
            ratio: s.ratio,
            region,
        })?;
    }
    files.push(write_file(out, "ratios.csv", &finish_csv(w)?)?);

    let mut w = csv_writer();
    for r in &kernel {
        w.serialize(r)?;
    }
    files.push(write_file(out, "kernel.csv", &finish_csv(w)?)?);

    let mut summary = String::new();
    writeln!(summary, "regime {}; lambda0 = {:.8}, gap = {:.6}", report.regime, report.lambda0, report.gap)?;
    for r in &report.regions {
        writeln!(summary, "{:22} C_hat = {:.4e}", r.region, r.c_hat)?;
    }
    for f in &report.flags {
        writeln!(summary, "{:4}  {}", if f.pass { "pass" } else { "FAIL" }, f.name)?;
    }
    let failure = report.flags.iter().find(|f| !f.pass).map(|f| format!("verification flag {} failed", f.name));
    Ok(Outcome {
        pass: report.pass,
        summary,
        files,
        failure,
    })
}

// ------------------------------------------------------------------- mc

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub x0: f64,
    pub t: f64,
    pub jump_cutoff: f64,
    pub time_step: f64,
    pub n_paths: usize,
    pub mean: f64,
    pub std_error: f64,
}

impl From<&McEstimate> for McRow {
    fn from(e: &McEstimate) -> Self {
        Self {
            x0: e.x0,
            t: e.t,
            jump_cutoff: e.config.jump_cutoff,
            time_step: e.config.time_step,
            n_paths: e.n_paths,
            mean: e.mean,
            std_error: e.std_error,
        }
    }
}

pub fn cmd_mc(cfg: &RunConfig, out: &Path, seed: u64) -> anyhow::Result<Outcome> {
    let setup = cfg.setup(cfg.constants.lambda0)?;
    let sym = setup.sym.as_ref().ok_or_else(|| anyhow!("Monte Carlo needs d = 1"))?;
    let g = setup.g.clone();
    let v = move |x: f64| g.value(x.abs());
    let pc = cfg.path_config(seed)?;
    let t = cfg.mc.t * cfg.constants.t_b;
    let estimates: Vec<McEstimate> = if cfg.mc.study {
        convergence_study(cfg.mc.x0, t, &v, sym, &pc)?.into_iter().map(|r| r.estimate).collect()
    } else {
        vec![simulate_ut1(cfg.mc.x0, t, &v, sym, &pc)?]
    };
    let mut w = csv_writer();
    let mut summary = String::new();
    for e in &estimates {
        w.serialize(McRow::from(e))?;
        writeln!(
            summary,
            "U_t1({}) at t = {}: {:.6e} ± {:.2e} (ε = {}, δ = {}, {} paths)",
            e.x0, e.t, e.mean, e.std_error, e.config.jump_cutoff, e.config.time_step, e.n_paths
        )?;
    }
    let file = write_file(out, "mc.csv", &finish_csv(w)?)?;
    Ok(Outcome {
        pass: true,
        summary,
        files: vec![file],
        failure: None,
    })
}

// --------------------------------------------------------------- report

pub fn cmd_report(cfg: &RunConfig, out: &Path, seed: u64) -> anyhow::Result<Outcome> {
    let check = cmd_check(cfg, out)?;
    let classify = cmd_classify(cfg, out)?;
    let bounds = cmd_bounds(cfg, out)?;
    let verify = cmd_verify(cfg, out, seed)?;
    let mut md = String::new();
    writeln!(md, "# Run report\n")?;
    for (name, o) in [("check", &check), ("classify", &classify), ("bounds", &bounds), ("verify", &verify)] {
        writeln!(md, "## {name}\n")?;
        writeln!(md, "```\n{}```\n", o.summary)?;
    }
    let mut files = vec![write_file(out, "report.md", &md)?];
    for o in [&check, &classify, &bounds, &verify] {
        files.extend(o.files.iter().cloned());
    }
    let pass = check.pass && verify.pass;
    Ok(Outcome {
        pass,
        summary: md,
        files,
        failure: check.failure.or(verify.failure),
    })
}
