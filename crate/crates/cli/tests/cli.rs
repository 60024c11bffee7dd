use std::path::{Path, PathBuf};
use std::process::Command as Process;

use nlhk_cli::commands::{bounds_rows, check_report, classify_report, envelope_at};
use nlhk_cli::config::{parse_table, BoundsMode, PotentialConfig, ProfileConfig};
use nlhk_cli::{run_with, Command, RunConfig};
use proptest::prelude::*;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn stable(beta: f64, extra: &str) -> RunConfig {
    let text = format!(
        "[profile]\nfamily = \"poly\"\nalpha = 1.0\n\n[potential]\nfamily = \"log_power\"\nbeta = {beta}\n{extra}"
    );
    RunConfig::from_toml_str(&text).unwrap()
}

fn nlhk(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_nlhk")).args(args).output().unwrap()
}

// ------------------------------------------------------------- config

#[test]
fn shipped_configs_load() {
    for name in ["stable_aiuc", "stable_piuc", "relativistic", "tiny", "exponential_slow"] {
        let path = configs_dir().join(format!("{name}.toml"));
        RunConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e:#}"));
    }
}

#[test]
fn malformed_config_names_line() {
    let text = "[profile]\nfamily = \"poly\"\nalpha = \"one\"\n\n[potential]\nfamily = \"log_power\"\nbeta = 2.0\n";
    let msg = format!("{:#}", RunConfig::from_toml_str(text).unwrap_err());
    assert!(msg.contains("line 3"), "{msg}");

    let text = "[profile]\nfamily = \"poly\"\nalpha = 1.0\nalpah = 1.0\n\n[potential]\nfamily = \"log_power\"\nbeta = 2.0\n";
    let msg = format!("{:#}", RunConfig::from_toml_str(text).unwrap_err());
    assert!(msg.contains("alpah"), "{msg}");
    assert!(msg.contains("line 4"), "{msg}");
}

#[test]
fn constraints_revalidated_at_load() {
    let bad = [
        "[grid]\nhalf_width = 40.0\npoints = 64\n",
        "[constants]\nt_b = -1.0\n",
        "[sweep]\ntimes = [0.0]\n",
        "[verify]\nband_limit = 0.5\n",
    ];
    for extra in bad {
        let text = format!("[profile]\nfamily = \"poly\"\nalpha = 1.0\n\n[potential]\nfamily = \"log_power\"\nbeta = 2.0\n\n{extra}");
        assert!(RunConfig::from_toml_str(&text).is_err(), "{extra}");
    }
    // α outside (0, 2) is rejected by the profile constructor.
    let text = "[profile]\nfamily = \"poly\"\nalpha = 2.5\n\n[potential]\nfamily = \"log_power\"\nbeta = 2.0\n";
    assert!(RunConfig::from_toml_str(text).is_err());
}

#[test]
fn table_parser() {
    let (k, v) = parse_table("# r f\n1, 0.5\n\n2 0.25\n4\t0.0625\n").unwrap();
    assert_eq!(k, vec![1.0, 2.0, 4.0]);
    assert_eq!(v, vec![0.5, 0.25, 0.0625]);
    let msg = parse_table("1 2\n3\n").unwrap_err().to_string();
    assert!(msg.contains("line 2"), "{msg}");
    let msg = format!("{:#}", parse_table("1 2\n3 x\n").unwrap_err());
    assert!(msg.contains("line 2") && msg.contains("'x'"), "{msg}");
    assert!(parse_table("# nothing\n").is_err());
}

#[test]
fn tabulated_file_resolves_next_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut table = String::new();
    for k in 0..40 {
        let r = 2f64.powf(k as f64 / 4.0 - 4.0);
        table.push_str(&format!("{r} {}\n", r.powi(-2)));
    }
    std::fs::write(dir.path().join("f.txt"), table).unwrap();
    let cfg = "[profile]\nfamily = \"tabulated\"\nfile = \"f.txt\"\n\n[potential]\nfamily = \"log_power\"\nbeta = 2.0\n";
    std::fs::write(dir.path().join("run.toml"), cfg).unwrap();
    let loaded = RunConfig::load(&dir.path().join("run.toml")).unwrap();
    let f = loaded.jump_profile().unwrap();
    assert!((f.value(2.0) - 0.25).abs() < 1e-9);
}

fn config_strategy() -> impl Strategy<Value = RunConfig> {
    (
        0u64..(i64::MAX as u64),
        0.2f64..1.8,
        0.0f64..1.0,
        0.2f64..3.0,
        prop::collection::vec(31.0f64..500.0, 1..4),
        prop::sample::select(vec![512usize, 1024, 2048]),
        any::<bool>(),
    )
        .prop_map(|(seed, alpha, gamma, beta, times, points, refine)| {
            let mut cfg = stable(2.0, "");
            cfg.seed = seed;
            cfg.profile = ProfileConfig::Poly { d: 1, alpha, gamma };
            cfg.potential = PotentialConfig::LogPower {
                beta,
                r0: None,
                scale: None,
            };
            cfg.sweep.times = times;
            cfg.grid.points = points;
            cfg.verify.refine = refine;
            cfg
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn config_round_trip(cfg in config_strategy()) {
        let text = cfg.to_toml_string().unwrap();
        let back = RunConfig::from_toml_str(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

// -------------------------------------------------------------- check

#[test]
fn check_stable_passes() {
    let rep = check_report(&stable(2.0, "")).unwrap();
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn check_slow_exponential_fails_on_direct_jump() {
    let cfg = RunConfig::load(&configs_dir().join("exponential_slow.toml")).unwrap();
    let rep = check_report(&cfg).unwrap();
    assert!(!rep.pass);
    let first = rep.conditions.iter().find(|r| r.hard && !r.pass).unwrap();
    assert_eq!(first.name, "direct_jump");

    let out = tempfile::tempdir().unwrap();
    let path = configs_dir().join("exponential_slow.toml");
    let o = nlhk(&["check", "--config", path.to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("condition direct_jump failed"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[profile]\nfamily = \"poly\"\nalpha = \n").unwrap();
    let o = nlhk(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let path = configs_dir().join("stable_aiuc.toml");
    let o = nlhk(&["classify", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("aIUC; window = ∞"));
    assert!(dir.path().join("classify.toml").exists());
}

// ----------------------------------------------------------- classify

#[test]
fn classify_examples() {
    let rep = classify_report(&stable(2.0, "")).unwrap();
    assert_eq!(rep.regime, "aIUC");
    assert!(rep.windows.iter().all(|w| w.window.is_infinite()));

    let rep = classify_report(&stable(1.0, "")).unwrap();
    assert_eq!(rep.regime, "aIUC");

    let rep = classify_report(&stable(0.5, "\n[sweep]\ntimes = [35.0]\n")).unwrap();
    assert_eq!(rep.regime, "non-aIUC");
    // K2 = 12 C6 C7² with C6 = 1, C7 = ln(1+e)^{1/2}; Λ⁻¹(τ) = exp((τ/2)²).
    let k2 = 12.0 * (1.0 + std::f64::consts::E).ln();
    assert!((rep.k2 - k2).abs() < 1e-9 * k2);
    let expected = (35.0 / k2 / 2.0f64).powi(2).exp();
    let w = rep.windows[0].window;
    assert!((w - expected).abs() < 1e-9 * expected, "{w} vs {expected}");
    assert!((w - 3.432).abs() < 1e-3);
}

// ------------------------------------------------------------- bounds

#[test]
fn bounds_rows_match_direct_calls() {
    let cfg = RunConfig::load(&configs_dir().join("stable_piuc.toml")).unwrap();
    let rows = bounds_rows(&cfg).unwrap();
    assert_eq!(rows.len(), cfg.sweep.times.len() * cfg.sweep.xs.len() * cfg.sweep.ys.len());
    let setup = cfg.setup(cfg.constants.lambda0).unwrap();
    let covered: Vec<_> = rows.iter().filter(|r| r.region != "uncovered").collect();
    assert!(covered.len() >= 3);
    for r in [covered[0], covered[covered.len() / 2], covered[covered.len() - 1]] {
        let e = envelope_at(&setup, BoundsMode::Simplified, r.t, r.x, r.y).unwrap().unwrap();
        assert_eq!(r.lower, Some(e.ln_lower));
        assert_eq!(r.upper, Some(e.ln_upper));
        assert_eq!(r.result_id, e.result.as_str());
    }
    // Uncovered points are kept, with empty numbers.
    let uncovered: Vec<_> = rows.iter().filter(|r| r.region == "uncovered").collect();
    assert!(!uncovered.is_empty());
    assert!(uncovered.iter().all(|r| r.lower.is_none() && r.upper.is_none() && r.result_id.is_empty()));
}

#[test]
fn bounds_aiuc_uses_one_shape() {
    let cfg = RunConfig::load(&configs_dir().join("stable_aiuc.toml")).unwrap();
    let rows = bounds_rows(&cfg).unwrap();
    let covered: Vec<_> = rows.iter().filter(|r| r.region != "uncovered").collect();
    assert!(!covered.is_empty());
    assert!(covered.iter().all(|r| r.result_id == "aiuc"));
}

#[test]
fn bounds_switch_at_window() {
    let xs: Vec<String> = (0..=40).map(|k| format!("{}", 0.5 * k as f64)).collect();
    let extra = format!("\n[sweep]\ntimes = [50.0]\nxs = [{0}]\nys = [{0}]\n", xs.join(", "));
    let cfg = stable(0.5, &extra);
    let window = classify_report(&cfg).unwrap().windows[0].window;
    assert!(window > 5.0 && window < 20.0, "{window}");
    let rows = bounds_rows(&cfg).unwrap();
    for r in &rows {
        let m = r.x.abs().min(r.y.abs());
        let want = if m < window { "piuc_window" } else { "doubling_tail" };
        assert_eq!(r.result_id, want, "t = {}, x = {}, y = {}", r.t, r.x, r.y);
    }
}

// -------------------------------------------------------- determinism

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn bounds_output_is_deterministic() {
    let cfg = RunConfig::load(&configs_dir().join("stable_piuc.toml")).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_with(&cfg, Command::Bounds, Some(a.path().into()), None, Some(1)).unwrap();
    run_with(&cfg, Command::Bounds, Some(b.path().into()), None, Some(4)).unwrap();
    assert_eq!(read_all(a.path()), read_all(b.path()));
}

#[test]
fn mc_output_is_deterministic() {
    let cfg = stable(2.0, "\n[mc]\nn_paths = 2000\n");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_with(&cfg, Command::Mc, Some(a.path().into()), Some(7), Some(1)).unwrap();
    run_with(&cfg, Command::Mc, Some(b.path().into()), Some(7), Some(3)).unwrap();
    assert_eq!(read_all(a.path()), read_all(b.path()));
}

#[test]
fn huge_seed_rejected() {
    let cfg = stable(2.0, "");
    let dir = tempfile::tempdir().unwrap();
    assert!(run_with(&cfg, Command::Mc, Some(dir.path().into()), Some(u64::MAX), None).is_err());
}

// ------------------------------------------------------------- verify

#[test]
fn tiny_grid_fails_refinement() {
    let cfg = RunConfig::load(&configs_dir().join("tiny.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(&cfg, Command::Verify, Some(dir.path().into()), None, None).unwrap();
    assert!(!o.pass);
    assert!(o.failure.as_deref().unwrap_or("").contains("lambda0_box_stable"), "{:?}", o.failure);
    let report = std::fs::read_to_string(dir.path().join("verify_report.toml")).unwrap();
    assert!(report.contains("pass = false"));

    let path = configs_dir().join("tiny.toml");
    let o = nlhk(&["verify", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_files_have_documented_columns() {
    let cfg = RunConfig::load(&configs_dir().join("tiny.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_with(&cfg, Command::Verify, Some(dir.path().into()), None, None).unwrap();
    let spectrum = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("k,lambda\n0,"));
    let ratios = std::fs::read_to_string(dir.path().join("ratios.csv")).unwrap();
    assert!(ratios.starts_with("t,x,y,ratio,region\n"));
    let kernel = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert!(kernel.starts_with("t,x,y,u\n"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Same properties as the fuzz targets, on random text.
    #[test]
    fn parsers_never_panic(text in "[0-9a-z_=#,. \\[\\]\"\n\t-]{0,200}") {
        if let Ok((k, v)) = parse_table(&text) {
            prop_assert_eq!(k.len(), v.len());
        }
        if let Ok(cfg) = RunConfig::from_toml_str(&text) {
            let back = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
