//! End-to-end command-line pipeline checks: portfolio construction,
//! estimation with bootstrap rate selection, plot-data flattening,
//! deterministic simulation, and the documented exit codes.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_tvpreg")
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_25_portfolios.csv")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let body = std::fs::read_to_string(path).unwrap();
    let mut lines = body.lines();
    let headers: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (headers, rows)
}

fn column(headers: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let idx = headers.iter().position(|h| h == name).unwrap_or_else(|| {
        panic!("column {name} missing from {headers:?}")
    });
    rows.iter().map(|r| r[idx].parse().unwrap()).collect()
}

/// Full pipeline on the bundled synthetic fixture: build-portfolios for
/// all three targets, the value-minus-growth identity, bootstrap-selected
/// estimation, the coverage screen's prefix structure, a fixed-bandwidth
/// re-run consistency check, and plot-data emission.
#[test]
fn portfolio_estimate_plotdata_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let src = fixture();
    let src_s = src.to_str().unwrap();

    // Build all three targets over the default range.
    let mut paths = HashMap::new();
    for target in ["g", "v", "vmg"] {
        let out = dir.path().join(format!("{target}.csv"));
        run_ok(&[
            "build-portfolios",
            "--source",
            src_s,
            "--target",
            target,
            "--output",
            out.to_str().unwrap(),
        ]);
        paths.insert(target, out);
    }
    let (hg, rg) = read_csv(&paths["g"]);
    let (hv, rv) = read_csv(&paths["v"]);
    let (hd, rd) = read_csv(&paths["vmg"]);
    assert_eq!(rg.len(), 816, "default range must produce 816 rows");
    let g = column(&hg, &rg, "excess_return");
    let v = column(&hv, &rv, "excess_return");
    let d = column(&hd, &rd, "excess_return");
    for t in 0..g.len() {
        assert!((d[t] + g[t] - v[t]).abs() < 1e-10, "identity failed at row {t}");
    }

    // Estimate with bootstrap rate selection.
    let out_dir = dir.path().join("est");
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        format!(
            r#"
[estimate]
input = "{}"
response = "excess_return"
regressors = ["const", "mkt_excess"]
output_dir = "{}"
seed = 20240809

[estimate.bandwidth]
mode = "bootstrap"
grid = [-0.5, -0.4, -0.33, -0.2]
draws = 200
tolerance = 0.10
"#,
            paths["vmg"].to_str().unwrap(),
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    run_ok(&["estimate", "--config", config.to_str().unwrap()]);
    for f in ["estimates.csv", "bands.csv", "report.txt", "cr_matrix.csv"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }

    // The coverage screen must have the prefix structure: a rate is
    // accepted exactly when every cell against a smaller-or-equal rate
    // clears the threshold, and the selected rate is the largest accepted
    // one (or the grid minimum).
    let (hc, rc) = read_csv(&out_dir.join("cr_matrix.csv"));
    let g1 = column(&hc, &rc, "gamma1");
    let g2 = column(&hc, &rc, "gamma2");
    let cr = column(&hc, &rc, "cr");
    let grid = [-0.5, -0.4, -0.33, -0.2];
    let mut accepted = Vec::new();
    for &a in &grid {
        let mut cells = 0;
        let mut pass = true;
        for i in 0..g1.len() {
            if (g1[i] - a).abs() < 1e-9 {
                assert!(g2[i] <= a + 1e-9, "cell with gamma2 > gamma1 present");
                cells += 1;
                if !(cr[i] >= 0.9) {
                    pass = false;
                }
            }
        }
        assert_eq!(cells, grid.iter().filter(|&&b| b <= a + 1e-9).count());
        if pass {
            accepted.push(a);
        }
    }
    let expected_gamma = accepted.last().copied().unwrap_or(grid[0]);
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    let selected_gamma: f64 = report
        .lines()
        .find(|l| l.starts_with("selected gamma"))
        .and_then(|l| l.split('=').nth(1))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(
        (selected_gamma - expected_gamma).abs() < 1e-9,
        "report gamma {selected_gamma} vs recomputed {expected_gamma}"
    );
    let selected_c: f64 = report
        .lines()
        .find(|l| l.starts_with("selected c"))
        .and_then(|l| l.split('=').nth(1))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let ssr_selected: f64 = report
        .lines()
        .find(|l| l.starts_with("ssr"))
        .and_then(|l| l.split('=').nth(1))
        .unwrap()
        .trim()
        .parse()
        .unwrap();

    // Re-running with the recorded fixed bandwidth reproduces the fit.
    let out_fixed = dir.path().join("est_fixed");
    let config_fixed = dir.path().join("run_fixed.toml");
    std::fs::write(
        &config_fixed,
        format!(
            r#"
[estimate]
input = "{}"
response = "excess_return"
regressors = ["const", "mkt_excess"]
output_dir = "{}"
seed = 20240809

[estimate.bandwidth]
mode = "fixed"
c = {selected_c}
gamma = {selected_gamma}
"#,
            paths["vmg"].to_str().unwrap(),
            out_fixed.to_str().unwrap()
        ),
    )
    .unwrap();
    run_ok(&["estimate", "--config", config_fixed.to_str().unwrap()]);
    let report_fixed = std::fs::read_to_string(out_fixed.join("report.txt")).unwrap();
    let ssr_fixed: f64 = report_fixed
        .lines()
        .find(|l| l.starts_with("ssr"))
        .and_then(|l| l.split('=').nth(1))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(
        (ssr_fixed - ssr_selected).abs() <= 0.05 * ssr_selected,
        "ssr {ssr_fixed} drifted from {ssr_selected}"
    );

    // Plot-data flattening round-trips the estimate values.
    let tidy = dir.path().join("tidy.csv");
    run_ok(&[
        "plotdata",
        "--estimates",
        out_dir.join("estimates.csv").to_str().unwrap(),
        "--bands",
        out_dir.join("bands.csv").to_str().unwrap(),
        "--output",
        tidy.to_str().unwrap(),
    ]);
    let (ht, rt) = read_csv(&tidy);
    assert_eq!(ht, vec!["series", "x", "value", "flag"]);
    let (he, re_) = read_csv(&out_dir.join("estimates.csv"));
    let beta_mkt = column(&he, &re_, "beta_mkt_excess");
    let tidy_beta: Vec<f64> = rt
        .iter()
        .filter(|r| r[0] == "beta_mkt_excess")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(beta_mkt, tidy_beta, "tidy values must match the source");
    println!("ACCEPTANCE C9 portfolio pipeline: PASS (T=816, gamma_hat={selected_gamma})");
}

#[test]
fn select_bandwidth_emits_curves_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("vmg.csv");
    run_ok(&[
        "build-portfolios",
        "--source",
        fixture().to_str().unwrap(),
        "--target",
        "vmg",
        "--output",
        data.to_str().unwrap(),
    ]);
    let out_dir = dir.path().join("sel");
    let config = dir.path().join("sel.toml");
    std::fs::write(
        &config,
        format!(
            r#"
[estimate]
input = "{}"
response = "excess_return"
regressors = ["const", "mkt_excess"]
output_dir = "{}"
seed = 11

[estimate.bandwidth]
mode = "cv"
grid = [-0.5, -0.45, -0.4, -0.35, -0.3, -0.25, -0.2]
leave_out = 1
"#,
            data.to_str().unwrap(),
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    run_ok(&["select-bandwidth", "--config", config.to_str().unwrap()]);
    let (h, rows) = read_csv(&out_dir.join("cv_curve.csv"));
    assert_eq!(h, vec!["m", "gamma", "cv"]);
    let ms = column(&h, &rows, "m");
    for m in [0.0, 1.0, 2.0] {
        assert_eq!(ms.iter().filter(|v| **v == m).count(), 7, "7 grid points per m");
    }
    assert!(out_dir.join("selection_report.txt").exists());

    // The flattened curve marks one minimum per leave-out order.
    let tidy = dir.path().join("cv_tidy.csv");
    run_ok(&[
        "plotdata",
        "--cv-curve",
        out_dir.join("cv_curve.csv").to_str().unwrap(),
        "--output",
        tidy.to_str().unwrap(),
    ]);
    let (ht, rt) = read_csv(&tidy);
    let flags = column(&ht, &rt, "flag");
    assert_eq!(flags.iter().filter(|f| **f == 1.0).count(), 3);
}

/// A noiseless constant-coefficient CSV estimated with the full-sample
/// uniform window gives a flat path at the least-squares value and
/// zero-width bands.
#[test]
fn noiseless_constant_csv_gives_flat_ols_path() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("const.csv");
    let mut body = String::from("y,x\n");
    let mut rng_state = 88u64;
    for _ in 0..30 {
        rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let x = (rng_state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        body.push_str(&format!("{},{}\n", 2.0 * x, x));
    }
    std::fs::write(&data, body).unwrap();
    let out_dir = dir.path().join("out");
    let config = dir.path().join("const.toml");
    std::fs::write(
        &config,
        format!(
            r#"
[estimate]
input = "{}"
response = "y"
regressors = ["x"]
kernel = "uniform"
output_dir = "{}"

[estimate.bandwidth]
mode = "fixed"
c = 1.0
gamma = 0.0
"#,
            data.to_str().unwrap(),
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    run_ok(&["estimate", "--config", config.to_str().unwrap()]);
    let (he, re_) = read_csv(&out_dir.join("estimates.csv"));
    let betas = column(&he, &re_, "beta_x");
    for b in &betas {
        assert!((b - 2.0).abs() < 1e-10, "path value {b}");
    }
    let (hb, rb) = read_csv(&out_dir.join("bands.csv"));
    let lower = column(&hb, &rb, "lower_x");
    let upper = column(&hb, &rb, "upper_x");
    for t in 0..lower.len() {
        assert!((upper[t] - lower[t]).abs() < 1e-10, "band width at {t}");
    }
}

#[test]
fn simulate_is_deterministic_and_seed_env_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.toml");
    let out_a = dir.path().join("a");
    std::fs::write(
        &config,
        format!(
            r#"
[simulate]
sample_size = 120
seed = 5
output_dir = "{}"

[simulate.dgp]
coefficients = [
    [ {{ variant = "rescaled_random_walk", mu = 0.0, driver = {{ kind = "gaussian", sd = 1.0 }} }},
      {{ variant = "ar1", phi = 0.5, innovation_sd = 1.0 }} ],
]
error = {{ variant = "iid", sigma = 1.0 }}
"#,
            out_a.to_str().unwrap()
        ),
    )
    .unwrap();
    run_ok(&["simulate", "--config", config.to_str().unwrap()]);
    let first = std::fs::read(out_a.join("dataset.csv")).unwrap();
    run_ok(&["simulate", "--config", config.to_str().unwrap()]);
    let second = std::fs::read(out_a.join("dataset.csv")).unwrap();
    assert_eq!(first, second, "same seed must give byte-identical output");

    // Seed override via environment changes the draw.
    let out = Command::new(bin())
        .args(["simulate", "--config", config.to_str().unwrap()])
        .env("TVPREG_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    let third = std::fs::read(out_a.join("dataset.csv")).unwrap();
    assert_ne!(first, third, "env seed override must take effect");

    // Output directory override redirects the files.
    let out_b = dir.path().join("redirected");
    let out = Command::new(bin())
        .args(["simulate", "--config", config.to_str().unwrap()])
        .env("TVPREG_OUTPUT_DIR", out_b.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success());
    let redirected = std::fs::read(out_b.join("dataset.csv")).unwrap();
    assert_eq!(first, redirected, "same seed, new directory");
}

#[test]
fn mc_preset_writes_results_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("mc");
    run_ok(&[
        "mc",
        "--preset",
        "appendixB",
        "--output-dir",
        out_dir.to_str().unwrap(),
        "--replications",
        "200",
        "--seed",
        "3",
    ]);
    let (h, rows) = read_csv(&out_dir.join("mse_curve.csv"));
    assert_eq!(h[0], "h");
    assert_eq!(rows.len(), 30);
    assert!(out_dir.join("report.txt").exists());
}

/// The benchmark preset emits the full row/column grid (shape check at a
/// tiny replication count; the default is 500).
#[test]
fn mc_benchmark_preset_has_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("mc1");
    run_ok(&[
        "mc",
        "--preset",
        "table1-desk",
        "--output-dir",
        out_dir.to_str().unwrap(),
        "--replications",
        "3",
        "--seed",
        "9",
    ]);
    let table = std::fs::read_to_string(out_dir.join("table.txt")).unwrap();
    for label in ["-0.2", "-0.333", "-0.5", "-0.55", "-0.6", "-0.7", "CV", "Boot"] {
        assert!(table.contains(label), "row {label} missing:\n{table}");
    }
    for t in [100, 200, 400, 800] {
        assert!(table.contains(&format!("MSE T={t}")));
        assert!(table.contains(&format!("CR T={t}")));
    }
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("master_seed = 9"));
    assert!(manifest.contains("replications = 3"));

    // Custom configs load through the same door as presets.
    let (h, rows) = read_csv(&out_dir.join("result.csv"));
    assert_eq!(
        h,
        vec!["row", "sample_size", "metric", "eval_point", "value", "mc_se"]
    );
    assert!(rows.len() >= 8 * 4 * 2);
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let dir = tempfile::tempdir().unwrap();

    // Config error: missing file.
    let out = run(&["estimate", "--config", dir.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error kind=config"), "got: {stderr}");

    // Parse error: malformed input data.
    let bad_csv = dir.path().join("bad.csv");
    std::fs::write(&bad_csv, "y,x\n1.0,oops\n2.0,3.0\n").unwrap();
    let config = dir.path().join("parse.toml");
    std::fs::write(
        &config,
        format!(
            r#"
[estimate]
input = "{}"
response = "y"
regressors = ["x"]
output_dir = "{}"

[estimate.bandwidth]
mode = "fixed"
c = 1.0
gamma = -0.5
"#,
            bad_csv.to_str().unwrap(),
            dir.path().join("out").to_str().unwrap()
        ),
    )
    .unwrap();
    let out = run(&["estimate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error kind=parse"));

    // Numerical error: a regressor with no variation anywhere.
    let degenerate = dir.path().join("deg.csv");
    let mut body = String::from("y,x\n");
    for t in 0..40 {
        body.push_str(&format!("{},0.0\n", t as f64));
    }
    std::fs::write(&degenerate, body).unwrap();
    let config_num = dir.path().join("num.toml");
    std::fs::write(
        &config_num,
        format!(
            r#"
[estimate]
input = "{}"
response = "y"
regressors = ["x"]
output_dir = "{}"

[estimate.bandwidth]
mode = "fixed"
c = 1.0
gamma = -0.5
"#,
            degenerate.to_str().unwrap(),
            dir.path().join("out2").to_str().unwrap()
        ),
    )
    .unwrap();
    let out = run(&["estimate", "--config", config_num.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error kind=numerical"));

    // Unknown kernel name is a config error.
    let config_kernel = dir.path().join("kern.toml");
    std::fs::write(
        &config_kernel,
        format!(
            r#"
[estimate]
input = "{}"
response = "y"
regressors = ["x"]
kernel = "gaussian"
output_dir = "{}"

[estimate.bandwidth]
mode = "fixed"
c = 1.0
gamma = -0.5
"#,
            degenerate.to_str().unwrap(),
            dir.path().join("out3").to_str().unwrap()
        ),
    )
    .unwrap();
    let out = run(&["estimate", "--config", config_kernel.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
