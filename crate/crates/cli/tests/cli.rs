use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_factor-bench")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = bin(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a spec, runs `simulate` and returns the output directory.
fn simulate(root: &Path, name: &str, spec: &str) -> PathBuf {
    let spec_path = root.join(format!("{name}.cfg"));
    fs::write(&spec_path, spec).unwrap();
    let out = root.join(name);
    ok(&["simulate", "--spec", s(&spec_path), "--out", s(&out)]);
    out
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let j = rows[0].iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[j].parse().unwrap()).collect()
}

#[test]
fn ingest_reports_short_history_and_is_idempotent() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 6\nn-months = 24\nseed = 5\n");
    let panel = fs::read_to_string(sim.join("panel.csv")).unwrap();
    let trimmed: String = panel
        .lines()
        .filter(|l| !l.starts_with("2007-03,S0002,"))
        .map(|l| format!("{l}\n"))
        .collect();
    fs::write(sim.join("panel.csv"), trimmed).unwrap();

    let first = tmp.path().join("first");
    ok(&["ingest", "--config", s(&sim.join("run.cfg")), "--out", s(&first)]);
    let summary = read_csv(&first.join("ingest_summary.csv"));
    assert_eq!(summary[0], ["records", "distinct_stocks", "kept", "dropped", "months", "start", "split", "end"]);
    assert_eq!(&summary[1][..4], ["143", "6", "5", "1"]);
    let dropped = read_csv(&first.join("ingest_dropped.csv"));
    assert_eq!(dropped.len(), 2);
    assert_eq!(&dropped[1][..5], ["S0002", "10002", "SYN00002", "23", "24"]);

    let second = tmp.path().join("second");
    ok(&["ingest", "--config", s(&first.join("run.cfg")), "--out", s(&second)]);
    for f in ["panel.csv", "factors.csv", "run.cfg"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn malformed_row_fails_naming_file_and_line() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 2\nn-months = 12\n");
    let mut lines: Vec<String> = fs::read_to_string(sim.join("panel.csv")).unwrap().lines().map(String::from).collect();
    lines[4] = "2007-04,S0001,10001,SYN00001,abc".into();
    fs::write(sim.join("panel.csv"), lines.join("\n")).unwrap();
    let out = bin(&["ingest", "--config", s(&sim.join("run.cfg")), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("panel.csv:5:"), "{err}");
}

#[test]
fn flags_override_config_entries() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 3\nn-months = 24\n");
    let out = tmp.path().join("o");
    ok(&["ingest", "--config", s(&sim.join("run.cfg")), "--end", "2008-06", "--required-len", "18", "--out", s(&out)]);
    let summary = read_csv(&out.join("ingest_summary.csv"));
    assert_eq!(summary[1][4], "18");
    assert_eq!(summary[1][7], "2008-06");
}

#[test]
fn zero_noise_estimates_equal_truth() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 20\nn-months = 40\nmodel = ff3\nsigma = 0\n");
    let out = tmp.path().join("est");
    ok(&["estimate", "--config", s(&sim.join("run.cfg")), "--model", "ff3", "--kind", "discrete", "--out", s(&out)]);
    let est = read_csv(&out.join("estimate_ff3_ols_coefficients_discrete.csv"));
    let truth = read_csv(&sim.join("truth.csv"));
    for c in ["alpha", "beta_m", "beta_smb", "beta_hml"] {
        for (a, b) in column(&est, c).iter().zip(column(&truth, c)) {
            assert!((a - b).abs() < 1e-9, "{c}: {a} vs {b}");
        }
    }
}

#[test]
fn benchmark_prior_uses_g_equal_to_window_length() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 15\nn-months = 84\n");
    let out = tmp.path().join("est");
    ok(&["estimate", "--config", s(&sim.join("run.cfg")), "--method", "bayes-benchmark", "--out", s(&out)]);
    for kind in ["discrete", "continuous"] {
        let rows = read_csv(&out.join(format!("estimate_capm_bayes-benchmark_coefficients_{kind}.csv")));
        assert_eq!(rows.len(), 16);
        assert!(column(&rows, "g").iter().all(|&g| g == 42.0));
        assert!(column(&rows, "w").iter().all(|&w| w > 0.0 && w <= 1.0));
    }
}

#[test]
fn mle_and_ols_tables_agree() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 30\nn-months = 60\nmodel = ff3\n");
    let cfg = sim.join("run.cfg");
    for m in ["ols", "mle"] {
        ok(&["estimate", "--config", s(&cfg), "--model", "ff3", "--method", m, "--out", s(&tmp.path().join(m))]);
    }
    for kind in ["discrete", "continuous"] {
        let a = read_csv(&tmp.path().join("ols").join(format!("estimate_ff3_ols_coefficients_{kind}.csv")));
        let b = read_csv(&tmp.path().join("mle").join(format!("estimate_ff3_mle_coefficients_{kind}.csv")));
        for c in ["alpha", "beta_m", "beta_smb", "beta_hml", "rss", "sigma2_mle"] {
            for (x, y) in column(&a, c).iter().zip(column(&b, c)) {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{c}");
            }
        }
    }
}

#[test]
fn monotone_related_methods_rank_identically() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 40\nn-months = 60\n");
    let out = tmp.path().join("rank");
    ok(&["rank", "--config", s(&sim.join("run.cfg")), "--methods", "ols,mle", "--out", s(&out)]);
    let ranks = read_csv(&out.join("rank_capm_ranks_discrete.csv"));
    assert_eq!(column(&ranks, "rank_ols"), column(&ranks, "rank_mle"));
    let corr = read_csv(&out.join("rank_capm_correlation_discrete.csv"));
    assert_eq!(corr[0], ["rank", "ols", "mle", "return"]);
    assert_eq!(corr[2][1], "1");
    for (i, row) in corr[1..].iter().enumerate() {
        assert_eq!(row[i + 1], "1");
        assert!(row[i + 2..].iter().all(String::is_empty));
    }
}

#[test]
fn return_rank_tracks_beta_when_reward_is_proportional_to_beta() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(
        tmp.path(),
        "sim",
        "n-stocks = 200\nn-months = 84\nalpha = 0\nbeta = 0.2, 2.0\nmktrf-mean = 0.02\nmktrf-sd = 0.03\nsigma = 0.02\nseed = 8\n",
    );
    let out = tmp.path().join("rank");
    ok(&["rank", "--config", s(&sim.join("run.cfg")), "--methods", "ols", "--out", s(&out)]);
    for kind in ["discrete", "continuous"] {
        let corr = read_csv(&out.join(format!("rank_capm_correlation_{kind}.csv")));
        let r: f64 = corr[2][1].parse().unwrap();
        assert!(r > 0.5, "{kind}: {r}");
    }
}

/// Panel with one stock whose return never changes.
fn panel_with_constant_stock(root: &Path) -> PathBuf {
    let sim = simulate(root, "sim", "n-stocks = 10\nn-months = 24\n");
    let mut panel = fs::read_to_string(sim.join("panel.csv")).unwrap();
    for line in panel.clone().lines().filter(|l| l.contains(",S0001,")) {
        let month = line.split(',').next().unwrap();
        panel.push_str(&format!("{month},FLAT,99999,FLAT0001,0.01\n"));
    }
    fs::write(sim.join("panel.csv"), panel).unwrap();
    sim
}

#[test]
fn constant_returns_are_excluded_from_normality_counts() {
    let tmp = TempDir::new().unwrap();
    let sim = panel_with_constant_stock(tmp.path());
    let out = tmp.path().join("norm");
    ok(&["normality", "--config", s(&sim.join("run.cfg")), "--kind", "discrete", "--out", s(&out)]);
    let summary = read_csv(&out.join("normality_summary.csv"));
    assert_eq!(summary[0], ["kind", "alpha", "tested", "passed", "excluded"]);
    assert_eq!((summary[1][2].as_str(), summary[1][4].as_str()), ("10", "1"));
    let excl = read_csv(&out.join("normality_exclusions.csv"));
    assert_eq!(excl[1][1], "FLAT");
}

#[test]
fn strict_mode_fails_on_exclusions() {
    let tmp = TempDir::new().unwrap();
    let sim = panel_with_constant_stock(tmp.path());
    let (cfg, out) = (sim.join("run.cfg"), tmp.path().join("n"));
    let args = ["normality", "--config", s(&cfg), "--out", s(&out)];
    assert!(bin(&args).status.success());
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(bin(&strict).status.code(), Some(2));
}

#[test]
fn compare_emits_min_mean_max_range_per_model() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 12\nn-months = 48\nmodel = ff3\n");
    for protocol in ["oos", "loocv"] {
        let out = tmp.path().join(protocol);
        ok(&["compare", "--config", s(&sim.join("run.cfg")), "--protocol", protocol, "--out", s(&out)]);
        for kind in ["discrete", "continuous"] {
            let t = read_csv(&out.join(format!("compare_{protocol}_ols_summary_{kind}.csv")));
            assert_eq!(t[0], ["statistic", "capm", "ff3"]);
            let labels: Vec<&str> = t[1..].iter().map(|r| r[0].as_str()).collect();
            assert_eq!(labels, ["min", "mean", "max", "range"]);
            let per_stock = read_csv(&out.join(format!("compare_{protocol}_ols_per_stock_{kind}.csv")));
            assert_eq!(per_stock.len(), 1 + 2 * 12);
        }
    }
}

#[test]
fn json_output_mirrors_csv() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 8\nn-months = 30\n");
    let cfg = sim.join("run.cfg");
    ok(&["estimate", "--config", s(&cfg), "--out", s(&tmp.path().join("c"))]);
    ok(&["estimate", "--config", s(&cfg), "--format", "json", "--out", s(&tmp.path().join("j"))]);
    let csv = read_csv(&tmp.path().join("c/estimate_capm_ols_coefficients_discrete.csv"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("j/estimate_capm_ols_coefficients_discrete.json")).unwrap())
            .unwrap();
    assert_eq!(json["columns"].as_array().unwrap().len(), csv[0].len());
    let beta_csv: f64 = csv[1][4].parse().unwrap();
    assert_eq!(json["rows"][0][4].as_f64().unwrap(), beta_csv);
    assert!(json["rows"][0][7].is_null());
}

#[test]
fn commands_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let sim = simulate(tmp.path(), "sim", "n-stocks = 25\nn-months = 42\n");
    let again = simulate(tmp.path(), "again", "n-stocks = 25\nn-months = 42\n");
    for f in ["panel.csv", "factors.csv", "truth.csv"] {
        assert_eq!(fs::read(sim.join(f)).unwrap(), fs::read(again.join(f)).unwrap());
    }
    let cfg = sim.join("run.cfg");
    for run in ["a", "b"] {
        ok(&["rank", "--config", s(&cfg), "--out", s(&tmp.path().join(run))]);
    }
    let mut names: Vec<_> = fs::read_dir(tmp.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for n in names {
        assert_eq!(fs::read(tmp.path().join("a").join(&n)).unwrap(), fs::read(tmp.path().join("b").join(&n)).unwrap());
    }
}

#[test]
fn bayesian_oos_reads_priors_from_prior_panel() {
    let tmp = TempDir::new().unwrap();
    let prior = simulate(tmp.path(), "prior", "n-stocks = 10\nn-months = 24\nstart = 2005-01\nseed = 4\n");
    let main = simulate(tmp.path(), "main", "n-stocks = 10\nn-months = 24\nstart = 2007-01\nseed = 4\n");
    let out = tmp.path().join("cmp");
    ok(&[
        "compare", "--config", s(&main.join("run.cfg")), "--method", "bayes-leb", "--prior-panel", s(&prior), "--out", s(&out),
    ]);
    let t = read_csv(&out.join("compare_oos_bayes-leb_summary_discrete.csv"));
    assert!(t[1][1].parse::<f64>().unwrap() > 0.0);
}
