//! Shared arguments for commands that read an ingested panel.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use factor_bench::dataset::{
    build_panel_with_report, load_factor_file, load_panel_file, load_tbill_file, split_panel, PanelBuild,
};
use factor_bench::estimators::{empirical_prior_means, Estimator, Exclusion, GRule, ModelSpec, Precision};
use factor_bench::{AlignedPanel, Month, PriorMeans, ReturnKind};

use crate::config::ConfigFile;
use crate::report::Format;

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Key-value configuration file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Exit nonzero when any stock is excluded.
    #[arg(long)]
    pub strict: bool,
}

pub struct Common {
    pub cfg: ConfigFile,
    pub out: PathBuf,
    pub format: Format,
    pub strict: bool,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<Common> {
        let cfg = ConfigFile::optional(self.config.as_deref())?;
        // an output directory named in a config file is not resolved against it
        let out = self
            .out
            .clone()
            .or(cfg.get::<PathBuf>(None, "out")?)
            .context("missing --out")?;
        Ok(Common {
            format: cfg.get(self.format, "format")?.unwrap_or(Format::Csv),
            strict: cfg.bool(self.strict.then_some(true), "strict")?.unwrap_or(false),
            out,
            cfg,
        })
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct DataArgs {
    /// Returns panel CSV (`date,ticker,permno,cusip,ret`).
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// Factor CSV (`date,mktrf,smb,hml,rf`).
    #[arg(long)]
    pub factors: Option<PathBuf>,
    /// T-bill CSV (`date,rate`, annualized percent) replacing the factor file's rf.
    #[arg(long)]
    pub tbill: Option<PathBuf>,
    /// Factor values are percent (default).
    #[arg(long, overrides_with = "no_percent")]
    pub percent: bool,
    /// Factor values are decimal.
    #[arg(long)]
    pub no_percent: bool,
    /// First month of the early window.
    #[arg(long)]
    pub start: Option<Month>,
    /// Last month of the early window.
    #[arg(long)]
    pub split: Option<Month>,
    /// Last month of the late window.
    #[arg(long)]
    pub end: Option<Month>,
    /// Months of history a stock needs; defaults to the full window.
    #[arg(long)]
    pub required_len: Option<usize>,
}

pub struct Loaded {
    pub build: PanelBuild<f64>,
    pub n_records: usize,
    pub start: Month,
    pub split: Month,
    pub end: Month,
}

impl Loaded {
    pub fn panel(&self) -> &AlignedPanel {
        &self.build.panel
    }

    pub fn windows(&self, kind: ReturnKind) -> Result<(AlignedPanel, AlignedPanel)> {
        Ok(split_panel(&self.build.panel.with_kind(kind)?, self.split)?)
    }
}

impl DataArgs {
    pub fn load(&self, cfg: &ConfigFile) -> Result<Loaded> {
        let panel_path = cfg.path(self.panel.clone(), "panel").context("missing --panel")?;
        let factor_path = cfg.path(self.factors.clone(), "factors").context("missing --factors")?;
        let percent = match (self.percent, self.no_percent) {
            (true, _) => true,
            (_, true) => false,
            _ => cfg.bool(None, "percent")?.unwrap_or(true),
        };
        let start: Month = cfg.require(self.start, "start")?;
        let split: Month = cfg.require(self.split, "split")?;
        let end: Month = cfg.require(self.end, "end")?;
        if !(start <= split && split < end) {
            bail!("window boundaries must satisfy start <= split < end (got {start}, {split}, {end})");
        }
        let required_len = cfg.get(self.required_len, "required-len")?.unwrap_or(start.span_to(end));

        let records = load_panel_file(&panel_path)?;
        let mut factors = load_factor_file(&factor_path, percent)?;
        if let Some(tbill) = cfg.path(self.tbill.clone(), "tbill") {
            factors = factors.with_risk_free(&load_tbill_file(&tbill)?)?;
        }
        let build = build_panel_with_report(&records, &factors, (start, end), required_len, ReturnKind::Discrete)?;
        Ok(Loaded {
            build,
            n_records: records.len(),
            start,
            split,
            end,
        })
    }

    /// Loads the run configuration an earlier `ingest` or `simulate` left in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Loaded> {
        let cfg = ConfigFile::load(&dir.join("run.cfg"))?;
        DataArgs::default().load(&cfg)
    }
}

/// `discrete`, `continuous` or `both` (continuous first).
pub fn kinds(cfg: &ConfigFile, flag: Option<String>) -> Result<Vec<ReturnKind>> {
    match cfg.get(flag, "kind")?.as_deref() {
        None | Some("both") => Ok(vec![ReturnKind::Continuous, ReturnKind::Discrete]),
        Some(k) => Ok(vec![k.parse()?]),
    }
}

/// `capm`, `ff3` or `both`.
pub fn models(cfg: &ConfigFile, flag: Option<String>, default_both: bool) -> Result<Vec<ModelSpec>> {
    match cfg.get(flag, "model")?.as_deref() {
        Some("both") => Ok(vec![ModelSpec::Capm, ModelSpec::FamaFrench3]),
        None if default_both => Ok(vec![ModelSpec::Capm, ModelSpec::FamaFrench3]),
        None => Ok(vec![ModelSpec::Capm]),
        Some(m) => Ok(vec![m.parse()?]),
    }
}

/// Builds the estimator named on the command line. `g` fixes the robust
/// prior precision, or sets `V = g X'X` for the conjugate estimator.
pub fn estimator(method: &str, g: Option<f64>) -> Result<Estimator<f64>> {
    Ok(match (method, g) {
        ("ols", _) => Estimator::Ols,
        ("mle", _) => Estimator::Mle,
        ("bayes-benchmark" | "bayes-leb" | "bayes-fixed", Some(g)) => Estimator::RobustBayes { g_rule: GRule::Fixed(g) },
        ("bayes-benchmark", None) => Estimator::RobustBayes { g_rule: GRule::Benchmark },
        ("bayes-leb", None) => Estimator::RobustBayes { g_rule: GRule::LocalEmpiricalBayes },
        ("bayes-conjugate", Some(g)) => Estimator::ConjugateBayes { precision: Precision::GPrior(g) },
        ("bayes-conjugate" | "bayes-fixed", None) => bail!("{method} needs --g"),
        _ => bail!("unknown method '{method}' (ols, mle, bayes-benchmark, bayes-leb, bayes-conjugate, bayes-fixed)"),
    })
}

/// Prior means from the early window, or from the late window of a
/// separately ingested prior panel.
pub fn prior_means(
    estimator: &Estimator<f64>,
    model: ModelSpec,
    kind: ReturnKind,
    early: &AlignedPanel,
    prior_panel: Option<&Loaded>,
) -> Result<Option<(PriorMeans, Vec<Exclusion>)>> {
    if !estimator.needs_prior() {
        return Ok(None);
    }
    let source = match prior_panel {
        Some(p) => p.windows(kind)?.1,
        None => early.clone(),
    };
    let (means, mut excluded) = empirical_prior_means(&source, model);
    for e in &mut excluded {
        e.reason = format!("prior window: {}", e.reason);
    }
    Ok(Some((means, excluded)))
}

/// Prior-window exclusions plus fit exclusions of other stocks; a stock
/// missing a prior would otherwise be reported twice.
pub fn merge_exclusions(prior: &[Exclusion], fit: &[Exclusion]) -> Vec<Exclusion> {
    let mut out = prior.to_vec();
    out.extend(fit.iter().filter(|e| !prior.iter().any(|p| p.identity == e.identity)).cloned());
    out
}
