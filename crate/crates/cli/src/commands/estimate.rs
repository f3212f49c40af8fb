use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use factor_bench::diagnostics::{describe, histogram};
use factor_bench::estimators::{fit_panel, ModelSpec};

use crate::data::{estimator, kinds, merge_exclusions, prior_means, CommonArgs, DataArgs};
use crate::report::{describe_table, histogram_table, Cell, Exclusions, Sink, Table};

pub const HISTOGRAM_BINS: usize = 30;

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// capm or ff3.
    #[arg(long)]
    pub model: Option<ModelSpec>,
    /// ols, mle, bayes-benchmark, bayes-leb, bayes-conjugate or bayes-fixed.
    #[arg(long)]
    pub method: Option<String>,
    /// discrete, continuous or both.
    #[arg(long)]
    pub kind: Option<String>,
    /// Directory of an ingested panel whose late window supplies prior means.
    #[arg(long)]
    pub prior_panel: Option<PathBuf>,
    /// Fixed prior precision.
    #[arg(long)]
    pub g: Option<f64>,
}

/// Fits every stock over the late window and writes one coefficient table
/// per return kind, a descriptive block per slope and slope histograms.
pub fn run(args: &EstimateArgs) -> Result<bool> {
    let common = args.common.resolve()?;
    let cfg = &common.cfg;
    let loaded = args.data.load(cfg)?;
    let model: ModelSpec = cfg.get(args.model, "model")?.unwrap_or(ModelSpec::Capm);
    let method: String = cfg.get(args.method.clone(), "method")?.unwrap_or_else(|| "ols".into());
    let est = estimator(&method, cfg.get(args.g, "g")?)?;
    let prior_dir = cfg.path(args.prior_panel.clone(), "prior-panel");
    let prior_panel = prior_dir.as_deref().map(crate::data::DataArgs::load_dir).transpose()?;
    let mut sink = Sink::new(&common.out, common.format)?;
    let stem = format!("estimate_{}_{method}", model.as_str());

    let mut exclusions = Exclusions::new(&["kind"]);
    let mut described = Vec::new();
    for kind in kinds(cfg, args.kind.clone())? {
        let (early, late) = loaded.windows(kind)?;
        let priors = prior_means(&est, model, kind, &early, prior_panel.as_ref())?;
        let fit = fit_panel(&late, model, &est, priors.as_ref().map(|p| &p.0));
        let prior_excluded = priors.as_ref().map(|p| p.1.as_slice()).unwrap_or_default();
        exclusions.extend(&[kind.as_str()], &merge_exclusions(prior_excluded, &fit.exclusions));

        let slopes = model.slope_names();
        let columns = ["identity", "permno", "cusip", "alpha"]
            .into_iter()
            .chain(slopes.iter().copied())
            .chain(["rss", "sigma2_mle", "g", "w"]);
        let mut table = Table::new(format!("{stem}_coefficients_{}", kind.as_str()), columns);
        for (id, f) in &fit.fits {
            let mut row: Vec<Cell> = vec![id.label.as_str().into(), id.permno.as_str().into(), id.cusip.as_str().into()];
            row.extend(f.theta.iter().map(|&v| Cell::Num(v)));
            row.extend([f.rss.into(), f.sigma2_mle.into(), f.g.into(), f.weight_w.into()]);
            table.push(row);
        }
        sink.table(&table)?;

        if fit.fits.is_empty() {
            continue;
        }
        for (j, name) in slopes.iter().enumerate() {
            let values: Vec<f64> = fit.fits.iter().map(|(_, f)| f.slopes()[j]).collect();
            described.push((format!("{name}_{}", kind.as_str()), describe(&values)?));
            let bins = histogram(&values, HISTOGRAM_BINS)?;
            sink.table(&histogram_table(&format!("{stem}_histogram_{name}_{}", kind.as_str()), &bins))?;
        }
    }
    // one column per slope and kind, slopes grouped together
    described.sort_by_key(|(name, _)| model.slope_names().iter().position(|s| name.starts_with(&format!("{s}_"))));
    sink.table(&describe_table(&format!("{stem}_describe"), &described))?;
    sink.table(&exclusions.table(&format!("{stem}_exclusions")))?;
    Ok(common.strict && !exclusions.is_empty())
}
