use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use factor_bench::evaluation::{loocv_panel, out_of_sample, Protocol};
use factor_bench::ComparisonReport;

use crate::data::{estimator, kinds, merge_exclusions, models, prior_means, CommonArgs, DataArgs};
use crate::report::{Cell, Exclusions, Sink, Table};

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// oos or loocv.
    #[arg(long)]
    pub protocol: Option<String>,
    /// capm, ff3 or both.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub method: Option<String>,
    /// discrete, continuous or both.
    #[arg(long)]
    pub kind: Option<String>,
    /// Directory of an ingested panel preceding the early window; required
    /// for Bayesian methods out of sample.
    #[arg(long)]
    pub prior_panel: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<f64>,
}

fn protocol(s: &str) -> Result<Protocol> {
    match s {
        "oos" => Ok(Protocol::OutOfSample),
        "loocv" => Ok(Protocol::Loocv),
        _ => bail!("unknown protocol '{s}' (oos or loocv)"),
    }
}

/// Mean squared prediction errors of each model, summarized as
/// min/mean/max/range with one column per model.
pub fn run(args: &CompareArgs) -> Result<bool> {
    let common = args.common.resolve()?;
    let cfg = &common.cfg;
    let loaded = args.data.load(cfg)?;
    let protocol = protocol(&cfg.get(args.protocol.clone(), "protocol")?.unwrap_or_else(|| "oos".into()))?;
    let models = models(cfg, args.model.clone(), true)?;
    let method: String = cfg.get(args.method.clone(), "method")?.unwrap_or_else(|| "ols".into());
    let est = estimator(&method, cfg.get(args.g, "g")?)?;
    let prior_dir = cfg.path(args.prior_panel.clone(), "prior-panel");
    let prior_panel = prior_dir.as_deref().map(DataArgs::load_dir).transpose()?;
    if est.needs_prior() && protocol == Protocol::OutOfSample && prior_panel.is_none() {
        bail!("{method} out of sample needs --prior-panel covering months before the early window");
    }
    let mut sink = Sink::new(&common.out, common.format)?;
    let stem = format!("compare_{}_{method}", protocol.as_str());

    let mut exclusions = Exclusions::new(&["kind", "model"]);
    for kind in kinds(cfg, args.kind.clone())? {
        let k = kind.as_str();
        let (early, late) = loaded.windows(kind)?;
        let mut reports: Vec<ComparisonReport> = Vec::new();
        for &model in &models {
            let priors = prior_means(&est, model, kind, &early, prior_panel.as_ref())?;
            let pm = priors.as_ref().map(|p| &p.0);
            let report = match protocol {
                Protocol::OutOfSample => out_of_sample(&early, &late, model, &est, pm)?,
                Protocol::Loocv => loocv_panel(&late, model, &est, pm),
            };
            let prior_excluded = priors.as_ref().map(|p| p.1.as_slice()).unwrap_or_default();
            exclusions.extend(&[k, model.as_str()], &merge_exclusions(prior_excluded, &report.exclusions));
            reports.push(report);
        }

        let mut summary = Table::new(
            format!("{stem}_summary_{k}"),
            std::iter::once("statistic").chain(models.iter().map(|m| m.as_str())),
        );
        for (i, stat) in ["min", "mean", "max", "range"].into_iter().enumerate() {
            let mut row: Vec<Cell> = vec![stat.into()];
            row.extend(reports.iter().map(|r| {
                r.summary.map_or(Cell::Empty, |s| Cell::Num([s.min, s.mean, s.max, s.range][i]))
            }));
            summary.push(row);
        }
        sink.table(&summary)?;

        let mut per_stock = Table::new(format!("{stem}_per_stock_{k}"), ["model", "identity", "permno", "cusip", "mse", "n_predictions"]);
        for r in &reports {
            for s in &r.per_stock {
                per_stock.push(vec![
                    r.model.as_str().into(),
                    s.identity.label.as_str().into(),
                    s.identity.permno.as_str().into(),
                    s.identity.cusip.as_str().into(),
                    s.mse.into(),
                    s.n_predictions.into(),
                ]);
            }
        }
        sink.table(&per_stock)?;
    }
    sink.table(&exclusions.table(&format!("{stem}_exclusions")))?;
    Ok(common.strict && !exclusions.is_empty())
}
