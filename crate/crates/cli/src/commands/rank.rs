use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use factor_bench::dataset::Identity;
use factor_bench::diagnostics::{describe, extreme_slice, histogram, rank_correlation, rank_values, Direction};
use factor_bench::estimators::{fit_panel, Exclusion, ModelSpec};
use factor_bench::returns::geometric_average;
use factor_bench::RankVector;

use crate::commands::estimate::HISTOGRAM_BINS;
use crate::data::{estimator, kinds, merge_exclusions, prior_means, CommonArgs, DataArgs};
use crate::report::{describe_table, histogram_table, Cell, Exclusions, Sink, Table};

#[derive(Args, Debug)]
pub struct RankArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated estimation methods.
    #[arg(long)]
    pub methods: Option<String>,
    /// Share of stocks in each extreme slice.
    #[arg(long)]
    pub fraction: Option<f64>,
    /// capm or ff3; ff3 ranks on the market slope.
    #[arg(long)]
    pub model: Option<ModelSpec>,
    /// discrete, continuous or both.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub prior_panel: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<f64>,
}

/// Ranks stocks by market slope under each method and by geometric average
/// return over the late window, then correlates the rankings.
pub fn run(args: &RankArgs) -> Result<bool> {
    let common = args.common.resolve()?;
    let cfg = &common.cfg;
    let loaded = args.data.load(cfg)?;
    let model: ModelSpec = cfg.get(args.model, "model")?.unwrap_or(ModelSpec::Capm);
    let methods: Vec<String> = cfg
        .get(args.methods.clone(), "methods")?
        .unwrap_or_else(|| "ols,bayes-benchmark,bayes-leb".into())
        .split(',')
        .map(|m| m.trim().to_string())
        .filter(|m| !m.is_empty())
        .collect();
    if methods.is_empty() {
        bail!("--methods is empty");
    }
    if methods.iter().collect::<BTreeSet<_>>().len() != methods.len() {
        bail!("--methods lists a method twice");
    }
    let fraction: f64 = cfg.get(args.fraction, "fraction")?.unwrap_or(0.05);
    let g = cfg.get(args.g, "g")?;
    let estimators = methods.iter().map(|m| estimator(m, g)).collect::<Result<Vec<_>>>()?;
    let prior_dir = cfg.path(args.prior_panel.clone(), "prior-panel");
    let prior_panel = prior_dir.as_deref().map(DataArgs::load_dir).transpose()?;
    let mut sink = Sink::new(&common.out, common.format)?;
    let stem = format!("rank_{}", model.as_str());

    let mut exclusions = Exclusions::new(&["kind", "method"]);
    let mut geo_described = Vec::new();
    for kind in kinds(cfg, args.kind.clone())? {
        let k = kind.as_str();
        let (early, late) = loaded.windows(kind)?;

        let mut betas: Vec<Vec<(Identity, f64)>> = Vec::new();
        for (method, est) in methods.iter().zip(&estimators) {
            let priors = prior_means(est, model, kind, &early, prior_panel.as_ref())?;
            let fit = fit_panel(&late, model, est, priors.as_ref().map(|p| &p.0));
            let prior_excluded = priors.as_ref().map(|p| p.1.as_slice()).unwrap_or_default();
            exclusions.extend(&[k, method], &merge_exclusions(prior_excluded, &fit.exclusions));
            betas.push(fit.fits.iter().map(|(id, f)| (id.clone(), f.slopes()[0])).collect());
        }
        let mut geo = Vec::new();
        let mut geo_excluded = Vec::new();
        for (i, id) in late.stocks().iter().enumerate() {
            match late.return_series(i).and_then(|s| geometric_average(&s)) {
                Ok(v) => geo.push((id.clone(), v)),
                Err(e) => geo_excluded.push(Exclusion { identity: id.clone(), reason: e.to_string() }),
            }
        }
        exclusions.extend(&[k, "return"], &geo_excluded);

        // rank only stocks every series covers, so correlations compare like with like
        let common_ids: BTreeSet<&Identity> = late
            .stocks()
            .iter()
            .filter(|id| betas.iter().all(|b| b.iter().any(|(x, _)| x == *id)) && geo.iter().any(|(x, _)| x == *id))
            .collect();
        if common_ids.is_empty() {
            bail!("no stock has a beta under every method and a geometric return ({k})");
        }
        let keep = |v: &[(Identity, f64)]| -> Vec<(Identity, f64)> {
            v.iter().filter(|(id, _)| common_ids.contains(id)).cloned().collect()
        };
        let mut names: Vec<String> = methods.clone();
        names.push("return".into());
        let mut ranks: Vec<RankVector> = Vec::new();
        let mut series: Vec<Vec<(Identity, f64)>> = betas.iter().map(|b| keep(b)).collect();
        series.push(keep(&geo));
        for s in &series {
            ranks.push(rank_values(s, Direction::Descending)?);
        }

        let mut columns = vec!["identity".to_string(), "permno".into(), "cusip".into()];
        for m in &methods {
            columns.push(format!("beta_{m}"));
            columns.push(format!("rank_{m}"));
        }
        columns.extend(["geo_return".to_string(), "rank_return".into()]);
        let mut table = Table::new(format!("{stem}_ranks_{k}"), columns);
        for (row, (id, _)) in series[0].iter().enumerate() {
            let mut cells: Vec<Cell> = vec![id.label.as_str().into(), id.permno.as_str().into(), id.cusip.as_str().into()];
            for (s, r) in series.iter().zip(&ranks) {
                cells.push(s[row].1.into());
                cells.push(r.rank_of(&id.label).context("ranked stock")?.into());
            }
            table.push(cells);
        }
        sink.table(&table)?;

        let mut corr = Table::new(
            format!("{stem}_correlation_{k}"),
            std::iter::once("rank".to_string()).chain(names.iter().cloned()),
        );
        for (i, a) in ranks.iter().enumerate() {
            let mut cells: Vec<Cell> = vec![names[i].as_str().into()];
            for (j, b) in ranks.iter().enumerate() {
                cells.push(match j {
                    j if j > i => Cell::Empty,
                    j if j == i => Cell::Num(1.0),
                    _ => rank_correlation(a, b).map_or(Cell::Text("NaN".into()), Cell::Num),
                });
            }
            corr.push(cells);
        }
        sink.table(&corr)?;

        let mut extremes = Table::new(format!("{stem}_extremes_{k}"), ["series", "slice", "position", "identity", "value"]);
        for (name, r) in names.iter().zip(&ranks) {
            let slice = extreme_slice(r, fraction)?;
            for (label, entries) in [("top", &slice.top), ("bottom", &slice.bottom)] {
                for (pos, e) in entries.iter().enumerate() {
                    extremes.push(vec![name.as_str().into(), label.into(), (pos + 1).into(), e.identity.label.as_str().into(), e.value.into()]);
                }
            }
        }
        sink.table(&extremes)?;

        let returns = &ranks[ranks.len() - 1];
        for (m, r) in methods.iter().zip(&ranks) {
            let mut scatter = Table::new(format!("{stem}_scatter_{m}_{k}"), ["identity", "beta_rank", "return_rank"]);
            for (id, _) in &series[0] {
                scatter.push(vec![
                    id.label.as_str().into(),
                    r.rank_of(&id.label).context("ranked stock")?.into(),
                    returns.rank_of(&id.label).context("ranked stock")?.into(),
                ]);
            }
            sink.table(&scatter)?;
        }

        let geo_values: Vec<f64> = geo.iter().map(|(_, v)| *v).collect();
        if !geo_values.is_empty() {
            geo_described.push((format!("geo_return_{k}"), describe(&geo_values)?));
            sink.table(&histogram_table(&format!("rank_geo_return_histogram_{k}"), &histogram(&geo_values, HISTOGRAM_BINS)?))?;
        }
    }
    sink.table(&describe_table("rank_geo_return_describe", &geo_described))?;
    sink.table(&exclusions.table(&format!("{stem}_exclusions")))?;
    Ok(common.strict && !exclusions.is_empty())
}
