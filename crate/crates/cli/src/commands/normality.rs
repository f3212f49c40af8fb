use anyhow::{bail, Result};
use clap::Args;
use factor_bench::diagnostics::shapiro_wilk;
use factor_bench::estimators::Exclusion;
use rayon::prelude::*;

use crate::data::{kinds, CommonArgs, DataArgs};
use crate::report::{Cell, Exclusions, Sink, Table};

#[derive(Args, Debug)]
pub struct NormalityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// discrete, continuous or both.
    #[arg(long)]
    pub kind: Option<String>,
    /// Significance level; a stock passes when p >= alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
}

/// Shapiro-Wilk test of each stock's late-window returns.
pub fn run(args: &NormalityArgs) -> Result<bool> {
    let common = args.common.resolve()?;
    let cfg = &common.cfg;
    let loaded = args.data.load(cfg)?;
    let alpha: f64 = cfg.get(args.alpha, "alpha")?.unwrap_or(0.05);
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("--alpha must lie in (0, 1), got {alpha}");
    }
    let mut sink = Sink::new(&common.out, common.format)?;

    let mut summary = Table::new("normality_summary", ["kind", "alpha", "tested", "passed", "excluded"]);
    let mut exclusions = Exclusions::new(&["kind"]);
    for kind in kinds(cfg, args.kind.clone())? {
        let k = kind.as_str();
        let (_, late) = loaded.windows(kind)?;
        let results: Vec<_> = (0..late.n_stocks())
            .into_par_iter()
            .map(|i| late.return_series(i).and_then(|s| shapiro_wilk(s.values())))
            .collect();
        let mut table = Table::new(format!("normality_{k}"), ["identity", "permno", "cusip", "w", "p_value", "pass"]);
        let mut excluded = Vec::new();
        let mut passed = 0;
        for (id, r) in late.stocks().iter().zip(results) {
            match r {
                Ok(sw) => {
                    let pass = sw.p_value >= alpha;
                    passed += usize::from(pass);
                    table.push(vec![
                        id.label.as_str().into(),
                        id.permno.as_str().into(),
                        id.cusip.as_str().into(),
                        sw.w.into(),
                        sw.p_value.into(),
                        Cell::from(if pass { "true" } else { "false" }),
                    ]);
                }
                Err(e) => excluded.push(Exclusion { identity: id.clone(), reason: e.to_string() }),
            }
        }
        sink.table(&table)?;
        summary.push(vec![k.into(), alpha.into(), table.rows.len().into(), passed.into(), excluded.len().into()]);
        exclusions.extend(&[k], &excluded);
    }
    sink.table(&summary)?;
    sink.table(&exclusions.table("normality_exclusions"))?;
    Ok(common.strict && !exclusions.is_empty())
}
