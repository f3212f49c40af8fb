use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use factor_bench::dataset::{write_factors, write_panel};
use factor_bench::estimators::ModelSpec;
use factor_bench::synth::{generate, CoefficientLaw, FactorLaw, Noise, SynthSpec};
use factor_bench::{Month, ReturnKind, SynthPanel};

use crate::commands::ingest::run_cfg;
use crate::config::ConfigFile;
use crate::report::{Cell, Format, Sink, Table};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Key-value file describing the synthetic panel.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_stocks: Option<usize>,
    #[arg(long)]
    pub n_months: Option<usize>,
}

fn range(cfg: &ConfigFile, key: &str, default: (f64, f64)) -> Result<(f64, f64)> {
    let Some(v) = cfg.get::<String>(None, key)? else {
        return Ok(default);
    };
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    let parse = |s: &str| s.parse::<f64>().with_context(|| format!("{key}: '{s}' is not a number"));
    match parts.as_slice() {
        [x] => {
            let x = parse(x)?;
            Ok((x, x))
        }
        [lo, hi] => Ok((parse(lo)?, parse(hi)?)),
        _ => bail!("{key} = '{v}': expected 'low, high' or a single value"),
    }
}

/// Reads a synthetic-panel description. Unset keys take the defaults of
/// [`SynthSpec::capm`] / [`SynthSpec::ff3`].
pub fn spec_from(cfg: &ConfigFile, args: &SimulateArgs) -> Result<SynthSpec> {
    let model: ModelSpec = cfg.get(None, "model")?.unwrap_or(ModelSpec::Capm);
    let n_stocks = cfg.require(args.n_stocks, "n-stocks")?;
    let n_months = cfg.require(args.n_months, "n-months")?;
    let seed = cfg.get(args.seed, "seed")?.unwrap_or(1);
    let mut spec = match model {
        ModelSpec::Capm => SynthSpec::capm(n_stocks, n_months, seed),
        ModelSpec::FamaFrench3 => SynthSpec::ff3(n_stocks, n_months, seed),
    };
    let CoefficientLaw::Uniform(defaults) = &spec.coefficients else {
        unreachable!("presets draw coefficients uniformly")
    };
    let keys = ["alpha", "beta", "beta-smb", "beta-hml"];
    let ranges = defaults
        .iter()
        .zip(keys)
        .map(|(&d, k)| range(cfg, k, d))
        .collect::<Result<Vec<_>>>()?;
    spec.coefficients = CoefficientLaw::Uniform(ranges);

    spec.noise = match cfg.get::<String>(None, "noise")?.as_deref().unwrap_or("gaussian") {
        "gaussian" => Noise::Gaussian { sigma: cfg.get(None, "sigma")?.unwrap_or(0.05) },
        "student-t" => Noise::StudentT {
            nu: cfg.get(None, "nu")?.unwrap_or(3.0),
            scale: cfg.get(None, "scale")?.unwrap_or(0.05),
        },
        other => bail!("unknown noise '{other}' (gaussian or student-t)"),
    };
    let mut law = FactorLaw::default();
    for (i, f) in ["mktrf", "smb", "hml"].into_iter().enumerate() {
        law.mean[i] = cfg.get(None, &format!("{f}-mean"))?.unwrap_or(law.mean[i]);
        law.sd[i] = cfg.get(None, &format!("{f}-sd"))?.unwrap_or(law.sd[i]);
    }
    spec.factor_law = law;
    spec.rf = cfg.get(None, "rf")?.unwrap_or(spec.rf);
    spec.start = cfg.get::<Month>(None, "start")?.unwrap_or(spec.start);
    spec.kind = cfg.get::<ReturnKind>(None, "kind")?.unwrap_or(spec.kind);
    spec.validate()?;
    Ok(spec)
}

/// Writes a synthetic panel in the ingested layout, plus the true
/// coefficients.
pub fn run(args: &SimulateArgs) -> Result<bool> {
    let cfg = ConfigFile::optional(args.spec.as_deref())?;
    let out = args.out.clone().or(cfg.get(None, "out")?).context("missing --out")?;
    let spec = spec_from(&cfg, args)?;
    let sp: SynthPanel = generate(&spec)?;
    let mut sink = Sink::new(&out, Format::Csv)?;

    let mut buf = Vec::new();
    write_panel(&mut buf, &sp.full.to_records())?;
    sink.raw("panel.csv", &buf)?;
    buf.clear();
    write_factors(&mut buf, sp.full.factors())?;
    sink.raw("factors.csv", &buf)?;
    let months = sp.full.months();
    let split = sp.early.months()[sp.early.n_months() - 1];
    sink.raw("run.cfg", run_cfg(&months[0], &split, &months[months.len() - 1], months.len()).as_bytes())?;

    let columns = ["identity", "permno", "cusip", "alpha"].into_iter().chain(spec.model.slope_names().iter().copied());
    let mut truth = Table::new("truth", columns);
    for (id, theta) in &sp.truth {
        let mut row: Vec<Cell> = vec![id.label.as_str().into(), id.permno.as_str().into(), id.cusip.as_str().into()];
        row.extend(theta.iter().map(|&v| Cell::Num(v)));
        truth.push(row);
    }
    sink.table(&truth)?;
    Ok(false)
}
