use anyhow::Result;
use clap::Args;
use factor_bench::dataset::{write_factors, write_panel};

use crate::data::{CommonArgs, DataArgs};
use crate::report::{Sink, Table};

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
}

/// Writes the cleaned panel, decimal factors and a `run.cfg` pointing at
/// them. Feeding that `run.cfg` back reproduces the same files.
pub fn run(args: &IngestArgs) -> Result<bool> {
    let common = args.common.resolve()?;
    let loaded = args.data.load(&common.cfg)?;
    let panel = loaded.panel();
    let mut sink = Sink::new(&common.out, common.format)?;

    let mut buf = Vec::new();
    write_panel(&mut buf, &panel.to_records())?;
    sink.raw("panel.csv", &buf)?;
    buf.clear();
    write_factors(&mut buf, panel.factors())?;
    sink.raw("factors.csv", &buf)?;
    sink.raw("run.cfg", run_cfg(&loaded.start, &loaded.split, &loaded.end, panel.n_months()).as_bytes())?;

    let mut summary = Table::new("ingest_summary", ["records", "distinct_stocks", "kept", "dropped", "months", "start", "split", "end"]);
    summary.push(vec![
        loaded.n_records.into(),
        loaded.build.distinct_keys.into(),
        panel.n_stocks().into(),
        loaded.build.dropped.len().into(),
        panel.n_months().into(),
        loaded.start.to_string().into(),
        loaded.split.to_string().into(),
        loaded.end.to_string().into(),
    ]);
    sink.table(&summary)?;

    let mut dropped = Table::new("ingest_dropped", ["identity", "permno", "cusip", "months_present", "months_required", "reason"]);
    for d in &loaded.build.dropped {
        dropped.push(vec![
            d.identity.label.as_str().into(),
            d.identity.permno.as_str().into(),
            d.identity.cusip.as_str().into(),
            d.months_present.into(),
            d.months_required.into(),
            "incomplete history".into(),
        ]);
    }
    sink.table(&dropped)?;
    // dropped stocks are the intended filter, not failures
    Ok(false)
}

pub fn run_cfg(start: &impl std::fmt::Display, split: &impl std::fmt::Display, end: &impl std::fmt::Display, len: usize) -> String {
    format!(
        "panel = panel.csv\nfactors = factors.csv\npercent = false\nstart = {start}\nsplit = {split}\nend = {end}\nrequired-len = {len}\n"
    )
}
