use factor_bench::dataset::{build_panel_with_report, read_factors, read_panel, write_factors, write_panel};
use factor_bench::synth::{generate, SynthSpec};
use factor_bench::{FactorSeries, Month, RawRecord, ReturnKind, SynthPanel};

fn write(records: &[RawRecord], factors: &FactorSeries) -> (Vec<u8>, Vec<u8>) {
    let (mut p, mut f) = (Vec::new(), Vec::new());
    write_panel(&mut p, records).unwrap();
    write_factors(&mut f, factors).unwrap();
    (p, f)
}

#[test]
fn rebuilding_from_written_files_is_idempotent() {
    let sp: SynthPanel = generate(&SynthSpec::ff3(12, 24, 3)).unwrap();
    let (panel_csv, factor_csv) = write(&sp.full.to_records(), sp.full.factors());

    let records: Vec<RawRecord> = read_panel(panel_csv.as_slice(), "panel.csv").unwrap();
    let factors: FactorSeries = read_factors(factor_csv.as_slice(), "factors.csv", false).unwrap();
    let window = (sp.full.months()[0], sp.full.months()[23]);
    let built = build_panel_with_report(&records, &factors, window, 24, ReturnKind::Discrete).unwrap();
    assert!(built.dropped.is_empty());

    let again = write(&built.panel.to_records(), built.panel.factors());
    assert_eq!(again, (panel_csv, factor_csv));
}

#[test]
fn short_history_stock_is_dropped_and_reported() {
    let sp: SynthPanel = generate(&SynthSpec::capm(4, 12, 4)).unwrap();
    let mut records = sp.full.to_records();
    let victim = records[0].ticker.clone();
    records.retain(|r| !(r.ticker == victim && r.month == Month::new(2007, 5).unwrap()));
    let window = (sp.full.months()[0], sp.full.months()[11]);
    let built = build_panel_with_report(&records, sp.full.factors(), window, 12, ReturnKind::Discrete).unwrap();
    assert_eq!(built.panel.n_stocks(), 3);
    assert_eq!(built.dropped.len(), 1);
    assert_eq!(built.dropped[0].identity.label, victim);
    assert_eq!(built.dropped[0].months_present, 11);
}
