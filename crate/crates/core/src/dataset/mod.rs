//! Ingestion, identity assignment, panel alignment and early/late splitting.

mod io;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::month::{check_consecutive, Month};
use crate::returns::{ReturnKind, ReturnSeries};
use crate::scalar::Scalar;

pub use io::{
    format_g10, load_factor_file, load_panel_file, load_tbill_file, read_factors, read_panel,
    read_tbill, write_factors, write_panel,
};

/// One row of a returns panel file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord<T> {
    pub month: Month,
    pub ticker: String,
    pub permno: String,
    pub cusip: String,
    /// Decimal discrete return.
    pub ret: T,
}

/// `(permno, cusip)` pair that identifies one business over time.
pub type IdentityKey = (String, String);

/// A stock's stable identity and its human-readable label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Identity {
    pub label: String,
    pub permno: String,
    pub cusip: String,
}

impl Identity {
    pub fn key(&self) -> IdentityKey {
        (self.permno.clone(), self.cusip.clone())
    }
}

/// Monthly factor returns and risk-free rate, all decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSeries<T> {
    months: Vec<Month>,
    pub mktrf: Vec<T>,
    pub smb: Vec<T>,
    pub hml: Vec<T>,
    pub rf: Vec<T>,
}

impl<T: Scalar> FactorSeries<T> {
    pub fn new(months: Vec<Month>, mktrf: Vec<T>, smb: Vec<T>, hml: Vec<T>, rf: Vec<T>) -> Result<Self> {
        if months.is_empty() {
            return Err(Error::Ingestion("empty series".into()));
        }
        for len in [mktrf.len(), smb.len(), hml.len(), rf.len()] {
            if len != months.len() {
                return Err(Error::DimensionMismatch {
                    expected: months.len(),
                    actual: len,
                });
            }
        }
        check_consecutive(&months)?;
        Ok(FactorSeries {
            months,
            mktrf,
            smb,
            hml,
            rf,
        })
    }

    pub fn months(&self) -> &[Month] {
        &self.months
    }

    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }

    fn position(&self, m: Month) -> Option<usize> {
        let first = self.months.first()?;
        let idx = m.ordinal() - first.ordinal();
        (idx >= 0 && (idx as usize) < self.months.len()).then_some(idx as usize)
    }

    /// The sub-series covering `[start, end]`; every month must be present.
    pub fn restrict(&self, start: Month, end: Month) -> Result<Self> {
        let (i, j) = match (self.position(start), self.position(end)) {
            (Some(i), Some(j)) if i <= j => (i, j),
            _ => {
                return Err(Error::Ingestion(format!(
                    "factor months missing within window {start}..{end} (factors cover {}..{})",
                    self.months[0],
                    self.months[self.months.len() - 1]
                )))
            }
        };
        Ok(FactorSeries {
            months: self.months[i..=j].to_vec(),
            mktrf: self.mktrf[i..=j].to_vec(),
            smb: self.smb[i..=j].to_vec(),
            hml: self.hml[i..=j].to_vec(),
            rf: self.rf[i..=j].to_vec(),
        })
    }

    /// Replaces the risk-free column with monthly decimal rates keyed by month.
    pub fn with_risk_free(&self, rates: &BTreeMap<Month, T>) -> Result<Self> {
        let rf = self
            .months
            .iter()
            .map(|m| {
                rates
                    .get(m)
                    .copied()
                    .ok_or_else(|| Error::Ingestion(format!("risk-free rate missing for {m}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FactorSeries { rf, ..self.clone() })
    }
}

/// Stocks-by-months excess returns aligned with factor series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPanel<T> {
    months: Vec<Month>,
    stocks: Vec<Identity>,
    /// Source discrete returns, stock x month.
    returns: Matrix<T>,
    /// Excess returns in `kind` convention, stock x month.
    excess: Matrix<T>,
    factors: FactorSeries<T>,
    kind: ReturnKind,
}

impl<T: Scalar> AlignedPanel<T> {
    /// Assembles a panel from already-aligned parts. `returns` holds discrete
    /// source returns; excess returns are derived from them.
    pub fn from_parts(
        stocks: Vec<Identity>,
        returns: Matrix<T>,
        factors: FactorSeries<T>,
        kind: ReturnKind,
    ) -> Result<Self> {
        let months = factors.months().to_vec();
        if returns.rows() != stocks.len() || returns.cols() != months.len() {
            return Err(Error::DimensionMismatch {
                expected: stocks.len() * months.len(),
                actual: returns.rows() * returns.cols(),
            });
        }
        let labels: BTreeSet<&str> = stocks.iter().map(|s| s.label.as_str()).collect();
        if labels.len() != stocks.len() {
            return Err(Error::Ingestion("duplicate identity labels in panel".into()));
        }
        let mut excess = Matrix::zeros(returns.rows(), returns.cols());
        for i in 0..returns.rows() {
            for t in 0..returns.cols() {
                excess[(i, t)] = excess_return(returns[(i, t)], factors.rf[t], kind).map_err(|e| {
                    Error::Ingestion(format!("{} {}: {e}", stocks[i].label, months[t]))
                })?;
            }
        }
        Ok(AlignedPanel {
            months,
            stocks,
            returns,
            excess,
            factors,
            kind,
        })
    }

    pub fn months(&self) -> &[Month] {
        &self.months
    }

    pub fn stocks(&self) -> &[Identity] {
        &self.stocks
    }

    pub fn factors(&self) -> &FactorSeries<T> {
        &self.factors
    }

    pub fn kind(&self) -> ReturnKind {
        self.kind
    }

    pub fn n_months(&self) -> usize {
        self.months.len()
    }

    pub fn n_stocks(&self) -> usize {
        self.stocks.len()
    }

    pub fn excess(&self) -> &Matrix<T> {
        &self.excess
    }

    pub fn stock_index(&self, label: &str) -> Option<usize> {
        // stocks are label-sorted when built by `build_panel`, but not necessarily otherwise
        self.stocks.iter().position(|s| s.label == label)
    }

    pub fn lookup(&self, stock: &Identity) -> Result<usize> {
        self.stocks
            .iter()
            .position(|s| s == stock)
            .ok_or_else(|| Error::Lookup(format!("stock '{}' not in panel", stock.label)))
    }

    pub fn excess_row(&self, i: usize) -> &[T] {
        self.excess.row(i)
    }

    /// The stock's own returns (not excess) in the panel's convention.
    pub fn return_series(&self, i: usize) -> Result<ReturnSeries<T>> {
        let raw = self.returns.row(i).to_vec();
        let s = ReturnSeries::new(self.stocks[i].label.clone(), self.months.clone(), raw, ReturnKind::Discrete)?;
        crate::returns::convert_series(&s, self.kind)
    }

    /// The same panel re-expressed in another return convention.
    pub fn with_kind(&self, kind: ReturnKind) -> Result<Self> {
        Self::from_parts(self.stocks.clone(), self.returns.clone(), self.factors.clone(), kind)
    }

    /// Source rows, one per stock-month, ordered by stock then month.
    pub fn to_records(&self) -> Vec<RawRecord<T>> {
        let mut out = Vec::with_capacity(self.stocks.len() * self.months.len());
        for (i, s) in self.stocks.iter().enumerate() {
            for (t, &m) in self.months.iter().enumerate() {
                out.push(RawRecord {
                    month: m,
                    ticker: s.label.clone(),
                    permno: s.permno.clone(),
                    cusip: s.cusip.clone(),
                    ret: self.returns[(i, t)],
                });
            }
        }
        out
    }

    /// Columns `[from, to)` of every matrix.
    fn slice_months(&self, from: usize, to: usize) -> Result<Self> {
        let factors = self.factors.restrict(self.months[from], self.months[to - 1])?;
        let pick = |m: &Matrix<T>| Matrix::from_fn(m.rows(), to - from, |r, c| m[(r, from + c)]);
        Ok(AlignedPanel {
            months: self.months[from..to].to_vec(),
            stocks: self.stocks.clone(),
            returns: pick(&self.returns),
            excess: pick(&self.excess),
            factors,
            kind: self.kind,
        })
    }
}

fn excess_return<T: Scalar>(ret: T, rf: T, kind: ReturnKind) -> Result<T> {
    match kind {
        ReturnKind::Discrete => Ok(ret - rf),
        ReturnKind::Continuous => {
            Ok(crate::returns::to_continuous(ret)? - crate::returns::to_continuous(rf)?)
        }
    }
}

/// Assigns one [`Identity`] per distinct `(permno, cusip)` key.
///
/// A key is labeled by the ticker of its earliest record. That ticker is used
/// as-is when no other key ever traded under it; otherwise the label gets a
/// `#k` suffix, `k` being the key's 1-based position among all keys seen
/// under that ticker in lexicographic key order.
pub fn assign_identities<T>(records: &[RawRecord<T>]) -> Result<BTreeMap<IdentityKey, Identity>> {
    if records.is_empty() {
        return Err(Error::Ingestion("no records".into()));
    }
    let mut earliest: BTreeMap<IdentityKey, (Month, &str)> = BTreeMap::new();
    let mut keys_by_ticker: BTreeMap<&str, BTreeSet<IdentityKey>> = BTreeMap::new();
    for (row, r) in records.iter().enumerate() {
        if r.permno.trim().is_empty() || r.cusip.trim().is_empty() {
            return Err(Error::Ingestion(format!(
                "record {} ({} {}): empty permno or cusip",
                row + 1,
                r.ticker,
                r.month
            )));
        }
        let key = (r.permno.clone(), r.cusip.clone());
        let candidate = (r.month, r.ticker.as_str());
        earliest
            .entry(key.clone())
            .and_modify(|e| {
                if candidate < *e {
                    *e = candidate
                }
            })
            .or_insert(candidate);
        keys_by_ticker.entry(r.ticker.as_str()).or_default().insert(key);
    }

    let mut out = BTreeMap::new();
    let mut labels = BTreeSet::new();
    for (key, (_, ticker)) in earliest {
        let sharing = &keys_by_ticker[ticker];
        let label = if sharing.len() == 1 {
            ticker.to_string()
        } else {
            let ordinal = sharing.iter().position(|k| *k == key).expect("key registered") + 1;
            format!("{ticker}#{ordinal}")
        };
        if !labels.insert(label.clone()) {
            return Err(Error::Ingestion(format!("identity label '{label}' is not unique")));
        }
        out.insert(
            key.clone(),
            Identity {
                label,
                permno: key.0,
                cusip: key.1,
            },
        );
    }
    Ok(out)
}

/// A stock left out of a panel for lack of complete history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedStock {
    pub identity: Identity,
    pub months_present: usize,
    pub months_required: usize,
}

/// Panel plus the stocks the completeness filter removed.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelBuild<T> {
    pub panel: AlignedPanel<T>,
    pub dropped: Vec<DroppedStock>,
    pub distinct_keys: usize,
}

/// Builds the panel over `window` keeping only stocks with a return in every
/// month. Returns are converted to `kind` and net of the risk-free rate.
pub fn build_panel<T: Scalar>(
    records: &[RawRecord<T>],
    factors: &FactorSeries<T>,
    window: (Month, Month),
    required_len: usize,
    kind: ReturnKind,
) -> Result<AlignedPanel<T>> {
    build_panel_with_report(records, factors, window, required_len, kind).map(|b| b.panel)
}

pub fn build_panel_with_report<T: Scalar>(
    records: &[RawRecord<T>],
    factors: &FactorSeries<T>,
    window: (Month, Month),
    required_len: usize,
    kind: ReturnKind,
) -> Result<PanelBuild<T>> {
    let (start, end) = window;
    if end < start {
        return Err(Error::Config(format!("window end {end} precedes start {start}")));
    }
    let span = start.span_to(end);
    if required_len == 0 || span != required_len {
        return Err(Error::Config(format!(
            "window {start}..{end} spans {span} months but {required_len} are required"
        )));
    }
    let factors = factors.restrict(start, end)?;
    let identities = assign_identities(records)?;

    let mut by_key: BTreeMap<&IdentityKey, BTreeMap<Month, T>> = BTreeMap::new();
    for (row, r) in records.iter().enumerate() {
        if !(r.ret > -T::one()) || !r.ret.is_finite() {
            return Err(Error::Ingestion(format!(
                "record {} ({} {}): return {} must be finite and > -1",
                row + 1,
                r.ticker,
                r.month,
                r.ret
            )));
        }
        let key = identities
            .get_key_value(&(r.permno.clone(), r.cusip.clone()))
            .map(|(k, _)| k)
            .expect("identity assigned for every key");
        let months = by_key.entry(key).or_default();
        if months.insert(r.month, r.ret).is_some() {
            return Err(Error::Ingestion(format!(
                "duplicate return for {} ({}/{}) in {}",
                identities[key].label, key.0, key.1, r.month
            )));
        }
    }

    let mut kept: Vec<(&Identity, Vec<T>)> = Vec::new();
    let mut dropped = Vec::new();
    for (key, months) in &by_key {
        let identity = &identities[*key];
        let row: Vec<T> = months.range(start..=end).map(|(_, &v)| v).collect();
        if row.len() == span {
            kept.push((identity, row));
        } else {
            dropped.push(DroppedStock {
                identity: identity.clone(),
                months_present: row.len(),
                months_required: span,
            });
        }
    }
    kept.sort_by(|a, b| a.0.label.cmp(&b.0.label));
    dropped.sort_by(|a, b| a.identity.label.cmp(&b.identity.label));

    if kept.is_empty() {
        return Err(Error::Ingestion(format!(
            "no stock has a complete history over {start}..{end}"
        )));
    }
    let stocks: Vec<Identity> = kept.iter().map(|(id, _)| (*id).clone()).collect();
    let rows: Vec<Vec<T>> = kept.into_iter().map(|(_, r)| r).collect();
    let returns = Matrix::from_rows(&rows)?;
    let panel = AlignedPanel::from_parts(stocks, returns, factors, kind)?;
    Ok(PanelBuild {
        panel,
        dropped,
        distinct_keys: identities.len(),
    })
}

/// Splits at `boundary`: early holds months up to and including it.
pub fn split_panel<T: Scalar>(
    panel: &AlignedPanel<T>,
    boundary: Month,
) -> Result<(AlignedPanel<T>, AlignedPanel<T>)> {
    let months = panel.months();
    let first = months[0];
    let last = months[months.len() - 1];
    if boundary < first || boundary >= last {
        return Err(Error::Config(format!(
            "split boundary {boundary} must lie in {first}..{last} with a nonempty late side"
        )));
    }
    let cut = first.span_to(boundary);
    Ok((panel.slice_months(0, cut)?, panel.slice_months(cut, months.len())?))
}
