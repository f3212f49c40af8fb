//! Descriptive statistics, F-tests, rank analysis and normality testing.

mod rank;
mod shapiro_wilk;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{ols_fit, DesignSystem, FitResult};
use crate::scalar::{mean, Scalar};

pub use rank::{extreme_slice, rank_correlation, rank_values, Direction, ExtremeSlice, RankEntry, RankVector};
pub use shapiro_wilk::{shapiro_wilk, ShapiroWilk};

/// Six-number summary in the layout of the beta tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats<T> {
    pub min: T,
    pub q1: T,
    pub median: T,
    pub mean: T,
    pub q3: T,
    pub max: T,
}

impl<T: Scalar> DescriptiveStats<T> {
    /// `(label, value)` rows in table order.
    pub fn rows(&self) -> [(&'static str, T); 6] {
        [
            ("min", self.min),
            ("q1", self.q1),
            ("median", self.median),
            ("mean", self.mean),
            ("q3", self.q3),
            ("max", self.max),
        ]
    }
}

fn sorted_finite<T: Scalar>(values: &[T]) -> Result<Vec<T>> {
    if values.is_empty() {
        return Err(Error::Domain("empty input".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN in input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    Ok(sorted)
}

/// Quantile by linear interpolation between order statistics at the
/// 1-based position `1 + (N - 1) q`.
fn quantile_sorted<T: Scalar>(sorted: &[T], q: T) -> T {
    let h = T::from_count(sorted.len() - 1) * q;
    let lo = h.floor();
    let i = lo.to_usize().expect("nonnegative position");
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i])
}

pub fn describe<T: Scalar>(values: &[T]) -> Result<DescriptiveStats<T>> {
    let sorted = sorted_finite(values)?;
    Ok(DescriptiveStats {
        min: sorted[0],
        q1: quantile_sorted(&sorted, T::lit(0.25)),
        median: quantile_sorted(&sorted, T::lit(0.5)),
        // clamp guards the mean against rounding just outside [min, max]
        mean: mean(&sorted).max(sorted[0]).min(sorted[sorted.len() - 1]),
        q3: quantile_sorted(&sorted, T::lit(0.75)),
        max: sorted[sorted.len() - 1],
    })
}

/// One bin of a fixed-width histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin<T> {
    pub lower: T,
    pub upper: T,
    pub count: usize,
}

/// `bins` equal-width bins spanning `[min, max]`; the last bin is closed.
pub fn histogram<T: Scalar>(values: &[T], bins: usize) -> Result<Vec<HistogramBin<T>>> {
    if bins == 0 {
        return Err(Error::Domain("histogram needs at least one bin".into()));
    }
    let sorted = sorted_finite(values)?;
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let width = (hi - lo) / T::from_count(bins);
    let mut out: Vec<HistogramBin<T>> = (0..bins)
        .map(|b| HistogramBin {
            lower: lo + width * T::from_count(b),
            upper: if b + 1 == bins { hi } else { lo + width * T::from_count(b + 1) },
            count: 0,
        })
        .collect();
    for &v in &sorted {
        let b = if width > T::zero() {
            ((v - lo) / width).floor().to_usize().unwrap_or(bins - 1).min(bins - 1)
        } else {
            bins - 1
        };
        out[b].count += 1;
    }
    Ok(out)
}

/// `((rss_r - rss_f) / q) / (rss_f / (n - p_full))`.
pub fn f_statistic<T: Scalar>(
    full: &FitResult<T>,
    restricted: &FitResult<T>,
    n: usize,
    p_full: usize,
    q: usize,
) -> Result<T> {
    if n <= p_full {
        return Err(Error::InsufficientObservations { n, p: p_full });
    }
    if q == 0 {
        return Err(Error::Domain("F-test needs at least one restriction".into()));
    }
    if full.rss <= T::zero() {
        return Err(Error::PerfectFit);
    }
    let num = (restricted.rss - full.rss) / T::from_count(q);
    let den = full.rss / T::from_count(n - p_full);
    Ok(num / den)
}

/// F-statistic for all slopes jointly against the intercept-only model.
/// An exact fit (residuals at rounding level) is reported as
/// [`Error::PerfectFit`].
pub fn slope_f_statistic<T: Scalar>(d: &DesignSystem<T>) -> Result<T> {
    let full = ols_fit(d)?;
    if full.is_exact_fit(d.y()) {
        return Err(Error::PerfectFit);
    }
    let restricted = ols_fit(&d.intercept_only()?)?;
    f_statistic(&full, &restricted, d.n(), d.p(), d.p() - 1)
}
