//! Predictive model comparison: out-of-sample prediction and per-stock
//! leave-one-out cross validation, summarized by mean squared error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{AlignedPanel, Identity};
use crate::error::{Error, Result};
use crate::estimators::{build_design_at, fit_with, Estimator, Exclusion, ModelSpec, PriorMeans};
use crate::returns::ReturnKind;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Fit on the early window, predict the late window.
    #[serde(rename = "oos")]
    OutOfSample,
    Loocv,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::OutOfSample => "oos",
            Protocol::Loocv => "loocv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StockMse<T> {
    pub identity: Identity,
    pub mse: T,
    pub n_predictions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseSummary<T> {
    pub min: T,
    pub mean: T,
    pub max: T,
    pub range: T,
}

impl<T: Scalar> MseSummary<T> {
    /// `None` when `per_stock` is empty.
    pub fn of(per_stock: &[StockMse<T>]) -> Option<Self> {
        let first = per_stock.first()?.mse;
        let (min, max) = per_stock
            .iter()
            .fold((first, first), |(lo, hi), s| (lo.min(s.mse), hi.max(s.mse)));
        let mean = per_stock.iter().map(|s| s.mse).sum::<T>() / T::from_count(per_stock.len());
        Some(MseSummary {
            min,
            mean,
            max,
            range: max - min,
        })
    }
}

/// Per-stock MSEs of one model/method/protocol with their summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport<T> {
    pub model: ModelSpec,
    pub method: String,
    pub kind: ReturnKind,
    pub protocol: Protocol,
    pub per_stock: Vec<StockMse<T>>,
    pub summary: Option<MseSummary<T>>,
    pub exclusions: Vec<Exclusion>,
}

impl<T: Scalar> ComparisonReport<T> {
    fn assemble(
        panel: &AlignedPanel<T>,
        model: ModelSpec,
        estimator: &Estimator<T>,
        protocol: Protocol,
        results: Vec<Result<StockMse<T>>>,
    ) -> Self {
        let mut per_stock = Vec::new();
        let mut exclusions = Vec::new();
        for (stock, r) in panel.stocks().iter().zip(results) {
            match r {
                Ok(s) => per_stock.push(s),
                Err(e) => exclusions.push(Exclusion {
                    identity: stock.clone(),
                    reason: e.to_string(),
                }),
            }
        }
        ComparisonReport {
            model,
            method: estimator.label().to_string(),
            kind: panel.kind(),
            protocol,
            summary: MseSummary::of(&per_stock),
            per_stock,
            exclusions,
        }
    }
}

fn prior_mean<'a, T>(
    estimator: &Estimator<T>,
    priors: Option<&'a PriorMeans<T>>,
    stock: &Identity,
) -> Result<Option<&'a [T]>>
where
    T: Scalar,
{
    if !estimator.needs_prior() {
        return Ok(None);
    }
    let map = priors.ok_or_else(|| Error::Config(format!("{} needs prior means", estimator.label())))?;
    map.get(&stock.key())
        .map(|v| Some(v.as_slice()))
        .ok_or_else(|| Error::Lookup(format!("no prior mean for '{}'", stock.label)))
}

/// Fits each stock on `early` and scores predictions of its `late` excess
/// returns made from the realized late-window factors.
pub fn out_of_sample<T: Scalar>(
    early: &AlignedPanel<T>,
    late: &AlignedPanel<T>,
    model: ModelSpec,
    estimator: &Estimator<T>,
    priors: Option<&PriorMeans<T>>,
) -> Result<ComparisonReport<T>> {
    if early.stocks() != late.stocks() {
        return Err(Error::Domain("early and late panels hold different stocks".into()));
    }
    if early.kind() != late.kind() {
        return Err(Error::Domain("early and late panels use different return kinds".into()));
    }
    let results = (0..early.n_stocks())
        .into_par_iter()
        .map(|i| {
            let stock = &early.stocks()[i];
            let theta0 = prior_mean(estimator, priors, stock)?;
            let fit = fit_with(&build_design_at(early, i, model)?, estimator, theta0)?;
            let target = build_design_at(late, i, model)?;
            let sse: T = (0..target.n())
                .map(|t| {
                    let e = target.y()[t] - target.predict_row(t, &fit.theta);
                    e * e
                })
                .sum();
            Ok(StockMse {
                identity: stock.clone(),
                mse: sse / T::from_count(target.n()),
                n_predictions: target.n(),
            })
        })
        .collect();
    Ok(ComparisonReport::assemble(early, model, estimator, Protocol::OutOfSample, results))
}

/// Leave-one-out MSE of one stock by explicit refits.
pub fn loocv<T: Scalar>(
    panel: &AlignedPanel<T>,
    stock: &Identity,
    model: ModelSpec,
    estimator: &Estimator<T>,
    priors: Option<&PriorMeans<T>>,
) -> Result<StockMse<T>> {
    let i = panel.lookup(stock)?;
    loocv_at(panel, i, model, estimator, priors)
}

fn loocv_at<T: Scalar>(
    panel: &AlignedPanel<T>,
    index: usize,
    model: ModelSpec,
    estimator: &Estimator<T>,
    priors: Option<&PriorMeans<T>>,
) -> Result<StockMse<T>> {
    let stock = &panel.stocks()[index];
    let (n, p) = (panel.n_months(), model.p());
    if n <= p + 1 {
        return Err(Error::InsufficientFoldSize { n, p });
    }
    let theta0 = prior_mean(estimator, priors, stock)?;
    let d = build_design_at(panel, index, model)?;
    let mut sse = T::zero();
    for fold in 0..n {
        let fit = d
            .without_row(fold)
            .and_then(|train| fit_with(&train, estimator, theta0))
            .map_err(|e| Error::Fold {
                fold: fold + 1,
                source: Box::new(e),
            })?;
        let e = d.y()[fold] - d.predict_row(fold, &fit.theta);
        sse = sse + e * e;
    }
    Ok(StockMse {
        identity: stock.clone(),
        mse: sse / T::from_count(n),
        n_predictions: n,
    })
}

/// [`loocv`] for every stock of the panel.
pub fn loocv_panel<T: Scalar>(
    panel: &AlignedPanel<T>,
    model: ModelSpec,
    estimator: &Estimator<T>,
    priors: Option<&PriorMeans<T>>,
) -> ComparisonReport<T> {
    let results = (0..panel.n_stocks())
        .into_par_iter()
        .map(|i| loocv_at(panel, i, model, estimator, priors))
        .collect();
    ComparisonReport::assemble(panel, model, estimator, Protocol::Loocv, results)
}
