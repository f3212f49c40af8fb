//! Estimator selection and whole-panel fitting.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_design_at, conjugate_bayes_fit, mle_fit, ols_fit, robust_bayes_fit_with_rule, DesignSystem,
    FitResult, GRule, ModelSpec, PriorSpec,
};
use crate::dataset::{AlignedPanel, Identity, IdentityKey};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Prior precision matrix for the conjugate estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision<T> {
    Matrix(Matrix<T>),
    /// `V = g * X'X`.
    GPrior(T),
}

/// A fully configured coefficient estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator<T> {
    Ols,
    Mle,
    ConjugateBayes { precision: Precision<T> },
    RobustBayes { g_rule: GRule<T> },
}

impl<T: Scalar> Estimator<T> {
    /// Short name used in report file names.
    pub fn label(&self) -> &'static str {
        match self {
            Estimator::Ols => "ols",
            Estimator::Mle => "mle",
            Estimator::ConjugateBayes { .. } => "bayes-conjugate",
            Estimator::RobustBayes { g_rule: GRule::Benchmark } => "bayes-benchmark",
            Estimator::RobustBayes { g_rule: GRule::LocalEmpiricalBayes } => "bayes-leb",
            Estimator::RobustBayes { g_rule: GRule::Fixed(_) } => "bayes-fixed",
        }
    }

    pub fn needs_prior(&self) -> bool {
        matches!(self, Estimator::ConjugateBayes { .. } | Estimator::RobustBayes { .. })
    }
}

/// Prior mean vectors keyed by `(permno, cusip)`.
pub type PriorMeans<T> = BTreeMap<IdentityKey, Vec<T>>;

/// A stock left out of a panel-level computation, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub identity: Identity,
    pub reason: String,
}

/// Per-stock fits in panel order plus the stocks that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelFit<T> {
    pub model: ModelSpec,
    pub fits: Vec<(Identity, FitResult<T>)>,
    pub exclusions: Vec<Exclusion>,
}

/// Fits `d` with `estimator`; Bayesian estimators require `theta0`.
pub fn fit_with<T: Scalar>(d: &DesignSystem<T>, estimator: &Estimator<T>, theta0: Option<&[T]>) -> Result<FitResult<T>> {
    let prior_mean = || {
        theta0
            .map(<[T]>::to_vec)
            .ok_or_else(|| Error::Config(format!("{} needs a prior mean", estimator.label())))
    };
    match estimator {
        Estimator::Ols => ols_fit(d),
        Estimator::Mle => mle_fit(d),
        Estimator::RobustBayes { g_rule } => robust_bayes_fit_with_rule(
            d,
            &PriorSpec {
                theta0: prior_mean()?,
                g_rule: *g_rule,
            },
        ),
        Estimator::ConjugateBayes { precision } => {
            let theta0 = prior_mean()?;
            match precision {
                Precision::Matrix(v) => conjugate_bayes_fit(d, &theta0, v),
                Precision::GPrior(g) => {
                    if !(*g >= T::zero()) {
                        return Err(Error::Domain(format!("prior precision g = {g} is negative")));
                    }
                    let v = d.x().gram().scaled(*g);
                    let mut fit = conjugate_bayes_fit(d, &theta0, &v)?;
                    fit.g = Some(*g);
                    Ok(fit)
                }
            }
        }
    }
}

fn prior_for<'a, T>(priors: Option<&'a PriorMeans<T>>, stock: &Identity) -> Result<Option<&'a [T]>> {
    match priors {
        None => Ok(None),
        Some(map) => map
            .get(&stock.key())
            .map(|v| Some(v.as_slice()))
            .ok_or_else(|| Error::Lookup(format!("no prior mean for '{}'", stock.label))),
    }
}

/// Fits every stock of the panel. Failures become exclusions; the order of
/// `fits` follows the panel.
pub fn fit_panel<T: Scalar>(
    panel: &AlignedPanel<T>,
    model: ModelSpec,
    estimator: &Estimator<T>,
    priors: Option<&PriorMeans<T>>,
) -> PanelFit<T> {
    let priors = if estimator.needs_prior() { priors } else { None };
    let results: Vec<Result<FitResult<T>>> = (0..panel.n_stocks())
        .into_par_iter()
        .map(|i| {
            let stock = &panel.stocks()[i];
            let theta0 = prior_for(priors, stock)?;
            let d = build_design_at(panel, i, model)?;
            fit_with(&d, estimator, theta0)
        })
        .collect();
    let mut out = PanelFit {
        model,
        fits: Vec::new(),
        exclusions: Vec::new(),
    };
    for (stock, r) in panel.stocks().iter().zip(results) {
        match r {
            Ok(fit) => out.fits.push((stock.clone(), fit)),
            Err(e) => out.exclusions.push(Exclusion {
                identity: stock.clone(),
                reason: e.to_string(),
            }),
        }
    }
    out
}

/// OLS coefficients of every stock over a prior window.
pub fn empirical_prior_means<T: Scalar>(prior_panel: &AlignedPanel<T>, model: ModelSpec) -> (PriorMeans<T>, Vec<Exclusion>) {
    let fitted = fit_panel(prior_panel, model, &Estimator::Ols, None);
    let means = fitted
        .fits
        .into_iter()
        .map(|(id, fit)| (id.key(), fit.theta))
        .collect();
    (means, fitted.exclusions)
}
