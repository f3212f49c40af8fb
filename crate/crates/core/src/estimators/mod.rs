//! Design matrices and coefficient estimators for the CAPM and the
//! Fama-French three-factor regression.

mod bayes;
mod ols;
mod panel;

use serde::{Deserialize, Serialize};

use crate::dataset::{AlignedPanel, Identity};
use crate::error::{Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::scalar::{sum_sq, Scalar};

pub use bayes::{
    conjugate_bayes_fit, empirical_prior_mean, robust_bayes_fit, robust_bayes_fit_with_rule,
    robust_weight, select_g, GRule, PriorSpec,
};
pub use ols::{mle_fit, ols_fit};
pub use panel::{
    empirical_prior_means, fit_panel, fit_with, Estimator, Exclusion, PanelFit, Precision, PriorMeans,
};

/// Which factor regression to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelSpec {
    /// Intercept plus market premium.
    #[serde(rename = "capm")]
    Capm,
    /// Intercept plus market premium, SMB and HML.
    #[serde(rename = "ff3")]
    FamaFrench3,
}

impl ModelSpec {
    /// Number of regressors including the intercept.
    pub fn p(self) -> usize {
        match self {
            ModelSpec::Capm => 2,
            ModelSpec::FamaFrench3 => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelSpec::Capm => "capm",
            ModelSpec::FamaFrench3 => "ff3",
        }
    }

    /// Names of the slope coefficients, in `theta[1..]` order.
    pub fn slope_names(self) -> &'static [&'static str] {
        match self {
            ModelSpec::Capm => &["beta"],
            ModelSpec::FamaFrench3 => &["beta_m", "beta_smb", "beta_hml"],
        }
    }
}

impl std::fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "capm" => Ok(ModelSpec::Capm),
            "ff3" | "famafrench3" | "fama-french" => Ok(ModelSpec::FamaFrench3),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// Response vector and design matrix of one regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSystem<T> {
    y: Vec<T>,
    x: Matrix<T>,
}

impl<T: Scalar> DesignSystem<T> {
    /// Requires `n > p` and a leading column of ones.
    pub fn new(y: Vec<T>, x: Matrix<T>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                actual: y.len(),
            });
        }
        let (n, p) = (x.rows(), x.cols());
        if p == 0 || (0..n).any(|r| x[(r, 0)] != T::one()) {
            return Err(Error::Domain("first design column must be all ones".into()));
        }
        if n <= p {
            return Err(Error::InsufficientObservations { n, p });
        }
        Ok(DesignSystem { y, x })
    }

    /// Design with an intercept followed by the given regressor columns.
    pub fn with_intercept(y: Vec<T>, regressors: &[&[T]]) -> Result<Self> {
        for col in regressors {
            if col.len() != y.len() {
                return Err(Error::DimensionMismatch {
                    expected: y.len(),
                    actual: col.len(),
                });
            }
        }
        let x = Matrix::from_fn(y.len(), regressors.len() + 1, |r, c| {
            if c == 0 {
                T::one()
            } else {
                regressors[c - 1][r]
            }
        });
        Self::new(y, x)
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    /// The intercept-only design on the same response.
    pub fn intercept_only(&self) -> Result<Self> {
        Self::with_intercept(self.y.clone(), &[])
    }

    /// The design with observation `i` removed; `None` if too few rows remain.
    pub fn without_row(&self, i: usize) -> Result<Self> {
        let y = self
            .y
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != i)
            .map(|(_, &v)| v)
            .collect();
        Self::new(y, self.x.select_rows(|r| r != i))
    }

    /// `x_i . theta`.
    pub fn predict_row(&self, i: usize, theta: &[T]) -> T {
        crate::linalg::dot(self.x.row(i), theta)
    }
}

/// Stock's excess returns regressed on the model's factor columns.
pub fn build_design<T: Scalar>(
    panel: &AlignedPanel<T>,
    stock: &Identity,
    model: ModelSpec,
) -> Result<DesignSystem<T>> {
    let i = panel.lookup(stock)?;
    build_design_at(panel, i, model)
}

/// As [`build_design`] with the stock given by its panel row.
pub fn build_design_at<T: Scalar>(
    panel: &AlignedPanel<T>,
    index: usize,
    model: ModelSpec,
) -> Result<DesignSystem<T>> {
    let f = panel.factors();
    let y = panel.excess_row(index).to_vec();
    let (n, p) = (y.len(), model.p());
    if n <= p {
        return Err(Error::InsufficientObservations { n, p });
    }
    match model {
        ModelSpec::Capm => DesignSystem::with_intercept(y, &[&f.mktrf]),
        ModelSpec::FamaFrench3 => DesignSystem::with_intercept(y, &[&f.mktrf, &f.smb, &f.hml]),
    }
}

/// Estimation method recorded on a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Ols,
    Mle,
    ConjugateBayes,
    RobustBayes,
}

/// Coefficients and residual summary of one regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    /// Intercept first, then slopes.
    pub theta: Vec<T>,
    pub residuals: Vec<T>,
    pub rss: T,
    /// `rss / n`.
    pub sigma2_mle: T,
    pub method: FitMethod,
    /// Shrinkage weight on the OLS estimate; robust Bayes only.
    pub weight_w: Option<T>,
    /// Prior precision used; Bayesian methods only.
    pub g: Option<T>,
}

impl<T: Scalar> FitResult<T> {
    pub(crate) fn from_theta(d: &DesignSystem<T>, theta: Vec<T>, method: FitMethod) -> Self {
        let residuals: Vec<T> = (0..d.n()).map(|i| d.y[i] - d.predict_row(i, &theta)).collect();
        let rss = sum_sq(&residuals);
        FitResult {
            theta,
            sigma2_mle: rss / T::from_count(d.n()),
            residuals,
            rss,
            method,
            weight_w: None,
            g: None,
        }
    }

    pub fn alpha(&self) -> T {
        self.theta[0]
    }

    pub fn slopes(&self) -> &[T] {
        &self.theta[1..]
    }

    pub fn residual_norm(&self) -> T {
        norm2(&self.residuals)
    }

    /// True when the residuals are at rounding level relative to `y`, i.e.
    /// the data lie exactly on the fitted hyperplane.
    pub fn is_exact_fit(&self, y: &[T]) -> bool {
        let n = T::from_count(y.len().max(1));
        self.residual_norm() <= T::lit(4.0) * n.sqrt() * T::epsilon() * norm2(y)
    }
}
