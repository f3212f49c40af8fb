//! Conjugate and robust (Cauchy g-prior) Bayesian posterior means.

use serde::{Deserialize, Serialize};

use super::{ols_fit, DesignSystem, FitMethod, FitResult, ModelSpec};
use crate::dataset::{AlignedPanel, Identity};
use crate::diagnostics::slope_f_statistic;
use crate::error::{Error, Result};
use crate::linalg::{solve, Matrix};
use crate::scalar::Scalar;

/// How the prior precision `g` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GRule<T> {
    /// `g = max(n, p^2)`.
    Benchmark,
    /// `g = max(F - 1, 0)` with `F` the joint slope-significance statistic.
    LocalEmpiricalBayes,
    Fixed(T),
}

/// Prior mean and the rule for its precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec<T> {
    pub theta0: Vec<T>,
    pub g_rule: GRule<T>,
}

pub fn select_g<T: Scalar>(rule: &GRule<T>, n: usize, p: usize, f_stat: Option<T>) -> Result<T> {
    match *rule {
        GRule::Benchmark => Ok(T::from_count(n.max(p * p))),
        GRule::LocalEmpiricalBayes => {
            let f = f_stat.ok_or_else(|| {
                Error::Config("local empirical Bayes needs the slope F-statistic".into())
            })?;
            if f.is_nan() {
                return Err(Error::Domain("F-statistic is NaN".into()));
            }
            Ok((f - T::one()).max(T::zero()))
        }
        GRule::Fixed(g) if g >= T::zero() => Ok(g),
        GRule::Fixed(g) => Err(Error::Domain(format!("prior precision g = {g} is negative"))),
    }
}

/// `w = 1 / (1 + sqrt(g) * ||resid||)`; exactly 1 for a zero residual, even
/// when `g` is infinite.
pub fn robust_weight<T: Scalar>(g: T, residual_norm: T) -> T {
    if residual_norm == T::zero() {
        return T::one();
    }
    T::one() / (T::one() + g.sqrt() * residual_norm)
}

fn check_prior_len<T>(theta0: &[T], p: usize) -> Result<()> {
    if theta0.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            actual: theta0.len(),
        });
    }
    Ok(())
}

/// Posterior mean `w * theta_ols + (1 - w) * theta0` under the Cauchy g-prior.
///
/// A residual at rounding level counts as zero, giving `w = 1`.
pub fn robust_bayes_fit<T: Scalar>(d: &DesignSystem<T>, prior: &PriorSpec<T>, g: T) -> Result<FitResult<T>> {
    check_prior_len(&prior.theta0, d.p())?;
    if !(g >= T::zero()) {
        return Err(Error::Domain(format!("prior precision g = {g} is negative")));
    }
    let ols = ols_fit(d)?;
    let resid = if ols.is_exact_fit(d.y()) { T::zero() } else { ols.residual_norm() };
    let w = robust_weight(g, resid);
    let theta = ols
        .theta
        .iter()
        .zip(&prior.theta0)
        .map(|(&b, &b0)| w * b + (T::one() - w) * b0)
        .collect();
    let mut fit = FitResult::from_theta(d, theta, FitMethod::RobustBayes);
    fit.weight_w = Some(w);
    fit.g = Some(g);
    Ok(fit)
}

/// [`robust_bayes_fit`] with `g` chosen by the prior's rule.
///
/// Under the local empirical Bayes rule a perfect fit makes `F` infinite; the
/// weight is then 1 whatever `g` is.
pub fn robust_bayes_fit_with_rule<T: Scalar>(d: &DesignSystem<T>, prior: &PriorSpec<T>) -> Result<FitResult<T>> {
    let f_stat = match prior.g_rule {
        GRule::LocalEmpiricalBayes => match slope_f_statistic(d) {
            Ok(f) => Some(f),
            Err(Error::PerfectFit) => Some(T::infinity()),
            Err(e) => return Err(e),
        },
        _ => None,
    };
    let g = select_g(&prior.g_rule, d.n(), d.p(), f_stat)?;
    robust_bayes_fit(d, prior, g)
}

/// Normal-inverse-gamma posterior mean `(X'X + V)^-1 (X'X theta_mle + V theta0)`.
///
/// `X'X theta_mle` is evaluated as `X'y`, which it equals by the normal
/// equations, so only `X'X + V` needs to be invertible.
pub fn conjugate_bayes_fit<T: Scalar>(d: &DesignSystem<T>, theta0: &[T], v: &Matrix<T>) -> Result<FitResult<T>> {
    let p = d.p();
    check_prior_len(theta0, p)?;
    if v.rows() != p || v.cols() != p {
        return Err(Error::DimensionMismatch {
            expected: p * p,
            actual: v.rows() * v.cols(),
        });
    }
    for i in 0..p {
        if v[(i, i)] < T::zero() {
            return Err(Error::Domain("prior precision has a negative diagonal".into()));
        }
        for j in 0..i {
            let tol = T::lit(1e-12) * (T::one() + v[(i, j)].abs().max(v[(j, i)].abs()));
            if (v[(i, j)] - v[(j, i)]).abs() > tol {
                return Err(Error::Domain("prior precision is not symmetric".into()));
            }
        }
    }
    let a = d.x().gram().add(v)?;
    let xty = d.x().tr_mul_vec(d.y())?;
    let v_theta0 = v.mul_vec(theta0)?;
    let b: Vec<T> = xty.iter().zip(&v_theta0).map(|(&l, &r)| l + r).collect();
    let theta = solve(&a, &b)?;
    Ok(FitResult::from_theta(d, theta, FitMethod::ConjugateBayes))
}

/// OLS coefficients of `stock` over an earlier window, used as prior mean.
pub fn empirical_prior_mean<T: Scalar>(
    early: &AlignedPanel<T>,
    stock: &Identity,
    model: ModelSpec,
) -> Result<Vec<T>> {
    let i = early
        .stocks()
        .iter()
        .position(|s| s.key() == stock.key())
        .ok_or_else(|| Error::Lookup(format!("stock '{}' absent from prior window", stock.label)))?;
    let d = super::build_design_at(early, i, model)?;
    Ok(ols_fit(&d)?.theta)
}
