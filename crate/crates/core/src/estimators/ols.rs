use super::{DesignSystem, FitMethod, FitResult};
use crate::error::Result;
use crate::linalg::least_squares;
use crate::scalar::Scalar;

/// Least-squares coefficients `(X'X)^-1 X'y`, computed by QR.
pub fn ols_fit<T: Scalar>(d: &DesignSystem<T>) -> Result<FitResult<T>> {
    let theta = least_squares(d.x(), d.y())?;
    Ok(FitResult::from_theta(d, theta, FitMethod::Ols))
}

/// Gaussian maximum likelihood: the OLS coefficients with `sigma^2 = rss / n`.
pub fn mle_fit<T: Scalar>(d: &DesignSystem<T>) -> Result<FitResult<T>> {
    let mut fit = ols_fit(d)?;
    fit.method = FitMethod::Mle;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linalg::Matrix;

    fn line(x: &[f64], y: &[f64]) -> DesignSystem<f64> {
        DesignSystem::with_intercept(y.to_vec(), &[x]).unwrap()
    }

    #[test]
    fn exact_line_recovered() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let fit = ols_fit(&line(&x, &y)).unwrap();
        assert!((fit.theta[0] - 2.0).abs() < 1e-14);
        assert!((fit.theta[1] - 3.0).abs() < 1e-14);
        assert!(fit.rss < 1e-28);
    }

    #[test]
    fn hand_solved_three_points() {
        // xbar = 1, ybar = 4/3, Sxy = 3, Sxx = 2: beta = 3/2, alpha = 4/3 - 3/2
        let fit = ols_fit(&line(&[0.0, 1.0, 2.0], &[0.0, 1.0, 3.0])).unwrap();
        assert!((fit.theta[0] + 1.0 / 6.0).abs() < 1e-12);
        assert!((fit.theta[1] - 1.5).abs() < 1e-12);
        // residuals 1/6, -1/3, 1/6
        assert!((fit.rss - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn mle_variance_uses_n() {
        let d = line(&[0.0, 1.0, 2.0], &[0.0, 1.0, 3.0]);
        let ols = ols_fit(&d).unwrap();
        let mle = mle_fit(&d).unwrap();
        assert_eq!(ols.theta, mle.theta);
        assert!((mle.sigma2_mle - ols.rss / 3.0).abs() < 1e-16);
        assert!((mle.sigma2_mle - 1.0 / 18.0).abs() < 1e-14);
        assert_eq!(mle.method, FitMethod::Mle);

        let exact = line(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert!(mle_fit(&exact).unwrap().sigma2_mle < 1e-30);
    }

    #[test]
    fn constant_market_premium_is_collinear() {
        let err = ols_fit(&line(&[0.02; 6], &[0.1, 0.2, 0.0, -0.1, 0.05, 0.3])).unwrap_err();
        assert!(matches!(err, Error::CollinearDesign { .. }), "{err}");
    }

    #[test]
    fn design_validation() {
        assert!(matches!(
            DesignSystem::with_intercept(vec![1.0, 2.0], &[&[0.0, 1.0]]),
            Err(Error::InsufficientObservations { n: 2, p: 2 })
        ));
        let no_ones = Matrix::from_rows(&[vec![2.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(DesignSystem::new(vec![0.0, 1.0, 2.0], no_ones).is_err());
    }
}
