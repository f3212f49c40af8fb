//! Return arithmetic: holding-period returns, discrete/continuous conversion,
//! geometric averages and sample volatility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::month::{check_consecutive, Month};
use crate::scalar::{mean, Scalar};

/// Compounding convention of a return value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    /// Simple period return `P1 / P0 - 1`.
    Discrete,
    /// Log gross return `ln(P1 / P0)`.
    Continuous,
}

impl ReturnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReturnKind::Discrete => "discrete",
            ReturnKind::Continuous => "continuous",
        }
    }
}

impl std::fmt::Display for ReturnKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ReturnKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "discrete" => Ok(ReturnKind::Discrete),
            "continuous" => Ok(ReturnKind::Continuous),
            other => Err(Error::Config(format!("unknown return kind '{other}'"))),
        }
    }
}

/// One stock's consecutive monthly returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries<T> {
    identity: String,
    months: Vec<Month>,
    values: Vec<T>,
    kind: ReturnKind,
}

impl<T: Scalar> ReturnSeries<T> {
    pub fn new(
        identity: impl Into<String>,
        months: Vec<Month>,
        values: Vec<T>,
        kind: ReturnKind,
    ) -> Result<Self> {
        if months.is_empty() {
            return Err(Error::Domain("empty series".into()));
        }
        if months.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: months.len(),
                actual: values.len(),
            });
        }
        check_consecutive(&months)?;
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite return in {}", months[bad])));
        }
        if kind == ReturnKind::Discrete {
            if let Some(bad) = values.iter().position(|&v| v <= -T::one()) {
                return Err(Error::Domain(format!(
                    "discrete return {} <= -1 in {}",
                    values[bad], months[bad]
                )));
            }
        }
        Ok(ReturnSeries {
            identity: identity.into(),
            months,
            values,
            kind,
        })
    }

    /// Series of consecutive months starting at `start`.
    pub fn starting_at(
        identity: impl Into<String>,
        start: Month,
        values: Vec<T>,
        kind: ReturnKind,
    ) -> Result<Self> {
        let months = (0..values.len() as i64)
            .map(|i| Month::from_ordinal(start.ordinal() + i))
            .collect();
        Self::new(identity, months, values, kind)
    }

    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub fn months(&self) -> &[Month] {
        &self.months
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn kind(&self) -> ReturnKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `(end - initial + income) / initial`.
pub fn holding_period_return<T: Scalar>(initial_price: T, end_price: T, income: T) -> Result<T> {
    if !(initial_price > T::zero()) {
        return Err(Error::Domain(format!(
            "initial price must be positive, got {initial_price}"
        )));
    }
    if income < T::zero() {
        return Err(Error::Domain(format!("income must be nonnegative, got {income}")));
    }
    Ok((end_price - initial_price + income) / initial_price)
}

/// `ln(1 + r)`.
pub fn to_continuous<T: Scalar>(r: T) -> Result<T> {
    if !(r > -T::one()) {
        return Err(Error::Domain(format!("discrete return {r} <= -1 has no logarithm")));
    }
    Ok(r.ln_1p())
}

/// `exp(r) - 1`.
pub fn to_discrete<T: Scalar>(r: T) -> T {
    r.exp_m1()
}

/// Converts every value of `s` to the `target` convention.
pub fn convert_series<T: Scalar>(s: &ReturnSeries<T>, target: ReturnKind) -> Result<ReturnSeries<T>> {
    if s.kind == target {
        return Ok(s.clone());
    }
    let values = match target {
        ReturnKind::Continuous => s
            .values
            .iter()
            .zip(&s.months)
            .map(|(&v, m)| {
                to_continuous(v).map_err(|_| {
                    Error::Domain(format!("{}: return {v} <= -1 in {m}", s.identity))
                })
            })
            .collect::<Result<Vec<_>>>()?,
        ReturnKind::Discrete => s.values.iter().map(|&v| to_discrete(v)).collect(),
    };
    ReturnSeries::new(s.identity.clone(), s.months.clone(), values, target)
}

/// Per-period geometric mean return.
///
/// For discrete series this is `(prod(1 + r))^(1/m) - 1`; for continuous
/// series it is the arithmetic mean, the log of the geometric gross mean.
pub fn geometric_average<T: Scalar>(s: &ReturnSeries<T>) -> Result<T> {
    if s.is_empty() {
        return Err(Error::Domain("empty series".into()));
    }
    match s.kind {
        ReturnKind::Continuous => Ok(mean(&s.values)),
        ReturnKind::Discrete => {
            let logs = s
                .values
                .iter()
                .map(|&v| to_continuous(v))
                .collect::<Result<Vec<_>>>()?;
            Ok(mean(&logs).exp_m1())
        }
    }
}

/// Sample standard deviation with the `m - 1` divisor.
pub fn sample_std<T: Scalar>(s: &ReturnSeries<T>) -> Result<T> {
    sample_std_values(&s.values)
}

pub(crate) fn sample_std_values<T: Scalar>(values: &[T]) -> Result<T> {
    let m = values.len();
    if m < 2 {
        return Err(Error::Domain(format!(
            "sample standard deviation needs at least 2 values, got {m}"
        )));
    }
    let mu = mean(values);
    let ss: T = values.iter().map(|&v| (v - mu) * (v - mu)).sum();
    Ok((ss / T::from_count(m - 1)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(values: Vec<f64>, kind: ReturnKind) -> ReturnSeries<f64> {
        ReturnSeries::starting_at("X", Month::new(2010, 1).unwrap(), values, kind).unwrap()
    }

    #[test]
    fn hpr_examples() {
        assert!((holding_period_return(100.0f64, 110.0, 0.0).unwrap() - 0.10).abs() < 1e-15);
        assert_eq!(holding_period_return(100.0, 100.0, 0.0).unwrap(), 0.0);
        assert_eq!(holding_period_return(100.0, 95.0, 5.0).unwrap(), 0.0);
        assert!(holding_period_return(0.0, 95.0, 5.0).is_err());
        assert!(holding_period_return(-1.0, 95.0, 5.0).is_err());
    }

    #[test]
    fn continuous_conversion_examples() {
        assert_eq!(to_continuous(0.0f64).unwrap(), 0.0);
        assert!((to_continuous(std::f64::consts::E - 1.0).unwrap() - 1.0).abs() < 1e-15);
        // ln(1.1) = 0.0953101798043248600439521...
        assert!((to_continuous(0.10f64).unwrap() - 0.0953102).abs() < 1e-6);
        assert!((to_continuous(0.10f64).unwrap() - 0.095_310_179_804_324_86).abs() < 1e-15);
        assert!(to_continuous(-1.0).is_err());
        assert!(to_continuous(-1.5).is_err());
    }

    #[test]
    fn convert_series_examples() {
        let s = series(vec![0.10], ReturnKind::Discrete);
        let c = convert_series(&s, ReturnKind::Continuous).unwrap();
        assert!((c.values()[0] - 0.0953102).abs() < 1e-6);
        assert_eq!(c.kind(), ReturnKind::Continuous);

        let z = series(vec![0.0; 5], ReturnKind::Discrete);
        let zc = convert_series(&z, ReturnKind::Continuous).unwrap();
        assert!(zc.values().iter().all(|&v| v == 0.0));

        let same = convert_series(&s, ReturnKind::Discrete).unwrap();
        assert_eq!(same, s);
    }

    #[test]
    fn invalid_discrete_series_rejected_with_month() {
        let err = ReturnSeries::starting_at(
            "X",
            Month::new(2010, 1).unwrap(),
            vec![0.1, -1.0],
            ReturnKind::Discrete,
        )
        .unwrap_err();
        assert!(err.to_string().contains("2010-02"), "{err}");
        // a continuous value below -1 is fine, but converting it is still defined
        let c = series(vec![-2.0], ReturnKind::Continuous);
        assert!(convert_series(&c, ReturnKind::Discrete).unwrap().values()[0] > -1.0);
    }

    #[test]
    fn series_invariants() {
        let m = Month::new(2010, 1).unwrap();
        assert!(ReturnSeries::<f64>::new("X", vec![], vec![], ReturnKind::Discrete).is_err());
        assert!(ReturnSeries::new("X", vec![m, m.succ().succ()], vec![0.0, 0.0], ReturnKind::Discrete).is_err());
        assert!(ReturnSeries::new("X", vec![m], vec![0.0, 0.0], ReturnKind::Discrete).is_err());
    }

    #[test]
    fn geometric_average_examples() {
        for kind in [ReturnKind::Discrete, ReturnKind::Continuous] {
            let g = geometric_average(&series(vec![0.03; 3], kind)).unwrap();
            assert!((g - 0.03).abs() < 1e-15);
        }
        assert!(geometric_average(&series(vec![1.0, -0.5], ReturnKind::Discrete)).unwrap().abs() < 1e-15);
        assert!(geometric_average(&series(vec![0.1, -0.1], ReturnKind::Continuous)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn sample_std_examples() {
        assert_eq!(sample_std(&series(vec![0.2; 4], ReturnKind::Discrete)).unwrap(), 0.0);
        let s = sample_std(&series(vec![0.0, 2.0], ReturnKind::Continuous)).unwrap();
        assert!((s - std::f64::consts::SQRT_2).abs() < 1e-6);
        assert!(sample_std(&series(vec![0.1], ReturnKind::Discrete)).is_err());
        let base = sample_std(&series(vec![0.1, -0.2, 0.05], ReturnKind::Continuous)).unwrap();
        let scaled = sample_std(&series(vec![-0.3, 0.6, -0.15], ReturnKind::Continuous)).unwrap();
        assert!((scaled - 3.0 * base).abs() < 1e-15);
    }

    fn discrete_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-0.95f64..3.0, 1..120)
    }

    proptest! {
        #[test]
        fn cross_kind_geometric_identity(values in discrete_values()) {
            let d = series(values, ReturnKind::Discrete);
            let c = convert_series(&d, ReturnKind::Continuous).unwrap();
            let lhs = geometric_average(&c).unwrap();
            let rhs = geometric_average(&d).unwrap().ln_1p();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn round_trip_conversion(values in discrete_values()) {
            let d = series(values, ReturnKind::Discrete);
            let back = convert_series(&convert_series(&d, ReturnKind::Continuous).unwrap(), ReturnKind::Discrete).unwrap();
            for (a, b) in d.values().iter().zip(back.values()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn std_translation_and_scale(values in prop::collection::vec(-1.0f64..1.0, 2..60), shift in -5.0f64..5.0, c in -4.0f64..4.0) {
            let base = sample_std_values(&values).unwrap();
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
            prop_assert!((sample_std_values(&shifted).unwrap() - base).abs() < 1e-12);
            prop_assert!((sample_std_values(&scaled).unwrap() - c.abs() * base).abs() < 1e-12);
        }

        #[test]
        fn geometric_average_within_range(values in discrete_values()) {
            let d = series(values.clone(), ReturnKind::Discrete);
            let g = geometric_average(&d).unwrap();
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(g >= lo - 1e-12 && g <= hi + 1e-12);
        }
    }
}
