//! Seeded synthetic panels drawn from the factor models' own
//! data-generating process.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, so a spec always yields the same panel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StudentT, Uniform};
use serde::{Deserialize, Serialize};

use crate::dataset::{split_panel, AlignedPanel, FactorSeries, Identity};
use crate::error::{Error, Result};
use crate::estimators::ModelSpec;
use crate::linalg::Matrix;
use crate::month::Month;
use crate::returns::ReturnKind;
use crate::scalar::Scalar;

/// How true coefficients are assigned to stocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientLaw {
    /// One `p`-vector per stock.
    PerStock(Vec<Vec<f64>>),
    /// Independent uniform draws, one `(low, high)` range per coefficient.
    Uniform(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Noise {
    Gaussian { sigma: f64 },
    /// `scale * t(nu)`.
    StudentT { nu: f64, scale: f64 },
}

/// Independent Gaussian laws for market premium, SMB and HML.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorLaw {
    pub mean: [f64; 3],
    pub sd: [f64; 3],
}

impl Default for FactorLaw {
    fn default() -> Self {
        FactorLaw {
            mean: [0.008, 0.002, 0.001],
            sd: [0.045, 0.03, 0.03],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_stocks: usize,
    pub n_months: usize,
    pub model: ModelSpec,
    pub coefficients: CoefficientLaw,
    pub noise: Noise,
    pub factor_law: FactorLaw,
    /// Constant monthly risk-free rate.
    pub rf: f64,
    pub seed: u64,
    pub start: Month,
    /// Convention in which `X theta + noise` is the excess return. Under
    /// `Continuous` every draw maps to a valid raw return, so heavy-tailed
    /// noise cannot produce a loss beyond 100%.
    pub kind: ReturnKind,
}

impl SynthSpec {
    /// CAPM panel with alpha ~ U[-0.005, 0.005], beta ~ U[0.5, 1.5] and
    /// Gaussian noise of 0.05, starting January 2007.
    pub fn capm(n_stocks: usize, n_months: usize, seed: u64) -> Self {
        SynthSpec {
            n_stocks,
            n_months,
            model: ModelSpec::Capm,
            coefficients: CoefficientLaw::Uniform(vec![(-0.005, 0.005), (0.5, 1.5)]),
            noise: Noise::Gaussian { sigma: 0.05 },
            factor_law: FactorLaw::default(),
            rf: 0.001,
            seed,
            start: Month { year: 2007, month: 1 },
            kind: ReturnKind::Discrete,
        }
    }

    /// Three-factor panel with loadings on SMB and HML in [-0.5, 0.5].
    pub fn ff3(n_stocks: usize, n_months: usize, seed: u64) -> Self {
        SynthSpec {
            model: ModelSpec::FamaFrench3,
            coefficients: CoefficientLaw::Uniform(vec![(-0.005, 0.005), (0.5, 1.5), (-0.5, 0.5), (-0.5, 0.5)]),
            ..Self::capm(n_stocks, n_months, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.model.p();
        let bad = |m: String| Err(Error::Config(m));
        if self.n_stocks == 0 {
            return bad("n_stocks must be positive".into());
        }
        if self.n_months <= p + 1 {
            return bad(format!("n_months = {} must exceed p + 1 = {}", self.n_months, p + 1));
        }
        match &self.coefficients {
            CoefficientLaw::PerStock(rows) => {
                if rows.len() != self.n_stocks {
                    return bad(format!("{} coefficient rows for {} stocks", rows.len(), self.n_stocks));
                }
                if rows.iter().any(|r| r.len() != p || r.iter().any(|v| !v.is_finite())) {
                    return bad(format!("every coefficient row needs {p} finite values"));
                }
            }
            CoefficientLaw::Uniform(ranges) => {
                if ranges.len() != p {
                    return bad(format!("{} coefficient ranges for p = {p}", ranges.len()));
                }
                if ranges.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
                    return bad("coefficient ranges need finite low <= high".into());
                }
            }
        }
        match self.noise {
            Noise::Gaussian { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                return bad(format!("noise sigma {sigma} must be finite and >= 0"))
            }
            Noise::StudentT { nu, scale } if !(nu > 2.0 && scale > 0.0 && scale.is_finite()) => {
                return bad(format!("student-t noise needs nu > 2 and scale > 0 (got {nu}, {scale})"))
            }
            _ => {}
        }
        let law = &self.factor_law;
        if law.mean.iter().chain(&law.sd).any(|v| !v.is_finite()) || law.sd.iter().any(|&s| s < 0.0) {
            return bad("factor law needs finite means and nonnegative sds".into());
        }
        if !(self.rf > -1.0 && self.rf.is_finite()) {
            return bad(format!("risk-free rate {} must exceed -1", self.rf));
        }
        Ok(())
    }
}

/// Generated panel, its early/late halves and the true coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPanel<T> {
    pub full: AlignedPanel<T>,
    pub early: AlignedPanel<T>,
    pub late: AlignedPanel<T>,
    pub truth: Vec<(Identity, Vec<T>)>,
}

enum NoiseSampler {
    Gaussian(Normal<f64>),
    StudentT(StudentT<f64>, f64),
}

impl NoiseSampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            NoiseSampler::Gaussian(d) => d.sample(rng),
            NoiseSampler::StudentT(d, scale) => scale * d.sample(rng),
        }
    }
}

fn config<E: std::fmt::Display>(e: E) -> Error {
    Error::Config(e.to_string())
}

/// Draws one factor path shared by all stocks, then each stock's
/// coefficients and noise. Excess returns follow `X theta + noise`; the
/// panel is split at its midpoint.
pub fn generate<T: Scalar>(spec: &SynthSpec) -> Result<SynthPanel<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, p) = (spec.n_months, spec.model.p());

    let factor_dists = (0..3)
        .map(|k| Normal::new(spec.factor_law.mean[k], spec.factor_law.sd[k]).map_err(config))
        .collect::<Result<Vec<_>>>()?;
    let mut paths = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for t in 0..n {
        for (path, dist) in paths.iter_mut().zip(&factor_dists) {
            path[t] = dist.sample(&mut rng);
        }
    }

    let noise = match spec.noise {
        Noise::Gaussian { sigma } => NoiseSampler::Gaussian(Normal::new(0.0, sigma).map_err(config)?),
        Noise::StudentT { nu, scale } => NoiseSampler::StudentT(StudentT::new(nu).map_err(config)?, scale),
    };

    let width = spec.n_stocks.to_string().len().max(4);
    let mut stocks = Vec::with_capacity(spec.n_stocks);
    let mut truth = Vec::with_capacity(spec.n_stocks);
    let mut returns = Matrix::<T>::zeros(spec.n_stocks, n);
    for i in 0..spec.n_stocks {
        let theta: Vec<f64> = match &spec.coefficients {
            CoefficientLaw::PerStock(rows) => rows[i].clone(),
            CoefficientLaw::Uniform(ranges) => ranges
                .iter()
                .map(|&(lo, hi)| {
                    if lo == hi {
                        Ok(lo)
                    } else {
                        Uniform::new_inclusive(lo, hi).map(|u| u.sample(&mut rng)).map_err(config)
                    }
                })
                .collect::<Result<_>>()?,
        };
        let identity = Identity {
            label: format!("S{:0width$}", i + 1),
            permno: format!("{}", 10_001 + i),
            cusip: format!("SYN{:05}", i + 1),
        };
        for t in 0..n {
            let mut excess = theta[0] + theta[1] * paths[0][t];
            if p == 4 {
                excess += theta[2] * paths[1][t] + theta[3] * paths[2][t];
            }
            excess += noise.sample(&mut rng);
            let raw = match spec.kind {
                ReturnKind::Discrete => excess + spec.rf,
                ReturnKind::Continuous => (excess + spec.rf.ln_1p()).exp_m1(),
            };
            if !(raw > -1.0) {
                return Err(Error::Config(format!(
                    "draw for {} produced a return of {raw} (<= -100%); reduce noise or use continuous kind",
                    identity.label
                )));
            }
            returns[(i, t)] = T::lit(raw);
        }
        truth.push((identity.clone(), theta.into_iter().map(T::lit).collect()));
        stocks.push(identity);
    }

    let months = spec.start.range_inclusive(Month::from_ordinal(spec.start.ordinal() + n as i64 - 1));
    let lit = |v: &Vec<f64>| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
    let [mktrf, smb, hml] = &paths;
    let factors = FactorSeries::new(months.clone(), lit(mktrf), lit(smb), lit(hml), vec![T::lit(spec.rf); n])?;
    let full = AlignedPanel::from_parts(stocks, returns, factors, spec.kind)?;
    let (early, late) = split_panel(&full, months[n / 2 - 1])?;
    Ok(SynthPanel { full, early, late, truth })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_panel() {
        let spec = SynthSpec::ff3(20, 24, 7);
        let a = generate::<f64>(&spec).unwrap();
        let b = generate::<f64>(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate::<f64>(&SynthSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a.full, c.full);
    }

    #[test]
    fn midpoint_split() {
        let s = generate::<f64>(&SynthSpec::capm(3, 84, 1)).unwrap();
        assert_eq!((s.early.n_months(), s.late.n_months()), (42, 42));
        let odd = generate::<f64>(&SynthSpec::capm(3, 9, 1)).unwrap();
        assert_eq!((odd.early.n_months(), odd.late.n_months()), (4, 5));
    }

    #[test]
    fn invalid_specs_rejected() {
        let base = SynthSpec::capm(5, 10, 0);
        assert!(generate::<f64>(&SynthSpec { n_months: 3, ..base.clone() }).is_err());
        assert!(generate::<f64>(&SynthSpec { n_stocks: 0, ..base.clone() }).is_err());
        assert!(generate::<f64>(&SynthSpec { noise: Noise::Gaussian { sigma: -0.1 }, ..base.clone() }).is_err());
        assert!(generate::<f64>(&SynthSpec { noise: Noise::StudentT { nu: 2.0, scale: 0.1 }, ..base.clone() }).is_err());
        assert!(generate::<f64>(&SynthSpec {
            coefficients: CoefficientLaw::Uniform(vec![(0.0, 1.0)]),
            ..base.clone()
        })
        .is_err());
        assert!(generate::<f64>(&SynthSpec {
            coefficients: CoefficientLaw::PerStock(vec![vec![0.0, 1.0]; 4]),
            ..base
        })
        .is_err());
    }

    #[test]
    fn fixed_coefficients_are_reported_as_truth() {
        let rows: Vec<Vec<f64>> = (0..4).map(|i| vec![0.001 * i as f64, 0.8 + 0.1 * i as f64]).collect();
        let spec = SynthSpec {
            coefficients: CoefficientLaw::PerStock(rows.clone()),
            ..SynthSpec::capm(4, 12, 3)
        };
        let s = generate::<f64>(&spec).unwrap();
        for ((_, t), r) in s.truth.iter().zip(&rows) {
            assert_eq!(t, r);
        }
    }
}
