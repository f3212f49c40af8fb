//! Shapiro-Wilk W test with Royston's (1995, AS R94) coefficient and
//! p-value approximations, valid for 3 <= n <= 5000.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MIN_N: usize = 3;
const MAX_N: usize = 5000;

// polynomial coefficients, lowest order first
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapiroWilk<T> {
    pub w: T,
    pub p_value: T,
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid standard normal")
}

/// Coefficients for the upper half of the order statistics, largest first.
/// They are positive and, mirrored with negated signs onto the lower half,
/// have unit sum of squares.
fn half_coefficients(n: usize) -> Vec<f64> {
    let nn2 = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let norm = standard_normal();
    let an25 = n as f64 + 0.25;
    // m[i] < 0: expected normal order statistics of the lower half
    let m: Vec<f64> = (1..=nn2)
        .map(|i| norm.inverse_cdf((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; nn2];
    a[0] = a1;
    let (first_scaled, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first_scaled..nn2 {
        a[i] = -m[i] / fac;
    }
    a
}

/// Shapiro-Wilk statistic and p-value.
///
/// Fails for `n` outside `3..=5000` and for samples with zero range.
pub fn shapiro_wilk<T: Scalar>(x: &[T]) -> Result<ShapiroWilk<T>> {
    let n = x.len();
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: MIN_N, max: MAX_N });
    }
    let mut sorted: Vec<f64> = x.iter().map(|v| v.as_f64()).collect();
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in sample".into()));
    }
    sorted.sort_by(f64::total_cmp);
    let range = sorted[n - 1] - sorted[0];
    if !(range > 0.0) {
        return Err(Error::DegenerateInput("zero variance sample".into()));
    }

    let half = half_coefficients(n);
    // full antisymmetric coefficient vector aligned with ascending data
    let coef: Vec<f64> = (0..n)
        .map(|i| {
            let j = n - 1 - i;
            match i.cmp(&j) {
                std::cmp::Ordering::Less => -half[i],
                std::cmp::Ordering::Greater => half[j],
                std::cmp::Ordering::Equal => 0.0,
            }
        })
        .collect();

    // W as the squared correlation of range-scaled data with the coefficients;
    // w1 = 1 - W is formed directly to keep precision when W is near 1
    let scaled: Vec<f64> = sorted.iter().map(|v| v / range).collect();
    let sa = coef.iter().sum::<f64>() / n as f64;
    let sx = scaled.iter().sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (a, xv) in coef.iter().zip(&scaled) {
        let asa = a - sa;
        let xsx = xv - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let w1 = ((ssassx - sax) * (ssassx + sax) / (ssa * ssx)).max(0.0);
    let w = 1.0 - w1;

    let p_value = if n == 3 {
        let six_over_pi = 6.0 / std::f64::consts::PI;
        let asin_sqrt_three_quarters = std::f64::consts::FRAC_PI_3;
        (six_over_pi * (w.sqrt().asin() - asin_sqrt_three_quarters)).clamp(0.0, 1.0)
    } else {
        upper_tail_p(n, w1)
    };

    Ok(ShapiroWilk {
        w: T::lit(w),
        p_value: T::lit(p_value),
    })
}

fn upper_tail_p(n: usize, w1: f64) -> f64 {
    if w1 <= 0.0 {
        return 1.0;
    }
    let an = n as f64;
    let mut y = w1.ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let ln_n = an.ln();
        (poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    Normal::new(m, s).expect("positive scale").sf(y).clamp(0.0, 1.0)
}
