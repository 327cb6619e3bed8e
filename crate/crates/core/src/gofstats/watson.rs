use std::f64::consts::PI;

use super::check_sample;
use crate::error::{Error, Result};
use crate::polybasis::{bernoulli_normalized, bernoulli_value, check_order};

pub(super) fn check_closed(x: &[f64]) -> Result<()> {
    check_sample(x)?;
    for (index, &v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfDomain { value: v, lo: 0.0, hi: 1.0 });
        }
    }
    Ok(())
}

fn sign(m: usize) -> f64 {
    if m % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `sum_{i,j} p(|X_i - X_j|)` for a polynomial `p` (ascending coefficients),
/// using prefix power sums on the sorted sample.
pub(super) fn abs_diff_poly_sum(sorted: &[f64], p: &[f64]) -> f64 {
    let deg = p.len() - 1;
    // Collapse p(y - x) = sum_s y^s sum_{r>=s} p_r C(r,s) (-x)^{r-s}.
    let mut prefix = vec![0.0; deg + 1];
    let mut pairs = 0.0;
    let mut powers = vec![0.0; deg + 1];
    for &y in sorted {
        let mut ys = 1.0;
        for s in 0..=deg {
            let mut inner = 0.0;
            for r in s..=deg {
                inner += p[r] * binom(r, s) * sign(r - s) * prefix[r - s];
            }
            pairs += ys * inner;
            ys *= y;
        }
        let mut xp = 1.0;
        for pw in powers.iter_mut() {
            *pw = xp;
            xp *= y;
        }
        for (acc, pw) in prefix.iter_mut().zip(&powers) {
            *acc += pw;
        }
    }
    sorted.len() as f64 * p[0] + 2.0 * pairs
}

/// Mode power `|sum_i exp(i w X_i)|^2`.
pub(super) fn mode_power(x: &[f64], w: f64) -> f64 {
    let (c, s) = x.iter().fold((0.0, 0.0), |(c, s), &v| (c + (w * v).cos(), s + (w * v).sin()));
    c * c + s * s
}

/// Generalized Watson statistic as a double sum of the circular kernel.
pub fn watson_pair_sum(x: &[f64], m: usize, truncated: bool) -> Result<f64> {
    check_order(m)?;
    check_closed(x)?;
    let n = x.len() as f64;
    let mut total = 0.0;
    for &s in x {
        for &t in x {
            let mut v = -sign(m) * bernoulli_value(2 * m, (s - t).abs());
            if truncated {
                for k in 1..m {
                    let w = 2.0 * k as f64 * PI;
                    v -= 2.0 * (w * (s - t)).cos() / w.powi(2 * m as i32);
                }
            }
            total += v;
        }
    }
    Ok(total / n)
}

/// Generalized Watson statistic in O(N log N + N m^2).
pub fn watson_fast(x: &[f64], m: usize, truncated: bool) -> Result<f64> {
    check_order(m)?;
    check_closed(x)?;
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let p = bernoulli_normalized(2 * m)?.to_f64_coeffs();
    let n = x.len() as f64;
    let mut u = -sign(m) * abs_diff_poly_sum(&sorted, &p) / n;
    if truncated {
        for k in 1..m {
            let w = 2.0 * k as f64 * PI;
            u -= 2.0 * mode_power(x, w) / (n * w.powi(2 * m as i32));
        }
    }
    Ok(u)
}

/// Classical Watson statistic.
pub fn watson_classical(x: &[f64]) -> Result<f64> {
    check_closed(x)?;
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let total: f64 = s
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = v - (2.0 * i as f64 + 1.0) / (2.0 * n) - mean + 0.5;
            d * d
        })
        .sum();
    Ok(total + 1.0 / (12.0 * n))
}
