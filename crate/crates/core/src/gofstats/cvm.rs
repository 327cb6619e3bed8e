use std::f64::consts::PI;

use super::watson::{abs_diff_poly_sum, check_closed};
use crate::error::Result;
use crate::polybasis::{bernoulli_normalized, bernoulli_value, check_order};

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

fn cosine_sum(x: &[f64], w: f64) -> f64 {
    x.iter().map(|&v| (w * v).cos()).sum()
}

/// Generalized Cramer-von Mises statistic as a double sum.
pub fn gcvm_pair_sum(x: &[f64], m: usize, truncated: bool) -> Result<f64> {
    check_order(m)?;
    check_closed(x)?;
    let n = x.len() as f64;
    let scale = -sign(m) * 2f64.powi(2 * m as i32 - 1);
    let mut total = 0.0;
    for &s in x {
        for &t in x {
            let mut v = scale
                * (bernoulli_value(2 * m, (s + t) / 2.0) + bernoulli_value(2 * m, (s - t).abs() / 2.0));
            if truncated {
                for k in 1..m {
                    let w = k as f64 * PI;
                    v -= 2.0 * (w * s).cos() * (w * t).cos() / w.powi(2 * m as i32);
                }
            }
            total += v;
        }
    }
    Ok(total / n)
}

/// Generalized Cramer-von Mises statistic in O(N log N + N m^2).
pub fn gcvm_fast(x: &[f64], m: usize, truncated: bool) -> Result<f64> {
    check_order(m)?;
    check_closed(x)?;
    let n = x.len() as f64;
    let p = bernoulli_normalized(2 * m)?.to_f64_coeffs();
    let deg = p.len() - 1;
    let power_sums: Vec<f64> = (0..=deg).map(|j| x.iter().map(|&v| v.powi(j as i32)).sum()).collect();
    // sum_{i,j} p((X_i + X_j) / 2)
    let mut plus = 0.0;
    for (r, &c) in p.iter().enumerate() {
        let pair: f64 = (0..=r).map(|s| binom(r, s) * power_sums[s] * power_sums[r - s]).sum();
        plus += c * pair / 2f64.powi(r as i32);
    }
    let halved: Vec<f64> = p.iter().enumerate().map(|(r, c)| c / 2f64.powi(r as i32)).collect();
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let minus = abs_diff_poly_sum(&sorted, &halved);
    let mut w2 = -sign(m) * 2f64.powi(2 * m as i32 - 1) * (plus + minus) / n;
    if truncated {
        for k in 1..m {
            let w = k as f64 * PI;
            let c = cosine_sum(x, w);
            w2 -= 2.0 * c * c / (n * w.powi(2 * m as i32));
        }
    }
    Ok(w2)
}

/// Classical Cramer-von Mises statistic.
pub fn cvm_classical(x: &[f64]) -> Result<f64> {
    check_closed(x)?;
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let total: f64 = s
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = v - (2.0 * i as f64 + 1.0) / (2.0 * n);
            d * d
        })
        .sum();
    Ok(1.0 / (12.0 * n) + total)
}
