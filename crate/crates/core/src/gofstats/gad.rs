use std::cell::Cell;

use super::check_sample;
use super::pair_kernel::pair_kernel;
use crate::error::{Error, Result};

fn require_open(x: &[f64]) -> Result<()> {
    check_sample(x)?;
    for (index, &v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if v <= 0.0 || v >= 1.0 {
            return Err(Error::Boundary { index, value: v });
        }
    }
    Ok(())
}

/// Generalized Anderson-Darling statistic as the O(N^2) double sum of the
/// closed-form pair kernel.
pub fn gad_pair_sum(x: &[f64], m: usize) -> Result<f64> {
    require_open(x)?;
    let kernel = pair_kernel(m)?;
    let mut total = 0.0;
    for &s in x {
        for &t in x {
            total += kernel.value(s, t);
        }
    }
    Ok(total / x.len() as f64)
}

/// Same statistic in O(N log N): sort, then prefix sums of `(1 - X)^k` and
/// `(1 - X)^k ln(1 - X)`.
pub fn gad_fast(x: &[f64], m: usize) -> Result<f64> {
    gad_fast_counted(x, m).map(|(v, _)| v)
}

/// [`gad_fast`] together with a count of elementary operations (comparisons
/// in the sort plus inner-loop updates).
pub fn gad_fast_counted(x: &[f64], m: usize) -> Result<(f64, u64)> {
    require_open(x)?;
    let kernel = pair_kernel(m)?;
    let comparisons = Cell::new(0u64);
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| {
        comparisons.set(comparisons.get() + 1);
        a.total_cmp(b)
    });
    let mut ops = comparisons.get();
    let r = &kernel.log_coeff_f64;
    let q = &kernel.free_f64;

    let mut pow_a = vec![0.0; m];
    let mut sum_a = vec![0.0; m];
    let mut sum_a_log = vec![0.0; m];
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; m];
    let (mut diag, mut off) = (0.0, 0.0);
    for &t in &sorted {
        let b = t;
        let log_b = b.ln();
        let a = 1.0 - t;
        let log_a = (-t).ln_1p();
        // Row polynomials in b for each power of a.
        for k in 0..m {
            let (mut uk, mut vk, mut bl) = (0.0, 0.0, 1.0);
            for l in 0..m {
                uk += q[k][l] * bl;
                vk += r[k][l] * bl;
                bl *= b;
            }
            u[k] = uk;
            v[k] = vk;
        }
        ops += (m * m) as u64;
        let mut ak = 1.0;
        let (mut free_diag, mut log_diag) = (0.0, 0.0);
        for k in 0..m {
            off += u[k] * sum_a[k] - v[k] * (sum_a_log[k] + log_b * sum_a[k]);
            free_diag += u[k] * ak;
            log_diag += v[k] * ak;
            pow_a[k] = ak;
            ak *= a;
        }
        diag += free_diag - log_diag * (log_a + log_b);
        for k in 0..m {
            sum_a[k] += pow_a[k];
            sum_a_log[k] += pow_a[k] * log_a;
        }
        ops += 2 * m as u64;
    }
    Ok(((diag + 2.0 * off) / x.len() as f64, ops))
}

/// Classical Anderson-Darling statistic.
pub fn ad_classical(x: &[f64]) -> Result<f64> {
    require_open(x)?;
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let nf = n as f64;
    let total: f64 = s
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let i = (i + 1) as f64;
            (2.0 * nf - 2.0 * i + 1.0) * (-v).ln_1p() + (2.0 * i - 1.0) * v.ln()
        })
        .sum();
    Ok(-nf - total / nf)
}

/// Linear-time expression of the order-two statistic on sorted data.
pub fn gad2_linear(x: &[f64]) -> Result<f64> {
    require_open(x)?;
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let nf = s.len() as f64;
    let total: f64 = s.iter().sum();
    let sum_log1m: f64 = s.iter().map(|&v| (-v).ln_1p()).sum();
    let sum_x_log1m: f64 = s.iter().map(|&v| v * (-v).ln_1p()).sum();
    let mut acc = nf / 3.0 - 5.0 / (3.0 * nf) * total * total + 2.0 / nf * total * sum_log1m
        - 4.0 / nf * total * sum_x_log1m;
    let mut below = 0.0;
    for (idx, &v) in s.iter().enumerate() {
        let i = (idx + 1) as f64;
        let (lx, l1x) = (v.ln(), (-v).ln_1p());
        acc += (11.0 * nf / 3.0 - 4.0 * i + 2.0) * v / nf;
        acc += 2.0 / nf * (nf - i + v) * v * l1x;
        acc += 2.0 / nf * (i - v) * v * lx;
        acc += 2.0 / nf * (2.0 * v - 1.0) * (l1x - lx) * below;
        below += v;
    }
    Ok(acc)
}
