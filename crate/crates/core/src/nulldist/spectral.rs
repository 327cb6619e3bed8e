use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gofstats::Family;
use crate::numeric::special::hurwitz_zeta;
use crate::polybasis::{bernoulli_value, check_order, legendre_associated};

fn check_unit(v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfDomain { value: v, lo: 0.0, hi: 1.0 })
    }
}

fn check_index(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("eigenvalue index starts at 1".into()));
    }
    Ok(())
}

/// `k (k+1) ... (k+2m-1)`, the k-th GAD eigenvalue, exactly.
pub fn gad_eigenvalue_exact(m: usize, k: usize) -> Result<BigInt> {
    check_order(m)?;
    check_index(k)?;
    Ok((k..k + 2 * m).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i)))
}

/// Frequency index behind the k-th eigenvalue: the GW pair number or the
/// GCvM cosine index, shifted past the removed modes for the truncated
/// variants.
fn frequency(family: Family, m: usize, k: usize) -> usize {
    match family {
        Family::Gad => k,
        Family::Gw => k.div_ceil(2),
        Family::GwTrunc => k.div_ceil(2) + m - 1,
        Family::Gcvm => k,
        Family::GcvmTrunc => k + m - 1,
    }
}

/// k-th eigenvalue `lambda_k` (k >= 1, repeated by multiplicity), so the
/// limit law is `sum_k xi_k^2 / lambda_k`.
pub fn eigenvalue(family: Family, m: usize, k: usize) -> Result<f64> {
    check_order(m)?;
    check_index(k)?;
    Ok(eigenvalue_unchecked(family, m, k))
}

pub(crate) fn eigenvalue_unchecked(family: Family, m: usize, k: usize) -> f64 {
    let j = frequency(family, m, k) as f64;
    match family {
        Family::Gad => (k..k + 2 * m).fold(1.0, |acc, i| acc * i as f64),
        Family::Gw | Family::GwTrunc => (2.0 * PI * j).powi(2 * m as i32),
        Family::Gcvm | Family::GcvmTrunc => (PI * j).powi(2 * m as i32),
    }
}

/// Distinct eigenvalues in increasing order with their multiplicities.
pub fn distinct_eigenvalues(family: Family, m: usize, count: usize) -> Result<Vec<(f64, usize)>> {
    check_order(m)?;
    let mult = multiplicity(family);
    Ok((0..count).map(|i| (eigenvalue_unchecked(family, m, i * mult + 1), mult)).collect())
}

pub fn multiplicity(family: Family) -> usize {
    if family.is_circular() {
        2
    } else {
        1
    }
}

/// Orthonormal eigenfunction paired with the k-th eigenvalue. For the
/// circular family odd k is the sine and even k the cosine of the pair.
pub fn eigenfunction(family: Family, m: usize, k: usize, x: f64) -> Result<f64> {
    check_order(m)?;
    check_index(k)?;
    check_unit(x)?;
    let j = frequency(family, m, k) as f64;
    Ok(match family {
        Family::Gad => legendre_associated(k + m - 1, m, x)?,
        Family::Gw | Family::GwTrunc => {
            let w = 2.0 * PI * j;
            if k % 2 == 1 {
                2f64.sqrt() * (w * x).sin()
            } else {
                2f64.sqrt() * (w * x).cos()
            }
        }
        Family::Gcvm | Family::GcvmTrunc => 2f64.sqrt() * (PI * j * x - m as f64 * PI / 2.0).cos(),
    })
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Covariance of the limiting process; for GAD the process is normalized by
/// `(x(1-x))^{m/2}` so its kernel carries the statistic's weight.
pub fn covariance_kernel(family: Family, m: usize, x: f64, y: f64) -> Result<f64> {
    check_order(m)?;
    check_unit(x)?;
    check_unit(y)?;
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    Ok(match family {
        Family::Gad => {
            let (lo, hi) = (x.min(y), x.max(y));
            let inner = lo - x * y;
            let outer = hi - x * y;
            if inner <= 0.0 {
                return Ok(0.0);
            }
            let gap = hi - lo;
            let mf = m as f64;
            let sum: f64 = (0..m)
                .map(|k| {
                    binomial_f64(m - 1, k) / (m + k) as f64
                        * inner.powf(mf / 2.0 + k as f64)
                        * gap.powi((m - 1 - k) as i32)
                })
                .sum();
            sum / outer.powf(mf / 2.0) / factorial_f64(m - 1).powi(2)
        }
        Family::Gw | Family::GwTrunc => {
            let mut v = -sign * bernoulli_value(2 * m, (x - y).abs());
            if family == Family::GwTrunc {
                for k in 1..m {
                    let w = 2.0 * PI * k as f64;
                    v -= 2.0 * (w * (x - y)).cos() / w.powi(2 * m as i32);
                }
            }
            v
        }
        Family::Gcvm | Family::GcvmTrunc => {
            let mut v = -(2f64.powi(2 * m as i32 - 1))
                * (bernoulli_value(2 * m, (x + y) / 2.0) + sign * bernoulli_value(2 * m, (x - y).abs() / 2.0));
            if family == Family::GcvmTrunc {
                let shift = m as f64 * PI / 2.0;
                for k in 1..m {
                    let w = PI * k as f64;
                    v -= 2.0 * (w * x - shift).cos() * (w * y - shift).cos() / w.powi(2 * m as i32);
                }
            }
            v
        }
    })
}

/// `sum_{k > n} 1/lambda_k^p` for p in {1, 2}, counting multiplicity.
fn eigen_tail(family: Family, m: usize, n_distinct: usize, p: u32) -> f64 {
    let e = 2.0 * m as f64 * p as f64;
    match family {
        Family::Gad => {
            let k = n_distinct as f64;
            if p == 1 {
                // Telescoping: the tail of 1/(k...(k+2m-1)) is exact.
                1.0 / ((2 * m - 1) as f64 * (1..2 * m).fold(1.0, |acc, i| acc * (k + i as f64)))
            } else {
                hurwitz_zeta(e, k + m as f64 + 0.5)
            }
        }
        Family::Gw | Family::GwTrunc => {
            let start = (frequency(family, m, 2 * n_distinct + 1)) as f64;
            2.0 * (2.0 * PI).powf(-e) * hurwitz_zeta(e, start)
        }
        Family::Gcvm | Family::GcvmTrunc => {
            let start = frequency(family, m, n_distinct + 1) as f64;
            PI.powf(-e) * hurwitz_zeta(e, start)
        }
    }
}

const HEAD_TERMS: usize = 2000;

fn power_sum(family: Family, m: usize, p: u32) -> f64 {
    let mult = multiplicity(family);
    let mut head = 0.0;
    for i in (0..HEAD_TERMS).rev() {
        let lam = eigenvalue_unchecked(family, m, i * mult + 1);
        head += mult as f64 * lam.powi(-(p as i32));
    }
    head + eigen_tail(family, m, HEAD_TERMS, p)
}

/// `sum_k 1/lambda_k`, the mean of the limit law and the trace of its
/// covariance operator.
pub fn eigenvalue_trace(family: Family, m: usize) -> Result<f64> {
    check_order(m)?;
    Ok(power_sum(family, m, 1))
}

/// Mean and variance of the limit law.
pub fn null_moments(family: Family, m: usize) -> Result<(f64, f64)> {
    check_order(m)?;
    Ok((power_sum(family, m, 1), 2.0 * power_sum(family, m, 2)))
}

/// `E exp(s L)` from the first `terms` distinct factors
/// `(1 - 2s/lambda)^{-mult/2}`, with the log tail closed by
/// `s T1 + s^2 T2` where `T_p = sum_{k > terms} 1/lambda_k^p`.
pub fn mgf_infinite_product(family: Family, m: usize, s: Complex64, terms: usize) -> Result<Complex64> {
    check_order(m)?;
    let mult = multiplicity(family);
    let mut log = Complex64::new(0.0, 0.0);
    for i in 0..terms {
        let lam = eigenvalue_unchecked(family, m, i * mult + 1);
        let f = 1.0 - 2.0 * s / lam;
        if f.norm() < 1e-300 {
            return Err(Error::Pole { s: s.re });
        }
        log -= 0.5 * mult as f64 * f.ln();
    }
    log += s * eigen_tail(family, m, terms, 1) + s * s * eigen_tail(family, m, terms, 2);
    Ok(log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(Family::Gad, 2, 1).unwrap(), 24.0);
        assert!((eigenvalue(Family::Gcvm, 1, 2).unwrap() - 39.47841760435743).abs() < 1e-12);
        let a = eigenvalue(Family::Gw, 1, 1).unwrap();
        let b = eigenvalue(Family::Gw, 1, 2).unwrap();
        assert_eq!(a, b);
        assert!((a - 39.47841760435743).abs() < 1e-12);
        assert_eq!(gad_eigenvalue_exact(3, 2).unwrap(), BigInt::from(2 * 3 * 4 * 5 * 6 * 7));
        assert!(eigenvalue(Family::Gad, 1, 0).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert!((covariance_kernel(Family::Gad, 1, 0.25, 0.75).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((covariance_kernel(Family::Gcvm, 1, 0.3, 0.6).unwrap() - 0.12).abs() < 1e-15);
        let (x, y) = (0.2, 0.9);
        let d: f64 = x - y;
        let expected = 1.0 / 12.0 - d.abs() / 2.0 + d * d / 2.0;
        assert!((covariance_kernel(Family::Gw, 1, x, y).unwrap() - expected).abs() < 1e-15);
        assert!((covariance_kernel(Family::Gw, 1, 0.4, 0.4).unwrap() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn gad_kernel_diagonal_and_low_orders() {
        for m in 1..=4 {
            let x: f64 = 0.3;
            let expected = (x * (1.0 - x)).powi(m as i32 - 1) / ((2 * m - 1) as f64 * factorial_f64(m - 1).powi(2));
            assert!((covariance_kernel(Family::Gad, m, x, x).unwrap() - expected).abs() < 1e-15);
        }
        let (x, y): (f64, f64) = (0.2, 0.65);
        let (lo, hi) = (x.min(y), x.max(y));
        let r = (lo - x * y) / (hi - x * y);
        // The order-two display needs -2xy; +2xy disagrees with the Mercer sum.
        let k2 = r * (3.0 * hi - lo - 2.0 * x * y) / 6.0;
        assert!((covariance_kernel(Family::Gad, 2, x, y).unwrap() - k2).abs() < 1e-15);
        let k3 = r.powf(1.5)
            * ((hi - 0.75 * x * y).powi(2) / 12.0 + (lo + 1.5 * x * y).powi(2) / 120.0 - x * y * (3.0 * x * y + 8.0) / 192.0);
        assert!((covariance_kernel(Family::Gad, 3, x, y).unwrap() - k3).abs() < 1e-15);
    }

    #[test]
    fn gcvm_order_two_kernel() {
        let (x, y): (f64, f64) = (0.15, 0.7);
        let (lo, hi) = (x.min(y), x.max(y));
        let expected = 1.0 / 45.0 - (x * x + y * y) / 6.0 + (hi.powi(3) + 3.0 * lo * x * y) / 6.0
            - (x.powi(4) + 6.0 * x * x * y * y + y.powi(4)) / 24.0;
        assert!((covariance_kernel(Family::Gcvm, 2, x, y).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn mercer_partial_sums_approach_kernel() {
        for family in Family::ALL {
            let m = 2;
            let (x, y) = (0.3, 0.55);
            let mut sum = 0.0;
            for k in 1..=400 {
                let lam = eigenvalue(family, m, k).unwrap();
                sum += eigenfunction(family, m, k, x).unwrap() * eigenfunction(family, m, k, y).unwrap() / lam;
            }
            let exact = covariance_kernel(family, m, x, y).unwrap();
            assert!((sum - exact).abs() < 1e-6, "{family}: {sum} vs {exact}");
        }
    }

    #[test]
    fn gad_trace_exact() {
        for (m, v) in [(1, 1.0), (2, 1.0 / 18.0), (3, 1.0 / 600.0)] {
            assert!((eigenvalue_trace(Family::Gad, m).unwrap() - v).abs() < 1e-15);
        }
        assert!((eigenvalue_trace(Family::Gw, 1).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((eigenvalue_trace(Family::Gcvm, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn classical_variances() {
        // Cramer-von Mises 1/45, Watson 1/360, Anderson-Darling 2(pi^2 - 9)/3.
        let (_, v) = null_moments(Family::Gcvm, 1).unwrap();
        assert!((v - 1.0 / 45.0).abs() < 1e-14);
        let (_, v) = null_moments(Family::Gw, 1).unwrap();
        assert!((v - 1.0 / 360.0).abs() < 1e-14);
        let (_, v) = null_moments(Family::Gad, 1).unwrap();
        assert!((v - 2.0 * (PI * PI - 9.0) / 3.0).abs() < 1e-13);
    }
}
