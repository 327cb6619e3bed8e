use std::f64::consts::PI;

use super::{check_sample, Family};
use crate::error::Result;
use crate::polybasis::{factorial_ratio, legendre_values};

/// Scaled component scores `xi_1 .. xi_K` in the family's orthonormal basis.
///
/// Legendre polynomials for GAD; for the circular family odd indices use
/// sines and even indices cosines of `2 pi ceil(k/2) x`; cosines of
/// `k pi x` for GCvM.
pub fn component_scores(x: &[f64], family: Family, k_max: usize) -> Result<Vec<f64>> {
    check_sample(x)?;
    let n = x.len() as f64;
    let mut out = vec![0.0; k_max];
    match family {
        Family::Gad => {
            let mut buf = Vec::with_capacity(k_max + 1);
            for &v in x {
                legendre_values(k_max + 1, v, &mut buf);
                for (o, p) in out.iter_mut().zip(&buf[1..]) {
                    *o += p;
                }
            }
            out.iter_mut().for_each(|o| *o /= n.sqrt());
        }
        Family::Gw | Family::GwTrunc => {
            for (idx, o) in out.iter_mut().enumerate() {
                let k = idx + 1;
                let w = 2.0 * PI * k.div_ceil(2) as f64;
                *o = x
                    .iter()
                    .map(|&v| if k % 2 == 1 { (w * v).sin() } else { (w * v).cos() })
                    .sum::<f64>()
                    * (2.0 / n).sqrt();
            }
        }
        Family::Gcvm | Family::GcvmTrunc => {
            for (idx, o) in out.iter_mut().enumerate() {
                let w = PI * (idx + 1) as f64;
                *o = x.iter().map(|&v| (w * v).cos()).sum::<f64>() * (2.0 / n).sqrt();
            }
        }
    }
    Ok(out)
}

/// Weight of `xi_k^2` in the statistic; zero for modes the statistic drops.
pub fn spectral_weight(family: Family, m: usize, k: usize) -> f64 {
    match family {
        Family::Gad if k >= m => factorial_ratio(k, m),
        Family::Gad => 0.0,
        Family::Gw | Family::GwTrunc => {
            let p = k.div_ceil(2);
            if family == Family::GwTrunc && p < m {
                0.0
            } else {
                (2.0 * PI * p as f64).powi(-2 * m as i32)
            }
        }
        Family::Gcvm | Family::GcvmTrunc => {
            if family == Family::GcvmTrunc && k < m {
                0.0
            } else {
                (PI * k as f64).powi(-2 * m as i32)
            }
        }
    }
}

/// Statistic rebuilt from component scores `xi_1 .. xi_K`.
pub fn spectral_statistic(family: Family, m: usize, components: &[f64]) -> f64 {
    components
        .iter()
        .enumerate()
        .map(|(i, xi)| spectral_weight(family, m, i + 1) * xi * xi)
        .sum()
}
