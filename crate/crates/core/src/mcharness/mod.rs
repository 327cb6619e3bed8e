//! Monte Carlo engine: null and alternative replicates, critical values,
//! rejection rates and power studies. Replicate `r` always draws from the
//! stream keyed by `(seed, r)`, so results do not depend on thread count.

mod alternatives;
pub mod rng;
mod study;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use alternatives::{sample_alternative, sample_raw, von_mises, von_mises_model, Alternative, AlternativeSpec, NullModel};
pub use rng::{derive_seed, replicate_rng, thread_count, with_thread_cap, THREADS_ENV};
pub use study::{run_power_study, PowerCurve, PowerPoint, PowerStudyConfig, StudyConfig};

use crate::error::{Error, Result};
use crate::gofstats::TestSpec;
use crate::numeric::integrate;
use crate::numeric::special::{normal_cdf, normal_pdf};
use crate::polybasis::legendre_value;

const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalEstimate {
    pub value: f64,
    pub bootstrap_se: f64,
    pub replicates: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerEstimate {
    pub rate: f64,
    pub se: f64,
    pub replicates: usize,
}

/// Statistics of every spec on each of `replicates` samples; row `r` comes
/// from stream `r`, and all specs see the same sample.
pub fn simulate(
    specs: &[TestSpec],
    alt: &AlternativeSpec,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    with_thread_cap(|| {
        (0..replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = replicate_rng(seed, r as u64);
                let sample = sample_alternative(alt, n, &mut rng)?;
                specs.iter().map(|spec| spec.statistic(&sample)).collect()
            })
            .collect()
    })
}

// Type-1 empirical quantile of sorted data.
fn upper_quantile(sorted: &[f64], alpha: f64) -> f64 {
    let idx = ((1.0 - alpha) * sorted.len() as f64).ceil() as usize;
    sorted[idx.clamp(1, sorted.len()) - 1]
}

fn quantile_with_se(mut values: Vec<f64>, alpha: f64, seed: u64) -> CriticalEstimate {
    values.sort_by(f64::total_cmp);
    let value = upper_quantile(&values, alpha);
    let r = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0xB007));
    let mut boot = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resample = vec![0.0; r];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for v in resample.iter_mut() {
            *v = values[rng.gen_range(0..r)];
        }
        let idx = (((1.0 - alpha) * r as f64).ceil() as usize).clamp(1, r) - 1;
        let (_, q, _) = resample.select_nth_unstable_by(idx, f64::total_cmp);
        boot.push(*q);
    }
    let mean = boot.iter().sum::<f64>() / boot.len() as f64;
    let var = boot.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (boot.len() - 1) as f64;
    CriticalEstimate { value, bootstrap_se: var.sqrt(), replicates: r }
}

/// Empirical upper `alpha` point of the statistic under uniform data.
pub fn estimate_critical(spec: TestSpec, n: usize, alpha: f64, replicates: usize, seed: u64) -> Result<CriticalEstimate> {
    Ok(estimate_critical_many(&[spec], n, alpha, replicates, seed)?.remove(0))
}

/// [`estimate_critical`] for several specs on shared null samples.
pub fn estimate_critical_many(
    specs: &[TestSpec],
    n: usize,
    alpha: f64,
    replicates: usize,
    seed: u64,
) -> Result<Vec<CriticalEstimate>> {
    if replicates < 1000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 replicates, got {replicates}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let rows = simulate(specs, &AlternativeSpec::uniform(), n, replicates, seed)?;
    Ok((0..specs.len())
        .map(|i| quantile_with_se(rows.iter().map(|row| row[i]).collect(), alpha, seed))
        .collect())
}

fn rejection_rate(hits: usize, replicates: usize) -> PowerEstimate {
    let rate = hits as f64 / replicates as f64;
    PowerEstimate { rate, se: (rate * (1.0 - rate) / replicates as f64).sqrt(), replicates }
}

/// Fraction of replicates whose statistic exceeds `critical`.
pub fn estimate_power(
    spec: TestSpec,
    alt: &AlternativeSpec,
    n: usize,
    critical: f64,
    replicates: usize,
    seed: u64,
) -> Result<PowerEstimate> {
    Ok(estimate_power_many(&[spec], alt, n, &[critical], replicates, seed)?.remove(0))
}

/// [`estimate_power`] for several specs on shared samples.
pub fn estimate_power_many(
    specs: &[TestSpec],
    alt: &AlternativeSpec,
    n: usize,
    criticals: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<Vec<PowerEstimate>> {
    if specs.len() != criticals.len() {
        return Err(Error::InvalidArgument("one critical value per spec".into()));
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let rows = simulate(specs, alt, n, replicates, seed)?;
    Ok(criticals
        .iter()
        .enumerate()
        .map(|(i, &c)| rejection_rate(rows.iter().filter(|row| row[i] > c).count(), replicates))
        .collect())
}

/// Local sensitivities of the first Legendre component scores at the
/// standard normal null: `d E[xi_1] / d mu`, `d E[xi_2] / d sigma^2` and
/// `d E[xi_3] / d mu`, each per unit of `sqrt(N)` times the shift.
pub fn contiguous_constants() -> Result<[f64; 3]> {
    let quad = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let r = integrate(f, -12.0, 12.0, 1e-14, 1e-13);
        if r.converged {
            Ok(r.value)
        } else {
            Err(Error::NonConvergence("sensitivity quadrature".into()))
        }
    };
    let c1 = quad(&|y| legendre_value(1, normal_cdf(y)) * y * normal_pdf(y))?;
    let c2 = 0.5 * quad(&|y| legendre_value(2, normal_cdf(y)) * (y * y - 1.0) * normal_pdf(y))?;
    let c3 = quad(&|y| legendre_value(3, normal_cdf(y)) * y * normal_pdf(y))?;
    Ok([c1, c2, c3])
}
