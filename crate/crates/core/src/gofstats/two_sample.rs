use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gofstats::Family;
use crate::mcharness::rng::replicate_rng;
use crate::mcharness::with_thread_cap;
use crate::polybasis::check_order;
use crate::templates::template_unchecked;

/// Pooled-rank layout shared by the observed statistic and its permutations.
struct RankDesign {
    n1: usize,
    n2: usize,
    labels: Vec<bool>,
    // templates[r][i] = tau((r+1)/N; (i+1)/N)
    templates: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Handling of values shared by both samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieRule {
    #[default]
    Reject,
    /// Tied values from the first sample take the lower ranks.
    FirstSampleLower,
}

impl RankDesign {
    fn new(x: &[f64], y: &[f64], m: usize, ties: TieRule) -> Result<Self> {
        check_order(m)?;
        if x.is_empty() || y.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut pooled: Vec<(f64, bool)> =
            x.iter().map(|&v| (v, true)).chain(y.iter().map(|&v| (v, false))).collect();
        for (index, (v, _)) in pooled.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        pooled.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        if ties == TieRule::Reject {
            if let Some(w) = pooled.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Tie { value: w[0].0 });
            }
        }
        let n = pooled.len();
        let nf = n as f64;
        let (n1, n2) = (x.len(), y.len());
        let templates = (1..=n)
            .map(|r| (1..n).map(|i| template_unchecked(Family::Gad, m, r as f64 / nf, i as f64 / nf)).collect())
            .collect();
        let scale = (n1 * n2) as f64 / (nf * nf);
        let weights = (1..n)
            .map(|i| {
                let u = i as f64 / nf;
                scale / (u * (1.0 - u)).powi(m as i32)
            })
            .collect();
        Ok(Self { n1, n2, labels: pooled.iter().map(|p| p.1).collect(), templates, weights })
    }

    fn statistic(&self, labels: &[bool]) -> f64 {
        let (c1, c2) = (1.0 / self.n1 as f64, -1.0 / self.n2 as f64);
        let mut diff = vec![0.0; self.weights.len()];
        for (row, &first) in self.templates.iter().zip(labels) {
            let c = if first { c1 } else { c2 };
            for (d, t) in diff.iter_mut().zip(row) {
                *d += c * t;
            }
        }
        diff.iter().zip(&self.weights).map(|(d, w)| w * d * d).sum()
    }
}

/// Two-sample rank statistic built from the m-fold integrated difference of
/// the two empirical distribution functions.
pub fn two_sample_gad(x: &[f64], y: &[f64], m: usize) -> Result<f64> {
    two_sample_gad_with_ties(x, y, m, TieRule::Reject)
}

pub fn two_sample_gad_with_ties(x: &[f64], y: &[f64], m: usize, ties: TieRule) -> Result<f64> {
    let design = RankDesign::new(x, y, m, ties)?;
    Ok(design.statistic(&design.labels))
}

#[derive(Clone, Debug, Serialize)]
pub struct PermutationResult {
    pub statistic: f64,
    pub p_value: f64,
    pub permutations: usize,
}

/// Permutation p-value `(1 + #{T_b >= T}) / (B + 1)`; permutation `b` draws
/// from its own keyed stream, so the result does not depend on thread count.
pub fn two_sample_permutation(
    x: &[f64],
    y: &[f64],
    m: usize,
    permutations: usize,
    seed: u64,
) -> Result<PermutationResult> {
    if permutations == 0 {
        return Err(Error::InvalidArgument("need at least one permutation".into()));
    }
    let design = RankDesign::new(x, y, m, TieRule::Reject)?;
    let observed = design.statistic(&design.labels);
    let threshold = observed - 1e-10 * observed.abs();
    let exceed: usize = with_thread_cap(|| {
        (0..permutations)
            .into_par_iter()
            .map(|b| {
                let mut labels = design.labels.clone();
                labels.shuffle(&mut replicate_rng(seed, b as u64));
                usize::from(design.statistic(&labels) >= threshold)
            })
            .sum()
    });
    Ok(PermutationResult {
        statistic: observed,
        p_value: (1 + exceed) as f64 / (permutations + 1) as f64,
        permutations,
    })
}
