//! Test statistics for uniformity on the unit interval or circle.

mod components;
mod cvm;
mod gad;
pub mod pair_kernel;
mod two_sample;
mod watson;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polybasis::check_order;

pub use components::{component_scores, spectral_statistic, spectral_weight};
pub use cvm::{cvm_classical, gcvm_fast, gcvm_pair_sum};
pub use gad::{ad_classical, gad2_linear, gad_fast, gad_fast_counted, gad_pair_sum};
pub use two_sample::{two_sample_gad, two_sample_gad_with_ties, two_sample_permutation, PermutationResult, TieRule};
pub use watson::{watson_classical, watson_fast, watson_pair_sum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Generalized Anderson-Darling.
    Gad,
    /// Generalized Watson (circular).
    Gw,
    /// Generalized Watson with the low-frequency modes removed.
    #[serde(rename = "gw-star")]
    GwTrunc,
    /// Generalized Cramer-von Mises.
    Gcvm,
    /// Generalized Cramer-von Mises with the low-frequency modes removed.
    #[serde(rename = "gcvm-star")]
    GcvmTrunc,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Gad, Family::Gw, Family::GwTrunc, Family::Gcvm, Family::GcvmTrunc];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gad => "gad",
            Family::Gw => "gw",
            Family::GwTrunc => "gw-star",
            Family::Gcvm => "gcvm",
            Family::GcvmTrunc => "gcvm-star",
        }
    }

    pub fn is_truncated(self) -> bool {
        matches!(self, Family::GwTrunc | Family::GcvmTrunc)
    }

    /// The family without low-frequency modes removed.
    pub fn untruncated(self) -> Family {
        match self {
            Family::GwTrunc => Family::Gw,
            Family::GcvmTrunc => Family::Gcvm,
            f => f,
        }
    }

    /// Base family with the truncation flag applied; GAD has no truncated form.
    pub fn with_truncation(self, truncated: bool) -> Result<Family> {
        match (self.untruncated(), truncated) {
            (f, false) => Ok(f),
            (Family::Gw, true) => Ok(Family::GwTrunc),
            (Family::Gcvm, true) => Ok(Family::GcvmTrunc),
            (f, true) => Err(Error::InvalidArgument(format!("family '{f}' has no truncated variant"))),
        }
    }

    /// Whether observations live on the circle.
    pub fn is_circular(self) -> bool {
        matches!(self, Family::Gw | Family::GwTrunc)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gad" | "ad" => Ok(Family::Gad),
            "gw" | "watson" => Ok(Family::Gw),
            "gw-star" | "gw*" | "gwstar" => Ok(Family::GwTrunc),
            "gcvm" | "cvm" => Ok(Family::Gcvm),
            "gcvm-star" | "gcvm*" | "gcvmstar" => Ok(Family::GcvmTrunc),
            other => Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        }
    }
}

/// A statistic family together with its integration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestSpec {
    pub family: Family,
    pub m: usize,
}

impl TestSpec {
    pub fn new(family: Family, m: usize) -> Result<Self> {
        check_order(m)?;
        Ok(Self { family, m })
    }

    /// Statistic through the fastest exact route.
    pub fn statistic(&self, sample: &UnitSample) -> Result<f64> {
        let x = sample.values();
        match self.family {
            Family::Gad => {
                sample.require_open()?;
                gad_fast(x, self.m)
            }
            Family::Gw => watson_fast(x, self.m, false),
            Family::GwTrunc => watson_fast(x, self.m, true),
            Family::Gcvm => gcvm_fast(x, self.m, false),
            Family::GcvmTrunc => gcvm_fast(x, self.m, true),
        }
    }

    /// Statistic through the O(N^2) pair sum.
    pub fn statistic_pair_sum(&self, sample: &UnitSample) -> Result<f64> {
        let x = sample.values();
        match self.family {
            Family::Gad => {
                sample.require_open()?;
                gad_pair_sum(x, self.m)
            }
            Family::Gw => watson_pair_sum(x, self.m, false),
            Family::GwTrunc => watson_pair_sum(x, self.m, true),
            Family::Gcvm => gcvm_pair_sum(x, self.m, false),
            Family::GcvmTrunc => gcvm_pair_sum(x, self.m, true),
        }
    }
}

impl fmt::Display for TestSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.family, self.m)
    }
}

/// Distance from 0 and 1 used by the opt-in boundary clamp.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// Observations in [0, 1], typically probability integral transforms.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitSample {
    values: Vec<f64>,
}

impl UnitSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfDomain { value: v, lo: 0.0, hi: 1.0 });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy with every value moved into `[eps, 1 - eps]`.
    pub fn clamped(&self, eps: f64) -> UnitSample {
        UnitSample { values: self.values.iter().map(|v| v.clamp(eps, 1.0 - eps)).collect() }
    }

    /// The logarithmic statistics need every point strictly inside (0, 1).
    pub fn require_open(&self) -> Result<()> {
        match self.values.iter().position(|&v| v <= 0.0 || v >= 1.0) {
            Some(index) => Err(Error::Boundary { index, value: self.values[index] }),
            None => Ok(()),
        }
    }
}

/// Probability integral transform of raw data under a continuous null CDF.
pub fn pit(data: &[f64], cdf: impl Fn(f64) -> f64) -> Result<UnitSample> {
    for (index, v) in data.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index });
        }
    }
    UnitSample::new(data.iter().map(|&v| cdf(v)).collect())
}

fn check_sample(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(())
}
