use std::f64::consts::{PI, TAU};

use rand::distributions::{Distribution, Open01};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gofstats::UnitSample;
use crate::numeric::special::normal_cdf;

/// How raw draws are mapped to [0, 1] before testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullModel {
    /// Standard normal probability integral transform.
    StdNormalPit,
    /// Angle in [0, 2 pi) divided by 2 pi.
    UniformCircle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Alternative {
    /// The uniform null itself.
    Uniform,
    Normal { mu: f64, sigma: f64 },
    /// Location `xi`, scale `omega`, shape `alpha`.
    SkewNormal { xi: f64, omega: f64, alpha: f64 },
    /// Mixture of von Mises densities with a common concentration.
    VonMisesMixture { weights: Vec<f64>, locations: Vec<f64>, kappa: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSpec {
    pub kind: Alternative,
    pub null_model: NullModel,
}

/// Named von Mises mixture configurations: locations and weights.
pub fn von_mises_model(name: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let third = 1.0 / 3.0;
    Ok(match name.trim().to_ascii_uppercase().as_str() {
        "I" => (vec![0.0], vec![1.0]),
        "II" => (vec![0.0, PI], vec![0.5, 0.5]),
        "III" => (vec![0.0, TAU / 3.0, 2.0 * TAU / 3.0], vec![third, third, third]),
        "I+II" => (vec![0.0, PI], vec![2.0 / 3.0, 1.0 / 3.0]),
        "I+III" => (vec![0.0, TAU / 3.0, 2.0 * TAU / 3.0], vec![0.5, 0.25, 0.25]),
        "I'+II" => (vec![0.0, PI / 3.0, PI], vec![0.25, 0.5, 0.25]),
        other => return Err(Error::InvalidArgument(format!("unknown von Mises model '{other}'"))),
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

impl AlternativeSpec {
    pub fn uniform() -> Self {
        Self { kind: Alternative::Uniform, null_model: NullModel::StdNormalPit }
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        positive("sigma", sigma)?;
        if !mu.is_finite() {
            return Err(Error::InvalidArgument("mu must be finite".into()));
        }
        Ok(Self { kind: Alternative::Normal { mu, sigma }, null_model: NullModel::StdNormalPit })
    }

    pub fn skew_normal(xi: f64, omega: f64, alpha: f64) -> Result<Self> {
        positive("omega", omega)?;
        if !(xi.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidArgument("skew-normal parameters must be finite".into()));
        }
        Ok(Self { kind: Alternative::SkewNormal { xi, omega, alpha }, null_model: NullModel::StdNormalPit })
    }

    /// Skew-normal with shape `alpha` placed so it has mean `mu` and
    /// standard deviation `sigma`.
    pub fn skew_normal_moments(mu: f64, sigma: f64, alpha: f64) -> Result<Self> {
        positive("sigma", sigma)?;
        let delta = alpha / (1.0 + alpha * alpha).sqrt();
        let omega = 1.0 / (1.0 - 2.0 * delta * delta / PI).sqrt();
        let xi = -omega * delta * (2.0 / PI).sqrt();
        Self::skew_normal(mu + sigma * xi, sigma * omega, alpha)
    }

    pub fn von_mises_mixture(weights: Vec<f64>, locations: Vec<f64>, kappa: f64) -> Result<Self> {
        if weights.is_empty() || weights.len() != locations.len() {
            return Err(Error::InvalidArgument("need one weight per location".into()));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be nonnegative, got {kappa}")));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("weights must be nonnegative and sum to 1".into()));
        }
        if locations.iter().any(|&t| !(0.0..TAU).contains(&t)) {
            return Err(Error::InvalidArgument("locations must lie in [0, 2 pi)".into()));
        }
        Ok(Self {
            kind: Alternative::VonMisesMixture { weights, locations, kappa },
            null_model: NullModel::UniformCircle,
        })
    }

    pub fn von_mises_named(model: &str, kappa: f64) -> Result<Self> {
        let (locations, weights) = von_mises_model(model)?;
        Self::von_mises_mixture(weights, locations, kappa)
    }
}

/// Best-Fisher rejection sampler, centred at 0.
pub fn von_mises<R: Rng + ?Sized>(rng: &mut R, kappa: f64) -> f64 {
    if kappa < 1e-8 {
        return PI * (2.0 * rng.gen::<f64>() - 1.0);
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.gen();
        let u2: f64 = Open01.sample(rng);
        let u3: f64 = rng.gen();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let theta = f.clamp(-1.0, 1.0).acos();
            return if u3 > 0.5 { theta } else { -theta };
        }
    }
}

// Keeps PIT values usable by the logarithmic statistics.
fn clamp_open(u: f64) -> f64 {
    u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

fn draw<R: Rng + ?Sized>(kind: &Alternative, rng: &mut R) -> f64 {
    match kind {
        Alternative::Uniform => StandardNormal.sample(rng),
        Alternative::Normal { mu, sigma } => {
            let z: f64 = StandardNormal.sample(rng);
            mu + sigma * z
        }
        Alternative::SkewNormal { xi, omega, alpha } => {
            let delta = alpha / (1.0 + alpha * alpha).sqrt();
            let u: f64 = StandardNormal.sample(rng);
            let v: f64 = StandardNormal.sample(rng);
            xi + omega * (delta * u.abs() + (1.0 - delta * delta).sqrt() * v)
        }
        Alternative::VonMisesMixture { weights, locations, kappa } => {
            let pick: f64 = rng.gen();
            let mut acc = 0.0;
            let mut idx = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                acc += w;
                if pick < acc {
                    idx = i;
                    break;
                }
            }
            (locations[idx] + von_mises(rng, *kappa)).rem_euclid(TAU)
        }
    }
}

/// `n` raw variates on the alternative's natural scale (real line or angle).
pub fn sample_raw<R: Rng + ?Sized>(spec: &AlternativeSpec, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| draw(&spec.kind, rng)).collect()
}

/// Draws `n` variates and maps them to [0, 1] with the null transform.
pub fn sample_alternative<R: Rng + ?Sized>(spec: &AlternativeSpec, n: usize, rng: &mut R) -> Result<UnitSample> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let values = sample_raw(spec, n, rng)
        .into_iter()
        .map(|v| match spec.null_model {
            NullModel::StdNormalPit => clamp_open(normal_cdf(v)),
            NullModel::UniformCircle => clamp_open(v.rem_euclid(TAU) / TAU),
        })
        .collect();
    UnitSample::new(values)
}
