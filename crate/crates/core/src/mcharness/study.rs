use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{derive_seed, estimate_critical_many, estimate_power_many, AlternativeSpec, CriticalEstimate};
use crate::error::{Error, Result};
use crate::gofstats::{Family, TestSpec};

/// One power study: a statistic family at several orders, run over a grid
/// of one alternative parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub name: String,
    pub family: String,
    pub m: Vec<usize>,
    pub n: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub replicates: usize,
    /// Null replicates for the critical values; defaults to `replicates`.
    #[serde(default)]
    pub critical_replicates: Option<usize>,
    pub seed: u64,
    /// `uniform`, `normal`, `skew_normal` or `von_mises`.
    pub alternative: String,
    /// Named von Mises mixture (I, II, III, I+II, I+III, I'+II).
    #[serde(default)]
    pub model: Option<String>,
    pub vary: String,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
}

fn default_alpha() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerStudyConfig {
    pub study: Vec<StudyConfig>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl PowerStudyConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        if config.study.is_empty() {
            return Err(config_error("no [[study]] sections"));
        }
        for study in &config.study {
            study.validate()?;
        }
        Ok(config)
    }
}

impl StudyConfig {
    pub fn family(&self) -> Result<Family> {
        self.family.parse().map_err(|_| config_error(format!("study '{}': unknown family '{}'", self.name, self.family)))
    }

    pub fn specs(&self) -> Result<Vec<TestSpec>> {
        let family = self.family()?;
        self.m
            .iter()
            .map(|&m| TestSpec::new(family, m).map_err(|e| config_error(format!("study '{}': {e}", self.name))))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let ctx = |msg: &str| config_error(format!("study '{}': {msg}", self.name));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
            return Err(config_error(format!("study name '{}' must be nonempty [A-Za-z0-9_.-]", self.name)));
        }
        if self.m.is_empty() {
            return Err(ctx("empty m list"));
        }
        self.specs()?;
        if self.n == 0 || self.replicates == 0 {
            return Err(ctx("n and replicates must be positive"));
        }
        if self.critical_replicates() < 1000 {
            return Err(ctx("critical_replicates must be at least 1000"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ctx("alpha must lie in (0, 1)"));
        }
        if self.grid.is_empty() {
            return Err(ctx("empty grid"));
        }
        for &v in &self.grid {
            self.alternative_at(v)?;
        }
        Ok(())
    }

    pub fn critical_replicates(&self) -> usize {
        self.critical_replicates.unwrap_or(self.replicates)
    }

    /// The alternative at grid value `value` of the varied parameter.
    pub fn alternative_at(&self, value: f64) -> Result<AlternativeSpec> {
        let mut params = self.fixed.clone();
        params.insert(self.vary.clone(), value);
        let allowed: &[&str] = match self.alternative.as_str() {
            "uniform" => &[],
            "normal" => &["mu", "sigma"],
            "skew_normal" => &["mu", "sigma", "alpha"],
            "von_mises" => &["kappa"],
            other => return Err(config_error(format!("study '{}': unknown alternative '{other}'", self.name))),
        };
        if self.alternative != "uniform" {
            if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(config_error(format!(
                    "study '{}': parameter '{bad}' does not apply to {}",
                    self.name, self.alternative
                )));
            }
        }
        let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
        let spec = match self.alternative.as_str() {
            "uniform" => Ok(AlternativeSpec::uniform()),
            "normal" => AlternativeSpec::normal(get("mu", 0.0), get("sigma", 1.0)),
            "skew_normal" => AlternativeSpec::skew_normal_moments(get("mu", 0.0), get("sigma", 1.0), get("alpha", 0.0)),
            _ => AlternativeSpec::von_mises_named(self.model.as_deref().unwrap_or("I"), get("kappa", 0.0)),
        };
        spec.map_err(|e| config_error(format!("study '{}': {e}", self.name)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerPoint {
    pub param: f64,
    pub rate: f64,
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerCurve {
    pub study: String,
    pub family: Family,
    pub m: usize,
    pub parameter: String,
    pub critical: CriticalEstimate,
    pub points: Vec<PowerPoint>,
    pub replicates: usize,
    pub seed: u64,
}

/// Runs every study: critical values from null replicates, then rejection
/// rates along the grid. All orders of a study share their samples.
pub fn run_power_study(config: &PowerStudyConfig) -> Result<Vec<PowerCurve>> {
    let mut curves = Vec::new();
    for study in &config.study {
        let specs = study.specs()?;
        let criticals = estimate_critical_many(
            &specs,
            study.n,
            study.alpha,
            study.critical_replicates(),
            derive_seed(study.seed, 0),
        )?;
        let values: Vec<f64> = criticals.iter().map(|c| c.value).collect();
        let mut per_spec: Vec<Vec<PowerPoint>> = vec![Vec::new(); specs.len()];
        for (g, &param) in study.grid.iter().enumerate() {
            let alt = study.alternative_at(param)?;
            let rates =
                estimate_power_many(&specs, &alt, study.n, &values, study.replicates, derive_seed(study.seed, g as u64 + 1))?;
            for (points, est) in per_spec.iter_mut().zip(rates) {
                points.push(PowerPoint { param, rate: est.rate, se: est.se });
            }
        }
        for ((spec, critical), points) in specs.iter().zip(criticals).zip(per_spec) {
            curves.push(PowerCurve {
                study: study.name.clone(),
                family: spec.family,
                m: spec.m,
                parameter: study.vary.clone(),
                critical,
                points,
                replicates: study.replicates,
                seed: study.seed,
            });
        }
    }
    Ok(curves)
}
