//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use pltl_teach::teacher::Objective;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainChoice {
    Numeric,
    Gridworld,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferenceChoice {
    Uniform,
    /// F before G, ordered along implication within each operator.
    Implication,
    /// Manhattan distance on the grid plus an operator-switch penalty.
    Local,
    /// `Local` with perturbation noise.
    NoisyLocal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Tlip,
    Esmt,
    Rg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceConfig {
    #[serde(default = "default_model")]
    pub model: PreferenceChoice,
    /// Operator-switch penalty of the local models; defaults to one above
    /// the largest grid distance.
    pub penalty: Option<f64>,
    /// Perturbation radius of the noisy model.
    #[serde(default = "default_radius")]
    pub radius: u32,
}

impl Default for PreferenceConfig {
    fn default() -> Self {
        PreferenceConfig {
            model: default_model(),
            penalty: None,
            radius: default_radius(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeacherSection {
    #[serde(default = "default_objective")]
    pub objective: Objective,
    #[serde(default = "default_method")]
    pub method: MethodChoice,
    #[serde(default = "yes")]
    pub adaptive: bool,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub positive_only: bool,
    /// Random demonstrations drawn per step by the randomized baseline.
    #[serde(default = "default_sample_size")]
    pub sample_size: usize,
}

impl Default for TeacherSection {
    fn default() -> Self {
        TeacherSection {
            objective: default_objective(),
            method: default_method(),
            adaptive: true,
            oracle: false,
            positive_only: false,
            sample_size: default_sample_size(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_domain")]
    pub domain: DomainChoice,
    /// Gridworld map file: 9 lines of 9 color letters (R, B, G, Y).
    pub map: Option<PathBuf>,
    /// Hypothesis-grid sizes `a` to run.
    #[serde(default = "default_grid")]
    pub a: Vec<u32>,
    /// Maximum demonstration length; `a + 1` when absent.
    pub max_len: Option<usize>,
    #[serde(default = "default_sessions")]
    pub sessions: usize,
    #[serde(default)]
    pub seed: u64,
    /// Per-step solver time limit in seconds; the timing suite defaults to
    /// 300 minutes, or 60 seconds in short mode.
    pub timeout_secs: Option<u64>,
    #[serde(default)]
    pub preference: PreferenceConfig,
    #[serde(default)]
    pub teacher: TeacherSection,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

fn default_name() -> String {
    "experiment".into()
}
fn default_domain() -> DomainChoice {
    DomainChoice::Numeric
}
fn default_grid() -> Vec<u32> {
    vec![5, 10, 15]
}
fn default_sessions() -> usize {
    10
}
fn default_model() -> PreferenceChoice {
    PreferenceChoice::Uniform
}
fn default_radius() -> u32 {
    1
}
fn default_objective() -> Objective {
    Objective::AN
}
fn default_method() -> MethodChoice {
    MethodChoice::Tlip
}
fn default_sample_size() -> usize {
    64
}
fn default_out() -> PathBuf {
    "results".into()
}
fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sessions == 0 {
            bail!("sessions must be at least 1");
        }
        if self.a.is_empty() || self.a.contains(&0) {
            bail!("grid sizes `a` must be non-empty and at least 1");
        }
        if self.teacher.sample_size == 0 {
            bail!("sample_size must be at least 1");
        }
        if self.teacher.oracle && self.domain != DomainChoice::Numeric {
            bail!("the boundary oracle needs the numeric domain");
        }
        for &a in &self.a {
            if self.max_len_for(a) < a as usize {
                log::warn!(
                    "max_len {} is below a = {a}; long-horizon hypotheses cannot be eliminated",
                    self.max_len_for(a)
                );
            }
        }
        Ok(())
    }

    pub fn max_len_for(&self, a: u32) -> usize {
        self.max_len.unwrap_or(a as usize + 1)
    }
}
