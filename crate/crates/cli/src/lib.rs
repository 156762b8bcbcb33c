//! Run-file schema, option merging, and the solve/verify/simulate/kinematics
//! pipelines behind the `qbeat` binary.
//!
//! One TOML file drives a run: the system description at the top level plus
//! optional `[solver]`, `[realisation]`, `[beat]`, and `[verify]` sections.
//! CLI flags override file values; the effective merged configuration is
//! echoed into every report. CSV artifacts are byte-identical for identical
//! `(config, seed)`.

pub mod pipeline;
pub mod report;

use serde::Deserialize;

use qbeat_core::config::{BackgroundConfig, ChannelConfig, CouplingConfig, GridConfig};
use qbeat_core::realisation::RegimeThresholds;
use qbeat_core::{BornReference, GroupingPolicy, SolverParams, SystemConfig};

/// Top-level run file. The system description is optional so that pure
/// `verify` files work; `solve`/`simulate` require it.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub channels: Option<ChannelConfig>,
    #[serde(default)]
    pub background: Option<BackgroundConfig>,
    #[serde(default)]
    pub coupling: Option<CouplingConfig>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub realisation: RealisationSection,
    #[serde(default)]
    pub beat: BeatSection,
    #[serde(default)]
    pub verify: VerifySection,
}

impl RunFile {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Extracts the system description, if the file carries one.
    pub fn system_config(&self) -> Option<SystemConfig> {
        Some(SystemConfig {
            label: self.label.clone(),
            grid: self.grid.clone()?,
            channels: self.channels.clone()?,
            background: self.background.clone().unwrap_or_default(),
            coupling: self.coupling.clone()?,
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub pole_guard_factor: Option<f64>,
    pub merge_gap_factor: Option<f64>,
    pub residue_drop_tol: Option<f64>,
    pub root_residual_target: Option<f64>,
    /// Oracle comparison tolerance (relative); default 1e-8.
    pub oracle_tol: Option<f64>,
    /// Also write every system matrix as CSV.
    pub export_matrices: Option<bool>,
}

impl SolverSection {
    pub fn params(&self) -> SolverParams {
        let mut p = SolverParams::default();
        if let Some(v) = self.pole_guard_factor {
            p.pole_guard_factor = v;
        }
        if let Some(v) = self.merge_gap_factor {
            p.merge_gap_factor = v;
        }
        if let Some(v) = self.residue_drop_tol {
            p.residue_drop_tol = v;
        }
        if let Some(v) = self.root_residual_target {
            p.root_residual_target = v;
        }
        p
    }

    pub fn oracle_tol(&self) -> f64 {
        self.oracle_tol.unwrap_or(1e-8)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RealisationSection {
    /// "elementary" (default) or "cluster".
    pub policy: Option<String>,
    pub cluster_delta: Option<f64>,
    /// "uniform-vector" (default), "uniform-weights", or "channel0-uniform".
    pub born_reference: Option<String>,
    pub soc_max_alpha: Option<f64>,
    pub uniform_entropy_min: Option<f64>,
    pub uniform_max_alpha_factor: Option<f64>,
}

impl RealisationSection {
    pub fn policy(&self, cli_override: Option<&GroupingPolicy>) -> anyhow::Result<GroupingPolicy> {
        if let Some(p) = cli_override {
            return Ok(*p);
        }
        match self.policy.as_deref() {
            None | Some("elementary") => Ok(GroupingPolicy::Elementary),
            Some("cluster") => {
                let delta = self.cluster_delta.ok_or_else(|| {
                    anyhow::anyhow!("realisation.policy = \"cluster\" requires cluster_delta")
                })?;
                Ok(GroupingPolicy::Cluster { delta })
            }
            Some(other) => anyhow::bail!("unknown grouping policy '{other}'"),
        }
    }

    pub fn born_reference(&self) -> anyhow::Result<BornReference> {
        match self.born_reference.as_deref() {
            None | Some("uniform-vector") => Ok(BornReference::UniformVector),
            Some("uniform-weights") => Ok(BornReference::UniformWeights),
            Some("channel0-uniform") => Ok(BornReference::Channel0Uniform),
            Some(other) => anyhow::bail!("unknown born reference '{other}'"),
        }
    }

    pub fn thresholds(&self) -> RegimeThresholds {
        let mut t = RegimeThresholds::default();
        if let Some(v) = self.soc_max_alpha {
            t.soc_max_alpha = v;
        }
        if let Some(v) = self.uniform_entropy_min {
            t.uniform_entropy_min = v;
        }
        if let Some(v) = self.uniform_max_alpha_factor {
            t.uniform_max_alpha_factor = v;
        }
        t
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeatSection {
    pub steps: Option<usize>,
    pub tau: Option<f64>,
    pub action_quantum: Option<f64>,
    pub initial_action: Option<f64>,
    pub seed: Option<u64>,
    /// "counting" (default) or "born": which α list feeds the jump process.
    pub alpha_source: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub nq_min: Option<usize>,
    pub nq_max: Option<usize>,
    pub nxi_min: Option<usize>,
    pub nxi_max: Option<usize>,
}

/// Parses the `--policy` flag: `elementary` or `cluster:<δ>`.
pub fn parse_policy(text: &str) -> anyhow::Result<GroupingPolicy> {
    if text == "elementary" {
        return Ok(GroupingPolicy::Elementary);
    }
    if let Some(delta) = text.strip_prefix("cluster:") {
        let delta: f64 = delta
            .parse()
            .map_err(|_| anyhow::anyhow!("bad cluster δ in --policy '{text}'"))?;
        if !(delta.is_finite() && delta >= 0.0) {
            anyhow::bail!("cluster δ must be a non-negative finite number");
        }
        return Ok(GroupingPolicy::Cluster { delta });
    }
    anyhow::bail!("--policy expects 'elementary' or 'cluster:<δ>', got '{text}'")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_file_parses_full_schema() {
        let text = r#"
label = "demo"

[grid]
min = -3.0
max = 3.0
n = 8

[channels]
energies = [0.0, 1.0, 2.0]

[coupling]
kind = "gaussian"
strength = 0.4
factors = [1.0, 0.8, 0.5]
width = 1.0

[solver]
oracle_tol = 1e-9

[realisation]
policy = "cluster"
cluster_delta = 0.5
born_reference = "uniform-weights"

[beat]
steps = 1000
seed = 9

[verify]
trials = 10
"#;
        let file = RunFile::parse(text).unwrap();
        assert!(file.system_config().is_some());
        assert_eq!(file.solver.oracle_tol(), 1e-9);
        assert!(matches!(
            file.realisation.policy(None).unwrap(),
            GroupingPolicy::Cluster { .. }
        ));
        assert!(matches!(
            file.realisation.born_reference().unwrap(),
            BornReference::UniformWeights
        ));
        assert_eq!(file.verify.trials, Some(10));
    }

    #[test]
    fn verify_only_file_has_no_system() {
        let file = RunFile::parse("[verify]\ntrials = 5\n").unwrap();
        assert!(file.system_config().is_none());
    }

    #[test]
    fn policy_flag_forms() {
        assert!(matches!(
            parse_policy("elementary").unwrap(),
            GroupingPolicy::Elementary
        ));
        assert!(matches!(
            parse_policy("cluster:0.25").unwrap(),
            GroupingPolicy::Cluster { delta } if delta == 0.25
        ));
        assert!(parse_policy("cluster:").is_err());
        assert!(parse_policy("other").is_err());
    }
}
