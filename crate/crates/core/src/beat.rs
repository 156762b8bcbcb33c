//! Stochastic realisation-switching ("beat") process: a seeded i.i.d. jump
//! sequence over realisation centres with one action quantum spent per event,
//! plus drift/diffusion and empirical-frequency statistics.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BeatError {
    #[error("probability list invalid: {reason}")]
    InvalidAlpha { reason: String },
    #[error("centres list has length {centres}, alpha has {alpha}")]
    LengthMismatch { centres: usize, alpha: usize },
    #[error("steps must be at least 1")]
    NoSteps,
    #[error("period and action quantum must be positive")]
    NonPositiveParameters,
}

/// How the next centre is drawn. Only independent draws are implemented;
/// the enum is the extension point for distance-weighted jump kernels, which
/// must leave the `Independent` output untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[non_exhaustive]
pub enum JumpPolicy {
    /// Each jump is an independent draw from the α distribution.
    #[default]
    Independent,
}

/// Configuration of a jump-process run.
#[derive(Debug, Clone)]
pub struct BeatConfig {
    /// Jump distribution over centres; must sum to 1 within 1e-12.
    pub alpha: Vec<f64>,
    /// Centre coordinate per realisation.
    pub centres: Vec<f64>,
    pub steps: usize,
    pub seed: u64,
    /// Time per jump.
    pub tau: f64,
    /// Action spent per jump.
    pub action_quantum: f64,
    /// Action ledger start value.
    pub initial_action: f64,
    pub policy: JumpPolicy,
}

impl BeatConfig {
    pub fn new(alpha: Vec<f64>, centres: Vec<f64>, steps: usize, seed: u64) -> Self {
        Self {
            alpha,
            centres,
            steps,
            seed,
            tau: 1.0,
            action_quantum: 1.0,
            initial_action: 0.0,
            policy: JumpPolicy::Independent,
        }
    }

    pub fn validate(&self) -> Result<(), BeatError> {
        if self.alpha.is_empty() {
            return Err(BeatError::InvalidAlpha {
                reason: "empty".into(),
            });
        }
        if self.alpha.iter().any(|&a| !(a.is_finite() && a >= 0.0)) {
            return Err(BeatError::InvalidAlpha {
                reason: "negative or non-finite entry".into(),
            });
        }
        let sum: f64 = self.alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(BeatError::InvalidAlpha {
                reason: format!("sums to {sum}"),
            });
        }
        if self.centres.len() != self.alpha.len() {
            return Err(BeatError::LengthMismatch {
                centres: self.centres.len(),
                alpha: self.alpha.len(),
            });
        }
        if self.centres.iter().any(|c| !c.is_finite()) {
            return Err(BeatError::InvalidAlpha {
                reason: "non-finite centre".into(),
            });
        }
        if self.steps == 0 {
            return Err(BeatError::NoSteps);
        }
        if !(self.tau > 0.0 && self.action_quantum > 0.0) {
            return Err(BeatError::NonPositiveParameters);
        }
        Ok(())
    }
}

/// One emitted jump event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatEvent {
    /// 1-based event number.
    pub step: usize,
    pub time: f64,
    pub index: usize,
    pub position: f64,
    pub action: f64,
}

/// A completed trajectory. Times are `k·τ` and the action ledger decreases
/// by exactly one quantum per event, so only the index sequence is stored.
#[derive(Debug, Clone)]
pub struct BeatTrajectory {
    config: BeatConfig,
    indices: Vec<usize>,
    counts: Vec<u64>,
}

impl BeatTrajectory {
    pub fn config(&self) -> &BeatConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Observed jump counts per centre.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Empirical frequencies per centre.
    pub fn empirical_frequencies(&self) -> Vec<f64> {
        let n = self.indices.len() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    pub fn event(&self, k: usize) -> BeatEvent {
        let step = k + 1;
        let index = self.indices[k];
        BeatEvent {
            step,
            time: step as f64 * self.config.tau,
            index,
            position: self.config.centres[index],
            action: self.config.initial_action - step as f64 * self.config.action_quantum,
        }
    }

    pub fn events(&self) -> impl Iterator<Item = BeatEvent> + '_ {
        (0..self.indices.len()).map(|k| self.event(k))
    }
}

/// Runs the jump process. Identical `(config, seed)` produce bit-identical
/// trajectories.
pub fn simulate(config: &BeatConfig) -> Result<BeatTrajectory, BeatError> {
    config.validate()?;
    let JumpPolicy::Independent = config.policy;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Cumulative distribution for inverse sampling.
    let mut cumulative = Vec::with_capacity(config.alpha.len());
    let mut acc = 0.0;
    for &a in &config.alpha {
        acc += a;
        cumulative.push(acc);
    }
    let last = cumulative.len() - 1;

    let mut indices = Vec::with_capacity(config.steps);
    let mut counts = vec![0u64; config.alpha.len()];
    for _ in 0..config.steps {
        let u: f64 = rng.random();
        let idx = cumulative.partition_point(|&c| c <= u).min(last);
        indices.push(idx);
        counts[idx] += 1;
    }

    Ok(BeatTrajectory {
        config: config.clone(),
        indices,
        counts,
    })
}

/// Mean position per event and the variance about it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftStats {
    pub drift: f64,
    pub variance: f64,
    /// `Σ_r α_r x_r` for the configured distribution.
    pub theoretical_drift: f64,
}

pub fn drift_and_diffusion(traj: &BeatTrajectory) -> DriftStats {
    let n = traj.len() as f64;
    let drift = traj
        .counts()
        .iter()
        .zip(&traj.config().centres)
        .map(|(&c, &x)| c as f64 * x)
        .sum::<f64>()
        / n;
    let variance = traj
        .counts()
        .iter()
        .zip(&traj.config().centres)
        .map(|(&c, &x)| c as f64 * (x - drift).powi(2))
        .sum::<f64>()
        / n;
    let theoretical_drift = traj
        .config()
        .alpha
        .iter()
        .zip(&traj.config().centres)
        .map(|(&a, &x)| a * x)
        .sum();
    DriftStats {
        drift,
        variance,
        theoretical_drift,
    }
}

/// Per-centre deviation entry of the frequency test.
#[derive(Debug, Clone, Copy)]
pub struct CentreDeviation {
    pub index: usize,
    pub expected: f64,
    pub observed: u64,
    /// `α̂_r − α_r`.
    pub deviation: f64,
}

/// Chi-square goodness-of-fit report against a configured distribution.
#[derive(Debug, Clone)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    /// 99.9% quantile of χ²(dof); 0 when dof = 0.
    pub critical_999: f64,
    pub passed: bool,
    pub per_centre: Vec<CentreDeviation>,
}

/// Tests the trajectory's empirical frequencies against `alpha` at the
/// 99.9% level. Zero-probability centres with observations force a failure;
/// unobserved zero-probability centres drop out of the statistic.
pub fn frequency_test(traj: &BeatTrajectory, alpha: &[f64]) -> Result<ChiSquareReport, BeatError> {
    if alpha.len() != traj.counts().len() {
        return Err(BeatError::LengthMismatch {
            centres: traj.counts().len(),
            alpha: alpha.len(),
        });
    }
    let n = traj.len() as f64;
    let mut statistic = 0.0;
    let mut dof_categories = 0usize;
    let mut per_centre = Vec::with_capacity(alpha.len());
    for (i, (&a, &obs)) in alpha.iter().zip(traj.counts()).enumerate() {
        let expected = a * n;
        if a > 0.0 {
            dof_categories += 1;
            let diff = obs as f64 - expected;
            statistic += diff * diff / expected;
        } else if obs > 0 {
            statistic = f64::INFINITY;
        }
        per_centre.push(CentreDeviation {
            index: i,
            expected,
            observed: obs,
            deviation: obs as f64 / n - a,
        });
    }

    let dof = dof_categories.saturating_sub(1);
    let critical_999 = if dof == 0 {
        0.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("dof >= 1")
            .inverse_cdf(0.999)
    };
    let passed = if dof == 0 {
        statistic == 0.0
    } else {
        statistic <= critical_999
    };
    Ok(ChiSquareReport {
        statistic,
        dof,
        critical_999,
        passed,
        per_centre,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_centre_is_constant_with_zero_variance() {
        let cfg = BeatConfig::new(vec![1.0], vec![2.5], 1000, 7);
        let traj = simulate(&cfg).unwrap();
        assert!(traj.indices().iter().all(|&i| i == 0));
        let stats = drift_and_diffusion(&traj);
        assert_eq!(stats.drift, 2.5);
        assert_eq!(stats.variance, 0.0);
        let report = frequency_test(&traj, &cfg.alpha).unwrap();
        assert_eq!(report.statistic, 0.0);
        assert!(report.passed);
    }

    #[test]
    fn symmetric_two_centre_mean_within_three_sigma() {
        let steps = 100_000;
        let cfg = BeatConfig::new(vec![0.5, 0.5], vec![-1.0, 1.0], steps, 42);
        let traj = simulate(&cfg).unwrap();
        let stats = drift_and_diffusion(&traj);
        let sigma = 1.0 / (steps as f64).sqrt();
        assert!(stats.drift.abs() <= 3.0 * sigma, "drift {}", stats.drift);
        assert_eq!(stats.theoretical_drift, 0.0);
    }

    #[test]
    fn uniform_three_centre_drift_is_zero_within_three_sigma() {
        let steps = 100_000;
        let third = 1.0 / 3.0;
        let alpha = vec![third, third, 1.0 - 2.0 * third];
        let cfg = BeatConfig::new(alpha, vec![-1.0, 0.0, 1.0], steps, 13);
        let traj = simulate(&cfg).unwrap();
        let stats = drift_and_diffusion(&traj);
        // 1/3 is not exactly representable, so the configured moment is only
        // zero to rounding.
        assert!(stats.theoretical_drift.abs() <= 1e-15);
        // per-jump variance 2/3
        let sigma = (2.0 / 3.0 / steps as f64).sqrt();
        assert!(stats.drift.abs() <= 3.0 * sigma, "drift {}", stats.drift);
    }

    #[test]
    fn biased_two_centre_drift_matches_expectation() {
        let steps = 100_000;
        let cfg = BeatConfig::new(vec![0.2, 0.8], vec![-1.0, 1.0], steps, 1234);
        let traj = simulate(&cfg).unwrap();
        let stats = drift_and_diffusion(&traj);
        assert!((stats.theoretical_drift - 0.6).abs() < 1e-15);
        // var of a single jump = 1 − 0.36 = 0.64; mean has sd √(0.64/steps)
        let sigma = (0.64_f64 / steps as f64).sqrt();
        assert!((stats.drift - 0.6).abs() <= 3.0 * sigma, "drift {}", stats.drift);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let cfg = BeatConfig::new(vec![0.3, 0.3, 0.4], vec![-1.0, 0.0, 1.0], 5000, 99);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a.indices(), b.indices());
    }

    #[test]
    fn action_ledger_decreases_by_exactly_one_quantum() {
        let mut cfg = BeatConfig::new(vec![0.5, 0.5], vec![0.0, 1.0], 2000, 5);
        cfg.action_quantum = 0.125; // dyadic, so the ledger is exact in f64
        cfg.initial_action = 10.0;
        let traj = simulate(&cfg).unwrap();
        let mut prev_action = cfg.initial_action;
        let mut prev_time = 0.0;
        for ev in traj.events() {
            assert_eq!(prev_action - ev.action, 0.125);
            assert!(ev.time > prev_time);
            prev_action = ev.action;
            prev_time = ev.time;
        }
        assert_eq!(prev_action, 10.0 - 0.125 * 2000.0);
    }

    #[test]
    fn frequency_test_passes_for_matching_alpha() {
        let cfg = BeatConfig::new(vec![0.5, 0.5], vec![-1.0, 1.0], 100_000, 2024);
        let traj = simulate(&cfg).unwrap();
        let report = frequency_test(&traj, &cfg.alpha).unwrap();
        assert_eq!(report.dof, 1);
        assert!(report.passed, "statistic {}", report.statistic);
    }

    #[test]
    fn frequency_test_flags_mismatched_alpha() {
        // Simulated at 0.9/0.1 but tested against 0.5/0.5.
        let cfg = BeatConfig::new(vec![0.9, 0.1], vec![-1.0, 1.0], 100_000, 77);
        let traj = simulate(&cfg).unwrap();
        let report = frequency_test(&traj, &[0.5, 0.5]).unwrap();
        assert!(!report.passed, "statistic {}", report.statistic);
        assert!(report.statistic > report.critical_999 * 100.0);
    }

    #[test]
    fn law_of_large_numbers_across_seeds() {
        // max_r |α̂_r − α_r| below 4/√steps in at least 99 of 100 seeds.
        let alpha = [0.15, 0.25, 0.6];
        let steps = 10_000;
        let bound = 4.0 / (steps as f64).sqrt();
        let mut hits = 0;
        for seed in 0..100u64 {
            let cfg = BeatConfig::new(alpha.to_vec(), vec![-1.0, 0.0, 1.0], steps, seed);
            let traj = simulate(&cfg).unwrap();
            let max_dev = traj
                .empirical_frequencies()
                .iter()
                .zip(&alpha)
                .map(|(f, a)| (f - a).abs())
                .fold(0.0, f64::max);
            if max_dev < bound {
                hits += 1;
            }
        }
        assert!(hits >= 99, "only {hits}/100 seeds within bound");
    }

    #[test]
    fn invalid_alpha_rejected() {
        let bad_sum = BeatConfig::new(vec![0.5, 0.6], vec![0.0, 1.0], 10, 1);
        assert!(matches!(
            simulate(&bad_sum),
            Err(BeatError::InvalidAlpha { .. })
        ));
        let negative = BeatConfig::new(vec![1.5, -0.5], vec![0.0, 1.0], 10, 1);
        assert!(matches!(
            simulate(&negative),
            Err(BeatError::InvalidAlpha { .. })
        ));
    }
}
