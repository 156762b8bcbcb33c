//! Realisation bookkeeping: grouping of roots, counting and projection
//! ("Born") probabilities, expectation density, the complexity measure, and
//! the chaos-regime taxonomy.

use nalgebra::DVector;
use thiserror::Error;

use crate::state::AssembledState;

#[derive(Debug, Error)]
pub enum RealisationError {
    #[error("no realisations to classify")]
    Empty,
    #[error("probabilities do not sum to 1 (got {sum})")]
    NotNormalized { sum: f64 },
    #[error("reference state is orthogonal to the entire solution set")]
    DegenerateReference,
    #[error("reference vector has dimension {got}, expected {expected}")]
    ReferenceDimension { expected: usize, got: usize },
}

/// How roots are grouped into realisations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupingPolicy {
    /// Every root is its own realisation (default).
    Elementary,
    /// Single-linkage merge of roots whose centroids lie within `delta`
    /// (in ξ units).
    Cluster { delta: f64 },
}

/// One actual (possibly combined) realisation.
#[derive(Debug, Clone)]
pub struct RealisationGroup {
    /// Indices into the root/state list, ascending.
    pub members: Vec<usize>,
    /// Member-count-weighted mean of the member centroids.
    pub centre: f64,
}

/// Partition of the root set with its probability lists.
#[derive(Debug, Clone)]
pub struct RealisationSet {
    groups: Vec<RealisationGroup>,
    /// Counting probabilities `α_r = N_r / N_ℜ`.
    pub alpha_counting: Vec<f64>,
    /// Projection probabilities, once attached.
    pub alpha_born: Option<Vec<f64>>,
    /// `ln` of the actual realisation count.
    pub complexity: f64,
}

impl RealisationSet {
    pub fn groups(&self) -> &[RealisationGroup] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// Total elementary realisation count.
    pub fn num_elementary(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }

    pub fn centres(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.centre).collect()
    }

    pub fn attach_born(&mut self, alpha: Vec<f64>) {
        assert_eq!(alpha.len(), self.groups.len());
        self.alpha_born = Some(alpha);
    }
}

/// Groups assembled states into realisations by localization centroid.
///
/// The partition depends only on the centroid values, so permuting the input
/// order permutes member indices but leaves the partition itself unchanged.
pub fn group_realisations(states: &[AssembledState], policy: GroupingPolicy) -> RealisationSet {
    let n = states.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        states[a]
            .centroid
            .total_cmp(&states[b].centroid)
            .then_with(|| states[a].eta.total_cmp(&states[b].eta))
    });

    let mut groups: Vec<Vec<usize>> = Vec::new();
    match policy {
        GroupingPolicy::Elementary => {
            for &i in &order {
                groups.push(vec![i]);
            }
        }
        GroupingPolicy::Cluster { delta } => {
            let mut current: Vec<usize> = Vec::new();
            let mut last_centroid = f64::NEG_INFINITY;
            for &i in &order {
                let c = states[i].centroid;
                if current.is_empty() || (c - last_centroid) <= delta {
                    current.push(i);
                } else {
                    groups.push(std::mem::take(&mut current));
                    current.push(i);
                }
                last_centroid = c;
            }
            if !current.is_empty() {
                groups.push(current);
            }
        }
    }

    let total = n as f64;
    let groups: Vec<RealisationGroup> = groups
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            let centre = members.iter().map(|&i| states[i].centroid).sum::<f64>()
                / members.len() as f64;
            RealisationGroup { members, centre }
        })
        .collect();
    let alpha_counting: Vec<f64> = groups
        .iter()
        .map(|g| g.members.len() as f64 / total)
        .collect();
    let complexity = complexity(groups.len());

    RealisationSet {
        groups,
        alpha_counting,
        alpha_born: None,
        complexity,
    }
}

/// Reference state for the projection probabilities.
///
/// The transient delocalized phase the projection stands in for has no
/// equation of its own here; only its role as the state the localized
/// realisations are projected against is modeled.
#[derive(Debug, Clone, Default)]
pub enum BornReference {
    /// Homogeneous case: every elementary root receives the same weight, so
    /// the projection probabilities coincide with the counting ones exactly.
    UniformWeights,
    /// Uniform unit vector over the full (channel, ξ) space (default).
    #[default]
    UniformVector,
    /// Uniform over the channel-0 grid, zero on closed channels.
    Channel0Uniform,
    /// Explicit full-space vector (need not be normalized).
    Custom(DVector<f64>),
}

/// Normalized projection coefficients, one per elementary root.
#[derive(Debug, Clone)]
pub struct ProjectionCoefficients {
    /// `c_i` with `Σ c_i² = 1`.
    pub per_root: Vec<f64>,
    /// Which reference state produced them.
    pub reference: String,
}

/// Projects every assembled state onto the reference and converts the
/// squared moduli into per-group probabilities.
pub fn born_probabilities(
    states: &[AssembledState],
    reference: &BornReference,
    set: &RealisationSet,
) -> Result<(ProjectionCoefficients, Vec<f64>), RealisationError> {
    if states.is_empty() {
        return Err(RealisationError::Empty);
    }
    let dim = states[0].components.len() * states[0].components[0].len();
    let n = states.len() as f64;

    let coefficients: Vec<f64> = match reference {
        BornReference::UniformWeights => vec![1.0 / n.sqrt(); states.len()],
        _ => {
            let reference_vec = match reference {
                BornReference::UniformVector => {
                    DVector::from_element(dim, 1.0 / (dim as f64).sqrt())
                }
                BornReference::Channel0Uniform => {
                    let n_xi = states[0].components[0].len();
                    let mut v = DVector::zeros(dim);
                    for i in 0..n_xi {
                        v[i] = 1.0 / (n_xi as f64).sqrt();
                    }
                    v
                }
                BornReference::Custom(v) => {
                    if v.len() != dim {
                        return Err(RealisationError::ReferenceDimension {
                            expected: dim,
                            got: v.len(),
                        });
                    }
                    let norm = v.norm();
                    if norm == 0.0 {
                        return Err(RealisationError::DegenerateReference);
                    }
                    v / norm
                }
                BornReference::UniformWeights => unreachable!(),
            };
            states
                .iter()
                .map(|s| s.full_vector().dot(&reference_vec))
                .collect()
        }
    };

    let total: f64 = coefficients.iter().map(|c| c * c).sum();
    if total <= 1e-24 {
        return Err(RealisationError::DegenerateReference);
    }

    let alpha: Vec<f64> = match reference {
        // Same arithmetic as the counting estimator, so the two agree
        // exactly in the homogeneous case.
        BornReference::UniformWeights => set
            .groups()
            .iter()
            .map(|g| g.members.len() as f64 / n)
            .collect(),
        _ => set
            .groups()
            .iter()
            .map(|g| g.members.iter().map(|&i| coefficients[i].powi(2)).sum::<f64>() / total)
            .collect(),
    };

    let scale = total.sqrt();
    let per_root = coefficients.iter().map(|c| c / scale).collect();
    let reference = match reference {
        BornReference::UniformWeights => "uniform-weights".to_string(),
        BornReference::UniformVector => "uniform-vector".to_string(),
        BornReference::Channel0Uniform => "channel0-uniform".to_string(),
        BornReference::Custom(_) => "custom".to_string(),
    };
    Ok((ProjectionCoefficients { per_root, reference }, alpha))
}

/// Expectation density over a long observation: `ρ_ex = Σ_r α_r ρ_r`, where
/// each group's density is the member-average.
pub fn expectation_density(
    set: &RealisationSet,
    states: &[AssembledState],
    alpha: &[f64],
) -> DVector<f64> {
    assert_eq!(alpha.len(), set.num_groups());
    let dim = states[0].full_density().len();
    let mut rho = DVector::zeros(dim);
    for (group, &a) in set.groups().iter().zip(alpha) {
        let share = a / group.members.len() as f64;
        for &i in &group.members {
            rho.axpy(share, &states[i].full_density(), 1.0);
        }
    }
    rho
}

/// Dynamic complexity: `ln` of the actual realisation count. Zero iff the
/// solution set is single-valued.
pub fn complexity(num_groups: usize) -> f64 {
    (num_groups.max(1) as f64).ln()
}

/// Regime taxonomy of the probability distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    UniformChaos,
    Soc,
    Intermediate,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::UniformChaos => write!(f, "uniform-chaos"),
            Regime::Soc => write!(f, "soc"),
            Regime::Intermediate => write!(f, "intermediate"),
        }
    }
}

/// Thresholds for [`classify_regime`]; configuration, not physics.
#[derive(Debug, Clone)]
pub struct RegimeThresholds {
    /// One realisation dominating at or above this α is SOC.
    pub soc_max_alpha: f64,
    /// Uniform chaos needs normalized entropy at least this.
    pub uniform_entropy_min: f64,
    /// ... and max α within this factor of the uniform value `1/N`.
    pub uniform_max_alpha_factor: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            soc_max_alpha: 0.5,
            uniform_entropy_min: 0.9,
            uniform_max_alpha_factor: 1.1,
        }
    }
}

/// Classifies the α distribution. Scale-free: depends only on the
/// distribution itself. A single realisation counts as SOC (one group holds
/// all the probability).
pub fn classify_regime(
    alpha: &[f64],
    thresholds: &RegimeThresholds,
) -> Result<Regime, RealisationError> {
    if alpha.is_empty() {
        return Err(RealisationError::Empty);
    }
    let sum: f64 = alpha.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(RealisationError::NotNormalized { sum });
    }
    let n = alpha.len() as f64;
    let max = alpha.iter().cloned().fold(0.0, f64::max);

    if alpha.len() > 1 {
        let entropy: f64 = alpha
            .iter()
            .filter(|&&a| a > 0.0)
            .map(|&a| -a * a.ln())
            .sum();
        let normalized = entropy / n.ln();
        if normalized >= thresholds.uniform_entropy_min
            && max <= thresholds.uniform_max_alpha_factor / n
        {
            return Ok(Regime::UniformChaos);
        }
    }
    if max >= thresholds.soc_max_alpha {
        return Ok(Regime::Soc);
    }
    Ok(Regime::Intermediate)
}
