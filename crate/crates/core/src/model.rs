//! Discretized two-subsystem interaction problem.
//!
//! A [`CoupledSystem`] is a block eigenproblem over `N_q` channels and an
//! `N_ξ`-point grid: a shared background operator `h_g` on the grid, per-channel
//! energies `ε_n`, and channel-coupling matrices `V(n, n′)`. Channel 0 is the
//! open (reference) channel; everything downstream of the reduction is phrased
//! relative to it.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Errors raised while constructing model objects.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("grid needs at least one point")]
    EmptyGrid,
    #[error("grid points must be strictly increasing (violation at index {index})")]
    GridNotIncreasing { index: usize },
    #[error("quadrature weight at index {index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("uniform grid requires min < max and at least 2 points")]
    BadUniformGrid,
    #[error("channel set needs at least one channel")]
    EmptyChannels,
    #[error("inconsistent dimensions: {context} (expected {expected}, got {got})")]
    InconsistentDimensions {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite parameter in {context}")]
    NonFiniteParameter { context: &'static str },
    #[error("open-channel index {index} out of range for {count} channels")]
    OpenChannelOutOfRange { index: usize, count: usize },
    #[error("coupling block ({row},{col}) specified more than once")]
    DuplicateCouplingBlock { row: usize, col: usize },
    #[error("coupling block ({row},{col}) needs exactly one of `diagonal` or `rows`")]
    AmbiguousCouplingBlock { row: usize, col: usize },
    #[error("system fails validation: {0}")]
    Invalid(Diagnostics),
}

/// One-dimensional quadrature grid for the ξ degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    points: Vec<f64>,
    weights: Vec<f64>,
    label: String,
}

impl GridSpec {
    /// Builds a grid from explicit points and weights.
    pub fn new(points: Vec<f64>, weights: Vec<f64>, label: impl Into<String>) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::EmptyGrid);
        }
        if weights.len() != points.len() {
            return Err(ModelError::InconsistentDimensions {
                context: "grid weights",
                expected: points.len(),
                got: weights.len(),
            });
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(ModelError::NonFiniteParameter { context: "grid points" });
        }
        for (i, pair) in points.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(ModelError::GridNotIncreasing { index: i + 1 });
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(ModelError::NonPositiveWeight { index: i, value: w });
            }
        }
        Ok(Self {
            points,
            weights,
            label: label.into(),
        })
    }

    /// Uniform grid on `[min, max]` with trapezoid weights.
    pub fn uniform(min: f64, max: f64, n: usize, label: impl Into<String>) -> Result<Self, ModelError> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(ModelError::NonFiniteParameter { context: "grid extent" });
        }
        if n < 2 || min >= max {
            return Err(ModelError::BadUniformGrid);
        }
        let step = (max - min) / (n - 1) as f64;
        let points = (0..n).map(|i| min + step * i as f64).collect();
        let mut weights = vec![step; n];
        weights[0] = 0.5 * step;
        weights[n - 1] = 0.5 * step;
        Self::new(points, weights, label)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Is the spacing uniform to within a relative tolerance?
    pub fn is_uniform(&self) -> bool {
        if self.points.len() < 3 {
            return true;
        }
        let h0 = self.points[1] - self.points[0];
        self.points
            .windows(2)
            .all(|p| ((p[1] - p[0]) - h0).abs() <= 1e-12 * h0.abs())
    }
}

/// Channel basis of the first subsystem: energies `ε_n` with channel 0 open.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    energies: Vec<f64>,
    labels: Vec<String>,
}

impl ChannelSet {
    pub fn new(energies: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self, ModelError> {
        if energies.is_empty() {
            return Err(ModelError::EmptyChannels);
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(ModelError::NonFiniteParameter { context: "channel energies" });
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != energies.len() {
                    return Err(ModelError::InconsistentDimensions {
                        context: "channel labels",
                        expected: energies.len(),
                        got: l.len(),
                    });
                }
                l
            }
            None => (0..energies.len()).map(|n| format!("ch{n}")).collect(),
        };
        Ok(Self { energies, labels })
    }

    pub fn count(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    /// Energy of channel `n` relative to the open channel: `ε_n − ε_0`.
    pub fn gap(&self, n: usize) -> f64 {
        self.energies[n] - self.energies[0]
    }

    /// Moves channel `index` to slot 0, carrying its label along.
    pub(crate) fn with_open_channel(mut self, index: usize) -> Result<Self, ModelError> {
        if index >= self.energies.len() {
            return Err(ModelError::OpenChannelOutOfRange {
                index,
                count: self.energies.len(),
            });
        }
        self.energies.swap(0, index);
        self.labels.swap(0, index);
        Ok(self)
    }
}

/// A named invariant violation found by [`CoupledSystem::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    GridNotIncreasing { index: usize },
    NonPositiveWeight { index: usize, value: f64 },
    BackgroundNotSquare { rows: usize, cols: usize, expected: usize },
    BackgroundAsymmetric { max_abs: f64 },
    CouplingDimension { n: usize, m: usize, rows: usize, cols: usize, expected: usize },
    CouplingAsymmetric { n: usize, m: usize, max_abs: f64 },
    NonFiniteEntry { context: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::GridNotIncreasing { index } => {
                write!(f, "grid ordering: point {index} does not increase")
            }
            Violation::NonPositiveWeight { index, value } => {
                write!(f, "quadrature weight {index} not positive ({value})")
            }
            Violation::BackgroundNotSquare { rows, cols, expected } => {
                write!(f, "background operator is {rows}x{cols}, expected {expected}x{expected}")
            }
            Violation::BackgroundAsymmetric { max_abs } => {
                write!(f, "background operator asymmetric (max |h - hᵀ| = {max_abs:e})")
            }
            Violation::CouplingDimension { n, m, rows, cols, expected } => {
                write!(f, "coupling V({n},{m}) is {rows}x{cols}, expected {expected}x{expected}")
            }
            Violation::CouplingAsymmetric { n, m, max_abs } => {
                write!(f, "coupling symmetry: V({n},{m}) != V({m},{n})ᵀ (max abs {max_abs:e})")
            }
            Violation::NonFiniteEntry { context } => write!(f, "non-finite entry in {context}"),
        }
    }
}

/// Validation report: `violations` is empty iff the system satisfies every
/// invariant. `warnings` carry legal-but-notable configurations (e.g. an
/// open-channel override that is not the lowest-energy channel).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            write!(f, "ok")
        } else {
            let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", lines.join("; "))
        }
    }
}

/// Discretized coupled problem. Immutable after construction; shared reads
/// from any number of workers are safe.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    grid: GridSpec,
    channels: ChannelSet,
    h_g: DMatrix<f64>,
    /// Row-major (n, m) -> V_{nm}, each N_ξ×N_ξ, with V(n,m) = V(m,n)ᵀ.
    couplings: Vec<DMatrix<f64>>,
}

impl CoupledSystem {
    /// Builds a system and rejects it unless all invariants hold exactly.
    pub fn new(
        grid: GridSpec,
        channels: ChannelSet,
        h_g: DMatrix<f64>,
        couplings: Vec<DMatrix<f64>>,
    ) -> Result<Self, ModelError> {
        let sys = Self::new_unchecked(grid, channels, h_g, couplings)?;
        let report = sys.validate();
        if report.is_clean() {
            Ok(sys)
        } else {
            Err(ModelError::Invalid(report))
        }
    }

    /// Builds without invariant checks, so that [`Self::validate`] can
    /// report on malformed inputs. Only the coupling-map shape is enforced.
    pub fn new_unchecked(
        grid: GridSpec,
        channels: ChannelSet,
        h_g: DMatrix<f64>,
        couplings: Vec<DMatrix<f64>>,
    ) -> Result<Self, ModelError> {
        let nq = channels.count();
        if couplings.len() != nq * nq {
            return Err(ModelError::InconsistentDimensions {
                context: "coupling map",
                expected: nq * nq,
                got: couplings.len(),
            });
        }
        Ok(Self {
            grid,
            channels,
            h_g,
            couplings,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn channels(&self) -> &ChannelSet {
        &self.channels
    }

    pub fn background(&self) -> &DMatrix<f64> {
        &self.h_g
    }

    /// Coupling matrix V(n, m).
    pub fn coupling(&self, n: usize, m: usize) -> &DMatrix<f64> {
        &self.couplings[n * self.channels.count() + m]
    }

    pub fn n_channels(&self) -> usize {
        self.channels.count()
    }

    pub fn n_points(&self) -> usize {
        self.grid.len()
    }

    /// Dimension of the full coupled problem, `N_q · N_ξ`.
    pub fn full_dim(&self) -> usize {
        self.n_channels() * self.n_points()
    }

    /// Dimension of the closed-channel block, `(N_q − 1) · N_ξ`.
    pub fn closed_dim(&self) -> usize {
        (self.n_channels() - 1) * self.n_points()
    }

    /// Checks every structural invariant and reports the violations.
    pub fn validate(&self) -> Diagnostics {
        let mut violations = Vec::new();
        let n_xi = self.grid.len();

        for (i, pair) in self.grid.points().windows(2).enumerate() {
            if pair[1] <= pair[0] {
                violations.push(Violation::GridNotIncreasing { index: i + 1 });
            }
        }
        for (i, &w) in self.grid.weights().iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                violations.push(Violation::NonPositiveWeight { index: i, value: w });
            }
        }

        if self.h_g.nrows() != n_xi || self.h_g.ncols() != n_xi {
            violations.push(Violation::BackgroundNotSquare {
                rows: self.h_g.nrows(),
                cols: self.h_g.ncols(),
                expected: n_xi,
            });
        } else {
            let asym = max_abs_diff(&self.h_g, &self.h_g.transpose());
            if asym > 0.0 {
                violations.push(Violation::BackgroundAsymmetric { max_abs: asym });
            }
            if self.h_g.iter().any(|x| !x.is_finite()) {
                violations.push(Violation::NonFiniteEntry {
                    context: "background operator".into(),
                });
            }
        }

        let nq = self.channels.count();
        for n in 0..nq {
            for m in 0..nq {
                let v = self.coupling(n, m);
                if v.nrows() != n_xi || v.ncols() != n_xi {
                    violations.push(Violation::CouplingDimension {
                        n,
                        m,
                        rows: v.nrows(),
                        cols: v.ncols(),
                        expected: n_xi,
                    });
                    continue;
                }
                if v.iter().any(|x| !x.is_finite()) {
                    violations.push(Violation::NonFiniteEntry {
                        context: format!("coupling V({n},{m})"),
                    });
                }
                // Check each unordered pair once.
                if n <= m {
                    let vt = self.coupling(m, n).transpose();
                    let asym = max_abs_diff(v, &vt);
                    if asym > 0.0 {
                        violations.push(Violation::CouplingAsymmetric { n, m, max_abs: asym });
                    }
                }
            }
        }

        let mut warnings = Vec::new();
        let e0 = self.channels.energy(0);
        let emin = self
            .channels
            .energies()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if e0 > emin {
            warnings.push(format!(
                "open channel energy {e0} exceeds minimum channel energy {emin}"
            ));
        }

        Diagnostics { violations, warnings }
    }

    /// Quadrature-weighted mass of a density table (channel-major layout).
    pub fn quadrature_mass(&self, density: &DVector<f64>) -> f64 {
        let n_xi = self.n_points();
        let w = self.grid.weights();
        density
            .iter()
            .enumerate()
            .map(|(idx, &d)| w[idx % n_xi] * d)
            .sum()
    }
}

/// Free-function form of [`CoupledSystem::validate`].
pub fn validate(system: &CoupledSystem) -> Diagnostics {
    system.validate()
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
