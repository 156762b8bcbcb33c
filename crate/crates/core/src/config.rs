//! Declarative system description and its translation into a [`CoupledSystem`].
//!
//! A [`SystemConfig`] is read from a single TOML file. Separable kernels put
//! `V_{nm}(ξ_k) = g · f_n · f_m · w(ξ_k)` on the grid diagonal; explicit tables
//! map through unchanged. The transpose partner of every block is filled in so
//! coupling symmetry holds exactly by construction.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::model::{ChannelSet, CoupledSystem, GridSpec, ModelError};

/// Grid description: explicit `points` (with optional `weights`) or a
/// uniform `{min, max, n}` extent with trapezoid weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub points: Option<Vec<f64>>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub label: Option<String>,
}

impl GridConfig {
    pub fn to_grid(&self) -> Result<GridSpec, ModelError> {
        let label = self.label.clone().unwrap_or_else(|| "grid".to_string());
        match (&self.points, self.min, self.max, self.n) {
            (Some(points), None, None, None) => {
                let weights = self
                    .weights
                    .clone()
                    .unwrap_or_else(|| vec![1.0; points.len()]);
                GridSpec::new(points.clone(), weights, label)
            }
            (None, Some(min), Some(max), Some(n)) => GridSpec::uniform(min, max, n, label),
            _ => Err(ModelError::BadUniformGrid),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub energies: Vec<f64>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    /// Which configured channel plays the open role (moved to slot 0).
    /// Defaults to the lowest-energy channel.
    #[serde(default)]
    pub open_channel: Option<usize>,
}

/// Background operator `h_g` on the grid.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BackgroundConfig {
    #[default]
    Zero,
    Diagonal {
        values: Vec<f64>,
    },
    /// Three-point finite-difference kinetic term `-c · d²/dξ²` on a uniform
    /// grid with vanishing boundary values.
    Laplacian {
        coefficient: f64,
    },
    Table {
        rows: Vec<Vec<f64>>,
    },
}

/// One explicit coupling block for the `table` kernel. Provide each unordered
/// channel pair at most once; the transpose partner is derived.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingBlock {
    pub row: usize,
    pub col: usize,
    #[serde(default)]
    pub diagonal: Option<Vec<f64>>,
    #[serde(default)]
    pub rows: Option<Vec<Vec<f64>>>,
}

/// Coupling kernel catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CouplingConfig {
    /// `w(ξ) = exp(−(ξ − center)² / (2 width²))`
    Gaussian {
        strength: f64,
        factors: Vec<f64>,
        #[serde(default)]
        center: f64,
        width: f64,
    },
    /// `w(ξ) = 1` for `|ξ − center| ≤ half_width`, else 0.
    Box {
        strength: f64,
        factors: Vec<f64>,
        #[serde(default)]
        center: f64,
        half_width: f64,
    },
    Table {
        #[serde(default)]
        blocks: Vec<CouplingBlock>,
    },
}

impl CouplingConfig {
    /// Separable profile value at ξ, when the kernel is separable.
    pub fn profile(&self, xi: f64) -> Option<f64> {
        match self {
            CouplingConfig::Gaussian { center, width, .. } => {
                let t = (xi - center) / width;
                Some((-0.5 * t * t).exp())
            }
            CouplingConfig::Box {
                center, half_width, ..
            } => Some(if (xi - center).abs() <= *half_width { 1.0 } else { 0.0 }),
            CouplingConfig::Table { .. } => None,
        }
    }
}

/// Complete declarative description of a coupled system.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub grid: GridConfig,
    pub channels: ChannelConfig,
    #[serde(default)]
    pub background: BackgroundConfig,
    pub coupling: CouplingConfig,
}

impl SystemConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Builds the discretized system described by `config`.
pub fn build_system(config: &SystemConfig) -> Result<CoupledSystem, ModelError> {
    let grid = config.grid.to_grid()?;
    let n_xi = grid.len();

    let mut channels = ChannelSet::new(config.channels.energies.clone(), config.channels.labels.clone())?;
    let open = match config.channels.open_channel {
        Some(idx) => idx,
        None => {
            let mut best = 0;
            for (i, &e) in channels.energies().iter().enumerate() {
                if e < channels.energy(best) {
                    best = i;
                }
            }
            best
        }
    };
    channels = channels.with_open_channel(open)?;
    let nq = channels.count();

    let h_g = build_background(&config.background, &grid)?;
    // Couplings are assembled against the post-swap channel order, so the
    // configured per-channel data has to follow the same permutation.
    let perm: Vec<usize> = {
        let mut p: Vec<usize> = (0..nq).collect();
        p.swap(0, open);
        p
    };

    let couplings = match &config.coupling {
        CouplingConfig::Gaussian { strength, factors, .. }
        | CouplingConfig::Box { strength, factors, .. } => {
            if factors.len() != nq {
                return Err(ModelError::InconsistentDimensions {
                    context: "coupling factors",
                    expected: nq,
                    got: factors.len(),
                });
            }
            if !strength.is_finite() || factors.iter().any(|f| !f.is_finite()) {
                return Err(ModelError::NonFiniteParameter { context: "coupling kernel" });
            }
            let profile: Vec<f64> = grid
                .points()
                .iter()
                .map(|&xi| config.coupling.profile(xi).expect("separable kernel"))
                .collect();
            if profile.iter().any(|p| !p.is_finite()) {
                return Err(ModelError::NonFiniteParameter { context: "coupling profile" });
            }
            let mut couplings = Vec::with_capacity(nq * nq);
            for n in 0..nq {
                for m in 0..nq {
                    let fn_ = factors[perm[n]];
                    let fm = factors[perm[m]];
                    let diag: Vec<f64> = profile.iter().map(|&w| strength * fn_ * fm * w).collect();
                    couplings.push(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)));
                }
            }
            couplings
        }
        CouplingConfig::Table { blocks } => {
            let mut couplings = vec![DMatrix::zeros(n_xi, n_xi); nq * nq];
            let mut seen = vec![false; nq * nq];
            for block in blocks {
                if block.row >= nq || block.col >= nq {
                    return Err(ModelError::InconsistentDimensions {
                        context: "coupling block index",
                        expected: nq,
                        got: block.row.max(block.col),
                    });
                }
                let m = table_block_matrix(block, n_xi)?;
                // Map configured indices through the open-channel swap.
                let (r, c) = (position(&perm, block.row), position(&perm, block.col));
                let (lo, hi) = (r.min(c), r.max(c));
                if seen[lo * nq + hi] {
                    return Err(ModelError::DuplicateCouplingBlock {
                        row: block.row,
                        col: block.col,
                    });
                }
                seen[lo * nq + hi] = true;
                couplings[c * nq + r] = m.transpose();
                couplings[r * nq + c] = m;
            }
            couplings
        }
    };

    CoupledSystem::new(grid, channels, h_g, couplings)
}

fn position(perm: &[usize], configured: usize) -> usize {
    perm.iter().position(|&p| p == configured).expect("swap permutation")
}

fn build_background(cfg: &BackgroundConfig, grid: &GridSpec) -> Result<DMatrix<f64>, ModelError> {
    let n = grid.len();
    match cfg {
        BackgroundConfig::Zero => Ok(DMatrix::zeros(n, n)),
        BackgroundConfig::Diagonal { values } => {
            if values.len() != n {
                return Err(ModelError::InconsistentDimensions {
                    context: "background diagonal",
                    expected: n,
                    got: values.len(),
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(ModelError::NonFiniteParameter { context: "background diagonal" });
            }
            Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(values.clone())))
        }
        BackgroundConfig::Laplacian { coefficient } => {
            if !coefficient.is_finite() {
                return Err(ModelError::NonFiniteParameter { context: "laplacian coefficient" });
            }
            if !grid.is_uniform() || n < 2 {
                return Err(ModelError::BadUniformGrid);
            }
            let h = grid.points()[1] - grid.points()[0];
            let inv_h2 = 1.0 / (h * h);
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = 2.0 * coefficient * inv_h2;
                if i + 1 < n {
                    m[(i, i + 1)] = -coefficient * inv_h2;
                    m[(i + 1, i)] = -coefficient * inv_h2;
                }
            }
            Ok(m)
        }
        BackgroundConfig::Table { rows } => {
            let m = rows_to_matrix(rows, n, "background table")?;
            Ok(m)
        }
    }
}

fn table_block_matrix(block: &CouplingBlock, n_xi: usize) -> Result<DMatrix<f64>, ModelError> {
    match (&block.diagonal, &block.rows) {
        (Some(diag), None) => {
            if diag.len() != n_xi {
                return Err(ModelError::InconsistentDimensions {
                    context: "coupling block diagonal",
                    expected: n_xi,
                    got: diag.len(),
                });
            }
            if diag.iter().any(|v| !v.is_finite()) {
                return Err(ModelError::NonFiniteParameter { context: "coupling block" });
            }
            Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag.clone())))
        }
        (None, Some(rows)) => rows_to_matrix(rows, n_xi, "coupling block"),
        _ => Err(ModelError::AmbiguousCouplingBlock {
            row: block.row,
            col: block.col,
        }),
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], n: usize, context: &'static str) -> Result<DMatrix<f64>, ModelError> {
    if rows.len() != n {
        return Err(ModelError::InconsistentDimensions {
            context,
            expected: n,
            got: rows.len(),
        });
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::InconsistentDimensions {
                context,
                expected: n,
                got: row.len(),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFiniteParameter { context });
            }
            m[(i, j)] = v;
        }
    }
    Ok(m)
}
