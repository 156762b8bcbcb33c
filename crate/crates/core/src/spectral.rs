//! Exact dense linear algebra behind the reduction.
//!
//! Two solvers live here: the closed-channel ("truncated") block whose
//! eigenpairs supply the pole data of the effective potential, and the full
//! coupled problem, kept as the brute-force oracle every reduction result is
//! checked against.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::model::CoupledSystem;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("truncation needs at least two channels (got {got})")]
    NoClosedChannels { got: usize },
}

/// Eigendecomposition sorted ascending, with the sign convention that the
/// first component of each vector exceeding `1e-12 · ‖v‖∞` is positive.
pub(crate) fn sym_eigen_sorted(matrix: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = matrix.nrows();
    let eig = matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        fix_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// Flips the vector so its first non-negligible component is positive.
pub(crate) fn fix_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if scale == 0.0 {
        return;
    }
    let threshold = 1e-12 * scale;
    if let Some(first) = v.iter().find(|x| x.abs() > threshold) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Assembles the complete `(N_q·N_ξ)`-dimensional block matrix with
/// `h_g + V_nn + ε_n·I` on the diagonal and `V_nm` off the diagonal.
pub fn assemble_full_matrix(system: &CoupledSystem) -> DMatrix<f64> {
    let nq = system.n_channels();
    let n_xi = system.n_points();
    let dim = nq * n_xi;
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..nq {
        for m in 0..nq {
            let mut block = system.coupling(n, m).clone();
            if n == m {
                block += system.background();
                for i in 0..n_xi {
                    block[(i, i)] += system.channels().energy(n);
                }
            }
            h.view_mut((n * n_xi, m * n_xi), (n_xi, n_xi)).copy_from(&block);
        }
    }
    h
}

/// Assembles the closed-channel block (channels `n ≥ 1`, channel 0 removed
/// entirely) in the η convention: diagonal blocks `h_g + V_nn + (ε_n − ε_0)·I`,
/// off-diagonal `V_nm`.
pub fn assemble_closed_block(system: &CoupledSystem) -> DMatrix<f64> {
    let nq = system.n_channels();
    let n_xi = system.n_points();
    let dim = (nq - 1) * n_xi;
    let mut h = DMatrix::zeros(dim, dim);
    for n in 1..nq {
        for m in 1..nq {
            let mut block = system.coupling(n, m).clone();
            if n == m {
                block += system.background();
                for i in 0..n_xi {
                    block[(i, i)] += system.channels().gap(n);
                }
            }
            h.view_mut(((n - 1) * n_xi, (m - 1) * n_xi), (n_xi, n_xi))
                .copy_from(&block);
        }
    }
    h
}

/// One eigenmode of the closed-channel block.
///
/// `block_eigenvalue` is the eigenvalue of the assembled closed block in the
/// η convention; it is exactly the pole this mode contributes to the
/// effective potential. `eta0()` reports the same mode relative to its
/// dominant channel's shift, so `eta0 + shift` recovers the pole.
#[derive(Debug, Clone)]
pub struct TruncatedMode {
    block_eigenvalue: f64,
    /// Dominant channel index (1-based among all channels).
    pub channel: usize,
    /// `ε_n − ε_0` of the dominant channel.
    pub shift: f64,
    /// Unit eigenvector on the closed product space, channel-major.
    pub vector: DVector<f64>,
}

impl TruncatedMode {
    /// Pole location contributed to the effective potential.
    pub fn pole(&self) -> f64 {
        self.block_eigenvalue
    }

    /// Mode eigenvalue with the dominant-channel shift removed.
    pub fn eta0(&self) -> f64 {
        self.block_eigenvalue - self.shift
    }
}

/// Eigenpairs of the closed-channel block, sorted ascending.
#[derive(Debug, Clone)]
pub struct TruncatedSpectrum {
    modes: Vec<TruncatedMode>,
    n_points: usize,
    n_closed: usize,
}

impl TruncatedSpectrum {
    pub fn modes(&self) -> &[TruncatedMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_closed_channels(&self) -> usize {
        self.n_closed
    }

    /// Channel-`n` slice of a mode vector (`n` counted among all channels,
    /// so `n ≥ 1`).
    pub fn channel_slice<'a>(&self, mode: &'a TruncatedMode, n: usize) -> nalgebra::DVectorView<'a, f64> {
        mode.vector.rows((n - 1) * self.n_points, self.n_points)
    }
}

/// Diagonalizes the closed-channel block.
pub fn solve_truncated(system: &CoupledSystem) -> Result<TruncatedSpectrum, SpectralError> {
    let nq = system.n_channels();
    if nq < 2 {
        return Err(SpectralError::NoClosedChannels { got: nq });
    }
    let n_xi = system.n_points();
    let block = assemble_closed_block(system);
    let (values, vectors) = sym_eigen_sorted(&block);
    let modes = values
        .iter()
        .zip(vectors.column_iter())
        .map(|(&val, col)| {
            let vector = col.clone_owned();
            // Dominant channel: largest squared norm of the per-channel slice.
            let mut channel = 1;
            let mut best = f64::NEG_INFINITY;
            for n in 1..nq {
                let norm2 = vector.rows((n - 1) * n_xi, n_xi).norm_squared();
                if norm2 > best + 1e-15 {
                    best = norm2;
                    channel = n;
                }
            }
            TruncatedMode {
                block_eigenvalue: val,
                channel,
                shift: system.channels().gap(channel),
                vector,
            }
        })
        .collect();
    Ok(TruncatedSpectrum {
        modes,
        n_points: n_xi,
        n_closed: nq - 1,
    })
}

/// Full spectrum of the coupled problem: the oracle side of every reduction
/// check.
#[derive(Debug, Clone)]
pub struct FullSpectrum {
    eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, channel-major rows.
    eigenvectors: DMatrix<f64>,
    residuals: Vec<f64>,
    n_channels: usize,
    n_points: usize,
}

impl FullSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> nalgebra::DVectorView<'_, f64> {
        self.eigenvectors.column(j)
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Channel-`n` component of eigenvector `j`.
    pub fn channel_component(&self, j: usize, n: usize) -> DVector<f64> {
        self.eigenvectors
            .column(j)
            .rows(n * self.n_points, self.n_points)
            .clone_owned()
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }
}

/// Dense diagonalization of the full coupled problem.
pub fn solve_full(system: &CoupledSystem) -> FullSpectrum {
    let h = assemble_full_matrix(system);
    let (eigenvalues, eigenvectors) = sym_eigen_sorted(&h);
    let residuals = eigenvalues
        .iter()
        .zip(eigenvectors.column_iter())
        .map(|(&val, v)| (&h * v - val * v).norm())
        .collect();
    FullSpectrum {
        eigenvalues,
        eigenvectors,
        residuals,
        n_channels: system.n_channels(),
        n_points: system.n_points(),
    }
}
