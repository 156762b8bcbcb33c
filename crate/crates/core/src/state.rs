//! Per-root state assembly: closed-channel components from the channel-0
//! eigenvector, the full state table, and the normalized density.

use nalgebra::DVector;

use crate::ep::{EpError, RootKind, RootRecord, SolverParams};
use crate::model::CoupledSystem;
use crate::spectral::{fix_sign, TruncatedSpectrum};

/// Fully reconstructed state for one root: channel components `ψ_n`, the
/// density table `ρ(n, ξ)` with unit quadrature mass, its ξ-marginal, and the
/// localization centroid.
#[derive(Debug, Clone)]
pub struct AssembledState {
    pub eta: f64,
    /// `ψ_n` per channel; the stacked full vector has unit 2-norm.
    pub components: Vec<DVector<f64>>,
    /// `ρ(n, ·)`, normalized so the quadrature-weighted total mass is 1.
    pub density: Vec<DVector<f64>>,
    /// `Σ_n ρ(n, ·)`.
    pub xi_marginal: DVector<f64>,
    /// Quadrature mean of ξ under the marginal density.
    pub centroid: f64,
}

impl AssembledState {
    /// Stacked (channel-major) state vector, unit 2-norm.
    pub fn full_vector(&self) -> DVector<f64> {
        let n_xi = self.components[0].len();
        let mut v = DVector::zeros(self.components.len() * n_xi);
        for (n, c) in self.components.iter().enumerate() {
            v.rows_mut(n * n_xi, n_xi).copy_from(c);
        }
        v
    }

    /// Stacked density table, channel-major.
    pub fn full_density(&self) -> DVector<f64> {
        let n_xi = self.density[0].len();
        let mut v = DVector::zeros(self.density.len() * n_xi);
        for (n, c) in self.density.iter().enumerate() {
            v.rows_mut(n * n_xi, n_xi).copy_from(c);
        }
        v
    }
}

/// Reconstructs the closed-channel components of a root by resolvent
/// back-substitution through the truncated modes:
/// `ψ_closed = Σ_k φ_k · (u_kᵀ ψ_0) / (η − p_k)`.
pub fn assemble_state(
    system: &CoupledSystem,
    truncated: &TruncatedSpectrum,
    root: &RootRecord,
    params: &SolverParams,
) -> Result<AssembledState, EpError> {
    let nq = system.n_channels();
    let n_xi = system.n_points();

    let mut full = DVector::zeros(nq * n_xi);
    match root.kind {
        RootKind::DecoupledMode { mode } => {
            let mode = &truncated.modes()[mode];
            full.rows_mut(n_xi, (nq - 1) * n_xi).copy_from(&mode.vector);
        }
        RootKind::Branch { .. } => {
            full.rows_mut(0, n_xi).copy_from(&root.psi0);

            // Residues recomputed per mode (exact, not the merged groups).
            let residues: Vec<DVector<f64>> = truncated
                .modes()
                .iter()
                .map(|mode| {
                    let mut u = DVector::zeros(n_xi);
                    for n in 1..nq {
                        u += system.coupling(0, n) * truncated.channel_slice(mode, n);
                    }
                    u
                })
                .collect();
            let max_norm = residues.iter().map(|u| u.norm()).fold(0.0, f64::max);
            let drop_threshold = params.residue_drop_tol * max_norm.max(1.0);

            // A root that sits inside the guard zone of a live pole cannot
            // be normalized; guard length mirrors the EP's span convention.
            let pole_span = {
                let (lo, hi) = truncated.modes().iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), m| (lo.min(m.pole()), hi.max(m.pole())),
                );
                (hi - lo).max(1.0)
            };
            let guard = params.pole_guard_factor * pole_span;

            for (mode, u) in truncated.modes().iter().zip(&residues) {
                if u.norm() <= drop_threshold {
                    continue;
                }
                let denom = root.eta - mode.pole();
                if denom.abs() < guard {
                    return Err(EpError::StateAtPole {
                        eta: root.eta,
                        pole: mode.pole(),
                    });
                }
                let gamma = u.dot(&root.psi0) / denom;
                let mut closed = full.rows_mut(n_xi, (nq - 1) * n_xi);
                closed.axpy(gamma, &mode.vector, 1.0);
            }
        }
    }

    let norm = full.norm();
    if norm == 0.0 {
        return Err(EpError::BracketingFailure {
            context: "assembled state is identically zero",
        });
    }
    full /= norm;
    fix_sign(&mut full);

    let weights = system.grid().weights();
    let mut components = Vec::with_capacity(nq);
    for n in 0..nq {
        components.push(full.rows(n * n_xi, n_xi).clone_owned());
    }

    // Density normalized to unit quadrature mass.
    let mut mass = 0.0;
    for c in &components {
        for (j, &v) in c.iter().enumerate() {
            mass += weights[j] * v * v;
        }
    }
    let density: Vec<DVector<f64>> = components
        .iter()
        .map(|c| c.map(|v| v * v / mass))
        .collect();
    let mut xi_marginal = DVector::zeros(n_xi);
    for d in &density {
        xi_marginal += d;
    }
    let centroid = system
        .grid()
        .points()
        .iter()
        .zip(xi_marginal.iter())
        .zip(weights.iter())
        .map(|((&xi, &rho), &w)| w * xi * rho)
        .sum();

    Ok(AssembledState {
        eta: root.eta,
        components,
        density,
        xi_marginal,
        centroid,
    })
}
