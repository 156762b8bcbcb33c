//! Causal kinematics chain for a massive particle: rest/motion energies,
//! time measures, frequencies, and the de Broglie quantities, with every
//! internal identity held to 1e-12 relative.
//!
//! All quantities are SI by convention; no units library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("rest mass must be positive (got {0})")]
    NonPositiveMass(f64),
    #[error("speed must be non-negative (got {0})")]
    NegativeSpeed(f64),
    #[error("speed {v} at or beyond the supported range (β must be ≤ 1 − 1e-12)")]
    SuperluminalSpeed { v: f64 },
    #[error("wavelength undefined at v = 0")]
    ZeroSpeed,
}

/// Planck constant and speed of light. Defaults are the exact SI values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// J·s
    pub h: f64,
    /// m/s
    pub c: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            h: 6.626_070_15e-34,
            c: 2.997_924_58e8,
        }
    }
}

/// CODATA electron rest mass, kg. Kept here for the reference checks.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Largest admissible β; inputs beyond it are rejected, not clamped, to keep
/// `√(1 − β²)` away from catastrophic cancellation.
pub const BETA_CAP: f64 = 1.0 - 1e-12;

/// Complete derived state of a particle of rest mass `m0` moving at `v`.
///
/// `lambda_b` and `lambda_b0` are absent at rest: with no global tendency in
/// the underlying wandering there is no spatial period to report, so the rest
/// state carries no wavelength rather than an infinite one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicState {
    pub m0: f64,
    pub v: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Rest energy `m0 c²`.
    pub e0: f64,
    /// Total energy `γ m0 c²`.
    pub e: f64,
    /// Relativistic mass `E/c²`.
    pub m: f64,
    /// Momentum `E v / c²`.
    pub p: f64,
    /// Rest internal frequency `E0/h`.
    pub nu0: f64,
    /// Fixed-point frequency `γ ν0`.
    pub nu: f64,
    /// Whole-cycle frequency `ν0/γ`.
    pub n_freq: f64,
    /// Rest period `1/ν0`.
    pub tau0: f64,
    /// Whole-cycle period `γ τ0`.
    pub t_period: f64,
    /// Fixed-point period `τ0/γ`.
    pub tau: f64,
    /// de Broglie wavelength `h/p`; absent at rest.
    pub lambda_b: Option<f64>,
    /// Rest-mass wavelength `h/(m0 v)`; absent at rest.
    pub lambda_b0: Option<f64>,
    /// de Broglie frequency `p v / h` (0 at rest).
    pub nu_b: f64,
    /// `m0 v²/h` (0 at rest).
    pub nu_b0: f64,
}

/// Derives the full kinematic state from `(m0, v)`.
pub fn derive(m0: f64, v: f64, constants: &Constants) -> Result<KinematicState, KinematicsError> {
    if !(m0.is_finite() && m0 > 0.0) {
        return Err(KinematicsError::NonPositiveMass(m0));
    }
    if !(v.is_finite() && v >= 0.0) {
        return Err(KinematicsError::NegativeSpeed(v));
    }
    let beta = v / constants.c;
    if beta > BETA_CAP {
        return Err(KinematicsError::SuperluminalSpeed { v });
    }
    let gamma = 1.0 / (1.0 - beta * beta).sqrt();
    let c2 = constants.c * constants.c;
    let e0 = m0 * c2;
    let e = gamma * e0;
    let m = e / c2;
    let p = e * v / c2;
    let nu0 = e0 / constants.h;
    let nu = gamma * nu0;
    let n_freq = nu0 / gamma;
    let tau0 = 1.0 / nu0;
    let t_period = gamma * tau0;
    let tau = tau0 / gamma;
    let (lambda_b, lambda_b0) = if v > 0.0 {
        (Some(constants.h / p), Some(constants.h / (m0 * v)))
    } else {
        (None, None)
    };
    let nu_b = p * v / constants.h;
    let nu_b0 = m0 * v * v / constants.h;
    Ok(KinematicState {
        m0,
        v,
        beta,
        gamma,
        e0,
        e,
        m,
        p,
        nu0,
        nu,
        n_freq,
        tau0,
        t_period,
        tau,
        lambda_b,
        lambda_b0,
        nu_b,
        nu_b0,
    })
}

/// Splits the total energy into the rest-linked term `h ν0 √(1 − β²)` and
/// the motion term `h ν_B`; the two sum to `E`.
pub fn energy_partition(state: &KinematicState) -> (f64, f64) {
    (state.e0 / state.gamma, state.p * state.v)
}

/// Canonical wavelength `λ = h/(m v)` for a (relativistic) mass `m`.
pub fn de_broglie_wavelength(m: f64, v: f64, constants: &Constants) -> Result<f64, KinematicsError> {
    if !(m.is_finite() && m > 0.0) {
        return Err(KinematicsError::NonPositiveMass(m));
    }
    if v == 0.0 {
        return Err(KinematicsError::ZeroSpeed);
    }
    if !(v.is_finite() && v > 0.0) {
        return Err(KinematicsError::NegativeSpeed(v));
    }
    Ok(constants.h / (m * v))
}

/// Relative residuals of the internal identities; all should sit at the
/// 1e-12 level for β below the cap.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResiduals {
    /// `E² − (pc)² − (m0 c²)²`, relative to `E²`.
    pub dispersion: f64,
    /// Partition sum vs `E`.
    pub partition: f64,
    /// `T·τ − τ0²`, relative.
    pub time_product: f64,
    /// `N·ν − ν0²`, relative.
    pub frequency_product: f64,
    /// `τ − T(1 − β²)`, relative to `τ0`.
    pub tau_relation: f64,
    /// `E − (hN + pv)`, relative to `E`.
    pub energy_sum: f64,
    /// `ν_B − ν β²`, relative to `ν0`.
    pub freq_chain_moving: f64,
    /// `ν_B0 − ν0 β²`, relative to `ν0`.
    pub freq_chain_rest: f64,
}

impl IdentityResiduals {
    pub fn max_abs(&self) -> f64 {
        [
            self.dispersion,
            self.partition,
            self.time_product,
            self.frequency_product,
            self.tau_relation,
            self.energy_sum,
            self.freq_chain_moving,
            self.freq_chain_rest,
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }
}

pub fn identity_residuals(state: &KinematicState, constants: &Constants) -> IdentityResiduals {
    let e2 = state.e * state.e;
    let dispersion = (e2 - (state.p * constants.c).powi(2) - state.e0 * state.e0) / e2;
    let (rest_term, motion_term) = energy_partition(state);
    let partition = (rest_term + motion_term - state.e) / state.e;
    let tau0_sq = state.tau0 * state.tau0;
    let time_product = (state.t_period * state.tau - tau0_sq) / tau0_sq;
    let nu0_sq = state.nu0 * state.nu0;
    let frequency_product = (state.n_freq * state.nu - nu0_sq) / nu0_sq;
    let tau_relation =
        (state.tau - state.t_period * (1.0 - state.beta * state.beta)) / state.tau0;
    let energy_sum =
        (state.e - (constants.h * state.n_freq + state.p * state.v)) / state.e;
    let freq_chain_moving = (state.nu_b - state.nu * state.beta * state.beta) / state.nu0;
    let freq_chain_rest = (state.nu_b0 - state.nu0 * state.beta * state.beta) / state.nu0;
    IdentityResiduals {
        dispersion,
        partition,
        time_product,
        frequency_product,
        tau_relation,
        energy_sum,
        freq_chain_moving,
        freq_chain_rest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const C: Constants = Constants {
        h: 6.626_070_15e-34,
        c: 2.997_924_58e8,
    };

    #[test]
    fn electron_rest_frequency() {
        let state = derive(ELECTRON_MASS, 0.0, &C).unwrap();
        // m0 c²/h for the electron: ~1.2356e20 Hz.
        assert_relative_eq!(state.nu0, 1.2356e20, max_relative = 1e-3);
        assert!(state.nu0.log10() >= 20.0 && state.nu0.log10() < 20.2);
        assert_eq!(state.lambda_b, None);
        assert_eq!(state.lambda_b0, None);
        assert_eq!(state.nu_b, 0.0);
        let (rest, motion) = energy_partition(&state);
        assert_eq!(rest, state.e0);
        assert_eq!(motion, 0.0);
    }

    #[test]
    fn beta_point_six_time_measures() {
        let v = 0.6 * C.c;
        let state = derive(1.0, v, &C).unwrap();
        assert_relative_eq!(state.gamma, 1.25, max_relative = 1e-14);
        assert_relative_eq!(state.tau, 0.8 * state.tau0, max_relative = 1e-14);
        assert_relative_eq!(state.t_period, 1.25 * state.tau0, max_relative = 1e-14);
        assert_relative_eq!(
            state.t_period * state.tau,
            state.tau0 * state.tau0,
            max_relative = 1e-14
        );
        // Partition terms (0.8, 0.45)·h ν0, summing to 1.25 h ν0.
        let (rest, motion) = energy_partition(&state);
        let h_nu0 = C.h * state.nu0;
        assert_relative_eq!(rest, 0.8 * h_nu0, max_relative = 1e-12);
        assert_relative_eq!(motion, 0.45 * h_nu0, max_relative = 1e-12);
        assert_relative_eq!(rest + motion, state.e, max_relative = 1e-12);
    }

    #[test]
    fn electron_wavelength_at_1e6() {
        let state = derive(ELECTRON_MASS, 1e6, &C).unwrap();
        let lambda = state.lambda_b.unwrap();
        assert_relative_eq!(lambda, 7.2739e-10, max_relative = 1e-4);
        // γ correction is ~5.6e-6 relative to h/(m0 v).
        let lambda0 = state.lambda_b0.unwrap();
        let correction = (lambda0 - lambda) / lambda0;
        assert_relative_eq!(correction, 5.563e-6, max_relative = 1e-2);
    }

    #[test]
    fn wavelength_inverse_proportionality_and_momentum_route() {
        let a = de_broglie_wavelength(ELECTRON_MASS, 1e6, &C).unwrap();
        let b = de_broglie_wavelength(ELECTRON_MASS, 2e6, &C).unwrap();
        assert_relative_eq!(a / b, 2.0, max_relative = 1e-14);

        // h/p with p = Ev/c² equals h/(mv) since m = E/c².
        let state = derive(ELECTRON_MASS, 3e6, &C).unwrap();
        let via_p = C.h / state.p;
        let via_m = de_broglie_wavelength(state.m, state.v, &C).unwrap();
        assert_relative_eq!(via_p, via_m, max_relative = 1e-15);
    }

    #[test]
    fn identities_hold_across_beta_sweep() {
        for i in 0..1000 {
            let beta = 0.01 + (0.999 - 0.01) * i as f64 / 999.0;
            let state = derive(ELECTRON_MASS, beta * C.c, &C).unwrap();
            let residuals = identity_residuals(&state, &C);
            assert!(
                residuals.max_abs() <= 1e-12,
                "β = {beta}: max residual {}",
                residuals.max_abs()
            );
        }
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(matches!(
            derive(0.0, 1.0, &C),
            Err(KinematicsError::NonPositiveMass(_))
        ));
        assert!(matches!(
            derive(1.0, -1.0, &C),
            Err(KinematicsError::NegativeSpeed(_))
        ));
        assert!(matches!(
            derive(1.0, C.c, &C),
            Err(KinematicsError::SuperluminalSpeed { .. })
        ));
        // just beyond the β cap is rejected, not clamped
        let v = C.c * (1.0 - 1e-13);
        assert!(matches!(
            derive(1.0, v, &C),
            Err(KinematicsError::SuperluminalSpeed { .. })
        ));
        assert!(matches!(
            de_broglie_wavelength(1.0, 0.0, &C),
            Err(KinematicsError::ZeroSpeed)
        ));
    }
}
