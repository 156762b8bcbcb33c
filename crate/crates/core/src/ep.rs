//! Eigenvalue-dependent effective potential and the complete root set of the
//! reduced open-channel problem.
//!
//! The closed-channel modes supply simple poles with rank-one residues:
//! `V_eff(η) = V_00 + Σ_k u_k u_kᵀ / (η − p_k)`. Because
//! `dV_eff/dη = −Σ_k u_k u_kᵀ / (η − p_k)²` is negative semidefinite, every
//! sorted eigenvalue branch `λ_k(η)` of `h_g + V_eff(η)` is non-increasing
//! between consecutive poles, so `λ_k(η) − η` is strictly decreasing and each
//! (branch × interval) cell holds at most one crossing `λ_k(η) = η`. The
//! sweep brackets every cell and refines by bisection with a secant polish.
//! That redundancy — `N_q·N_ξ` roots against an `N_ξ`-dimensional reduced
//! operator — is the multivalued solution set everything downstream consumes.

use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::model::CoupledSystem;
use crate::spectral::{fix_sign, sym_eigen_sorted, TruncatedSpectrum};

#[derive(Debug, Error)]
pub enum EpError {
    #[error("η = {eta} is within the pole guard ({guard:e}) of pole {pole}")]
    PoleProximity { eta: f64, pole: f64, guard: f64 },
    #[error("root count mismatch: expected {expected}, found {found} (missed bracket or degenerate pole)")]
    RootCountMismatch { expected: usize, found: usize },
    #[error("bracketing failure: {context}")]
    BracketingFailure { context: &'static str },
    #[error("root η = {eta} coincides with pole {pole}; state unnormalizable")]
    StateAtPole { eta: f64, pole: f64 },
}

/// Numerical knobs of the reduction solver. All guard lengths are expressed
/// as fractions of the spectral span (`scale`), which is floored at 1.
#[derive(Debug, Clone)]
pub struct SolverParams {
    /// Evaluation exclusion zone around each pole, × scale.
    pub pole_guard_factor: f64,
    /// Poles closer than this (× scale) are merged into one group whose
    /// residue is the sum of the members' outer products.
    pub merge_gap_factor: f64,
    /// Residue vectors with norm below this (relative to the largest
    /// residue, floored at 1) are dropped; the pole re-enters as an exact
    /// root of the decoupled mode.
    pub residue_drop_tol: f64,
    /// Refinement target for `|λ_k(η) − η|`, × scale. Steep crossings stop
    /// at the conditioning limit of the bracket instead.
    pub root_residual_target: f64,
    /// Bisection iteration cap per root.
    pub max_bisections: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            pole_guard_factor: 1e-9,
            merge_gap_factor: 1e-7,
            residue_drop_tol: 1e-12,
            root_residual_target: 1e-10,
            max_bisections: 200,
        }
    }
}

/// A (possibly merged) pole of the effective potential.
#[derive(Debug, Clone)]
pub struct PoleGroup {
    pub location: f64,
    /// One residue vector per merged mode; the group's residue matrix is the
    /// sum of their outer products.
    pub residues: Vec<DVector<f64>>,
    /// Indices into the truncated spectrum's mode list.
    pub mode_indices: Vec<usize>,
    /// Exact pre-merge pole locations of the members.
    pub member_poles: Vec<f64>,
}

/// A pole whose residue vanished: its mode decouples from channel 0 and the
/// corresponding full-problem level sits exactly at the pole.
#[derive(Debug, Clone)]
pub struct DroppedPole {
    pub location: f64,
    pub mode_index: usize,
}

/// Memoisation policy for kernel evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalCachePolicy {
    #[default]
    None,
    /// Keep the most recent `(η, V_eff(η))` pair.
    LastEvaluation,
}

/// `V_eff(η) = V_00 + Σ u uᵀ / (η − p)` with merged near-degenerate poles.
#[derive(Debug)]
pub struct EffectivePotential {
    v00: DMatrix<f64>,
    groups: Vec<PoleGroup>,
    dropped: Vec<DroppedPole>,
    scale: f64,
    pole_guard: f64,
    cache_policy: EvalCachePolicy,
    cache_slot: Mutex<Option<(f64, DMatrix<f64>)>>,
}

impl Clone for EffectivePotential {
    fn clone(&self) -> Self {
        Self {
            v00: self.v00.clone(),
            groups: self.groups.clone(),
            dropped: self.dropped.clone(),
            scale: self.scale,
            pole_guard: self.pole_guard,
            cache_policy: self.cache_policy,
            cache_slot: Mutex::new(None),
        }
    }
}

impl EffectivePotential {
    pub fn base(&self) -> &DMatrix<f64> {
        &self.v00
    }

    pub fn groups(&self) -> &[PoleGroup] {
        &self.groups
    }

    pub fn dropped(&self) -> &[DroppedPole] {
        &self.dropped
    }

    pub fn pole_locations(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.location).collect()
    }

    /// Spectral span scale used for guards (floored at 1).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn pole_guard(&self) -> f64 {
        self.pole_guard
    }

    pub fn set_cache_policy(&mut self, policy: EvalCachePolicy) {
        self.cache_policy = policy;
        *self.cache_slot.lock().unwrap() = None;
    }

    /// Distance from η to the nearest pole group (infinite when pole-free).
    pub fn pole_distance(&self, eta: f64) -> f64 {
        self.groups
            .iter()
            .map(|g| (eta - g.location).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Fault-injection hook for verification campaigns: shifts the first
    /// pole by `delta × scale`, which must make the oracle comparison fail.
    /// Never used on the normal solve path.
    pub fn perturb_pole_for_testing(&mut self, delta: f64) {
        if let Some(group) = self.groups.first_mut() {
            group.location += delta * self.scale;
        }
        *self.cache_slot.lock().unwrap() = None;
    }

    /// Evaluates `V_eff(η)`, rejecting η inside the pole guard.
    pub fn kernel(&self, eta: f64) -> Result<DMatrix<f64>, EpError> {
        if let Some(group) = self
            .groups
            .iter()
            .find(|g| (eta - g.location).abs() < self.pole_guard)
        {
            return Err(EpError::PoleProximity {
                eta,
                pole: group.location,
                guard: self.pole_guard,
            });
        }
        Ok(self.kernel_unchecked(eta))
    }

    /// Evaluation without the guard check; the root sweep manages its own
    /// insets.
    pub(crate) fn kernel_unchecked(&self, eta: f64) -> DMatrix<f64> {
        if self.cache_policy == EvalCachePolicy::LastEvaluation {
            if let Some((cached_eta, cached)) = self.cache_slot.lock().unwrap().as_ref() {
                if *cached_eta == eta {
                    return cached.clone();
                }
            }
        }
        let mut v = self.v00.clone();
        for group in &self.groups {
            let inv = 1.0 / (eta - group.location);
            for u in &group.residues {
                v.ger(inv, u, u, 1.0);
            }
        }
        if self.cache_policy == EvalCachePolicy::LastEvaluation {
            *self.cache_slot.lock().unwrap() = Some((eta, v.clone()));
        }
        v
    }
}

/// Builds the effective potential from the closed-channel spectrum.
///
/// Pole locations are `η⁰_{ni} + ε_{n0}` (the closed-block eigenvalues);
/// residues are `u = Σ_{n≥1} V_{0n} ψ⁰[n]`.
pub fn build_ep(
    system: &CoupledSystem,
    truncated: &TruncatedSpectrum,
    params: &SolverParams,
) -> EffectivePotential {
    let v00 = system.coupling(0, 0).clone();
    let nq = system.n_channels();

    let mut residues: Vec<DVector<f64>> = Vec::with_capacity(truncated.len());
    for mode in truncated.modes() {
        let mut u = DVector::zeros(system.n_points());
        for n in 1..nq {
            u += system.coupling(0, n) * truncated.channel_slice(mode, n);
        }
        residues.push(u);
    }

    let max_norm = residues.iter().map(|u| u.norm()).fold(0.0, f64::max);
    let drop_threshold = params.residue_drop_tol * max_norm.max(1.0);

    let mut active: Vec<(usize, f64, DVector<f64>)> = Vec::new();
    let mut dropped = Vec::new();
    for (k, (mode, u)) in truncated.modes().iter().zip(residues).enumerate() {
        if u.norm() <= drop_threshold {
            dropped.push(DroppedPole {
                location: mode.pole(),
                mode_index: k,
            });
        } else {
            active.push((k, mode.pole(), u));
        }
    }
    active.sort_by(|a, b| a.1.total_cmp(&b.1));

    // Spectral span from the pole set and the background block.
    let (base_vals, _) = sym_eigen_sorted(&(system.background() + &v00));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in base_vals
        .iter()
        .copied()
        .chain(truncated.modes().iter().map(|m| m.pole()))
    {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let scale = (hi - lo).max(1.0);
    let merge_gap = params.merge_gap_factor * scale;

    let mut groups: Vec<PoleGroup> = Vec::new();
    for (mode_index, pole, u) in active {
        match groups.last_mut() {
            Some(last) if pole - *last.member_poles.last().unwrap() < merge_gap => {
                last.residues.push(u);
                last.mode_indices.push(mode_index);
                last.member_poles.push(pole);
            }
            _ => groups.push(PoleGroup {
                location: pole,
                residues: vec![u],
                mode_indices: vec![mode_index],
                member_poles: vec![pole],
            }),
        }
    }
    for g in &mut groups {
        g.location = g.member_poles.iter().sum::<f64>() / g.member_poles.len() as f64;
    }

    EffectivePotential {
        v00,
        groups,
        dropped,
        scale,
        pole_guard: params.pole_guard_factor * scale,
        cache_policy: EvalCachePolicy::None,
        cache_slot: Mutex::new(None),
    }
}

/// Sorted eigenvalues of `h_g + V_eff(η)`.
pub fn eigen_branches(
    ep: &EffectivePotential,
    h_g: &DMatrix<f64>,
    eta: f64,
) -> Result<Vec<f64>, EpError> {
    let v = ep.kernel(eta)?;
    let (values, _) = sym_eigen_sorted(&(h_g + v));
    Ok(values)
}

fn branch_values(ep: &EffectivePotential, h_g: &DMatrix<f64>, eta: f64) -> Vec<f64> {
    let v = ep.kernel_unchecked(eta);
    let (values, _) = sym_eigen_sorted(&(h_g + v));
    values
}

fn branch_pairs(ep: &EffectivePotential, h_g: &DMatrix<f64>, eta: f64) -> (Vec<f64>, DMatrix<f64>) {
    let v = ep.kernel_unchecked(eta);
    sym_eigen_sorted(&(h_g + v))
}

/// How a root was located.
#[derive(Debug, Clone, PartialEq)]
pub enum RootKind {
    /// Crossing of eigenvalue branch `index` inside `bracket`.
    Branch { index: usize, bracket: (f64, f64) },
    /// Re-inserted dropped pole: the mode decoupled from channel 0.
    DecoupledMode { mode: usize },
}

/// One self-consistent root of the reduced problem.
#[derive(Debug, Clone)]
pub struct RootRecord {
    pub eta: f64,
    /// Channel-0 eigenvector at the root (zero for decoupled modes).
    pub psi0: DVector<f64>,
    pub kind: RootKind,
    /// Achieved `|λ_k(η) − η|`.
    pub residual: f64,
}

/// Finds every self-consistent root of the reduced problem on the open channel.
///
/// The count must come out to `N_ξ` plus the number of live poles counted
/// with multiplicity; anything else is a hard error (a missed bracket or an
/// unhandled degeneracy). The sweep retries with tighter insets before
/// giving up. Modes whose residue vanished do not produce crossings here —
/// [`reconciled_roots`] re-inserts them when the full multiset is wanted.
pub fn find_all_roots(
    ep: &EffectivePotential,
    h_g: &DMatrix<f64>,
    params: &SolverParams,
) -> Result<Vec<RootRecord>, EpError> {
    let n_xi = h_g.nrows();
    let rank_total: usize = ep.groups.iter().map(|g| g.residues.len()).sum();
    let expected_crossings = n_xi + rank_total;

    let mut crossings = if ep.groups.is_empty() {
        constant_ep_roots(ep, h_g)
    } else {
        let mut best: Option<Vec<RootRecord>> = None;
        for shrink in [1.0, 1e-3, 1e-6] {
            let guard = (ep.pole_guard * shrink).max(f64::EPSILON * ep.scale * 4.0);
            let found = sweep(ep, h_g, guard, params)?;
            if found.len() == expected_crossings {
                best = Some(found);
                break;
            }
            if best.as_ref().is_none_or(|b| found.len() > b.len()) {
                best = Some(found);
            }
        }
        let best = best.expect("at least one sweep attempt");
        if best.len() != expected_crossings {
            return Err(EpError::RootCountMismatch {
                expected: expected_crossings,
                found: best.len(),
            });
        }
        best
    };

    crossings.sort_by(|a, b| a.eta.total_cmp(&b.eta).then_with(|| kind_order(a).cmp(&kind_order(b))));
    Ok(crossings)
}

/// Root list augmented with the dropped-pole levels, completing the multiset
/// to `N_q·N_ξ`: a vanished residue means the mode decoupled from channel 0
/// and the full problem holds an eigenvalue exactly at the pole.
pub fn reconciled_roots(ep: &EffectivePotential, roots: &[RootRecord]) -> Vec<RootRecord> {
    let n_xi = ep.v00.nrows();
    let mut all = roots.to_vec();
    for d in &ep.dropped {
        all.push(RootRecord {
            eta: d.location,
            psi0: DVector::zeros(n_xi),
            kind: RootKind::DecoupledMode { mode: d.mode_index },
            residual: 0.0,
        });
    }
    all.sort_by(|a, b| a.eta.total_cmp(&b.eta).then_with(|| kind_order(a).cmp(&kind_order(b))));
    all
}

fn kind_order(r: &RootRecord) -> usize {
    match r.kind {
        RootKind::Branch { index, .. } => index,
        RootKind::DecoupledMode { mode } => usize::MAX - mode,
    }
}

/// With no active poles the EP is constant and the roots are exactly the
/// eigenpairs of `h_g + V_00`.
fn constant_ep_roots(ep: &EffectivePotential, h_g: &DMatrix<f64>) -> Vec<RootRecord> {
    let (values, vectors) = sym_eigen_sorted(&(h_g + &ep.v00));
    values
        .iter()
        .enumerate()
        .map(|(k, &eta)| RootRecord {
            eta,
            psi0: vectors.column(k).clone_owned(),
            kind: RootKind::Branch {
                index: k,
                bracket: (eta, eta),
            },
            residual: 0.0,
        })
        .collect()
}

fn sweep(
    ep: &EffectivePotential,
    h_g: &DMatrix<f64>,
    guard: f64,
    params: &SolverParams,
) -> Result<Vec<RootRecord>, EpError> {
    let n_xi = h_g.nrows();
    let locs: Vec<f64> = ep.groups.iter().map(|g| g.location).collect();
    let m = locs.len();
    let mut roots = Vec::new();

    let f_at = |eta: f64| -> Vec<f64> {
        branch_values(ep, h_g, eta)
            .into_iter()
            .map(|lambda| lambda - eta)
            .collect()
    };

    // Leftmost interval (−∞, p_1): every branch tends to +∞ on the far left,
    // so branch k holds a root iff f_k just left of p_1 is negative.
    {
        let a = locs[0] - guard;
        let fa = f_at(a);
        let needed: Vec<usize> = (0..n_xi).filter(|&k| fa[k] < 0.0).collect();
        for (k, &f) in fa.iter().enumerate() {
            if f == 0.0 {
                roots.push(refine_endpoint_root(ep, h_g, k, a));
            }
        }
        if !needed.is_empty() {
            let mut step = ep.scale;
            let mut left = locs[0] - step;
            let mut fl = f_at(left);
            let mut iterations = 0;
            while needed.iter().any(|&k| fl[k] <= 0.0) {
                step *= 2.0;
                left = locs[0] - step;
                fl = f_at(left);
                iterations += 1;
                if iterations > 120 {
                    return Err(EpError::BracketingFailure {
                        context: "left expansion did not find positive branch values",
                    });
                }
            }
            for &k in &needed {
                roots.push(refine(ep, h_g, k, left, a, fl[k], fa[k], params));
            }
        }
    }

    // Interior intervals.
    for i in 0..m.saturating_sub(1) {
        let a = locs[i] + guard;
        let b = locs[i + 1] - guard;
        if b <= a {
            continue;
        }
        let fa = f_at(a);
        let fb = f_at(b);
        for (k, (&fak, &fbk)) in fa.iter().zip(&fb).enumerate() {
            if fak == 0.0 {
                roots.push(refine_endpoint_root(ep, h_g, k, a));
            } else if fbk == 0.0 {
                roots.push(refine_endpoint_root(ep, h_g, k, b));
            } else if fak > 0.0 && fbk < 0.0 {
                roots.push(refine(ep, h_g, k, a, b, fak, fbk, params));
            }
        }
    }

    // Rightmost interval (p_M, +∞): every branch tends to −∞ on the far
    // right, so branch k holds a root iff f_k just right of p_M is positive.
    {
        let b = locs[m - 1] + guard;
        let fb = f_at(b);
        let needed: Vec<usize> = (0..n_xi).filter(|&k| fb[k] > 0.0).collect();
        for (k, &f) in fb.iter().enumerate() {
            if f == 0.0 {
                roots.push(refine_endpoint_root(ep, h_g, k, b));
            }
        }
        if !needed.is_empty() {
            let mut step = ep.scale;
            let mut right = locs[m - 1] + step;
            let mut fr = f_at(right);
            let mut iterations = 0;
            while needed.iter().any(|&k| fr[k] >= 0.0) {
                step *= 2.0;
                right = locs[m - 1] + step;
                fr = f_at(right);
                iterations += 1;
                if iterations > 120 {
                    return Err(EpError::BracketingFailure {
                        context: "right expansion did not find negative branch values",
                    });
                }
            }
            for &k in &needed {
                roots.push(refine(ep, h_g, k, b, right, fb[k], fr[k], params));
            }
        }
    }

    Ok(roots)
}

fn refine_endpoint_root(
    ep: &EffectivePotential,
    h_g: &DMatrix<f64>,
    branch: usize,
    eta: f64,
) -> RootRecord {
    let (values, vectors) = branch_pairs(ep, h_g, eta);
    RootRecord {
        eta,
        psi0: vectors.column(branch).clone_owned(),
        kind: RootKind::Branch {
            index: branch,
            bracket: (eta, eta),
        },
        residual: (values[branch] - eta).abs(),
    }
}

/// Bisection to near machine width, then a short secant polish inside the
/// final bracket; keeps whichever probe achieved the smallest residual.
#[allow(clippy::too_many_arguments)]
fn refine(
    ep: &EffectivePotential,
    h_g: &DMatrix<f64>,
    branch: usize,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    params: &SolverParams,
) -> RootRecord {
    let bracket = (lo, hi);
    let target = params.root_residual_target * ep.scale;
    let f = |eta: f64| branch_values(ep, h_g, eta)[branch] - eta;

    let mut best = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    for _ in 0..params.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm > 0.0 {
            lo = mid;
            f_lo = fm;
        } else if fm < 0.0 {
            hi = mid;
            f_hi = fm;
        } else {
            best = (mid, 0.0);
            break;
        }
        if best.1.abs() <= target && (hi - lo) <= 1e-12 * ep.scale {
            break;
        }
    }

    // Secant polish within the bracket.
    if best.1 != 0.0 {
        let (mut x0, mut fx0) = (lo, f_lo);
        let (mut x1, mut fx1) = (hi, f_hi);
        for _ in 0..6 {
            let denom = fx1 - fx0;
            if denom == 0.0 {
                break;
            }
            let x2 = x1 - fx1 * (x1 - x0) / denom;
            if !(x2 > lo && x2 < hi) || !x2.is_finite() {
                break;
            }
            let fx2 = f(x2);
            if fx2.abs() < best.1.abs() {
                best = (x2, fx2);
            }
            x0 = x1;
            fx0 = fx1;
            x1 = x2;
            fx1 = fx2;
            if best.1.abs() <= target {
                break;
            }
        }
    }

    let eta = best.0;
    let (values, vectors) = branch_pairs(ep, h_g, eta);
    RootRecord {
        eta,
        psi0: vectors.column(branch).clone_owned(),
        kind: RootKind::Branch { index: branch, bracket },
        residual: (values[branch] - eta).abs(),
    }
}

/// Sign-normalizes an externally supplied vector the same way the solvers do.
pub fn normalize_sign(v: &mut DVector<f64>) {
    fix_sign(v);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::solve_truncated;
    use crate::test_fixtures::{d1_system, diagonal_decoupled_system, random_dense_system, twin_well_system};
    use approx::assert_relative_eq;

    fn default_ep(sys: &CoupledSystem) -> (EffectivePotential, SolverParams, TruncatedSpectrum) {
        let params = SolverParams::default();
        let truncated = solve_truncated(sys).unwrap();
        let ep = build_ep(sys, &truncated, &params);
        (ep, params, truncated)
    }

    #[test]
    fn d1_single_pole_and_residue() {
        let sys = d1_system();
        let (ep, ..) = default_ep(&sys);
        assert_eq!(ep.groups().len(), 1);
        assert_eq!(ep.dropped().len(), 0);
        let group = &ep.groups()[0];
        assert_eq!(group.location, 1.0);
        assert_eq!(group.residues.len(), 1);
        assert_relative_eq!(group.residues[0][0], 0.5, max_relative = 1e-15);
        // V_eff(2) = 0.25/(2−1)
        let v = ep.kernel(2.0).unwrap();
        assert_relative_eq!(v[(0, 0)], 0.25, max_relative = 1e-15);
    }

    #[test]
    fn d1_branch_value_at_two() {
        let sys = d1_system();
        let (ep, ..) = default_ep(&sys);
        let branches = eigen_branches(&ep, sys.background(), 2.0).unwrap();
        assert_eq!(branches.len(), 1);
        assert_relative_eq!(branches[0], 0.25, max_relative = 1e-15);
    }

    #[test]
    fn d1_roots_are_hand_quadratic_solutions() {
        let sys = d1_system();
        let (ep, params, _) = default_ep(&sys);
        let roots = find_all_roots(&ep, sys.background(), &params).unwrap();
        assert_eq!(roots.len(), 2);
        let sqrt2 = 2.0_f64.sqrt();
        assert!((roots[0].eta - (1.0 - sqrt2) / 2.0).abs() <= 1e-10);
        assert!((roots[1].eta - (1.0 + sqrt2) / 2.0).abs() <= 1e-10);
        for r in &roots {
            assert!(r.residual <= 1e-10, "residual {}", r.residual);
            assert_relative_eq!(r.psi0.norm(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_coupling_ep_is_constant_and_roots_are_base_levels() {
        // No interaction, no redundance: the root list is the N_ξ levels of
        // h_g + V_00; the decoupled levels only re-enter via reconciliation.
        let sys = diagonal_decoupled_system();
        let (ep, params, truncated) = default_ep(&sys);
        assert!(ep.groups().is_empty());
        assert_eq!(ep.dropped().len(), truncated.len());
        for eta in [-3.0, 0.1, 2.7, 11.0] {
            let v = ep.kernel(eta).unwrap();
            assert_eq!(&v, sys.coupling(0, 0));
        }
        // ... so the branches are constant in η.
        let a = eigen_branches(&ep, sys.background(), -3.0).unwrap();
        let b = eigen_branches(&ep, sys.background(), 11.0).unwrap();
        assert_eq!(a, b);
        let roots = find_all_roots(&ep, sys.background(), &params).unwrap();
        assert_eq!(roots.len(), sys.n_points());
        let (expected, _) = sym_eigen_sorted(&(sys.background() + sys.coupling(0, 0)));
        for (got, want) in roots.iter().map(|r| r.eta).zip(expected.iter()) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
        let all = reconciled_roots(&ep, &roots);
        assert_eq!(all.len(), sys.full_dim());
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn random_kernel_matches_independent_double_sum() {
        // Independent evaluator: explicit loops over (channel, mode) with the
        // η − η⁰ − ε_{n0} denominator bookkeeping, no shared code with
        // EffectivePotential::kernel.
        let sys = random_dense_system(3, 8, 0xDD5);
        let (ep, _, truncated) = default_ep(&sys);
        let n_xi = sys.n_points();
        let nq = sys.n_channels();

        let locs = ep.pole_locations();
        let lo = locs.first().copied().unwrap();
        let hi = locs.last().copied().unwrap();
        let mut probes = vec![lo - 1.3, hi + 1.7];
        for w in locs.windows(2) {
            probes.push(0.5 * (w[0] + w[1]));
        }
        let probes: Vec<f64> = probes
            .into_iter()
            .filter(|&eta| ep.pole_distance(eta) > 1e-3)
            .take(5)
            .collect();
        assert!(probes.len() >= 3);

        for &eta in &probes {
            let got = ep.kernel(eta).unwrap();
            let mut expected = vec![vec![0.0_f64; n_xi]; n_xi];
            for i in 0..n_xi {
                for j in 0..n_xi {
                    expected[i][j] = sys.coupling(0, 0)[(i, j)];
                }
            }
            for mode in truncated.modes() {
                let mut r = vec![0.0_f64; n_xi];
                for n in 1..nq {
                    let slice = truncated.channel_slice(mode, n);
                    for i in 0..n_xi {
                        for l in 0..n_xi {
                            r[i] += sys.coupling(0, n)[(i, l)] * slice[l];
                        }
                    }
                }
                let denom = eta - mode.eta0() - mode.shift;
                for i in 0..n_xi {
                    for j in 0..n_xi {
                        expected[i][j] += r[i] * r[j] / denom;
                    }
                }
            }
            let scale = got.amax().max(1.0);
            for i in 0..n_xi {
                for j in 0..n_xi {
                    assert!(
                        (got[(i, j)] - expected[i][j]).abs() <= 1e-10 * scale,
                        "kernel mismatch at eta={eta}, ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_is_symmetric_at_probes() {
        let sys = random_dense_system(4, 6, 31);
        let (ep, ..) = default_ep(&sys);
        for &eta in &[-7.3, 0.123, 5.81, 19.0] {
            if ep.pole_distance(eta) <= ep.pole_guard() {
                continue;
            }
            let v = ep.kernel(eta).unwrap();
            let asym = (&v - v.transpose()).amax();
            assert!(asym <= 1e-12 * v.amax().max(1.0));
        }
    }

    #[test]
    fn branches_non_increasing_between_poles() {
        let sys = random_dense_system(3, 8, 0xFD1);
        let (ep, ..) = default_ep(&sys);
        let locs = ep.pole_locations();
        // widest interior gap
        let (mut a, mut b) = (locs[0], locs[1]);
        for w in locs.windows(2) {
            if w[1] - w[0] > b - a {
                a = w[0];
                b = w[1];
            }
        }
        let gap = b - a;
        let h = gap * 1e-6;
        for t in 1..=10 {
            let eta = a + gap * t as f64 / 11.0;
            let up = eigen_branches(&ep, sys.background(), eta + h).unwrap();
            let dn = eigen_branches(&ep, sys.background(), eta - h).unwrap();
            for k in 0..up.len() {
                let slope = (up[k] - dn[k]) / (2.0 * h);
                assert!(slope <= 1e-8, "branch {k} slope {slope} at eta {eta}");
            }
        }
    }

    #[test]
    fn pole_proximity_is_rejected() {
        let sys = d1_system();
        let (ep, ..) = default_ep(&sys);
        let err = eigen_branches(&ep, sys.background(), 1.0 + 0.1 * ep.pole_guard());
        assert!(matches!(err, Err(EpError::PoleProximity { .. })));
    }

    #[test]
    fn exactly_degenerate_poles_merge_and_roots_stay_complete() {
        let sys = twin_well_system();
        let (ep, params, _) = default_ep(&sys);
        assert!(ep.groups().iter().all(|g| g.residues.len() == 2));
        let roots = find_all_roots(&ep, sys.background(), &params).unwrap();
        assert_eq!(roots.len(), sys.full_dim());
    }

    #[test]
    fn pole_hugging_root_is_a_hard_count_mismatch() {
        // With V01 = 1e-9 the upper root sits ~1e-18 from the pole, below
        // anything f64 bracketing can resolve; the contract is a hard error,
        // not a silently short root list.
        let grid = crate::model::GridSpec::new(vec![0.0], vec![1.0], "pt").unwrap();
        let channels = crate::model::ChannelSet::new(vec![0.0, 1.0], None).unwrap();
        let z = DMatrix::zeros(1, 1);
        let v01 = DMatrix::from_element(1, 1, 1e-9);
        let sys = CoupledSystem::new(
            grid,
            channels,
            z.clone(),
            vec![z.clone(), v01.clone(), v01, z],
        )
        .unwrap();
        let (ep, params, _) = default_ep(&sys);
        assert_eq!(ep.groups().len(), 1, "residue above the drop tolerance stays live");
        let err = find_all_roots(&ep, sys.background(), &params);
        assert!(
            matches!(err, Err(EpError::RootCountMismatch { expected: 2, found: 1 })),
            "{err:?}"
        );
    }

    #[test]
    fn last_evaluation_cache_returns_identical_kernels() {
        let sys = random_dense_system(3, 5, 4);
        let (mut ep, ..) = default_ep(&sys);
        ep.set_cache_policy(EvalCachePolicy::LastEvaluation);
        let a = ep.kernel(4.25).unwrap();
        let b = ep.kernel(4.25).unwrap();
        assert_eq!(a, b);
        let c = ep.kernel(5.5).unwrap();
        assert_ne!(a, c);
    }
}
