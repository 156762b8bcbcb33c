//! CSV emission and re-ingestion.
//!
//! Floats are written with 17 significant digits ('.' decimal), enough for
//! every finite f64 to round-trip bit-faithfully, which the oracle
//! comparisons on re-ingested artifacts rely on.

use std::io::{self, Write};

use nalgebra::DMatrix;

use crate::beat::BeatTrajectory;
use crate::ep::{RootKind, RootRecord};
use crate::kinematics::{Constants, KinematicState};
use crate::realisation::RealisationSet;
use crate::spectral::{FullSpectrum, TruncatedSpectrum};
use crate::state::AssembledState;

/// 17-significant-digit scientific rendering; bit-faithful on re-parse.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_f64(s: &str) -> Result<f64, std::num::ParseFloatError> {
    s.trim().parse()
}

fn write_row<W: Write>(w: &mut W, fields: &[String]) -> io::Result<()> {
    writeln!(w, "{}", fields.join(","))
}

pub fn write_matrix<W: Write>(w: &mut W, matrix: &DMatrix<f64>) -> io::Result<()> {
    writeln!(w, "row,col,value")?;
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            write_row(w, &[i.to_string(), j.to_string(), fmt_f64(matrix[(i, j)])])?;
        }
    }
    Ok(())
}

pub fn write_full_spectrum<W: Write>(w: &mut W, spectrum: &FullSpectrum) -> io::Result<()> {
    writeln!(w, "index,eigenvalue,residual")?;
    for (i, (&e, &r)) in spectrum
        .eigenvalues()
        .iter()
        .zip(spectrum.residuals())
        .enumerate()
    {
        write_row(w, &[i.to_string(), fmt_f64(e), fmt_f64(r)])?;
    }
    Ok(())
}

pub fn write_truncated_spectrum<W: Write>(w: &mut W, spectrum: &TruncatedSpectrum) -> io::Result<()> {
    writeln!(w, "index,pole,eta0,channel")?;
    for (i, mode) in spectrum.modes().iter().enumerate() {
        write_row(
            w,
            &[
                i.to_string(),
                fmt_f64(mode.pole()),
                fmt_f64(mode.eta0()),
                mode.channel.to_string(),
            ],
        )?;
    }
    Ok(())
}

/// Root table; `energy = η + ε_0` is the full-problem eigenvalue the root
/// corresponds to.
pub fn write_roots<W: Write>(w: &mut W, roots: &[RootRecord], epsilon0: f64) -> io::Result<()> {
    writeln!(w, "index,kind,branch_or_mode,eta,energy,residual")?;
    for (i, root) in roots.iter().enumerate() {
        let (kind, which) = match &root.kind {
            RootKind::Branch { index, .. } => ("branch", *index),
            RootKind::DecoupledMode { mode } => ("decoupled", *mode),
        };
        write_row(
            w,
            &[
                i.to_string(),
                kind.to_string(),
                which.to_string(),
                fmt_f64(root.eta),
                fmt_f64(root.eta + epsilon0),
                fmt_f64(root.residual),
            ],
        )?;
    }
    Ok(())
}

/// Per-root state and density tables over (channel, ξ).
pub fn write_states<W: Write>(
    w: &mut W,
    states: &[AssembledState],
    grid_points: &[f64],
) -> io::Result<()> {
    writeln!(w, "root,channel,xi,psi,rho")?;
    for (r, state) in states.iter().enumerate() {
        for (n, (component, density)) in state.components.iter().zip(&state.density).enumerate() {
            for (j, &xi) in grid_points.iter().enumerate() {
                write_row(
                    w,
                    &[
                        r.to_string(),
                        n.to_string(),
                        fmt_f64(xi),
                        fmt_f64(component[j]),
                        fmt_f64(density[j]),
                    ],
                )?;
            }
        }
    }
    Ok(())
}

/// Realisation table. Members are ';'-separated root indices.
pub fn write_realisations<W: Write>(w: &mut W, set: &RealisationSet) -> io::Result<()> {
    writeln!(w, "group,members,centre,alpha_counting,alpha_born")?;
    for (g, group) in set.groups().iter().enumerate() {
        let members = group
            .members
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let born = set
            .alpha_born
            .as_ref()
            .map(|a| fmt_f64(a[g]))
            .unwrap_or_default();
        write_row(
            w,
            &[
                g.to_string(),
                members,
                fmt_f64(group.centre),
                fmt_f64(set.alpha_counting[g]),
                born,
            ],
        )?;
    }
    Ok(())
}

/// Line-delimited event records.
pub fn write_trajectory<W: Write>(w: &mut W, traj: &BeatTrajectory) -> io::Result<()> {
    writeln!(w, "step,time,index,position,action")?;
    for ev in traj.events() {
        write_row(
            w,
            &[
                ev.step.to_string(),
                fmt_f64(ev.time),
                ev.index.to_string(),
                fmt_f64(ev.position),
                fmt_f64(ev.action),
            ],
        )?;
    }
    Ok(())
}

pub fn write_kinematics_sweep<W: Write>(
    w: &mut W,
    states: &[KinematicState],
    constants: &Constants,
) -> io::Result<()> {
    writeln!(
        w,
        "beta,v,gamma,e0,e,m,p,nu0,nu,n_freq,tau0,t_period,tau,lambda_b,lambda_b0,nu_b,nu_b0,max_identity_residual"
    )?;
    for s in states {
        let res = crate::kinematics::identity_residuals(s, constants);
        write_row(
            w,
            &[
                fmt_f64(s.beta),
                fmt_f64(s.v),
                fmt_f64(s.gamma),
                fmt_f64(s.e0),
                fmt_f64(s.e),
                fmt_f64(s.m),
                fmt_f64(s.p),
                fmt_f64(s.nu0),
                fmt_f64(s.nu),
                fmt_f64(s.n_freq),
                fmt_f64(s.tau0),
                fmt_f64(s.t_period),
                fmt_f64(s.tau),
                s.lambda_b.map(fmt_f64).unwrap_or_default(),
                s.lambda_b0.map(fmt_f64).unwrap_or_default(),
                fmt_f64(s.nu_b),
                fmt_f64(s.nu_b0),
                fmt_f64(res.max_abs()),
            ],
        )?;
    }
    Ok(())
}

/// Minimal CSV reader for the artifacts written here (no quoting or
/// embedded separators in this schema).
pub fn read_csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|f| f.to_string()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trips_bitwise() {
        for &x in &[
            0.0,
            -0.0,
            1.0,
            (1.0 + 2.0_f64.sqrt()) / 2.0,
            1.2356e20,
            -9.109_383_701_5e-31,
            f64::MIN_POSITIVE,
            std::f64::consts::PI,
        ] {
            let back = parse_f64(&fmt_f64(x)).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn spectrum_csv_round_trips() {
        let sys = crate::test_fixtures::d1_system();
        let spectrum = crate::spectral::solve_full(&sys);
        let mut buf = Vec::new();
        write_full_spectrum(&mut buf, &spectrum).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows = read_csv(&text);
        assert_eq!(rows[0], vec!["index", "eigenvalue", "residual"]);
        for (i, row) in rows[1..].iter().enumerate() {
            let val = parse_f64(&row[1]).unwrap();
            assert_eq!(val.to_bits(), spectrum.eigenvalues()[i].to_bits());
        }
    }
}
