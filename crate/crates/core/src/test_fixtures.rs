//! Shared instances for unit tests.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{
    BackgroundConfig, ChannelConfig, CouplingBlock, CouplingConfig, GridConfig, SystemConfig,
};
use crate::model::{ChannelSet, CoupledSystem, GridSpec};

/// Two channels, one grid point, ε = (0, 1), V01 = 0.5: the hand-checkable
/// instance whose full spectrum is {(1 ± √2)/2}.
pub fn d1_config() -> SystemConfig {
    SystemConfig {
        label: Some("D1".into()),
        grid: GridConfig {
            points: Some(vec![0.0]),
            weights: Some(vec![1.0]),
            min: None,
            max: None,
            n: None,
            label: None,
        },
        channels: ChannelConfig {
            energies: vec![0.0, 1.0],
            labels: None,
            open_channel: None,
        },
        background: BackgroundConfig::Zero,
        coupling: CouplingConfig::Table {
            blocks: vec![CouplingBlock {
                row: 0,
                col: 1,
                diagonal: Some(vec![0.5]),
                rows: None,
            }],
        },
    }
}

pub fn d1_system() -> CoupledSystem {
    crate::config::build_system(&d1_config()).unwrap()
}

/// Three channels with all couplings zero and a diagonal background.
pub fn diagonal_decoupled_system() -> CoupledSystem {
    let grid = GridSpec::new(vec![-1.0, 0.0, 1.0, 2.0], vec![1.0; 4], "diag").unwrap();
    let channels = ChannelSet::new(vec![0.0, 1.5, 2.5], None).unwrap();
    let h_g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.3, -0.2, 0.7, 1.1]));
    let z = DMatrix::zeros(4, 4);
    let couplings = vec![z.clone(); 9];
    CoupledSystem::new(grid, channels, h_g, couplings).unwrap()
}

/// Dense random instance with full (non-diagonal) couplings.
pub fn random_dense_system(nq: usize, n_xi: usize, seed: u64) -> CoupledSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = GridSpec::uniform(-2.0, 2.0, n_xi, "rand").unwrap();
    let mut energies = vec![rng.random_range(-0.5..0.5)];
    for _ in 1..nq {
        let last = *energies.last().unwrap();
        energies.push(last + rng.random_range(0.6..1.4));
    }
    let channels = ChannelSet::new(energies, None).unwrap();

    let mut h_g = DMatrix::zeros(n_xi, n_xi);
    for i in 0..n_xi {
        for j in 0..=i {
            let v = rng.random_range(-0.4..0.4);
            h_g[(i, j)] = v;
            h_g[(j, i)] = v;
        }
    }

    let mut couplings = vec![DMatrix::zeros(n_xi, n_xi); nq * nq];
    let scale = 0.35 / (n_xi as f64).sqrt();
    for n in 0..nq {
        for m in n..nq {
            let mut block = DMatrix::zeros(n_xi, n_xi);
            if n == m {
                for i in 0..n_xi {
                    for j in 0..=i {
                        let v = rng.random_range(-scale..scale);
                        block[(i, j)] = v;
                        block[(j, i)] = v;
                    }
                }
            } else {
                for i in 0..n_xi {
                    for j in 0..n_xi {
                        block[(i, j)] = rng.random_range(-scale..scale);
                    }
                }
            }
            couplings[m * nq + n] = block.transpose();
            couplings[n * nq + m] = block;
        }
    }
    CoupledSystem::new(grid, channels, h_g, couplings).unwrap()
}

/// Two identical, completely disconnected three-point wells. Exact twin
/// structure makes every eigenvalue (and every pole) exactly doubly
/// degenerate, with eigenvectors supported on one well each.
pub fn twin_well_system() -> CoupledSystem {
    let grid = GridSpec::new(
        vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0],
        vec![1.0; 6],
        "twin",
    )
    .unwrap();
    let channels = ChannelSet::new(vec![0.0, 1.0], None).unwrap();

    // One well: symmetric 3x3 block; the second well repeats it bit-for-bit.
    let well = [[-0.4, 0.15, 0.0], [0.15, -0.1, 0.15], [0.0, 0.15, 0.3]];
    let mut h_g = DMatrix::zeros(6, 6);
    for i in 0..3 {
        for j in 0..3 {
            h_g[(i, j)] = well[i][j];
            h_g[(3 + i, 3 + j)] = well[i][j];
        }
    }

    let coupling_diag = [0.45, 0.6, 0.35];
    let mut v01 = DMatrix::zeros(6, 6);
    for i in 0..3 {
        v01[(i, i)] = coupling_diag[i];
        v01[(3 + i, 3 + i)] = coupling_diag[i];
    }
    let z = DMatrix::zeros(6, 6);
    let couplings = vec![z.clone(), v01.clone(), v01, z];
    CoupledSystem::new(grid, channels, h_g, couplings).unwrap()
}
